#include "treechild/scheduler.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <thread>

namespace treechild {

namespace {

struct Shared {
    std::atomic<bool> cancel{false};
    std::atomic<bool> timed_out{false};
    std::atomic<int> outstanding{1}; // live work units: local stacks + items in flight

    std::mutex result_mu;
    std::optional<CherryPickingSequence> result;

    struct RequestSlot {
        std::atomic<int> requester{-1};
        char pad[64 - sizeof(std::atomic<int>)];
    };
    struct Response {
        std::atomic<int> state{0}; // 0 pending, 1 denial, 2 item
        WorkItem item;
    };
    std::vector<std::unique_ptr<RequestSlot>> slots;
    std::vector<std::unique_ptr<Response>> responses;

    std::mutex merge_mu;
};

void answer_request(Shared& sh, int me, Engine* engine) {
    int req = sh.slots[static_cast<size_t>(me)]->requester.load(std::memory_order_acquire);
    if (req < 0) return;
    auto& resp = *sh.responses[static_cast<size_t>(req)];
    std::optional<WorkItem> item;
    if (engine) item = engine->try_extract_work();
    if (item) {
        sh.outstanding.fetch_add(1, std::memory_order_relaxed);
        resp.item = std::move(*item);
        resp.state.store(2, std::memory_order_release);
    } else {
        resp.state.store(1, std::memory_order_release);
    }
    sh.slots[static_cast<size_t>(me)]->requester.store(-1, std::memory_order_release);
}

} // namespace

ParallelResult run_parallel(const Instance& inst, int k, const SolveOptions& opts,
                            SearchStats& stats,
                            std::optional<std::chrono::steady_clock::time_point> deadline,
                            std::vector<std::vector<Pair>>* prefix_log) {
    const int workers = std::max(1, opts.workers);

    if (workers == 1) {
        SearchState state(inst);
        Engine engine(state, k, opts.use_rbe, opts.poll_interval, &stats, prefix_log);
        engine.seed_root();
        Engine::PollFn poll;
        if (deadline)
            poll = [&](Engine&) { return std::chrono::steady_clock::now() >= *deadline; };
        EngineStatus st = engine.run(poll);
        ParallelResult res;
        if (st == EngineStatus::Found) {
            res.status = ParallelResult::Status::Found;
            res.seq = engine.result();
        } else if (st == EngineStatus::Aborted) {
            res.status = ParallelResult::Status::TimedOut;
        }
        return res;
    }

    Shared sh;
    for (int i = 0; i < workers; ++i) {
        sh.slots.push_back(std::make_unique<Shared::RequestSlot>());
        sh.responses.push_back(std::make_unique<Shared::Response>());
    }

    auto worker = [&](int me) {
        SearchStats local_stats;
        std::vector<std::vector<Pair>> local_prefixes;
        std::vector<std::vector<Pair>>* plog = prefix_log ? &local_prefixes : nullptr;

        std::optional<SearchState> state;
        std::optional<Engine> engine;
        bool has_work = false;

        if (me == 0) {
            state.emplace(inst);
            engine.emplace(*state, k, opts.use_rbe, opts.poll_interval, &local_stats, plog);
            engine->seed_root();
            has_work = true;
        }

        Engine::PollFn poll = [&](Engine& eng) -> bool {
            if (sh.cancel.load(std::memory_order_relaxed)) return true;
            if (deadline && std::chrono::steady_clock::now() >= *deadline) {
                sh.timed_out.store(true, std::memory_order_relaxed);
                sh.cancel.store(true, std::memory_order_relaxed);
                return true;
            }
            answer_request(sh, me, &eng);
            return false;
        };

        int next_donor = (me + 1) % workers;
        while (true) {
            if (has_work) {
                EngineStatus st = engine->run(poll);
                has_work = false;
                if (st == EngineStatus::Found) {
                    {
                        std::lock_guard<std::mutex> lk(sh.result_mu);
                        if (!sh.result) sh.result = engine->result();
                    }
                    sh.cancel.store(true, std::memory_order_release);
                    break;
                }
                if (st == EngineStatus::Aborted) break;
                sh.outstanding.fetch_sub(1, std::memory_order_relaxed);
                continue;
            }

            if (sh.cancel.load(std::memory_order_acquire)) break;
            if (sh.outstanding.load(std::memory_order_acquire) == 0) break;
            answer_request(sh, me, nullptr); // idle: always deny

            int d = next_donor;
            next_donor = (next_donor + 1) % workers;
            if (d == me) {
                std::this_thread::yield();
                continue;
            }
            auto& resp = *sh.responses[static_cast<size_t>(me)];
            resp.state.store(0, std::memory_order_relaxed);
            int expect = -1;
            if (!sh.slots[static_cast<size_t>(d)]->requester.compare_exchange_strong(
                    expect, me, std::memory_order_acq_rel))
                continue;

            while (true) {
                int s = resp.state.load(std::memory_order_acquire);
                if (s == 1) break;
                if (s == 2) {
                    WorkItem item = std::move(resp.item);
                    state.emplace(inst);
                    engine.emplace(*state, k, opts.use_rbe, opts.poll_interval, &local_stats,
                                   plog);
                    if (engine->seed_workitem(item)) {
                        has_work = true;
                    } else {
                        sh.outstanding.fetch_sub(1, std::memory_order_relaxed);
                    }
                    break;
                }
                if (sh.cancel.load(std::memory_order_acquire)) break;
                if (sh.outstanding.load(std::memory_order_acquire) == 0) break;
                std::this_thread::yield();
            }
        }

        std::lock_guard<std::mutex> lk(sh.merge_mu);
        stats.merge(local_stats);
        if (prefix_log)
            prefix_log->insert(prefix_log->end(), local_prefixes.begin(), local_prefixes.end());
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    for (int i = 0; i < workers; ++i) threads.emplace_back(worker, i);
    for (auto& t : threads) t.join();

    ParallelResult res;
    if (sh.result) {
        res.status = ParallelResult::Status::Found;
        res.seq = std::move(sh.result);
    } else if (sh.timed_out.load()) {
        res.status = ParallelResult::Status::TimedOut;
    }
    return res;
}

} // namespace treechild
