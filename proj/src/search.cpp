#include "treechild/search.hpp"

#include <cassert>
#include <stdexcept>

#include "treechild/clusters.hpp"
#include "treechild/scheduler.hpp"

namespace treechild {

Engine::Engine(SearchState& state, int k, bool use_rbe, int poll_interval, SearchStats* stats,
               std::vector<std::vector<Pair>>* prefix_log)
    : state_(state), k_(k), use_rbe_(use_rbe), poll_interval_(std::max(1, poll_interval)),
      stats_(stats), prefix_log_(prefix_log) {}

void Engine::push_frame() {
    Frame f;
    f.entry_cp = state_.checkpoint();
    stack_.push_back(std::move(f));
    if (stats_) {
        ++stats_->recursive_calls;
        stats_->max_depth = std::max(stats_->max_depth, static_cast<int>(stack_.size()));
    }
    if (prefix_log_ && !branch_path_.empty()) prefix_log_->push_back(branch_path_);
}

void Engine::pop_frame() {
    state_.undo_to(stack_.back().entry_cp);
    stack_.pop_back();
}

void Engine::seed_root() {
    seed_cp_ = state_.checkpoint();
    push_frame();
}

bool Engine::seed_workitem(const WorkItem& item) {
    assert(item.k == k_);
    if (item.prefix.empty()) throw std::invalid_argument("empty work item");
    base_path_.assign(item.prefix.begin(), item.prefix.end());
    branch_path_ = base_path_;

    // Replay the donor's decisions up to the split point. The path is known
    // good, so trivial reduction cannot fail here.
    for (size_t i = 0; i + 1 < item.prefix.size(); ++i) {
        while (true) {
            TrivialPick tp = state_.next_trivial();
            if (tp.status == TrivialStatus::None) break;
            if (tp.status == TrivialStatus::Dead)
                throw std::logic_error("work item replay hit a dead state");
            state_.apply_pair(tp.pair);
        }
        state_.apply_pair(item.prefix[i]);
    }
    while (true) {
        TrivialPick tp = state_.next_trivial();
        if (tp.status == TrivialStatus::None) break;
        if (tp.status == TrivialStatus::Dead)
            throw std::logic_error("work item replay hit a dead state");
        state_.apply_pair(tp.pair);
    }
    if (state_.digest() != item.digest)
        throw std::logic_error("work item replay digest mismatch");
    state_.install_records(item.redundancy_snapshot);
    seed_cp_ = state_.checkpoint();

    // The donor never evaluated the candidate's filters; do it here, exactly
    // as the donor's sibling loop would have.
    Pair c = item.prefix.back();
    if (state_.forbidden(c.y)) return false;
    if (use_rbe_ && state_.is_redundant(c)) {
        if (stats_) ++stats_->branches_pruned_rbe;
        return false;
    }
    state_.apply_pair(c);
    push_frame();
    return true;
}

std::optional<WorkItem> Engine::try_extract_work() {
    if (stack_.size() < 2) return std::nullopt;
    for (size_t f = 0; f + 1 < stack_.size(); ++f) {
        Frame& fr = stack_[f];
        if (!fr.expanded || fr.next >= fr.cands.size()) continue;
        WorkItem item;
        item.k = k_;
        item.prefix = base_path_;
        for (size_t i = 0; i < f; ++i) item.prefix.push_back(stack_[i].current);
        item.prefix.push_back(fr.cands[fr.next++]);
        item.redundancy_snapshot = state_.records_at(fr.child_cp);
        item.digest = state_.digest_at(fr.child_cp);
        return item;
    }
    return std::nullopt;
}

EngineStatus Engine::run(const PollFn& poll) {
    uint64_t iter = 0;
    while (!stack_.empty()) {
        if (poll && ++iter % static_cast<uint64_t>(poll_interval_) == 0 && poll(*this)) {
            state_.undo_to(seed_cp_);
            stack_.clear();
            return EngineStatus::Aborted;
        }
        Frame& f = stack_.back();
        if (!f.expanded) {
            bool failed = false;
            while (true) {
                TrivialPick tp = state_.next_trivial();
                if (tp.status == TrivialStatus::None) break;
                if (tp.status == TrivialStatus::Dead) {
                    failed = true;
                    break;
                }
                if (use_rbe_ && state_.is_redundant(tp.pair)) {
                    if (stats_) ++stats_->branches_pruned_rbe;
                    failed = true;
                    break;
                }
                state_.apply_pair(tp.pair);
            }
            if (failed) {
                pop_frame();
                continue;
            }
            if (state_.all_trees_single_leaf()) {
                CherryPickingSequence cps;
                cps.taxa_count = static_cast<int>(state_.taxa_count());
                cps.entries = state_.sequence();
                cps.entries.push_back(Pair{state_.final_leaf(), kNoTaxon});
                result_ = std::move(cps);
                if (stats_)
                    for (const Frame& fr : stack_)
                        if (fr.expanded)
                            stats_->max_success_branch_unique = std::max(
                                stats_->max_success_branch_unique, static_cast<int>(fr.unique));
                state_.undo_to(seed_cp_);
                stack_.clear();
                return EngineStatus::Found;
            }
            int kp = state_.k_prime();
            assert(kp >= 0);
            if (stats_) stats_->max_kprime = std::max(stats_->max_kprime, kp);
            std::vector<Pair> cands = state_.branch_candidates();
            if (static_cast<int>(cands.size()) > 8 * k_ || kp >= k_) {
                pop_frame();
                continue;
            }
            f.cands = std::move(cands);
            f.unique = f.cands.size() / 2;
            f.expanded = true;
        } else if (f.has_current) {
            // a child returned without success
            state_.undo_to(f.child_cp);
            if (use_rbe_) state_.set_branch_record(f.current);
            branch_path_.pop_back();
            f.has_current = false;
        }

        Frame& fr = stack_.back();
        bool pushed = false;
        while (fr.next < fr.cands.size()) {
            Pair c = fr.cands[fr.next++];
            if (state_.forbidden(c.y)) continue;
            if (use_rbe_ && state_.is_redundant(c)) {
                if (stats_) ++stats_->branches_pruned_rbe;
                continue;
            }
            fr.child_cp = state_.checkpoint();
            state_.apply_pair(c);
            fr.current = c;
            fr.has_current = true;
            branch_path_.push_back(c);
            push_frame();
            pushed = true;
            break;
        }
        if (!pushed) pop_frame();
    }
    return EngineStatus::Exhausted;
}

std::optional<CherryPickingSequence> tcs2(SearchState& state, int k, bool use_rbe,
                                          SearchStats* stats) {
    Engine engine(state, k, use_rbe, 1 << 20, stats);
    engine.seed_root();
    engine.run();
    return engine.result();
}

// ---- incremental-k driver ---------------------------------------------------

namespace {

struct KRun {
    EngineStatus status;
    std::optional<CherryPickingSequence> seq;
};

KRun run_for_k(const Instance& inst, int k, const SolveOptions& opts, SearchStats& stats,
               const std::optional<std::chrono::steady_clock::time_point>& deadline) {
    if (opts.workers > 1) {
        ParallelResult pr = run_parallel(inst, k, opts, stats, deadline);
        switch (pr.status) {
        case ParallelResult::Status::Found:
            return {EngineStatus::Found, std::move(pr.seq)};
        case ParallelResult::Status::TimedOut:
            return {EngineStatus::Aborted, {}};
        default:
            return {EngineStatus::Exhausted, {}};
        }
    }
    SearchState state(inst);
    Engine engine(state, k, opts.use_rbe, opts.poll_interval, &stats);
    engine.seed_root();
    Engine::PollFn poll;
    if (deadline)
        poll = [&](Engine&) { return std::chrono::steady_clock::now() >= *deadline; };
    EngineStatus st = engine.run(poll);
    return {st, engine.result()};
}

} // namespace

SolveResult solve(const Instance& inst, const SolveOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    SearchStats stats;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    if (opts.time_limit_s)
        deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(*opts.time_limit_s));

    const int hard_cap = static_cast<int>(inst.n() * std::max<size_t>(inst.t(), 1)) + 1;
    int budget = opts.max_k ? *opts.max_k : hard_cap;
    bool timed_out = false;
    bool budget_exceeded = false;

    SubSolver sub = [&](const Instance& sub_inst) -> std::optional<CherryPickingSequence> {
        for (int k = 0; k <= budget; ++k) {
            if (static_cast<size_t>(k) >= stats.calls_per_k.size())
                stats.calls_per_k.resize(static_cast<size_t>(k) + 1, 0);
            uint64_t before = stats.recursive_calls;
            KRun r = run_for_k(sub_inst, k, opts, stats, deadline);
            stats.calls_per_k[static_cast<size_t>(k)] += stats.recursive_calls - before;
            if (r.status == EngineStatus::Aborted) {
                timed_out = true;
                return std::nullopt;
            }
            if (r.status == EngineStatus::Found) {
                assert(r.seq && r.seq->weight() == k);
                budget -= k;
                return std::move(r.seq);
            }
        }
        budget_exceeded = true;
        return std::nullopt;
    };

    std::optional<CherryPickingSequence> seq;
    if (opts.use_clusters)
        seq = solve_clustered(inst, sub);
    else
        seq = sub(inst);

    SolveResult res;
    if (!seq) {
        res.outcome = timed_out ? SolveOutcome::TimedOut : SolveOutcome::NoSolutionWithinMaxK;
        if (!timed_out && !budget_exceeded && !opts.max_k)
            throw std::logic_error("search exhausted the hard parameter cap");
        return res;
    }
    seq->taxa_count = static_cast<int>(inst.n());

    Solution sol;
    sol.sequence = std::move(*seq);
    sol.weight = sol.sequence.weight();
    sol.network = network_from_sequence(inst.taxa, sol.sequence);
    stats.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    sol.stats = std::move(stats);

#ifndef NDEBUG
    SequenceReport rep = apply_sequence(inst, sol.sequence);
    assert(rep.is_cps && rep.is_tree_child && rep.weight == sol.weight);
    assert(reticulation_number(sol.network) == sol.weight);
#endif

    res.outcome = SolveOutcome::Solved;
    res.solution = std::move(sol);
    return res;
}

} // namespace treechild
