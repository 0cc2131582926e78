// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "treechild/clusters.hpp"
#include "treechild/forest.hpp"
#include "treechild/generator.hpp"
#include "treechild/newick.hpp"
#include "treechild/oracle.hpp"
#include "treechild/rng.hpp"
#include "treechild/scheduler.hpp"
#include "treechild/search.hpp"

using namespace treechild;
namespace nk = treechild::newick;

namespace {

const char* kFourTrees =
    "(((a,b),e),(c,d));\n"
    "(((a,b),(c,e)),d);\n"
    "((a,(e,(b,c))),d);\n"
    "((a,(e,b)),(c,d));\n";

const char* kGapNetwork = "(((a,(b)#H1),((#H1,(c)#H2),e)),(#H2,d));";

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// the 200-instance corpus: n in {4,5,6}, t in {2,3,4}, k in {1,2,3}
std::vector<GeneratedInstance> corpus() {
    std::vector<GeneratedInstance> out;
    out.reserve(200);
    for (int i = 0; i < 200; ++i) {
        GenParams p;
        p.n = 4 + i % 3;
        p.t = 2 + (i / 3) % 3;
        p.k = 1 + (i / 9) % 3;
        p.seed = 1000 + static_cast<uint64_t>(i);
        out.push_back(generate_instance(p));
    }
    return out;
}

bool criterion1(std::string& note) {
    Check c;
    Instance inst = nk::parse_instance(kFourTrees);
    SolveResult res = solve(inst);
    c.expect(res.outcome == SolveOutcome::Solved, "solve failed");
    if (res.solution) {
        const Solution& sol = *res.solution;
        c.expect(sol.weight == 3, "weight != 3");
        c.expect(reticulation_number(sol.network) == 3, "reticulation number != 3");
        c.expect(is_tree_child(sol.network), "network not tree-child");
        for (const Tree& t : inst.trees)
            c.expect(displays(sol.network, t) == DisplayResult::Yes, "input tree not displayed");
    }
    if (!c.ok) note = c.detail;
    return c.ok;
}

bool criterion2(std::string& note) {
    Check c;
    Instance inst = nk::parse_instance(kFourTrees);
    TreeChildNetwork net = nk::parse_network(kGapNetwork);
    c.expect(reticulation_number(net) == 2, "reticulation number != 2");
    c.expect(!is_tree_child(net), "gap network should not be tree-child");
    for (const Tree& t : inst.trees)
        c.expect(displays(net, t) == DisplayResult::Yes, "tree not displayed");
    if (!c.ok) note = c.detail;
    return c.ok;
}

bool criterion3(const std::vector<GeneratedInstance>& instances, std::vector<int>& optima,
                std::string& note) {
    Check c;
    optima.clear();
    for (const GeneratedInstance& gen : instances) {
        OracleResult want = brute_force_htc(gen.instance, 3);
        c.expect(want.min_weight.has_value(), "oracle found no solution with k <= 3");
        if (!want.min_weight) return false;
        SolveResult got = solve(gen.instance);
        c.expect(got.outcome == SolveOutcome::Solved, "solve failed");
        if (got.solution) c.expect(got.solution->weight == *want.min_weight, "weight mismatch");
        optima.push_back(*want.min_weight);
        if (!c.ok) break;
    }
    if (!c.ok) note = c.detail;
    return c.ok;
}

bool criterion4(const std::vector<GeneratedInstance>& instances, const std::vector<int>& optima,
                std::string& note) {
    Check c;
    for (size_t i = 0; i < instances.size() && c.ok; ++i) {
        for (bool rbe : {true, false}) {
            for (bool clusters : {true, false}) {
                for (int workers : {1, 2, 4, 8}) {
                    SolveOptions opts;
                    opts.use_rbe = rbe;
                    opts.use_clusters = clusters;
                    opts.workers = workers;
                    SolveResult res = solve(instances[i].instance, opts);
                    c.expect(res.outcome == SolveOutcome::Solved, "solve failed");
                    if (res.solution)
                        c.expect(res.solution->weight == optima[i],
                                 "weight differs in configuration rbe=" + std::to_string(rbe) +
                                     " clusters=" + std::to_string(clusters) +
                                     " workers=" + std::to_string(workers));
                }
            }
        }
    }
    if (!c.ok) note = c.detail;
    return c.ok;
}

bool criterion5(const std::vector<GeneratedInstance>& instances, std::string& note) {
    Check c;
    // corpus direction: RBE never increases the call count
    for (const GeneratedInstance& gen : instances) {
        SolveOptions on, off;
        on.use_clusters = off.use_clusters = false;
        off.use_rbe = false;
        SolveResult with_rbe = solve(gen.instance, on);
        SolveResult without = solve(gen.instance, off);
        c.expect(with_rbe.outcome == SolveOutcome::Solved && without.outcome == SolveOutcome::Solved,
                 "solve failed");
        if (!c.ok) break;
        c.expect(with_rbe.solution->stats.recursive_calls <=
                     without.solution->stats.recursive_calls,
                 "RBE increased the call count");
        if (!c.ok) break;
    }
    // strength direction: a >= 2x reduction on at least one instance with k >= 5
    double best_ratio = 0;
    int best_weight = 0;
    for (uint64_t seed = 9001; seed <= 9040 && c.ok; ++seed) {
        GeneratedInstance gen = generate_instance(GenParams{14, 6, 4, seed});
        SolveOptions on;
        on.use_clusters = false;
        SolveResult with_rbe = solve(gen.instance, on);
        if (with_rbe.outcome != SolveOutcome::Solved || with_rbe.solution->weight < 5) continue;
        SolveOptions off = on;
        off.use_rbe = false;
        SolveResult without = solve(gen.instance, off);
        c.expect(without.outcome == SolveOutcome::Solved, "no-RBE solve failed");
        if (!c.ok) break;
        c.expect(with_rbe.solution->stats.recursive_calls <=
                     without.solution->stats.recursive_calls,
                 "RBE increased the call count on a hard instance");
        double ratio = static_cast<double>(without.solution->stats.recursive_calls) /
                       static_cast<double>(std::max<uint64_t>(
                           1, with_rbe.solution->stats.recursive_calls));
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best_weight = with_rbe.solution->weight;
        }
        if (best_ratio > 2.0) break;
    }
    c.expect(best_ratio > 2.0, "no k >= 5 instance with a 2x call reduction found");
    {
        std::ostringstream os;
        os << "best RBE call ratio " << best_ratio << "x at weight " << best_weight;
        note = os.str();
    }
    if (!c.ok) note = c.detail;
    return c.ok;
}

bool criterion6(const std::vector<GeneratedInstance>& instances, std::string& note) {
    Check c;

    // 1000 random apply/undo trajectories: k' bookkeeping and rollback
    SplitMix64 rng(777);
    for (int traj = 0; traj < 1000 && c.ok; ++traj) {
        const Instance& inst = instances[traj % instances.size()].instance;
        const TaxonId n = static_cast<TaxonId>(inst.n());
        SearchState st(inst);
        std::vector<Pair> applied;
        std::vector<Checkpoint> cps;
        std::string fresh_print = st.fingerprint(inst.taxa);
        for (int step = 0; step < 30; ++step) {
            if (!cps.empty() && rng.chance(1, 3)) {
                size_t back = rng.below(cps.size());
                st.undo_to(cps[back]);
                cps.resize(back);
                applied.resize(back);
            } else {
                TaxonId x = static_cast<TaxonId>(rng.below(n));
                TaxonId y = static_cast<TaxonId>(rng.below(n));
                if (x == y) continue;
                auto triv = st.trivial_cherries();
                bool trivial = std::find(triv.begin(), triv.end(),
                                         std::make_pair(std::min(x, y), std::max(x, y))) !=
                               triv.end();
                bool cherry = st.cc(x, y) > 0;
                bool y_eligible = !st.forbidden(y);
                int kp = st.k_prime();
                cps.push_back(st.apply_pair(Pair{x, y}));
                applied.push_back(Pair{x, y});
                c.expect(st.k_prime() == static_cast<int>(st.seq_len()) -
                                             static_cast<int>(inst.n()) + st.n_prime(),
                         "k' formula violated");
                if (trivial && y_eligible)
                    c.expect(st.k_prime() == kp, "trivial pair changed k'");
                else if (cherry && !trivial)
                    c.expect(st.k_prime() == kp + 1, "non-trivial cherry must add exactly 1 to k'");
            }
        }
        SearchState replayed(inst);
        for (const Pair& p : applied) replayed.apply_pair(p);
        c.expect(st.fingerprint(inst.taxa) == replayed.fingerprint(inst.taxa),
                 "state differs from from-scratch replay");
        while (!cps.empty()) {
            st.undo_to(cps[0]);
            cps.clear();
        }
        c.expect(st.fingerprint(inst.taxa) == fresh_print, "full rollback differs from fresh state");
    }

    // search-entry window, branch width, and the call-count ceiling
    for (const GeneratedInstance& gen : instances) {
        if (!c.ok) break;
        SolveOptions opts;
        opts.use_clusters = false;
        SolveResult res = solve(gen.instance, opts);
        c.expect(res.outcome == SolveOutcome::Solved, "solve failed");
        if (!res.solution) break;
        const SearchStats& st = res.solution->stats;
        int w = res.solution->weight;
        c.expect(st.max_kprime >= 0 && st.max_kprime <= w, "k' outside [0, k] during search");
        c.expect(st.max_success_branch_unique <= 4 * w,
                 "more than 4k unique cherries at a success-path branch point");
        for (size_t k = 0; k < st.calls_per_k.size() && k <= 4; ++k) {
            long double ceiling = 1, pw = 1;
            for (size_t i = 1; i <= k; ++i) {
                pw *= 8.0L * static_cast<long double>(k);
                ceiling += pw;
            }
            c.expect(static_cast<long double>(st.calls_per_k[k]) <= ceiling,
                     "recursive calls exceed the (8k)^i ceiling at k=" + std::to_string(k));
        }
    }
    if (!c.ok) note = c.detail;
    return c.ok;
}

bool criterion7(const std::vector<GeneratedInstance>& instances, std::string& note) {
    Check c;
    for (const GeneratedInstance& gen : instances) {
        SolveResult res = solve(gen.instance);
        c.expect(res.outcome == SolveOutcome::Solved, "solve failed");
        if (!res.solution) break;
        const Solution& sol = *res.solution;
        TreeChildNetwork net = network_from_sequence(gen.instance.taxa, sol.sequence);
        c.expect(reticulation_number(net) == sol.weight,
                 "reticulation number differs from sequence weight");
        c.expect(is_tree_child(net), "constructed network not tree-child");
        c.expect(!validate_network(net).has_value(), "constructed network malformed");
        for (const Tree& t : gen.instance.trees)
            c.expect(displays(net, t) == DisplayResult::Yes, "input tree not displayed");
        if (!c.ok) break;
    }
    if (!c.ok) note = c.detail;
    return c.ok;
}

bool criterion8(std::string& note) {
    Check c;
    int solved_end_to_end = 0;
    for (int i = 0; i < 100 && c.ok; ++i) {
        GenParams p;
        p.n = 5 + (i * 7) % 46;              // 5..50
        p.k = i % 9;                         // 0..8
        p.t = 2 + i % 9;
        p.seed = 4000 + static_cast<uint64_t>(i);
        TreeChildNetwork net = random_network(p);
        c.expect(!validate_network(net).has_value(), "network malformed");
        c.expect(is_tree_child(net), "network not tree-child");
        c.expect(net.leaf_count() == static_cast<size_t>(p.n), "leaf count != n");
        c.expect(reticulation_number(net) <= p.k, "reticulation number > k");
        for (const auto& node : net.nodes) {
            auto kids = node.children;
            std::sort(kids.begin(), kids.end());
            c.expect(std::adjacent_find(kids.begin(), kids.end()) == kids.end(),
                     "parallel edges");
        }
        if (p.k <= 4) {
            Instance inst = sample_trees(net, p.t, p.seed + 1);
            SolveResult res = solve(inst);
            c.expect(res.outcome == SolveOutcome::Solved, "end-to-end solve failed");
            if (res.solution)
                c.expect(res.solution->weight <= reticulation_number(net),
                         "solved weight exceeds the generator's reticulation number");
            ++solved_end_to_end;
        }
    }
    note = std::to_string(solved_end_to_end) + " end-to-end solves";
    if (!c.ok) note = c.detail;
    return c.ok;
}

bool criterion9(std::string& note) {
    Check c;
    auto timed_solve = [&](const Instance& inst) {
        // repeat until measurable, return per-solve seconds
        int reps = 0;
        auto t0 = std::chrono::steady_clock::now();
        double elapsed = 0;
        while (elapsed < 0.1 || reps < 3) {
            SolveResult res = solve(inst);
            if (res.outcome != SolveOutcome::Solved) c.expect(false, "solve failed");
            ++reps;
            elapsed = seconds_since(t0);
            if (reps >= 500) break;
        }
        return elapsed / reps;
    };
    // A k=3 network displays at most 8 distinct trees, so tree counts beyond
    // that repeat sampled trees; the per-tree work still scales with t.
    GeneratedInstance gen = generate_instance(GenParams{20, 3, 8, 31337});
    const std::vector<Tree>& pool = gen.instance.trees;
    auto with_t = [&](int t) {
        Instance inst;
        inst.taxa = gen.instance.taxa;
        for (int i = 0; i < t; ++i) inst.trees.push_back(pool[static_cast<size_t>(i) % pool.size()]);
        return inst;
    };
    std::vector<int> ts = {5, 10, 20, 50, 100};
    std::vector<double> times;
    std::optional<int> weight;
    for (int t : ts) {
        Instance inst = with_t(t);
        SolveResult res = solve(inst);
        c.expect(res.outcome == SolveOutcome::Solved, "solve failed");
        if (res.solution) {
            if (!weight) weight = res.solution->weight;
            c.expect(res.solution->weight == *weight, "weight changed with duplicated trees");
        }
        times.push_back(timed_solve(inst));
    }
    double ratio = times.back() / std::max(times.front(), 1e-9);
    {
        std::ostringstream os;
        os << "t=5: " << times.front() << "s  t=100: " << times.back() << "s  ratio "
           << ratio;
        note = os.str();
    }
    c.expect(ratio < 100.0, "t=100 vs t=5 ratio not below the sub-quadratic envelope");
    if (!c.ok) note += " [" + c.detail + "]";
    return c.ok;
}

bool criterion10(const std::vector<GeneratedInstance>& instances, std::string& note) {
    Check c;
    auto as_multiset = [](const std::vector<std::vector<Pair>>& prefixes) {
        std::multiset<std::vector<std::pair<TaxonId, TaxonId>>> out;
        for (const auto& p : prefixes) {
            std::vector<std::pair<TaxonId, TaxonId>> row;
            for (const Pair& q : p) row.emplace_back(q.x, q.y);
            out.insert(row);
        }
        return out;
    };
    int compared = 0;
    for (size_t i = 0; i < instances.size() && compared < 20 && c.ok; ++i) {
        const Instance& inst = instances[i].instance;
        SolveOptions opts;
        opts.use_clusters = false;
        opts.use_rbe = false;
        SolveResult res = solve(inst, opts);
        c.expect(res.outcome == SolveOutcome::Solved, "solve failed");
        if (!res.solution) break;
        int opt = res.solution->weight;

        // outcome equality at the optimum across worker counts
        for (int workers : {2, 4}) {
            SolveOptions par = opts;
            par.workers = workers;
            SolveResult r = solve(inst, par);
            c.expect(r.outcome == SolveOutcome::Solved && r.solution->weight == opt,
                     "parallel outcome differs");
        }
        if (opt == 0) continue;

        // exhaustive failed search at opt-1: identical branch multisets;
        // work-item digests are verified inside every replay
        SearchStats s1, s4;
        std::vector<std::vector<Pair>> p1, p4;
        SolveOptions base = opts;
        ParallelResult a = run_parallel(inst, opt - 1, base, s1, {}, &p1);
        SolveOptions par = base;
        par.workers = 4;
        par.poll_interval = 2;
        ParallelResult b = run_parallel(inst, opt - 1, par, s4, {}, &p4);
        c.expect(a.status == ParallelResult::Status::Exhausted, "sequential search found a solution below the optimum");
        c.expect(b.status == ParallelResult::Status::Exhausted, "parallel search found a solution below the optimum");
        c.expect(as_multiset(p1) == as_multiset(p4), "explored branch multisets differ");
        c.expect(s1.recursive_calls == s4.recursive_calls, "call counts differ");
        ++compared;
    }
    if (c.ok)
        note = std::to_string(compared) + " exhaustive comparisons";
    else
        note = c.detail;
    return c.ok;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool(std::string&)> run;
    };

    std::vector<GeneratedInstance> instances = corpus();
    std::vector<int> optima;

    std::vector<Criterion> criteria = {
        {"golden instance: weight 3, 3-reticulation tree-child network displaying all trees",
         [&](std::string& n) { return criterion1(n); }},
        {"gap witness: unrestricted 2-reticulation network, non-tree-child, displays all",
         [&](std::string& n) { return criterion2(n); }},
        {"oracle equivalence on the 200-instance corpus",
         [&](std::string& n) { return criterion3(instances, optima, n); }},
        {"flag invariance: rbe x clusters x workers on the corpus",
         [&](std::string& n) { return criterion4(instances, optima, n); }},
        {"RBE never hurts; >= 2x call reduction on a k >= 5 instance",
         [&](std::string& n) { return criterion5(instances, n); }},
        {"structural invariants: k' bookkeeping, windows, branch width, call ceiling",
         [&](std::string& n) { return criterion6(instances, n); }},
        {"construction law: reticulations = weight, tree-child, displays all",
         [&](std::string& n) { return criterion7(instances, n); }},
        {"generator soundness and end-to-end bound", [&](std::string& n) { return criterion8(n); }},
        {"scaling shape: t = 100 vs t = 5 below the 100x envelope",
         [&](std::string& n) { return criterion9(n); }},
        {"scheduler safety: branch multisets, outcomes, replay digests",
         [&](std::string& n) { return criterion10(instances, n); }},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        std::string note;
        try {
            ok = criteria[i].run(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        double secs = seconds_since(t0);
        std::printf("criterion %zu: %s — %s [%.1fs]\n", i + 1, ok ? "PASS" : "FAIL",
                    criteria[i].name, secs);
        if (!note.empty()) std::printf("  note: %s\n", note.c_str());
        if (!ok) ++failures;
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
