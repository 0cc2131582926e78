#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "treechild/forest.hpp"
#include "treechild/network.hpp"
#include "treechild/sequence.hpp"
#include "treechild/tree.hpp"

namespace treechild {

struct SolveOptions {
    std::optional<int> max_k;
    bool use_rbe = true;
    bool use_clusters = true;
    int workers = 1;
    int poll_interval = 100;
    std::optional<double> time_limit_s;
};

struct SearchStats {
    uint64_t recursive_calls = 0;
    uint64_t branches_pruned_rbe = 0;
    int max_depth = 0;
    double wall_time_s = 0.0;
    std::vector<uint64_t> calls_per_k;   ///< calls made at each driver parameter
    int max_kprime = 0;                  ///< largest k' seen at a recursion entry
    int max_success_branch_unique = -1;  ///< widest branch point on the success path

    void merge(const SearchStats& o) {
        recursive_calls += o.recursive_calls;
        branches_pruned_rbe += o.branches_pruned_rbe;
        max_depth = std::max(max_depth, o.max_depth);
        max_kprime = std::max(max_kprime, o.max_kprime);
        max_success_branch_unique = std::max(max_success_branch_unique, o.max_success_branch_unique);
    }
};

struct Solution {
    CherryPickingSequence sequence;
    int weight = 0;
    TreeChildNetwork network;
    SearchStats stats;
};

enum class SolveOutcome { Solved, NoSolutionWithinMaxK, TimedOut };

struct SolveResult {
    SolveOutcome outcome = SolveOutcome::NoSolutionWithinMaxK;
    std::optional<Solution> solution;
};

/// A branch handed between workers: the branch decisions from the search root
/// (the pair to explore is the last element), the redundancy records live at
/// the split point, and the parameter. `digest` fingerprints the donor state
/// so replay can be verified.
struct WorkItem {
    std::vector<Pair> prefix;
    std::vector<SearchState::RecordEntry> redundancy_snapshot;
    int k = 0;
    uint64_t digest = 0;
};

enum class EngineStatus { Found, Exhausted, Aborted };

/// Iterative bounded search over one SearchState: an explicit stack of
/// (checkpoint, remaining-candidates) frames, trivial cherries reduced first,
/// the |C| > 8k and k' >= k cuts, and redundant-branch elimination via the
/// state's branch records. No state copies; everything is undone on
/// backtrack.
class Engine {
public:
    /// poll is invoked every poll_interval loop iterations; returning true
    /// aborts the search (cooperative cancellation / time limits).
    using PollFn = std::function<bool(Engine&)>;

    Engine(SearchState& state, int k, bool use_rbe, int poll_interval, SearchStats* stats,
           std::vector<std::vector<Pair>>* prefix_log = nullptr);

    void seed_root();

    /// Replays a donated branch. Returns false when the final candidate is
    /// filtered out (forbidden second coordinate or redundant) after replay —
    /// the item then yields no work. Verifies the digest.
    bool seed_workitem(const WorkItem& item);

    EngineStatus run(const PollFn& poll = {});

    const std::optional<CherryPickingSequence>& result() const { return result_; }

    /// Donor side: detaches the bottom-most unexplored sibling branch.
    std::optional<WorkItem> try_extract_work();

    int parameter() const { return k_; }

private:
    struct Frame {
        Checkpoint entry_cp;
        std::vector<Pair> cands;
        size_t next = 0;
        size_t unique = 0;
        Checkpoint child_cp;
        Pair current{};
        bool expanded = false;
        bool has_current = false;
    };

    void push_frame();
    void pop_frame();

    SearchState& state_;
    int k_;
    bool use_rbe_;
    int poll_interval_;
    SearchStats* stats_;
    std::vector<std::vector<Pair>>* prefix_log_;

    std::vector<Frame> stack_;
    std::vector<Pair> base_path_; ///< replayed prefix for donated branches
    std::vector<Pair> branch_path_;
    Checkpoint seed_cp_;
    std::optional<CherryPickingSequence> result_;
};

/// Bounded search at parameter k on a fresh or checkpoint-consistent state;
/// sequential. Returns a shortest tree-child cherry-picking sequence when one
/// of weight <= k exists and the state carries no redundancy records (the
/// top-level contract); absent otherwise.
std::optional<CherryPickingSequence> tcs2(SearchState& state, int k, bool use_rbe = true,
                                          SearchStats* stats = nullptr);

/// Cluster reduction (optional) and the incremental-k driver; builds the
/// network for the winning sequence.
SolveResult solve(const Instance& instance, const SolveOptions& opts = {});

} // namespace treechild
