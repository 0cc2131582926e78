#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include "treechild/search.hpp"

namespace treechild {

struct ParallelResult {
    enum class Status { Found, Exhausted, TimedOut };
    Status status = Status::Exhausted;
    std::optional<CherryPickingSequence> seq;
};

/// Work-sharing search at parameter k: idle workers post requests into a
/// donor's message slot; the donor answers at its next poll with the
/// bottom-most unexplored branch of its stack (as a WorkItem) or a denial.
/// The first solution triggers cooperative cancellation. Outcome
/// (present/absent and weight) matches the sequential engine; workers == 1
/// runs the sequential engine directly.
ParallelResult run_parallel(const Instance& instance, int k, const SolveOptions& opts,
                            SearchStats& stats,
                            std::optional<std::chrono::steady_clock::time_point> deadline = {},
                            std::vector<std::vector<Pair>>* prefix_log = nullptr);

} // namespace treechild
