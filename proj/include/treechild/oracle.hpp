#pragma once

#include <cstdint>
#include <optional>

#include "treechild/sequence.hpp"
#include "treechild/tree.hpp"

namespace treechild {

struct OracleResult {
    std::optional<int> min_weight;
    std::optional<CherryPickingSequence> witness;
    uint64_t explored = 0;
};

/// Reference solver: exhaustive depth-first enumeration of tree-child
/// sequences of weight <= k_max, pruning only on the tree-child condition
/// (second coordinates never forbidden) and the weight bound. No trivial-
/// cherry shortcut, no 8k cut, no redundancy records; shares no search code
/// with the main solver. Meant for small instances (n <= 8 or so).
OracleResult brute_force_htc(const Instance& instance, int k_max);

} // namespace treechild
