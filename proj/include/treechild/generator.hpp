#pragma once

#include <cstdint>

#include "treechild/network.hpp"
#include "treechild/tree.hpp"

namespace treechild {

struct GenParams {
    int n = 2;     ///< leaves
    int k = 0;     ///< target reticulations (the result may have fewer)
    int t = 1;     ///< target tree count
    uint64_t seed = 0;
};

/// Random tree-child network grown from a two-leaf tree: tree nodes split a
/// leaf into two, reticulations merge two eligible leaves with different
/// parents, mixed with probability s_r/(s_r+k_r). Always returns exactly n
/// leaves; the reticulation count is at most k.
TreeChildNetwork random_network(const GenParams& params);

/// Samples displayed trees (uniform in-edge per reticulation), discarding
/// duplicates by canonical Newick; stops at t distinct trees or after 100
/// duplicate draws. Deterministic given (net, t, seed).
Instance sample_trees(const TreeChildNetwork& net, int t, uint64_t seed);

struct GeneratedInstance {
    TreeChildNetwork network;
    Instance instance;
};

/// random_network + sample_trees on derived seed streams.
GeneratedInstance generate_instance(const GenParams& params);

} // namespace treechild
