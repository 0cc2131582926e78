#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "treechild/sequence.hpp"
#include "treechild/tree.hpp"

namespace treechild {

/// One node of the laminar decomposition along common clusters: a taxon
/// subset that is the leaf set of a subtree in every input tree. The
/// subinstance replaces each nested child cluster by a composite taxon.
struct ClusterNode {
    std::vector<TaxonId> taxa; ///< original ids, sorted
    Instance subinstance;
    std::vector<ClusterNode> children;
    std::string composite_label; ///< this node's synthetic name at the parent level
};

/// All maximal common clusters, nested; root covers X. Computed by
/// intersecting the subtree-leaf-set families of the trees.
ClusterNode find_common_clusters(const Instance& instance);

using SubSolver = std::function<std::optional<CherryPickingSequence>(const Instance&)>;

/// Solves deepest clusters first and splices: each cluster sequence minus its
/// terminal entry, innermost first, with composite taxa in outer sequences
/// rewritten to the inner terminal leaf. Failure of any subsolve propagates.
std::optional<CherryPickingSequence> solve_clustered(const Instance& instance,
                                                     const SubSolver& solver);

} // namespace treechild
