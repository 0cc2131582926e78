#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treechild/sequence.hpp"
#include "treechild/taxa.hpp"
#include "treechild/tree.hpp"

namespace treechild {

/// Rooted phylogenetic network: a DAG whose root has in-degree 0 and
/// out-degree 2, leaves in-degree 1, tree nodes in-1/out-2 and
/// reticulations in-degree >= 2 / out-degree 1.
struct TreeChildNetwork {
    struct Node {
        std::vector<int> parents;
        std::vector<int> children;
        TaxonId leaf = kNoTaxon;
        bool is_leaf() const { return leaf != kNoTaxon; }
        bool is_reticulation() const { return parents.size() >= 2; }
    };

    TaxonTable taxa;
    std::vector<Node> nodes;
    int root = -1;

    size_t leaf_count() const {
        size_t c = 0;
        for (auto& n : nodes)
            if (n.is_leaf()) ++c;
        return c;
    }

    size_t reticulation_count() const {
        size_t c = 0;
        for (auto& n : nodes)
            if (n.is_reticulation()) ++c;
        return c;
    }
};

/// Reticulation edges minus reticulations: sum over reticulations of (indeg - 1).
int reticulation_number(const TreeChildNetwork& net);

/// True iff every non-leaf node has at least one non-reticulation child.
bool is_tree_child(const TreeChildNetwork& net);

/// Structural sanity: degree constraints, acyclicity, bijective leaf labels.
/// Returns an error description, or nullopt when valid.
std::optional<std::string> validate_network(const TreeChildNetwork& net);

/// Builds the network realizing a full tree-child cherry-picking sequence,
/// processing pairs last-to-first: split y's parent edge, attach x below it
/// (reusing or creating a reticulation when x already exists). The leftover
/// out-degree-1 construction root is suppressed at the end.
/// Throws std::invalid_argument on a malformed sequence.
TreeChildNetwork network_from_sequence(const TaxonTable& taxa, const CherryPickingSequence& s);

enum class DisplayResult { Yes, No, Unverifiable };

/// Exhaustive display check: one in-edge choice per reticulation, suppress
/// pass-through nodes, restrict to the tree's leaf set, compare topologies.
/// The number of choices (product of in-degrees) is capped by `budget`;
/// exceeding it yields Unverifiable rather than a boolean.
DisplayResult displays(const TreeChildNetwork& net, const Tree& tree,
                       uint64_t budget = uint64_t(1) << 20);

/// Displayed tree for one explicit in-edge choice per reticulation
/// (choice[i] indexes the i-th reticulation's parent list, reticulations in
/// node-id order). Used by the display check and the tree sampler.
Tree extract_displayed_tree(const TreeChildNetwork& net, const std::vector<int>& choice);

/// Reticulations in node-id order (choice vector layout of extract_displayed_tree).
std::vector<int> reticulation_nodes(const TreeChildNetwork& net);

/// Label-respecting isomorphism via path-multiplicity vectors. Exact for
/// tree-child networks; a strong structural check otherwise.
bool isomorphic(const TreeChildNetwork& a, const TreeChildNetwork& b);

} // namespace treechild
