#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

#include "treechild/taxa.hpp"

namespace treechild {

/// Rooted binary tree over an arena of nodes. Leaves carry a TaxonId,
/// internal nodes have exactly two children.
struct Tree {
    struct Node {
        int parent = -1;
        int child[2] = {-1, -1};
        TaxonId leaf = kNoTaxon;
        bool is_leaf() const { return leaf != kNoTaxon; }
    };

    std::vector<Node> nodes;
    int root = -1;

    int add_leaf(TaxonId t) {
        nodes.push_back(Node{});
        nodes.back().leaf = t;
        return static_cast<int>(nodes.size()) - 1;
    }

    int add_internal(int left, int right) {
        nodes.push_back(Node{});
        int id = static_cast<int>(nodes.size()) - 1;
        nodes[id].child[0] = left;
        nodes[id].child[1] = right;
        nodes[static_cast<size_t>(left)].parent = id;
        nodes[static_cast<size_t>(right)].parent = id;
        return id;
    }

    size_t leaf_count() const {
        size_t c = 0;
        for (auto& n : nodes)
            if (n.is_leaf()) ++c;
        return c;
    }

    std::vector<TaxonId> leaf_set() const {
        std::vector<TaxonId> out;
        collect_leaves(root, out);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Smallest TaxonId under each node; drives canonical child order.
    TaxonId min_taxon(int node) const {
        const Node& n = nodes[static_cast<size_t>(node)];
        if (n.is_leaf()) return n.leaf;
        return std::min(min_taxon(n.child[0]), min_taxon(n.child[1]));
    }

private:
    void collect_leaves(int node, std::vector<TaxonId>& out) const {
        if (node < 0) return;
        const Node& n = nodes[static_cast<size_t>(node)];
        if (n.is_leaf()) {
            out.push_back(n.leaf);
            return;
        }
        collect_leaves(n.child[0], out);
        collect_leaves(n.child[1], out);
    }
};

/// A collection of binary trees on one shared leaf set.
struct Instance {
    TaxonTable taxa;
    std::vector<Tree> trees;

    size_t n() const { return taxa.size(); }
    size_t t() const { return trees.size(); }
};

} // namespace treechild
