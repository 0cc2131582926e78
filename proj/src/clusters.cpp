#include "treechild/clusters.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace treechild {

namespace {

using Mask = std::vector<uint64_t>;

Mask make_mask(size_t n) { return Mask((n + 63) / 64, 0); }
void mask_set(Mask& m, TaxonId x) { m[static_cast<size_t>(x) / 64] |= uint64_t(1) << (x % 64); }
bool mask_get(const Mask& m, TaxonId x) {
    return (m[static_cast<size_t>(x) / 64] >> (x % 64)) & 1u;
}
int mask_count(const Mask& m) {
    int c = 0;
    for (uint64_t w : m) c += __builtin_popcountll(w);
    return c;
}
bool mask_subset(const Mask& a, const Mask& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] & ~b[i]) return false;
    return true;
}

// leaf-set mask of every node of a tree, by node id
std::vector<Mask> node_masks(const Tree& t, size_t n) {
    std::vector<Mask> out(t.nodes.size(), make_mask(n));
    std::function<void(int)> go = [&](int u) {
        const auto& nd = t.nodes[static_cast<size_t>(u)];
        if (nd.is_leaf()) {
            mask_set(out[static_cast<size_t>(u)], nd.leaf);
            return;
        }
        go(nd.child[0]);
        go(nd.child[1]);
        for (size_t w = 0; w < out[static_cast<size_t>(u)].size(); ++w)
            out[static_cast<size_t>(u)][w] = out[static_cast<size_t>(nd.child[0])][w] |
                                             out[static_cast<size_t>(nd.child[1])][w];
    };
    go(t.root);
    return out;
}

std::string fresh_composite_label(const TaxonTable& taxa, int& counter) {
    while (true) {
        std::string name = "_cluster_" + std::to_string(counter++);
        if (!taxa.contains(name)) return name;
    }
}

struct Builder {
    const Instance& inst;
    std::vector<std::vector<Mask>> masks; // per tree, per node
    int composite_counter = 1;

    // trees restricted to `taxa`, with each child cluster collapsed to its
    // composite label; builds the node's subinstance
    void build_subinstance(ClusterNode& node) {
        const size_t n = inst.taxa.size();
        Mask want = make_mask(n);
        for (TaxonId x : node.taxa) mask_set(want, x);

        std::vector<std::pair<Mask, std::string>> collapse;
        std::vector<std::string> labels;
        for (auto& ch : node.children) {
            Mask m = make_mask(n);
            for (TaxonId x : ch.taxa) mask_set(m, x);
            collapse.emplace_back(std::move(m), ch.composite_label);
            labels.push_back(ch.composite_label);
        }
        Mask kept = want;
        for (auto& [m, name] : collapse)
            for (size_t w = 0; w < kept.size(); ++w) kept[w] &= ~m[w];
        for (TaxonId x = 0; x < static_cast<TaxonId>(n); ++x)
            if (mask_get(kept, x)) labels.push_back(inst.taxa.label(x));

        node.subinstance.taxa = TaxonTable::from_labels(labels);

        for (size_t i = 0; i < inst.trees.size(); ++i) {
            const Tree& src = inst.trees[i];
            const auto& nm = masks[i];
            int root_node = -1;
            for (size_t u = 0; u < src.nodes.size(); ++u)
                if (nm[u] == want) root_node = static_cast<int>(u);
            if (root_node < 0) throw std::logic_error("cluster is not a subtree of every tree");

            Tree dst;
            std::function<int(int)> copy = [&](int u) -> int {
                for (auto& [m, name] : collapse)
                    if (nm[static_cast<size_t>(u)] == m)
                        return dst.add_leaf(node.subinstance.taxa.find(name));
                const auto& nd = src.nodes[static_cast<size_t>(u)];
                if (nd.is_leaf())
                    return dst.add_leaf(node.subinstance.taxa.find(inst.taxa.label(nd.leaf)));
                int l = copy(nd.child[0]);
                int r = copy(nd.child[1]);
                return dst.add_internal(l, r);
            };
            dst.root = copy(root_node);
            node.subinstance.trees.push_back(std::move(dst));
        }
    }
};

} // namespace

ClusterNode find_common_clusters(const Instance& inst) {
    const size_t n = inst.taxa.size();
    Builder b{inst, {}, 1};
    for (const Tree& t : inst.trees) b.masks.push_back(node_masks(t, n));

    // intersect subtree-leaf-set families across trees
    std::set<Mask> common;
    for (const Mask& m : b.masks[0]) {
        int c = mask_count(m);
        if (c > 1 && c < static_cast<int>(n)) common.insert(m);
    }
    for (size_t i = 1; i < b.masks.size(); ++i) {
        std::set<Mask> fam(b.masks[i].begin(), b.masks[i].end());
        for (auto it = common.begin(); it != common.end();)
            it = fam.count(*it) ? std::next(it) : common.erase(it);
    }

    // nest by containment, largest first (the family is laminar, so each
    // proper container of a cluster appears earlier in this order)
    std::vector<Mask> ordered(common.begin(), common.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Mask& a, const Mask& b2) { return mask_count(a) > mask_count(b2); });

    std::vector<int> parent_of(ordered.size(), -1);
    std::vector<std::vector<size_t>> kids(ordered.size() + 1); // last slot = root
    for (size_t i = 0; i < ordered.size(); ++i) {
        int best = -1;
        for (size_t j = 0; j < i; ++j)
            if (mask_subset(ordered[i], ordered[j]) &&
                (best < 0 ||
                 mask_count(ordered[j]) < mask_count(ordered[static_cast<size_t>(best)])))
                best = static_cast<int>(j);
        parent_of[i] = best;
        kids[best < 0 ? ordered.size() : static_cast<size_t>(best)].push_back(i);
    }

    std::function<ClusterNode(size_t)> materialize = [&](size_t i) {
        ClusterNode node;
        for (TaxonId x = 0; x < static_cast<TaxonId>(n); ++x)
            if (mask_get(ordered[i], x)) node.taxa.push_back(x);
        node.composite_label = fresh_composite_label(inst.taxa, b.composite_counter);
        for (size_t c : kids[i]) node.children.push_back(materialize(c));
        return node;
    };

    ClusterNode root;
    for (TaxonId x = 0; x < static_cast<TaxonId>(n); ++x) root.taxa.push_back(x);
    for (size_t c : kids[ordered.size()]) root.children.push_back(materialize(c));

    std::function<void(ClusterNode&)> build = [&](ClusterNode& node) {
        for (auto& ch : node.children) build(ch);
        b.build_subinstance(node);
    };
    build(root);
    return root;
}

namespace {

std::optional<CherryPickingSequence> splice(const Instance& inst, const ClusterNode& node,
                                            const SubSolver& solver) {
    std::vector<CherryPickingSequence> inner;
    std::vector<TaxonId> inner_terminal;
    for (const ClusterNode& ch : node.children) {
        auto s = splice(inst, ch, solver);
        if (!s) return std::nullopt;
        inner_terminal.push_back(s->entries.back().x);
        inner.push_back(std::move(*s));
    }
    auto sub = solver(node.subinstance);
    if (!sub) return std::nullopt;

    // map subinstance ids to original ids; composites become the inner terminal
    const TaxonTable& st = node.subinstance.taxa;
    std::vector<TaxonId> remap(st.size(), kNoTaxon);
    for (size_t i = 0; i < st.size(); ++i) {
        const std::string& label = st.label(static_cast<TaxonId>(i));
        TaxonId orig = inst.taxa.find(label);
        if (orig != kNoTaxon) {
            remap[i] = orig;
            continue;
        }
        for (size_t c = 0; c < node.children.size(); ++c)
            if (node.children[c].composite_label == label) remap[i] = inner_terminal[c];
        if (remap[i] == kNoTaxon) throw std::logic_error("unmapped subinstance taxon");
    }

    CherryPickingSequence out;
    out.taxa_count = static_cast<int>(node.taxa.size());
    for (const CherryPickingSequence& s : inner)
        out.entries.insert(out.entries.end(), s.entries.begin(), s.entries.end() - 1);
    for (const Pair& p : sub->entries)
        out.entries.push_back(Pair{remap[static_cast<size_t>(p.x)],
                                   p.is_terminal() ? kNoTaxon : remap[static_cast<size_t>(p.y)]});
    return out;
}

} // namespace

std::optional<CherryPickingSequence> solve_clustered(const Instance& inst,
                                                     const SubSolver& solver) {
    ClusterNode root = find_common_clusters(inst);
    auto s = splice(inst, root, solver);
    if (s) s->taxa_count = static_cast<int>(inst.taxa.size());
    return s;
}

} // namespace treechild
