#include "treechild/generator.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>
#include <stdexcept>

#include "treechild/newick.hpp"
#include "treechild/rng.hpp"

namespace treechild {

namespace {

struct Growth {
    struct Node {
        std::vector<int> parents;
        std::vector<int> children;
    };
    std::vector<Node> nodes;
    int root = -1;
    std::vector<int> leaves; // current leaf node ids

    int add_node() {
        nodes.push_back(Node{});
        return static_cast<int>(nodes.size()) - 1;
    }
    void add_edge(int u, int v) {
        nodes[static_cast<size_t>(u)].children.push_back(v);
        nodes[static_cast<size_t>(v)].parents.push_back(u);
    }
    bool is_retic(int u) const { return nodes[static_cast<size_t>(u)].parents.size() >= 2; }

    void remove_leaf_entry(int u) {
        auto it = std::find(leaves.begin(), leaves.end(), u);
        *it = leaves.back();
        leaves.pop_back();
    }

    // u stays a leaf's parent slot; turns leaf u into a tree node with two
    // fresh leaf children
    void grow_tree_node(int u) {
        remove_leaf_entry(u);
        int v = add_node();
        int w = add_node();
        add_edge(u, v);
        add_edge(u, w);
        leaves.push_back(v);
        leaves.push_back(w);
    }

    // merges leaf v into leaf u (u becomes a reticulation) and hangs a fresh
    // leaf w below it
    void grow_reticulation(int u, int v) {
        int pv = nodes[static_cast<size_t>(v)].parents[0];
        auto& pvc = nodes[static_cast<size_t>(pv)].children;
        *std::find(pvc.begin(), pvc.end(), v) = u;
        nodes[static_cast<size_t>(u)].parents.push_back(pv);
        nodes[static_cast<size_t>(v)].parents.clear(); // detached
        remove_leaf_entry(u);
        remove_leaf_entry(v);
        int w = add_node();
        add_edge(u, w);
        leaves.push_back(w);
    }

    int parent_of(int u) const { return nodes[static_cast<size_t>(u)].parents[0]; }
    int sibling_of(int u) const {
        const auto& pc = nodes[static_cast<size_t>(parent_of(u))].children;
        for (int c : pc)
            if (c != u) return c;
        return -1;
    }

    // leaves whose parent and sibling are both non-reticulations; merging two
    // of them (with distinct parents) keeps the network tree-child
    std::vector<int> eligible() const {
        std::vector<int> m;
        for (int u : leaves) {
            if (is_retic(parent_of(u))) continue;
            int s = sibling_of(u);
            if (s < 0 || is_retic(s)) continue;
            m.push_back(u);
        }
        return m;
    }

    static bool retic_possible(const std::vector<int>& m, const Growth& g) {
        if (m.size() < 2) return false;
        if (m.size() == 2 && g.parent_of(m[0]) == g.parent_of(m[1])) return false;
        return true;
    }
};

// one growth attempt; false when reticulations stall with k_r left
bool grow(Growth& g, int n, int k, SplitMix64& rng) {
    g = Growth{};
    g.root = g.add_node();
    int a = g.add_node(), b = g.add_node();
    g.add_edge(g.root, a);
    g.add_edge(g.root, b);
    g.leaves = {a, b};

    int64_t s_r = static_cast<int64_t>(n) + k - 2;
    int64_t k_r = k;

    auto add_tree = [&]() {
        int u = g.leaves[rng.below(g.leaves.size())];
        g.grow_tree_node(u);
        --s_r;
    };
    auto add_retic = [&](const std::vector<int>& m) {
        int u, v;
        for (uint64_t tries = 0;; ++tries) {
            if (tries >= 1000000) throw std::logic_error("reticulation resampling did not converge");
            u = m[rng.below(m.size())];
            v = m[rng.below(m.size())];
            if (u != v && g.parent_of(u) != g.parent_of(v)) break;
        }
        g.grow_reticulation(u, v);
        --k_r;
    };

    while (s_r > 0 && k_r > 0) {
        std::vector<int> m = g.eligible();
        if (!Growth::retic_possible(m, g)) {
            add_tree();
        } else if (rng.chance(static_cast<uint64_t>(s_r), static_cast<uint64_t>(s_r + k_r))) {
            add_tree();
        } else {
            add_retic(m);
        }
    }
    while (s_r > 0) add_tree();
    while (k_r > 0) {
        std::vector<int> m = g.eligible();
        if (!Growth::retic_possible(m, g)) return false;
        add_retic(m);
    }
    assert(static_cast<int>(g.leaves.size()) == n);
    return true;
}

TreeChildNetwork finish(const Growth& g, int n) {
    // label leaves in creation (node id) order, zero-padded so the
    // lexicographic TaxonTable order is the numeric one
    size_t width = std::to_string(n).size();
    std::vector<std::string> labels;
    std::vector<std::pair<int, std::string>> leaf_label;
    {
        std::vector<int> order = g.leaves;
        std::sort(order.begin(), order.end());
        int i = 1;
        for (int u : order) {
            std::string num = std::to_string(i++);
            std::string name = "t" + std::string(width - num.size(), '0') + num;
            labels.push_back(name);
            leaf_label.emplace_back(u, name);
        }
    }

    TreeChildNetwork net;
    net.taxa = TaxonTable::from_labels(labels);
    std::vector<int> remap(g.nodes.size(), -1);
    std::function<int(int)> copy = [&](int u) -> int {
        if (remap[static_cast<size_t>(u)] >= 0) return remap[static_cast<size_t>(u)];
        net.nodes.push_back(TreeChildNetwork::Node{});
        int id = static_cast<int>(net.nodes.size()) - 1;
        remap[static_cast<size_t>(u)] = id;
        for (int c : g.nodes[static_cast<size_t>(u)].children) {
            int cid = copy(c);
            net.nodes[static_cast<size_t>(id)].children.push_back(cid);
            net.nodes[static_cast<size_t>(cid)].parents.push_back(id);
        }
        return id;
    };
    net.root = copy(g.root);
    for (auto& [u, name] : leaf_label)
        net.nodes[static_cast<size_t>(remap[static_cast<size_t>(u)])].leaf = net.taxa.find(name);

    if (auto err = validate_network(net)) throw std::logic_error("generator: " + *err);
    return net;
}

} // namespace

TreeChildNetwork random_network(const GenParams& params) {
    if (params.n < 2 || params.k < 0) throw std::invalid_argument("random_network: need n >= 2, k >= 0");
    SplitMix64 master(params.seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        SplitMix64 rng(master.next());
        Growth g;
        if (grow(g, params.n, params.k, rng)) return finish(g, params.n);
    }
    // persistent stall: fall back to a smaller reticulation target
    GenParams reduced = params;
    reduced.k = params.k - 1;
    return random_network(reduced);
}

Instance sample_trees(const TreeChildNetwork& net, int t, uint64_t seed) {
    if (t < 1) throw std::invalid_argument("sample_trees: t >= 1");
    SplitMix64 rng(seed);
    std::vector<int> retics = reticulation_nodes(net);

    Instance inst;
    inst.taxa = net.taxa;
    std::set<std::string> seen;
    int duplicates = 0;
    while (static_cast<int>(inst.trees.size()) < t && duplicates < 100) {
        std::vector<int> choice;
        choice.reserve(retics.size());
        for (int r : retics)
            choice.push_back(static_cast<int>(
                rng.below(net.nodes[static_cast<size_t>(r)].parents.size())));
        Tree tree = extract_displayed_tree(net, choice);
        std::string canon = newick::write_tree(tree, net.taxa);
        if (seen.insert(canon).second)
            inst.trees.push_back(std::move(tree));
        else
            ++duplicates;
    }
    return inst;
}

GeneratedInstance generate_instance(const GenParams& params) {
    GeneratedInstance out;
    out.network = random_network(params);
    uint64_t tree_seed = SplitMix64(params.seed ^ 0x517cc1b727220a95ull).next();
    out.instance = sample_trees(out.network, params.t, tree_seed);
    return out;
}

} // namespace treechild
