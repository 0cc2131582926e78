#include "treechild/network.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <stdexcept>

namespace treechild {

int reticulation_number(const TreeChildNetwork& net) {
    int h = 0;
    for (const auto& n : net.nodes)
        if (n.parents.size() >= 2) h += static_cast<int>(n.parents.size()) - 1;
    return h;
}

bool is_tree_child(const TreeChildNetwork& net) {
    for (const auto& n : net.nodes) {
        if (n.is_leaf()) continue;
        bool ok = false;
        for (int c : n.children)
            if (!net.nodes[static_cast<size_t>(c)].is_reticulation()) ok = true;
        if (!ok) return false;
    }
    return true;
}

std::optional<std::string> validate_network(const TreeChildNetwork& net) {
    const size_t m = net.nodes.size();
    if (net.root < 0 || static_cast<size_t>(net.root) >= m) return "missing root";
    if (m == 1) {
        const auto& r = net.nodes[0];
        if (!r.is_leaf() || !r.children.empty()) return "single node must be a labelled leaf";
        return std::nullopt;
    }
    std::vector<bool> leaf_seen(net.taxa.size(), false);
    for (size_t i = 0; i < m; ++i) {
        const auto& n = net.nodes[i];
        size_t in = n.parents.size(), out = n.children.size();
        if (static_cast<int>(i) == net.root) {
            if (in != 0 || out != 2) return "root must have in-degree 0 and out-degree 2";
        } else if (n.is_leaf()) {
            if (in != 1 || out != 0) return "leaf degrees wrong";
        } else if (in == 1) {
            if (out != 2) return "tree node must have out-degree 2";
        } else if (in >= 2) {
            if (out != 1) return "reticulation must have out-degree 1";
        } else {
            return "non-root node with in-degree 0";
        }
        if (n.is_leaf()) {
            if (n.leaf < 0 || static_cast<size_t>(n.leaf) >= net.taxa.size())
                return "leaf label out of range";
            if (leaf_seen[static_cast<size_t>(n.leaf)]) return "leaf label repeated";
            leaf_seen[static_cast<size_t>(n.leaf)] = true;
        }
        for (int c : n.children) {
            const auto& ch = net.nodes[static_cast<size_t>(c)];
            if (std::count(ch.parents.begin(), ch.parents.end(), static_cast<int>(i)) !=
                std::count(n.children.begin(), n.children.end(), c))
                return "parent/child lists disagree";
        }
    }
    for (bool b : leaf_seen)
        if (!b) return "missing leaf label";
    // acyclicity via DFS colors
    std::vector<int> color(m, 0);
    std::function<bool(int)> dfs = [&](int u) {
        color[static_cast<size_t>(u)] = 1;
        for (int c : net.nodes[static_cast<size_t>(u)].children) {
            int& col = color[static_cast<size_t>(c)];
            if (col == 1) return false;
            if (col == 0 && !dfs(c)) return false;
        }
        color[static_cast<size_t>(u)] = 2;
        return true;
    };
    if (!dfs(net.root)) return "cycle";
    for (size_t i = 0; i < m; ++i)
        if (color[i] == 0) return "node unreachable from root";
    return std::nullopt;
}

TreeChildNetwork network_from_sequence(const TaxonTable& taxa, const CherryPickingSequence& s) {
    const size_t n = taxa.size();
    if (s.entries.empty() || !s.entries.back().is_terminal())
        throw std::invalid_argument("sequence lacks a terminal entry");
    for (size_t i = 0; i + 1 < s.entries.size(); ++i)
        if (s.entries[i].is_terminal())
            throw std::invalid_argument("terminal entry before the end");
    if (!s.is_tree_child()) throw std::invalid_argument("sequence is not tree-child");

    TreeChildNetwork net;
    net.taxa = taxa;
    if (n == 1) {
        net.nodes.push_back(TreeChildNetwork::Node{});
        net.nodes[0].leaf = 0;
        net.root = 0;
        return net;
    }

    auto new_node = [&]() {
        net.nodes.push_back(TreeChildNetwork::Node{});
        return static_cast<int>(net.nodes.size()) - 1;
    };
    auto add_edge = [&](int u, int v) {
        net.nodes[static_cast<size_t>(u)].children.push_back(v);
        net.nodes[static_cast<size_t>(v)].parents.push_back(u);
    };
    // insert `mid` on the edge u->v
    auto split_edge = [&](int u, int v, int mid) {
        auto& uc = net.nodes[static_cast<size_t>(u)].children;
        *std::find(uc.begin(), uc.end(), v) = mid;
        auto& vp = net.nodes[static_cast<size_t>(v)].parents;
        *std::find(vp.begin(), vp.end(), u) = mid;
        net.nodes[static_cast<size_t>(mid)].children.push_back(v);
        net.nodes[static_cast<size_t>(mid)].parents.push_back(u);
    };

    std::vector<int> leaf_of(n, -1);
    int rho = new_node();
    const Pair terminal = s.entries.back();
    int term_leaf = new_node();
    net.nodes[static_cast<size_t>(term_leaf)].leaf = terminal.x;
    leaf_of[static_cast<size_t>(terminal.x)] = term_leaf;
    add_edge(rho, term_leaf);

    for (size_t idx = s.entries.size() - 1; idx-- > 0;) {
        const Pair pr = s.entries[idx];
        int y_leaf = leaf_of[static_cast<size_t>(pr.y)];
        if (y_leaf < 0)
            throw std::invalid_argument("pair's second taxon '" + taxa.label(pr.y) +
                                        "' is not a leaf at its position");
        int y_parent = net.nodes[static_cast<size_t>(y_leaf)].parents[0];
        int p = new_node();
        split_edge(y_parent, y_leaf, p);

        int q;
        int x_leaf = leaf_of[static_cast<size_t>(pr.x)];
        if (x_leaf >= 0) {
            int x_parent = net.nodes[static_cast<size_t>(x_leaf)].parents[0];
            if (net.nodes[static_cast<size_t>(x_parent)].is_reticulation()) {
                q = x_parent;
            } else {
                q = new_node();
                split_edge(x_parent, x_leaf, q);
            }
        } else {
            q = new_node();
            net.nodes[static_cast<size_t>(q)].leaf = pr.x;
            leaf_of[static_cast<size_t>(pr.x)] = q;
        }
        add_edge(p, q);
    }

    for (size_t i = 0; i < n; ++i)
        if (leaf_of[i] < 0)
            throw std::invalid_argument("taxon '" + taxa.label(static_cast<TaxonId>(i)) +
                                        "' never appears as a first coordinate");

    // The construction leaves rho with out-degree 1; drop it (and any chain).
    int root = rho;
    while (net.nodes[static_cast<size_t>(root)].children.size() == 1 &&
           net.nodes[static_cast<size_t>(root)].parents.empty()) {
        int child = net.nodes[static_cast<size_t>(root)].children[0];
        auto& cp = net.nodes[static_cast<size_t>(child)].parents;
        cp.erase(std::find(cp.begin(), cp.end(), root));
        net.nodes[static_cast<size_t>(root)].children.clear();
        if (!cp.empty()) throw std::logic_error("root chain child kept another parent");
        root = child;
    }

    // compact away the suppressed construction root(s)
    TreeChildNetwork out;
    out.taxa = taxa;
    std::vector<int> remap(net.nodes.size(), -1);
    std::function<void(int)> copy = [&](int u) {
        if (remap[static_cast<size_t>(u)] >= 0) return;
        out.nodes.push_back(TreeChildNetwork::Node{});
        int id = static_cast<int>(out.nodes.size()) - 1;
        remap[static_cast<size_t>(u)] = id;
        out.nodes[static_cast<size_t>(id)].leaf = net.nodes[static_cast<size_t>(u)].leaf;
        for (int c : net.nodes[static_cast<size_t>(u)].children) {
            copy(c);
            out.nodes[static_cast<size_t>(id)].children.push_back(remap[static_cast<size_t>(c)]);
            out.nodes[static_cast<size_t>(remap[static_cast<size_t>(c)])].parents.push_back(id);
        }
    };
    copy(root);
    out.root = remap[static_cast<size_t>(root)];
    assert(!validate_network(out));
    return out;
}

std::vector<int> reticulation_nodes(const TreeChildNetwork& net) {
    std::vector<int> out;
    for (size_t i = 0; i < net.nodes.size(); ++i)
        if (net.nodes[i].is_reticulation()) out.push_back(static_cast<int>(i));
    return out;
}

Tree extract_displayed_tree(const TreeChildNetwork& net, const std::vector<int>& choice) {
    std::vector<int> retics = reticulation_nodes(net);
    assert(choice.size() == retics.size());
    std::vector<int> kept_parent(net.nodes.size(), -1);
    for (size_t i = 0; i < retics.size(); ++i)
        kept_parent[static_cast<size_t>(retics[i])] =
            net.nodes[static_cast<size_t>(retics[i])].parents[static_cast<size_t>(choice[i])];

    Tree tree;
    // returns -1 for branches that lose all leaves (cannot happen here, but
    // the restriction path in displays() reuses this via target filtering)
    std::function<int(int)> build = [&](int u) -> int {
        const auto& n = net.nodes[static_cast<size_t>(u)];
        if (n.is_leaf()) return tree.add_leaf(n.leaf);
        std::vector<int> built;
        for (int c : n.children) {
            if (kept_parent[static_cast<size_t>(c)] >= 0 &&
                kept_parent[static_cast<size_t>(c)] != u)
                continue; // reticulation edge not chosen
            int b = build(c);
            if (b >= 0) built.push_back(b);
        }
        if (built.empty()) return -1;
        if (built.size() == 1) return built[0]; // suppress pass-through
        int acc = built[0];
        for (size_t i = 1; i < built.size(); ++i) acc = tree.add_internal(acc, built[i]);
        return acc;
    };
    tree.root = build(net.root);
    return tree;
}

namespace {

// canonical shape string on TaxonIds; enough to compare topologies
std::string shape(const Tree& t, int node, TaxonId& min_out) {
    const Tree::Node& n = t.nodes[static_cast<size_t>(node)];
    if (n.is_leaf()) {
        min_out = n.leaf;
        return std::to_string(n.leaf);
    }
    TaxonId ml, mr;
    std::string l = shape(t, n.child[0], ml);
    std::string r = shape(t, n.child[1], mr);
    if (mr < ml) {
        std::swap(l, r);
        std::swap(ml, mr);
    }
    min_out = ml;
    return "(" + l + "," + r + ")";
}

std::string canonical_shape(const Tree& t) {
    TaxonId m;
    return shape(t, t.root, m);
}

// Restrict `t` to the leaves in `keep` (smallest subtree spanning them).
Tree restrict_tree(const Tree& t, const std::vector<bool>& keep) {
    Tree out;
    std::function<int(int)> build = [&](int node) -> int {
        const Tree::Node& n = t.nodes[static_cast<size_t>(node)];
        if (n.is_leaf())
            return keep[static_cast<size_t>(n.leaf)] ? out.add_leaf(n.leaf) : -1;
        int l = build(n.child[0]);
        int r = build(n.child[1]);
        if (l < 0) return r;
        if (r < 0) return l;
        return out.add_internal(l, r);
    };
    out.root = build(t.root);
    return out;
}

} // namespace

DisplayResult displays(const TreeChildNetwork& net, const Tree& tree, uint64_t budget) {
    std::vector<int> retics = reticulation_nodes(net);
    uint64_t total = 1;
    for (int r : retics) {
        uint64_t d = net.nodes[static_cast<size_t>(r)].parents.size();
        if (total > budget / d) return DisplayResult::Unverifiable;
        total *= d;
    }

    std::vector<bool> keep(net.taxa.size(), false);
    for (TaxonId x : tree.leaf_set()) keep[static_cast<size_t>(x)] = true;
    const std::string want = canonical_shape(tree);

    std::vector<int> choice(retics.size(), 0);
    while (true) {
        Tree full = extract_displayed_tree(net, choice);
        Tree restricted = restrict_tree(full, keep);
        if (restricted.root >= 0 && canonical_shape(restricted) == want) return DisplayResult::Yes;
        size_t i = 0;
        for (; i < retics.size(); ++i) {
            if (++choice[i] <
                static_cast<int>(net.nodes[static_cast<size_t>(retics[i])].parents.size()))
                break;
            choice[i] = 0;
        }
        if (i == retics.size()) break;
    }
    return DisplayResult::No;
}

bool isomorphic(const TreeChildNetwork& a, const TreeChildNetwork& b) {
    if (a.taxa.labels() != b.taxa.labels()) return false;
    if (a.nodes.size() != b.nodes.size()) return false;

    // path-multiplicity vector per node: #paths to each leaf
    auto mu = [](const TreeChildNetwork& net) {
        const size_t n = net.taxa.size();
        std::vector<std::vector<uint64_t>> v(net.nodes.size());
        std::function<const std::vector<uint64_t>&(int)> go =
            [&](int u) -> const std::vector<uint64_t>& {
            auto& mine = v[static_cast<size_t>(u)];
            if (!mine.empty()) return mine;
            mine.assign(n, 0);
            const auto& node = net.nodes[static_cast<size_t>(u)];
            if (node.is_leaf()) {
                mine[static_cast<size_t>(node.leaf)] = 1;
            } else {
                for (int c : node.children) {
                    const auto& sub = go(c);
                    for (size_t i = 0; i < n; ++i) mine[i] += sub[i];
                }
            }
            return mine;
        };
        go(net.root);
        std::vector<std::vector<uint64_t>> all;
        for (size_t i = 0; i < net.nodes.size(); ++i) all.push_back(go(static_cast<int>(i)));
        std::sort(all.begin(), all.end());
        return all;
    };
    return mu(a) == mu(b);
}

} // namespace treechild
