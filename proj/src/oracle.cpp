#include "treechild/oracle.hpp"

#include <algorithm>
#include <climits>
#include <set>

namespace treechild {

namespace {

// Standalone reduction over plain Tree copies; kept deliberately naive and
// separate from SearchState so differential tests compare two implementations.

std::vector<TaxonId> live_leaves(const Tree& t) { return t.leaf_set(); }

void cherries_of(const Tree& t, std::set<std::pair<TaxonId, TaxonId>>& out) {
    for (const auto& nd : t.nodes) {
        if (nd.is_leaf() || nd.child[0] < 0) continue;
        const auto& l = t.nodes[static_cast<size_t>(nd.child[0])];
        const auto& r = t.nodes[static_cast<size_t>(nd.child[1])];
        if (l.is_leaf() && r.is_leaf())
            out.insert({std::min(l.leaf, r.leaf), std::max(l.leaf, r.leaf)});
    }
}

// walk from the root so detached arena nodes are ignored
int find_leaf(const Tree& t, int node, TaxonId x) {
    const auto& nd = t.nodes[static_cast<size_t>(node)];
    if (nd.is_leaf()) return nd.leaf == x ? node : -1;
    int l = find_leaf(t, nd.child[0], x);
    if (l >= 0) return l;
    return find_leaf(t, nd.child[1], x);
}

void reduce(Tree& t, TaxonId x, TaxonId y) {
    int n = find_leaf(t, t.root, x);
    if (n < 0) return;
    int p = t.nodes[static_cast<size_t>(n)].parent;
    if (p < 0) return;
    auto& pn = t.nodes[static_cast<size_t>(p)];
    int other = pn.child[0] == n ? pn.child[1] : pn.child[0];
    if (t.nodes[static_cast<size_t>(other)].leaf != y) return;
    int g = pn.parent;
    t.nodes[static_cast<size_t>(other)].parent = g;
    if (g < 0) {
        t.root = other;
    } else {
        auto& gn = t.nodes[static_cast<size_t>(g)];
        (gn.child[0] == p ? gn.child[0] : gn.child[1]) = other;
    }
}

struct Ctx {
    int n;
    int k_max;
    int best_w = INT_MAX;
    std::optional<CherryPickingSequence> witness;
    uint64_t explored = 0;
};

void dfs(const std::vector<Tree>& trees, std::vector<uint8_t>& forbidden, std::vector<Pair>& seq,
         Ctx& ctx) {
    ++ctx.explored;

    bool all_single = true;
    std::set<TaxonId> live;
    std::vector<TaxonId> singles;
    for (const Tree& t : trees) {
        auto ls = live_leaves(t);
        live.insert(ls.begin(), ls.end());
        if (ls.size() == 1)
            singles.push_back(ls[0]);
        else
            all_single = false;
    }

    int bound = std::min(ctx.k_max, ctx.best_w - 1);
    if (all_single) {
        bool same = std::all_of(singles.begin(), singles.end(),
                                [&](TaxonId u) { return u == singles[0]; });
        if (!same) return;
        int w = static_cast<int>(seq.size()) + 1 - ctx.n;
        if (w <= bound) {
            ctx.best_w = w;
            CherryPickingSequence cps;
            cps.taxa_count = ctx.n;
            cps.entries = seq;
            cps.entries.push_back(Pair{singles[0], kNoTaxon});
            ctx.witness = cps;
        }
        return;
    }

    // any completion adds at least one entry per live taxon
    int k_prime = static_cast<int>(seq.size()) - ctx.n + static_cast<int>(live.size());
    if (k_prime > bound) return;

    std::set<std::pair<TaxonId, TaxonId>> cherry_set;
    for (const Tree& t : trees) cherries_of(t, cherry_set);
    std::vector<Pair> cands;
    for (auto [a, b] : cherry_set) {
        if (!forbidden[static_cast<size_t>(b)]) cands.push_back(Pair{a, b});
        if (!forbidden[static_cast<size_t>(a)]) cands.push_back(Pair{b, a});
    }
    std::sort(cands.begin(), cands.end());

    for (const Pair& p : cands) {
        std::vector<Tree> next = trees;
        for (Tree& t : next) reduce(t, p.x, p.y);
        bool was_forbidden = forbidden[static_cast<size_t>(p.x)];
        forbidden[static_cast<size_t>(p.x)] = 1;
        seq.push_back(p);
        dfs(next, forbidden, seq, ctx);
        seq.pop_back();
        forbidden[static_cast<size_t>(p.x)] = was_forbidden;
    }
}

} // namespace

OracleResult brute_force_htc(const Instance& instance, int k_max) {
    Ctx ctx;
    ctx.n = static_cast<int>(instance.taxa.size());
    ctx.k_max = k_max;
    std::vector<uint8_t> forbidden(instance.taxa.size(), 0);
    std::vector<Pair> seq;
    dfs(instance.trees, forbidden, seq, ctx);
    OracleResult res;
    res.explored = ctx.explored;
    if (ctx.witness) {
        res.min_weight = ctx.best_w;
        res.witness = std::move(ctx.witness);
    }
    return res;
}

} // namespace treechild
