#include "treechild/forest.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "treechild/newick.hpp"

namespace treechild {

SearchState::SearchState(const Instance& inst) {
    n_ = inst.taxa.size();
    const size_t t = inst.trees.size();
    words_ = (t + 63) / 64;

    trees_.resize(t);
    leaf_node_.assign(t, std::vector<int>(n_, -1));
    in_tree_.assign(n_ * words_, 0);
    tree_count_.assign(n_, 0);
    cc_.assign(n_ * n_, 0);
    list_pos_.assign(n_ * n_, -1);
    trivial_pos_.assign(n_ * n_, -1);
    partners_.assign(n_, {});
    partner_pos_.assign(n_ * n_, -1);
    forbidden_.assign(n_, 0);

    for (size_t i = 0; i < t; ++i) {
        const Tree& src = inst.trees[i];
        TreeSlot& dst = trees_[i];
        dst.root = src.root;
        dst.nodes.resize(src.nodes.size());
        for (size_t j = 0; j < src.nodes.size(); ++j) {
            dst.nodes[j].parent = src.nodes[j].parent;
            dst.nodes[j].child[0] = src.nodes[j].child[0];
            dst.nodes[j].child[1] = src.nodes[j].child[1];
            dst.nodes[j].taxon = src.nodes[j].leaf;
            if (src.nodes[j].is_leaf()) {
                TaxonId x = src.nodes[j].leaf;
                leaf_node_[i][static_cast<size_t>(x)] = static_cast<int>(j);
                bitset_set(x, i);
                ++tree_count_[static_cast<size_t>(x)];
            }
        }
        // cherry occurrences
        for (size_t j = 0; j < dst.nodes.size(); ++j) {
            const auto& nd = dst.nodes[j];
            if (nd.taxon != kNoTaxon || nd.child[0] < 0) continue;
            const auto& l = dst.nodes[static_cast<size_t>(nd.child[0])];
            const auto& r = dst.nodes[static_cast<size_t>(nd.child[1])];
            if (l.taxon != kNoTaxon && r.taxon != kNoTaxon) ++cc_[key(l.taxon, r.taxon)];
        }
    }
    for (size_t x = 0; x < n_; ++x)
        if (tree_count_[x] > 0) ++n_prime_;
    for (size_t a = 0; a < n_; ++a) {
        for (size_t b = a + 1; b < n_; ++b) {
            size_t k = a * n_ + b;
            if (cc_[k] == 0) continue;
            list_pos_[k] = static_cast<int32_t>(cherries_.size());
            cherries_.push_back(k);
            partner_pos_[a * n_ + b] = static_cast<int32_t>(partners_[a].size());
            partners_[a].push_back(static_cast<TaxonId>(b));
            partner_pos_[b * n_ + a] = static_cast<int32_t>(partners_[b].size());
            partners_[b].push_back(static_cast<TaxonId>(a));
            if (cc_[k] == both_count(static_cast<TaxonId>(a), static_cast<TaxonId>(b))) {
                trivial_pos_[k] = static_cast<int32_t>(trivial_.size());
                trivial_.push_back(k);
            }
        }
    }
}

// ---- bitset helpers ------------------------------------------------------

bool SearchState::bitset_get(TaxonId x, size_t tree) const {
    return (in_tree_[static_cast<size_t>(x) * words_ + tree / 64] >> (tree % 64)) & 1u;
}
void SearchState::bitset_clear(TaxonId x, size_t tree) {
    in_tree_[static_cast<size_t>(x) * words_ + tree / 64] &= ~(uint64_t(1) << (tree % 64));
}
void SearchState::bitset_set(TaxonId x, size_t tree) {
    in_tree_[static_cast<size_t>(x) * words_ + tree / 64] |= uint64_t(1) << (tree % 64);
}
int SearchState::both_count(TaxonId a, TaxonId b) const {
    const uint64_t* wa = &in_tree_[static_cast<size_t>(a) * words_];
    const uint64_t* wb = &in_tree_[static_cast<size_t>(b) * words_];
    int c = 0;
    for (size_t w = 0; w < words_; ++w) c += __builtin_popcountll(wa[w] & wb[w]);
    return c;
}

// ---- logged list maintenance ----------------------------------------------

void SearchState::cherry_list_add(size_t k) {
    log_.push_back({EditKind::CherryAdd, static_cast<int32_t>(k), 0, 0, 0, 0});
    list_pos_[k] = static_cast<int32_t>(cherries_.size());
    cherries_.push_back(k);
}
void SearchState::cherry_list_remove(size_t k) {
    int32_t pos = list_pos_[k];
    log_.push_back({EditKind::CherryRemove, static_cast<int32_t>(k), pos, 0, 0, 0});
    size_t last = cherries_.back();
    cherries_[static_cast<size_t>(pos)] = last;
    list_pos_[last] = pos;
    cherries_.pop_back();
    list_pos_[k] = -1;
}
void SearchState::trivial_add(size_t k) {
    log_.push_back({EditKind::TrivialAdd, static_cast<int32_t>(k), 0, 0, 0, 0});
    trivial_pos_[k] = static_cast<int32_t>(trivial_.size());
    trivial_.push_back(k);
}
void SearchState::trivial_remove(size_t k) {
    int32_t pos = trivial_pos_[k];
    log_.push_back({EditKind::TrivialRemove, static_cast<int32_t>(k), pos, 0, 0, 0});
    size_t last = trivial_.back();
    trivial_[static_cast<size_t>(pos)] = last;
    trivial_pos_[last] = pos;
    trivial_.pop_back();
    trivial_pos_[k] = -1;
}
void SearchState::partner_add(TaxonId x, TaxonId z) {
    log_.push_back({EditKind::PartnerAdd, x, z, 0, 0, 0});
    partner_pos_[static_cast<size_t>(x) * n_ + static_cast<size_t>(z)] =
        static_cast<int32_t>(partners_[static_cast<size_t>(x)].size());
    partners_[static_cast<size_t>(x)].push_back(z);
}
void SearchState::partner_remove(TaxonId x, TaxonId z) {
    auto& list = partners_[static_cast<size_t>(x)];
    int32_t pos = partner_pos_[static_cast<size_t>(x) * n_ + static_cast<size_t>(z)];
    log_.push_back({EditKind::PartnerRemove, x, z, pos, 0, 0});
    TaxonId last = list.back();
    list[static_cast<size_t>(pos)] = last;
    partner_pos_[static_cast<size_t>(x) * n_ + static_cast<size_t>(last)] = pos;
    list.pop_back();
    partner_pos_[static_cast<size_t>(x) * n_ + static_cast<size_t>(z)] = -1;
}

void SearchState::recheck_trivial(TaxonId a, TaxonId b) {
    size_t k = key(a, b);
    bool want = cc_[k] >= 1 && static_cast<int>(cc_[k]) == both_count(a, b);
    bool have = trivial_pos_[k] >= 0;
    if (want && !have)
        trivial_add(k);
    else if (!want && have)
        trivial_remove(k);
}

void SearchState::write_record(Pair p, Record next) {
    uint32_t k = record_key(p);
    auto it = records_.find(k);
    int32_t old_count = 0, old_state = 0;
    if (it != records_.end()) {
        old_count = it->second.count;
        old_state = it->second.live ? 2 : 1;
    }
    log_.push_back({EditKind::RecordWrite, p.x, p.y, old_count, old_state, 0});
    records_[k] = next;
}

void SearchState::kill_record(Pair p) {
    auto it = records_.find(record_key(p));
    if (it == records_.end() || !it->second.live) return;
    log_.push_back({EditKind::RecordWrite, p.x, p.y, it->second.count, 2, 0});
    it->second.live = false;
}

void SearchState::set_branch_record(Pair p) {
    write_record(p, Record{cc_[key(p.x, p.y)], true});
}

bool SearchState::is_redundant(Pair p) const {
    auto it = records_.find(record_key(p));
    if (it == records_.end() || !it->second.live) return false;
    bool eq = it->second.count == cc_[key(p.x, p.y)];
    assert(eq && "live record implies unchanged occurrence count");
    return eq;
}

void SearchState::bump_cherry(TaxonId y, TaxonId z) {
    size_t k = key(y, z);
    uint16_t old = cc_[k];
    log_.push_back({EditKind::CcSet, static_cast<int32_t>(k), old, 0, 0, 0});
    cc_[k] = static_cast<uint16_t>(old + 1);
    if (old == 0) {
        cherry_list_add(k);
        partner_add(y, z);
        partner_add(z, y);
        if (forbidden_[static_cast<size_t>(y)] && forbidden_[static_cast<size_t>(z)])
            ++dead_cherries_;
    }
    kill_record(Pair{z, y}); // occurrence count changed; (y,z) dies via the x'=y rule
}

// ---- apply / undo ----------------------------------------------------------

Checkpoint SearchState::checkpoint() const {
    return Checkpoint{log_.size(), seq_.size(), n_prime_, dead_cherries_};
}

Checkpoint SearchState::apply_pair(Pair p) {
    if (p.y == kNoTaxon || p.x == p.y || p.x < 0 || static_cast<size_t>(p.x) >= n_ ||
        static_cast<size_t>(p.y) >= n_)
        throw std::invalid_argument("apply_pair: bad pair");
    Checkpoint cp = checkpoint();
    const TaxonId x = p.x, y = p.y;

    std::vector<std::pair<size_t, int>> affected; // (tree, leaf node of x)
    for (size_t i = 0; i < trees_.size(); ++i) {
        if (!bitset_get(x, i)) continue;
        const TreeSlot& T = trees_[i];
        int n = leaf_node_[i][static_cast<size_t>(x)];
        int pn = T.nodes[static_cast<size_t>(n)].parent;
        if (pn < 0) continue;
        const auto& pno = T.nodes[static_cast<size_t>(pn)];
        int other = pno.child[0] == n ? pno.child[1] : pno.child[0];
        if (T.nodes[static_cast<size_t>(other)].taxon == y) affected.emplace_back(i, n);
    }

    log_.push_back({EditKind::SeqPush, 0, 0, 0, 0, 0});
    seq_.push_back(p);

    if (!affected.empty()) {
        size_t kxy = key(x, y);
        if (trivial_pos_[kxy] >= 0) trivial_remove(kxy);
        if (forbidden_[static_cast<size_t>(x)] && forbidden_[static_cast<size_t>(y)])
            --dead_cherries_;
        log_.push_back({EditKind::CcSet, static_cast<int32_t>(kxy), cc_[kxy], 0, 0, 0});
        cc_[kxy] = 0;
        cherry_list_remove(kxy);
        partner_remove(x, y);
        partner_remove(y, x);

        for (auto [i, n] : affected) {
            TreeSlot& T = trees_[i];
            int pn = T.nodes[static_cast<size_t>(n)].parent;
            const auto& pno = T.nodes[static_cast<size_t>(pn)];
            int ynode = pno.child[0] == n ? pno.child[1] : pno.child[0];
            int g = pno.parent;
            int slot = 0;
            if (g >= 0) slot = T.nodes[static_cast<size_t>(g)].child[0] == pn ? 0 : 1;
            T.nodes[static_cast<size_t>(ynode)].parent = g;
            if (g >= 0)
                T.nodes[static_cast<size_t>(g)].child[slot] = ynode;
            else
                T.root = ynode;
            log_.push_back({EditKind::LeafRemoved, static_cast<int32_t>(i), n, pn, g, slot});
            bitset_clear(x, i);
            if (--tree_count_[static_cast<size_t>(x)] == 0) --n_prime_;

            if (g >= 0) {
                int s = T.nodes[static_cast<size_t>(g)].child[slot ^ 1];
                TaxonId z = T.nodes[static_cast<size_t>(s)].taxon;
                if (z != kNoTaxon) {
                    bump_cherry(y, z);
                    recheck_trivial(y, z);
                }
            }
        }
        // occurrences of x dropped from the affected trees; cherries {x,.}
        // may have become trivial
        for (TaxonId z : partners_[static_cast<size_t>(x)]) recheck_trivial(x, z);
    }

    if (!forbidden_[static_cast<size_t>(x)]) {
        log_.push_back({EditKind::ForbiddenAdd, x, 0, 0, 0, 0});
        forbidden_[static_cast<size_t>(x)] = 1;
        for (TaxonId z : partners_[static_cast<size_t>(x)])
            if (forbidden_[static_cast<size_t>(z)]) ++dead_cherries_;
    }

    // UpdateR: records whose first coordinate equals y die
    for (auto& [k, rec] : records_) {
        if (!rec.live) continue;
        if (static_cast<size_t>(k) / n_ == static_cast<size_t>(y)) {
            log_.push_back({EditKind::RecordWrite, static_cast<int32_t>(k / n_),
                            static_cast<int32_t>(k % n_), rec.count, 2, 0});
            rec.live = false;
        }
    }
    kill_record(p); // its own occurrence count went to zero

    return cp;
}

void SearchState::undo_to(const Checkpoint& cp) {
    if (cp.log_pos > log_.size()) throw std::logic_error("stale checkpoint");
    while (log_.size() > cp.log_pos) {
        Edit e = log_.back();
        log_.pop_back();
        switch (e.kind) {
        case EditKind::LeafRemoved: {
            TreeSlot& T = trees_[static_cast<size_t>(e.a)];
            int n = e.b, pn = e.c, g = e.d, slot = e.e;
            const auto& pno = T.nodes[static_cast<size_t>(pn)];
            int ynode = pno.child[0] == n ? pno.child[1] : pno.child[0];
            T.nodes[static_cast<size_t>(ynode)].parent = pn;
            if (g >= 0)
                T.nodes[static_cast<size_t>(g)].child[slot] = pn;
            else
                T.root = pn;
            TaxonId x = T.nodes[static_cast<size_t>(n)].taxon;
            bitset_set(x, static_cast<size_t>(e.a));
            ++tree_count_[static_cast<size_t>(x)];
            break;
        }
        case EditKind::CcSet:
            cc_[static_cast<size_t>(e.a)] = static_cast<uint16_t>(e.b);
            break;
        case EditKind::CherryAdd:
            list_pos_[static_cast<size_t>(e.a)] = -1;
            cherries_.pop_back();
            break;
        case EditKind::CherryRemove: {
            size_t k = static_cast<size_t>(e.a);
            size_t pos = static_cast<size_t>(e.b);
            if (pos == cherries_.size()) {
                cherries_.push_back(k);
            } else {
                size_t moved = cherries_[pos];
                cherries_.push_back(moved);
                list_pos_[moved] = static_cast<int32_t>(cherries_.size()) - 1;
                cherries_[pos] = k;
            }
            list_pos_[k] = static_cast<int32_t>(pos);
            break;
        }
        case EditKind::TrivialAdd:
            trivial_pos_[static_cast<size_t>(e.a)] = -1;
            trivial_.pop_back();
            break;
        case EditKind::TrivialRemove: {
            size_t k = static_cast<size_t>(e.a);
            size_t pos = static_cast<size_t>(e.b);
            if (pos == trivial_.size()) {
                trivial_.push_back(k);
            } else {
                size_t moved = trivial_[pos];
                trivial_.push_back(moved);
                trivial_pos_[moved] = static_cast<int32_t>(trivial_.size()) - 1;
                trivial_[pos] = k;
            }
            trivial_pos_[k] = static_cast<int32_t>(pos);
            break;
        }
        case EditKind::PartnerAdd: {
            auto& list = partners_[static_cast<size_t>(e.a)];
            partner_pos_[static_cast<size_t>(e.a) * n_ + static_cast<size_t>(e.b)] = -1;
            list.pop_back();
            break;
        }
        case EditKind::PartnerRemove: {
            auto& list = partners_[static_cast<size_t>(e.a)];
            TaxonId z = e.b;
            size_t pos = static_cast<size_t>(e.c);
            if (pos == list.size()) {
                list.push_back(z);
            } else {
                TaxonId moved = list[pos];
                list.push_back(moved);
                partner_pos_[static_cast<size_t>(e.a) * n_ + static_cast<size_t>(moved)] =
                    static_cast<int32_t>(list.size()) - 1;
                list[pos] = z;
            }
            partner_pos_[static_cast<size_t>(e.a) * n_ + static_cast<size_t>(z)] =
                static_cast<int32_t>(pos);
            break;
        }
        case EditKind::ForbiddenAdd:
            forbidden_[static_cast<size_t>(e.a)] = 0;
            break;
        case EditKind::SeqPush:
            seq_.pop_back();
            break;
        case EditKind::RecordWrite: {
            uint32_t k = record_key(Pair{e.a, e.b});
            if (e.d == 0)
                records_.erase(k);
            else
                records_[k] = Record{static_cast<uint16_t>(e.c), e.d == 2};
            break;
        }
        }
    }
    n_prime_ = cp.n_prime;
    dead_cherries_ = cp.dead_cherries;
    assert(seq_.size() == cp.seq_len);
}

// ---- queries ----------------------------------------------------------------

TrivialPick SearchState::next_trivial() const {
    size_t best_key = SIZE_MAX;
    Pair best{};
    for (size_t k : trivial_) {
        TaxonId u = static_cast<TaxonId>(k / n_);
        TaxonId v = static_cast<TaxonId>(k % n_);
        Pair cand;
        if (!forbidden_[static_cast<size_t>(v)])
            cand = Pair{u, v};
        else if (!forbidden_[static_cast<size_t>(u)])
            cand = Pair{v, u};
        else
            continue;
        if (k < best_key) {
            best_key = k;
            best = cand;
        }
    }
    if (best_key != SIZE_MAX) return TrivialPick{TrivialStatus::Pick, best};
    if (dead_cherries_ > 0) return TrivialPick{TrivialStatus::Dead, {}};
    return TrivialPick{TrivialStatus::None, {}};
}

std::vector<Pair> SearchState::branch_candidates() const {
    std::vector<Pair> out;
    out.reserve(cherries_.size() * 2);
    for (size_t k : cherries_) {
        TaxonId u = static_cast<TaxonId>(k / n_);
        TaxonId v = static_cast<TaxonId>(k % n_);
        out.push_back(Pair{u, v});
        out.push_back(Pair{v, u});
    }
    std::sort(out.begin(), out.end());
    return out;
}

TaxonId SearchState::final_leaf() const {
    if (!cherries_.empty()) throw std::logic_error("final_leaf: cherries remain");
    if (n_prime_ != 1) throw std::logic_error("final_leaf: more than one live taxon");
    for (size_t x = 0; x < n_; ++x)
        if (tree_count_[x] > 0) return static_cast<TaxonId>(x);
    throw std::logic_error("final_leaf: no live taxon");
}

std::vector<SearchState::RecordEntry> SearchState::records_at(const Checkpoint& cp) const {
    std::unordered_map<uint32_t, Record> snap = records_;
    for (size_t i = log_.size(); i-- > cp.log_pos;) {
        const Edit& e = log_[i];
        if (e.kind != EditKind::RecordWrite) continue;
        uint32_t k = record_key(Pair{e.a, e.b});
        if (e.d == 0)
            snap.erase(k);
        else
            snap[k] = Record{static_cast<uint16_t>(e.c), e.d == 2};
    }
    std::vector<RecordEntry> out;
    for (auto& [k, rec] : snap) {
        if (!rec.live) continue;
        out.push_back(RecordEntry{Pair{static_cast<TaxonId>(k / n_), static_cast<TaxonId>(k % n_)},
                                  rec.count});
    }
    std::sort(out.begin(), out.end(),
              [](const RecordEntry& a, const RecordEntry& b) { return a.pair < b.pair; });
    return out;
}

void SearchState::install_records(const std::vector<RecordEntry>& records) {
    for (const RecordEntry& r : records) write_record(r.pair, Record{r.count, true});
}

// ---- digests -------------------------------------------------------------

namespace {
inline void fnv(uint64_t& h, uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ull;
}
} // namespace

uint64_t SearchState::digest_at(const Checkpoint& cp) const {
    std::vector<uint16_t> cc = cc_;
    std::vector<uint8_t> forb = forbidden_;
    for (size_t i = log_.size(); i-- > cp.log_pos;) {
        const Edit& e = log_[i];
        if (e.kind == EditKind::CcSet)
            cc[static_cast<size_t>(e.a)] = static_cast<uint16_t>(e.b);
        else if (e.kind == EditKind::ForbiddenAdd)
            forb[static_cast<size_t>(e.a)] = 0;
    }
    uint64_t h = 0xcbf29ce484222325ull;
    fnv(h, static_cast<uint64_t>(cp.n_prime));
    fnv(h, cp.seq_len);
    for (size_t i = 0; i < cp.seq_len; ++i) {
        fnv(h, static_cast<uint64_t>(static_cast<int64_t>(seq_[i].x)));
        fnv(h, static_cast<uint64_t>(static_cast<int64_t>(seq_[i].y)));
    }
    for (uint8_t b : forb) fnv(h, b);
    for (uint16_t c : cc) fnv(h, c);
    return h;
}

uint64_t SearchState::digest() const { return digest_at(checkpoint()); }

// ---- test support -----------------------------------------------------------

Tree SearchState::extract_tree(size_t i) const {
    const TreeSlot& T = trees_[i];
    Tree out;
    std::function<int(int)> build = [&](int u) -> int {
        const auto& nd = T.nodes[static_cast<size_t>(u)];
        if (nd.taxon != kNoTaxon) return out.add_leaf(nd.taxon);
        int l = build(nd.child[0]);
        int r = build(nd.child[1]);
        return out.add_internal(l, r);
    };
    out.root = build(T.root);
    return out;
}

std::vector<std::pair<TaxonId, TaxonId>> SearchState::trivial_cherries() const {
    std::vector<std::pair<TaxonId, TaxonId>> out;
    for (size_t k : trivial_)
        out.emplace_back(static_cast<TaxonId>(k / n_), static_cast<TaxonId>(k % n_));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<TaxonId> SearchState::forbidden_set() const {
    std::vector<TaxonId> out;
    for (size_t x = 0; x < n_; ++x)
        if (forbidden_[x]) out.push_back(static_cast<TaxonId>(x));
    return out;
}

std::string SearchState::fingerprint(const TaxonTable& taxa) const {
    std::ostringstream os;
    os << "n'=" << n_prime_ << " dead=" << dead_cherries_ << "\n";
    for (size_t i = 0; i < trees_.size(); ++i)
        os << "T" << i << " " << newick::write_tree(extract_tree(i), taxa) << "\n";
    os << "cc:";
    for (size_t k = 0; k < cc_.size(); ++k)
        if (cc_[k]) os << " " << k << ":" << cc_[k];
    os << "\ntrivial:";
    for (auto [a, b] : trivial_cherries()) os << " {" << a << "," << b << "}";
    os << "\nforbidden:";
    for (TaxonId x : forbidden_set()) os << " " << x;
    os << "\nseq:";
    for (const Pair& p : seq_) os << " (" << p.x << "," << p.y << ")";
    os << "\nrecords:";
    for (const RecordEntry& r : records_at(checkpoint()))
        os << " (" << r.pair.x << "," << r.pair.y << "):" << r.count;
    os << "\n";
    return os.str();
}

std::optional<std::string> SearchState::check_invariants() const {
    std::vector<uint16_t> cc2(n_ * n_, 0);
    std::vector<int> count2(n_, 0);
    std::vector<uint64_t> bits2(n_ * words_, 0);
    for (size_t i = 0; i < trees_.size(); ++i) {
        Tree t = extract_tree(i);
        for (const auto& nd : t.nodes) {
            if (nd.is_leaf()) {
                ++count2[static_cast<size_t>(nd.leaf)];
                bits2[static_cast<size_t>(nd.leaf) * words_ + i / 64] |= uint64_t(1) << (i % 64);
                continue;
            }
            const auto& l = t.nodes[static_cast<size_t>(nd.child[0])];
            const auto& r = t.nodes[static_cast<size_t>(nd.child[1])];
            if (l.is_leaf() && r.is_leaf()) ++cc2[key(l.leaf, r.leaf)];
        }
    }
    if (cc2 != cc_) return "cc mismatch";
    if (bits2 != in_tree_) return "leaf bitset mismatch";
    if (count2 != tree_count_) return "tree_count mismatch";
    int np = 0;
    for (size_t x = 0; x < n_; ++x)
        if (count2[x] > 0) ++np;
    if (np != n_prime_) return "n' mismatch";
    int dead = 0;
    std::vector<size_t> cherries2, trivial2;
    for (size_t a = 0; a < n_; ++a)
        for (size_t b = a + 1; b < n_; ++b) {
            size_t k = a * n_ + b;
            if (!cc2[k]) continue;
            cherries2.push_back(k);
            if (static_cast<int>(cc2[k]) ==
                both_count(static_cast<TaxonId>(a), static_cast<TaxonId>(b)))
                trivial2.push_back(k);
            if (forbidden_[a] && forbidden_[b]) ++dead;
        }
    auto sorted = [](std::vector<size_t> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    if (sorted(cherries_) != cherries2) return "cherry list mismatch";
    if (sorted(trivial_) != trivial2) return "trivial set mismatch";
    if (dead != dead_cherries_) return "dead cherry count mismatch";
    for (size_t x = 0; x < n_; ++x) {
        std::vector<TaxonId> want;
        for (size_t z = 0; z < n_; ++z)
            if (z != x && cc2[key(static_cast<TaxonId>(x), static_cast<TaxonId>(z))])
                want.push_back(static_cast<TaxonId>(z));
        std::vector<TaxonId> have = partners_[x];
        std::sort(have.begin(), have.end());
        if (have != want) return "partner list mismatch";
    }
    return std::nullopt;
}

// ---- sequence replay ---------------------------------------------------------

SequenceReport apply_sequence(const Instance& instance, const CherryPickingSequence& s) {
    if (s.entries.empty()) throw std::invalid_argument("apply_sequence: empty sequence");
    SequenceReport rep;
    rep.weight = static_cast<int>(s.entries.size()) - static_cast<int>(instance.taxa.size());
    rep.is_tree_child = true;

    SearchState st(instance);
    std::vector<uint8_t> used_x(instance.taxa.size(), 0);
    std::vector<uint8_t> terminal(instance.taxa.size(), 0);
    bool saw_terminal = false;
    bool shape_ok = true;

    for (const Pair& p : s.entries) {
        if (p.x < 0 || static_cast<size_t>(p.x) >= instance.taxa.size()) {
            shape_ok = false;
            rep.is_tree_child = false;
            break;
        }
        if (p.is_terminal()) {
            if (saw_terminal) rep.is_tree_child = false; // s <= r+1 violated
            saw_terminal = true;
            terminal[static_cast<size_t>(p.x)] = 1;
            continue;
        }
        if (saw_terminal) { // pairs after a terminal: not a cherry picking sequence
            shape_ok = false;
            rep.is_tree_child = false;
            break;
        }
        if (p.y < 0 || static_cast<size_t>(p.y) >= instance.taxa.size() || p.x == p.y) {
            shape_ok = false;
            rep.is_tree_child = false;
            break;
        }
        if (used_x[static_cast<size_t>(p.y)]) rep.is_tree_child = false;
        st.apply_pair(p);
        used_x[static_cast<size_t>(p.x)] = 1;
    }

    rep.is_cps = shape_ok && saw_terminal && st.all_trees_single_leaf();
    if (rep.is_cps) {
        for (size_t i = 0; i < instance.trees.size(); ++i) {
            Tree t = st.extract_tree(i);
            auto leaves = t.leaf_set();
            if (leaves.size() != 1 || !terminal[static_cast<size_t>(leaves[0])]) {
                rep.is_cps = false;
                break;
            }
        }
    }
    return rep;
}

} // namespace treechild
