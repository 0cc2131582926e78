#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "treechild/sequence.hpp"
#include "treechild/tree.hpp"

namespace treechild {

/// Marker into the undo log plus scalar snapshots; undoing to a checkpoint
/// restores the state taken at it exactly.
struct Checkpoint {
    size_t log_pos = 0;
    size_t seq_len = 0;
    int n_prime = 0;
    int dead_cherries = 0;
};

enum class TrivialStatus {
    Pick, ///< an applicable trivial pair exists
    Dead, ///< some cherry has both taxa forbidden; no extension can succeed
    None, ///< no trivial cherry left
};

struct TrivialPick {
    TrivialStatus status = TrivialStatus::None;
    Pair pair{};
};

/// Validation report for replaying a sequence on an instance.
struct SequenceReport {
    bool is_tree_child = false;
    bool is_cps = false; ///< every tree reduced to a single leaf named by a terminal
    int weight = 0;
};

/// The reduced instance T/S with incremental bookkeeping: cherry occurrence
/// counts, trivial cherries, forbidden leaves, redundancy records, and a
/// reversible edit log. One owner at a time; transfer between workers is by
/// value or by replay, never by sharing.
class SearchState {
public:
    explicit SearchState(const Instance& instance);

    // -- core reduction ----------------------------------------------------

    /// Applies (x, y): removes x and suppresses the parent in every tree where
    /// {x, y} is a cherry, marks x forbidden, and maintains all counters.
    /// Branch records are invalidated per the UpdateR rules. Returns the
    /// checkpoint taken before any edit.
    Checkpoint apply_pair(Pair p);

    void undo_to(const Checkpoint& cp);
    Checkpoint checkpoint() const;

    // -- queries -----------------------------------------------------------

    TrivialPick next_trivial() const;

    /// All ordered pairs (x, y) with {x, y} a cherry of some reduced tree,
    /// ascending; twice the number of unique cherries.
    std::vector<Pair> branch_candidates() const;

    int n_prime() const { return n_prime_; }
    int k_prime() const { return static_cast<int>(seq_.size()) - static_cast<int>(n_) + n_prime_; }
    size_t seq_len() const { return seq_.size(); }
    const std::vector<Pair>& sequence() const { return seq_; }
    size_t taxa_count() const { return n_; }
    size_t tree_count() const { return trees_.size(); }

    int cc(TaxonId a, TaxonId b) const { return cc_[key(a, b)]; }
    size_t unique_cherries() const { return cherries_.size(); }
    bool forbidden(TaxonId x) const { return forbidden_[static_cast<size_t>(x)] != 0; }
    bool all_trees_single_leaf() const { return cherries_.empty(); }

    /// The surviving taxon when every tree is down to one leaf.
    TaxonId final_leaf() const;

    // -- redundant-branch records -------------------------------------------

    /// Live record for ordered (x, y) whose recorded count matches the current
    /// occurrence count; the incremental form of membership in R.
    bool is_redundant(Pair p) const;

    /// Installs/overwrites the record for p at the current occurrence count
    /// (the sibling-loop R' accumulation); undone by the enclosing rollback.
    void set_branch_record(Pair p);

    struct RecordEntry {
        Pair pair;
        uint16_t count;
    };
    /// Live records as of a past checkpoint (reconstructed through the log).
    std::vector<RecordEntry> records_at(const Checkpoint& cp) const;
    void install_records(const std::vector<RecordEntry>& records);

    // -- digests & test support ---------------------------------------------

    /// Hash of (cc, n', forbidden, sequence) at a past checkpoint; pairs with
    /// digest() on a replayed state.
    uint64_t digest_at(const Checkpoint& cp) const;
    uint64_t digest() const;

    /// Current reduced tree i as a standalone Tree.
    Tree extract_tree(size_t i) const;

    /// Full structural fingerprint (trees, counts, queues, records); deep
    /// equality of states is fingerprint equality.
    std::string fingerprint(const TaxonTable& taxa) const;

    std::vector<std::pair<TaxonId, TaxonId>> trivial_cherries() const;
    std::vector<TaxonId> forbidden_set() const;

    /// Recomputes cc / trivial set / n' from the trees and compares; returns
    /// an error description on mismatch. Test hook.
    std::optional<std::string> check_invariants() const;

private:
    struct TreeSlot {
        struct Node {
            int parent = -1;
            int child[2] = {-1, -1};
            TaxonId taxon = kNoTaxon;
        };
        std::vector<Node> nodes;
        int root = -1;
    };

    struct Record {
        uint16_t count = 0;
        bool live = false;
    };

    enum class EditKind : uint8_t {
        LeafRemoved,
        CcSet,
        CherryAdd,
        CherryRemove,
        TrivialAdd,
        TrivialRemove,
        PartnerAdd,
        PartnerRemove,
        ForbiddenAdd,
        SeqPush,
        RecordWrite,
    };

    struct Edit {
        EditKind kind;
        int32_t a = 0, b = 0, c = 0, d = 0, e = 0;
    };

    size_t key(TaxonId a, TaxonId b) const {
        if (a > b) std::swap(a, b);
        return static_cast<size_t>(a) * n_ + static_cast<size_t>(b);
    }
    uint32_t record_key(Pair p) const {
        return static_cast<uint32_t>(p.x) * static_cast<uint32_t>(n_) + static_cast<uint32_t>(p.y);
    }

    bool bitset_get(TaxonId x, size_t tree) const;
    void bitset_clear(TaxonId x, size_t tree);
    void bitset_set(TaxonId x, size_t tree);
    int both_count(TaxonId a, TaxonId b) const;

    void cherry_list_add(size_t k);
    void cherry_list_remove(size_t k);
    void trivial_add(size_t k);
    void trivial_remove(size_t k);
    void partner_add(TaxonId x, TaxonId z);
    void partner_remove(TaxonId x, TaxonId z);
    void recheck_trivial(TaxonId a, TaxonId b);
    void bump_cherry(TaxonId y, TaxonId z);
    void kill_record(Pair p);
    void write_record(Pair p, Record next);

    size_t n_ = 0;
    size_t words_ = 0; ///< bitset words per taxon
    std::vector<TreeSlot> trees_;
    std::vector<std::vector<int>> leaf_node_; ///< [tree][taxon] -> arena id
    std::vector<uint64_t> in_tree_;           ///< [taxon * words_ + w]
    std::vector<int> tree_count_;             ///< trees containing each taxon
    int n_prime_ = 0;

    std::vector<uint16_t> cc_;      ///< unordered pair key -> occurrence count
    std::vector<int32_t> list_pos_; ///< position in cherries_ (or -1)
    std::vector<size_t> cherries_;  ///< keys with cc >= 1
    std::vector<int32_t> trivial_pos_;
    std::vector<size_t> trivial_;   ///< keys of trivial cherries
    std::vector<std::vector<TaxonId>> partners_;
    std::vector<int32_t> partner_pos_; ///< [x*n_+z] position of z in partners_[x]

    std::vector<uint8_t> forbidden_;
    int dead_cherries_ = 0; ///< cherries with both taxa forbidden

    std::vector<Pair> seq_;
    std::unordered_map<uint32_t, Record> records_;
    std::vector<Edit> log_;
};

/// Fresh replay of s on the instance: reports tree-child flag, whether s is a
/// cherry-picking sequence for the trees, and its weight.
SequenceReport apply_sequence(const Instance& instance, const CherryPickingSequence& s);

} // namespace treechild
