#pragma once

#include <string>
#include <vector>

#include "treechild/taxa.hpp"

namespace treechild {

/// One sequence entry (x, y). y == kNoTaxon marks the terminal entry (x, -).
struct Pair {
    TaxonId x = kNoTaxon;
    TaxonId y = kNoTaxon;

    bool is_terminal() const { return y == kNoTaxon; }
    friend bool operator==(const Pair& a, const Pair& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Pair& a, const Pair& b) { return !(a == b); }
    friend bool operator<(const Pair& a, const Pair& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    }
};

/// Ordered list of pairs with at most one terminal entry at the end.
/// Weight is length minus the number of taxa.
struct CherryPickingSequence {
    std::vector<Pair> entries;
    int taxa_count = 0;

    int weight() const { return static_cast<int>(entries.size()) - taxa_count; }
    size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    bool has_terminal() const { return !entries.empty() && entries.back().is_terminal(); }

    /// y_j != x_i for all i < j, and no terminal except as the last entry.
    bool is_tree_child() const {
        std::vector<bool> seen_x;
        for (size_t j = 0; j < entries.size(); ++j) {
            const Pair& p = entries[j];
            if (p.is_terminal()) {
                if (j + 1 != entries.size()) return false;
                continue;
            }
            for (size_t i = 0; i < j; ++i)
                if (entries[i].x == p.y) return false;
        }
        return true;
    }

    std::string to_string(const TaxonTable& taxa) const {
        std::string out;
        for (const Pair& p : entries) {
            out += '(';
            out += taxa.label(p.x);
            out += ',';
            out += p.is_terminal() ? "-" : taxa.label(p.y);
            out += ")\n";
        }
        return out;
    }
};

} // namespace treechild
