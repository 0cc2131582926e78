#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace treechild {

using TaxonId = int32_t;
constexpr TaxonId kNoTaxon = -1;

/// Bijection between taxon name strings and dense ids 0..n-1.
/// Ids follow lexicographic label order so canonical serializations are
/// stable under label renaming of the input lines.
class TaxonTable {
public:
    TaxonTable() = default;

    /// Build from a set of labels; sorts them and assigns ids by rank.
    static TaxonTable from_labels(std::vector<std::string> labels) {
        std::sort(labels.begin(), labels.end());
        TaxonTable t;
        for (auto& s : labels) {
            if (!t.index_.emplace(s, static_cast<TaxonId>(t.labels_.size())).second)
                throw std::invalid_argument("duplicate taxon label: " + s);
            t.labels_.push_back(std::move(s));
        }
        return t;
    }

    TaxonId find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? kNoTaxon : it->second;
    }

    const std::string& label(TaxonId id) const { return labels_.at(static_cast<size_t>(id)); }
    size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

    bool contains(const std::string& name) const { return index_.count(name) > 0; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, TaxonId> index_;
};

} // namespace treechild
