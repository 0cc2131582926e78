#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "treechild/network.hpp"
#include "treechild/tree.hpp"

namespace treechild {
namespace newick {

enum class ErrorKind {
    EmptyInput,
    UnbalancedParens,
    Multifurcation,
    UnaryNode,
    BadLabel,
    DuplicateLeaf,
    LeafSetMismatch,
    MissingSemicolon,
    TrailingGarbage,
    BadHybridTag,
    MalformedNetwork,
};

class ParseError : public std::runtime_error {
public:
    ParseError(ErrorKind kind, size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}
    ErrorKind kind() const { return kind_; }
    size_t line() const { return line_; }

private:
    ErrorKind kind_;
    size_t line_;
};

/// One ';'-terminated Newick statement per line; lines starting with '#' and
/// blank lines are skipped. All trees must be binary and share one leaf set.
/// Internal labels and branch lengths are dropped with a warning.
Instance parse_instance(const std::string& text, std::vector<std::string>* warnings = nullptr);

/// Canonical Newick: children ordered by the smallest TaxonId in their
/// subtree, ';'-terminated, no lengths.
std::string write_tree(const Tree& tree, const TaxonTable& taxa);

/// Extended Newick: each reticulation appears once in full as "(...)#Hi" and
/// as "#Hi" at its other parents, i assigned in discovery order of a
/// deterministic depth-first traversal with canonically ordered children.
std::string write_network(const TreeChildNetwork& net, const TaxonTable& taxa);

/// Verify-mode reader for the eNewick dialect written above.
TreeChildNetwork parse_network(const std::string& text);

} // namespace newick
} // namespace treechild
