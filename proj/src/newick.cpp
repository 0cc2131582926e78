#include "treechild/newick.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

namespace treechild {
namespace newick {

namespace {

bool label_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

struct Cursor {
    const std::string& s;
    size_t pos = 0;
    size_t line;

    char peek() const { return pos < s.size() ? s[pos] : '\0'; }
    char take() { return pos < s.size() ? s[pos++] : '\0'; }
    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool done() const { return pos >= s.size(); }
};

std::string read_label(Cursor& c) {
    std::string out;
    while (!c.done() && label_char(c.peek())) out += c.take();
    return out;
}

// Branch lengths are accepted and dropped.
void skip_length(Cursor& c, std::vector<std::string>* warnings) {
    if (c.peek() != ':') return;
    c.take();
    size_t start = c.pos;
    while (!c.done()) {
        char ch = c.peek();
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '+' ||
            ch == 'e' || ch == 'E')
            c.take();
        else
            break;
    }
    if (c.pos == start)
        throw ParseError(ErrorKind::BadLabel, c.line, "':' without a branch length");
    if (warnings) warnings->push_back("line " + std::to_string(c.line) + ": branch length ignored");
}

// Leaf-label parse tree for one statement, before taxon ids exist.
struct RawNode {
    std::string label;        // leaves only
    std::vector<int> children;
};

int parse_subtree(Cursor& c, std::vector<RawNode>& arena, std::vector<std::string>* warnings) {
    c.skip_ws();
    if (c.peek() == '(') {
        c.take();
        std::vector<int> kids;
        kids.push_back(parse_subtree(c, arena, warnings));
        c.skip_ws();
        while (c.peek() == ',') {
            c.take();
            kids.push_back(parse_subtree(c, arena, warnings));
            c.skip_ws();
        }
        if (c.peek() != ')')
            throw ParseError(ErrorKind::UnbalancedParens, c.line, "expected ')' or ','");
        c.take();
        if (kids.size() == 1)
            throw ParseError(ErrorKind::UnaryNode, c.line, "internal node with a single child");
        if (kids.size() > 2)
            throw ParseError(ErrorKind::Multifurcation, c.line,
                             "multifurcating input (out-degree " + std::to_string(kids.size()) + ")");
        c.skip_ws();
        if (label_char(c.peek())) {
            std::string ignored = read_label(c);
            if (warnings)
                warnings->push_back("line " + std::to_string(c.line) + ": internal label '" +
                                    ignored + "' ignored");
        }
        skip_length(c, warnings);
        arena.push_back(RawNode{});
        int id = static_cast<int>(arena.size()) - 1;
        arena[static_cast<size_t>(id)].children = std::move(kids);
        return id;
    }
    std::string label = read_label(c);
    if (label.empty())
        throw ParseError(ErrorKind::BadLabel, c.line, "expected a leaf label");
    skip_length(c, warnings);
    arena.push_back(RawNode{});
    arena.back().label = std::move(label);
    return static_cast<int>(arena.size()) - 1;
}

struct RawTree {
    std::vector<RawNode> arena;
    int root;
    size_t line;
};

RawTree parse_statement(const std::string& stmt, size_t line, std::vector<std::string>* warnings) {
    Cursor c{stmt, 0, line};
    RawTree t;
    t.line = line;
    t.root = parse_subtree(c, t.arena, warnings);
    c.skip_ws();
    if (c.peek() != ';')
        throw ParseError(ErrorKind::MissingSemicolon, line, "statement not terminated by ';'");
    c.take();
    c.skip_ws();
    if (!c.done())
        throw ParseError(ErrorKind::TrailingGarbage, line, "content after ';'");
    return t;
}

void collect_labels(const RawTree& t, int node, std::vector<std::string>& out) {
    const RawNode& n = t.arena[static_cast<size_t>(node)];
    if (n.children.empty()) {
        out.push_back(n.label);
        return;
    }
    for (int c : n.children) collect_labels(t, c, out);
}

int build_tree(const RawTree& raw, int node, const TaxonTable& taxa, Tree& tree) {
    const RawNode& n = raw.arena[static_cast<size_t>(node)];
    if (n.children.empty()) return tree.add_leaf(taxa.find(n.label));
    int l = build_tree(raw, n.children[0], taxa, tree);
    int r = build_tree(raw, n.children[1], taxa, tree);
    return tree.add_internal(l, r);
}

} // namespace

Instance parse_instance(const std::string& text, std::vector<std::string>* warnings) {
    std::vector<RawTree> raws;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        size_t b = line.find_last_not_of(" \t\r");
        std::string stmt = line.substr(a, b - a + 1);
        if (stmt[0] == '#') continue;
        raws.push_back(parse_statement(stmt, lineno, warnings));
    }
    if (raws.empty()) throw ParseError(ErrorKind::EmptyInput, lineno, "no trees in input");

    std::vector<std::string> labels;
    collect_labels(raws[0], raws[0].root, labels);
    {
        auto sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i] == sorted[i - 1])
                throw ParseError(ErrorKind::DuplicateLeaf, raws[0].line,
                                 "duplicate leaf '" + sorted[i] + "'");
    }

    Instance inst;
    inst.taxa = TaxonTable::from_labels(labels);

    for (const RawTree& raw : raws) {
        std::vector<std::string> tl;
        collect_labels(raw, raw.root, tl);
        std::vector<std::string> sorted = tl;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i] == sorted[i - 1])
                throw ParseError(ErrorKind::DuplicateLeaf, raw.line,
                                 "duplicate leaf '" + sorted[i] + "'");
        if (sorted.size() != inst.taxa.size())
            throw ParseError(ErrorKind::LeafSetMismatch, raw.line,
                             "leaf set differs from the first tree");
        for (const std::string& s : sorted)
            if (!inst.taxa.contains(s))
                throw ParseError(ErrorKind::LeafSetMismatch, raw.line,
                                 "leaf '" + s + "' not in the shared leaf set");
        Tree t;
        t.root = build_tree(raw, raw.root, inst.taxa, t);
        inst.trees.push_back(std::move(t));
    }
    return inst;
}

namespace {

std::string write_subtree(const Tree& t, int node, const TaxonTable& taxa, TaxonId& min_out) {
    const Tree::Node& n = t.nodes[static_cast<size_t>(node)];
    if (n.is_leaf()) {
        min_out = n.leaf;
        return taxa.label(n.leaf);
    }
    TaxonId ml, mr;
    std::string l = write_subtree(t, n.child[0], taxa, ml);
    std::string r = write_subtree(t, n.child[1], taxa, mr);
    if (mr < ml) {
        std::swap(l, r);
        std::swap(ml, mr);
    }
    min_out = ml;
    return "(" + l + "," + r + ")";
}

} // namespace

std::string write_tree(const Tree& tree, const TaxonTable& taxa) {
    TaxonId m;
    return write_subtree(tree, tree.root, taxa, m) + ";";
}

// ---- eNewick writer ----------------------------------------------------

namespace {

// Id-free sort key: the subtree rendered with every reticulation expanded in
// place. Identical at all parents of a shared node, so child order survives
// a reparse.
const std::string& unfolded_key(const TreeChildNetwork& net, int node,
                                std::unordered_map<int, std::string>& memo,
                                const TaxonTable& taxa) {
    auto it = memo.find(node);
    if (it != memo.end()) return it->second;
    const auto& n = net.nodes[static_cast<size_t>(node)];
    std::string s;
    if (n.is_leaf()) {
        s = taxa.label(n.leaf);
    } else {
        std::vector<std::string> parts;
        for (int c : n.children) parts.push_back(unfolded_key(net, c, memo, taxa));
        std::sort(parts.begin(), parts.end());
        s = "(";
        for (size_t i = 0; i < parts.size(); ++i) {
            if (i) s += ',';
            s += parts[i];
        }
        s += ')';
    }
    return memo.emplace(node, std::move(s)).first->second;
}

struct NetWriter {
    const TreeChildNetwork& net;
    const TaxonTable& taxa;
    std::unordered_map<int, std::string> keys;
    std::unordered_map<int, TaxonId> min_reach;
    std::unordered_map<int, int> hybrid_id;
    int next_hybrid = 1;

    TaxonId min_reachable(int node) {
        auto it = min_reach.find(node);
        if (it != min_reach.end()) return it->second;
        const auto& n = net.nodes[static_cast<size_t>(node)];
        TaxonId m;
        if (n.is_leaf()) {
            m = n.leaf;
        } else {
            m = min_reachable(n.children[0]);
            for (size_t i = 1; i < n.children.size(); ++i)
                m = std::min(m, min_reachable(n.children[i]));
        }
        min_reach.emplace(node, m);
        return m;
    }

    std::string render(int node) {
        const auto& n = net.nodes[static_cast<size_t>(node)];
        if (n.is_reticulation()) {
            auto it = hybrid_id.find(node);
            if (it != hybrid_id.end()) return "#H" + std::to_string(it->second);
            int id = next_hybrid++;
            hybrid_id.emplace(node, id);
            return "(" + render(n.children[0]) + ")#H" + std::to_string(id);
        }
        if (n.is_leaf()) return taxa.label(n.leaf);
        std::vector<int> kids = n.children;
        std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
            TaxonId ma = min_reachable(a), mb = min_reachable(b);
            if (ma != mb) return ma < mb;
            return unfolded_key(net, a, keys, taxa) < unfolded_key(net, b, keys, taxa);
        });
        std::string s = "(";
        for (size_t i = 0; i < kids.size(); ++i) {
            if (i) s += ',';
            s += render(kids[i]);
        }
        s += ')';
        return s;
    }
};

} // namespace

std::string write_network(const TreeChildNetwork& net, const TaxonTable& taxa) {
    NetWriter w{net, taxa, {}, {}, {}, 1};
    return w.render(net.root) + ";";
}

// ---- eNewick reader (verify mode) --------------------------------------

namespace {

struct NetRaw {
    std::string label;       // leaf label, empty for internal
    int hybrid = 0;          // #H tag, 0 = none
    std::vector<int> children;
};

int parse_net_subtree(Cursor& c, std::vector<NetRaw>& arena) {
    c.skip_ws();
    std::vector<int> kids;
    std::string label;
    if (c.peek() == '(') {
        c.take();
        kids.push_back(parse_net_subtree(c, arena));
        c.skip_ws();
        while (c.peek() == ',') {
            c.take();
            kids.push_back(parse_net_subtree(c, arena));
            c.skip_ws();
        }
        if (c.peek() != ')')
            throw ParseError(ErrorKind::UnbalancedParens, c.line, "expected ')' or ','");
        c.take();
    } else if (label_char(c.peek())) {
        label = read_label(c);
    } else if (c.peek() != '#') {
        throw ParseError(ErrorKind::BadLabel, c.line, "expected subtree");
    }
    int hybrid = 0;
    c.skip_ws();
    if (c.peek() == '#') {
        c.take();
        if (c.take() != 'H')
            throw ParseError(ErrorKind::BadHybridTag, c.line, "expected '#H<i>'");
        std::string num;
        while (std::isdigit(static_cast<unsigned char>(c.peek()))) num += c.take();
        if (num.empty())
            throw ParseError(ErrorKind::BadHybridTag, c.line, "expected '#H<i>'");
        hybrid = std::stoi(num);
    }
    if (kids.empty() && label.empty() && hybrid == 0)
        throw ParseError(ErrorKind::BadLabel, c.line, "empty node");
    arena.push_back(NetRaw{std::move(label), hybrid, std::move(kids)});
    return static_cast<int>(arena.size()) - 1;
}

} // namespace

TreeChildNetwork parse_network(const std::string& text) {
    // single ';'-terminated statement; '#'-comment lines skipped
    std::string stmt;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            size_t a = line.find_first_not_of(" \t\r");
            if (a == std::string::npos) continue;
            if (line[a] == '#' && line.compare(a, 2, "#H") != 0) continue;
            stmt += line.substr(a);
        }
    }
    Cursor c{stmt, 0, 1};
    std::vector<NetRaw> arena;
    int root_raw = parse_net_subtree(c, arena);
    c.skip_ws();
    if (c.peek() != ';') throw ParseError(ErrorKind::MissingSemicolon, 1, "missing ';'");
    c.take();
    c.skip_ws();
    if (!c.done()) throw ParseError(ErrorKind::TrailingGarbage, 1, "content after ';'");

    // collect leaf labels
    std::vector<std::string> labels;
    for (const NetRaw& n : arena)
        if (!n.label.empty()) labels.push_back(n.label);
    {
        auto sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i] == sorted[i - 1])
                throw ParseError(ErrorKind::DuplicateLeaf, 1, "duplicate leaf '" + sorted[i] + "'");
    }

    TreeChildNetwork net;
    net.taxa = TaxonTable::from_labels(labels);

    // Hybrid tags merge into one node: the occurrence with children defines it.
    std::map<int, int> hybrid_node;                   // tag -> net node
    std::vector<int> raw_to_net(arena.size(), -1);

    auto net_node = [&](const NetRaw& raw) -> int {
        if (raw.hybrid != 0) {
            auto it = hybrid_node.find(raw.hybrid);
            if (it != hybrid_node.end()) return it->second;
            net.nodes.push_back(TreeChildNetwork::Node{});
            int id = static_cast<int>(net.nodes.size()) - 1;
            hybrid_node.emplace(raw.hybrid, id);
            return id;
        }
        net.nodes.push_back(TreeChildNetwork::Node{});
        return static_cast<int>(net.nodes.size()) - 1;
    };

    for (size_t i = 0; i < arena.size(); ++i) {
        const NetRaw& raw = arena[i];
        int id = net_node(raw);
        raw_to_net[i] = id;
        if (!raw.label.empty()) net.nodes[static_cast<size_t>(id)].leaf = net.taxa.find(raw.label);
        if (!raw.children.empty()) {
            auto& node = net.nodes[static_cast<size_t>(id)];
            if (!node.children.empty())
                throw ParseError(ErrorKind::BadHybridTag, 1,
                                 "hybrid tag defined with children more than once");
            for (int rc : raw.children) {
                int cid = raw_to_net[static_cast<size_t>(rc)];
                node.children.push_back(cid);
                net.nodes[static_cast<size_t>(cid)].parents.push_back(id);
            }
        }
    }
    net.root = raw_to_net[static_cast<size_t>(root_raw)];

    if (auto err = validate_network(net))
        throw ParseError(ErrorKind::MalformedNetwork, 1, *err);
    return net;
}

} // namespace newick
} // namespace treechild
