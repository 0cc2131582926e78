#include <doctest.h>

#include "test_data.hpp"
#include "treechild/forest.hpp"
#include "treechild/newick.hpp"

using namespace treechild;
namespace nk = treechild::newick;

TEST_CASE("parse a simple instance") {
    Instance inst = nk::parse_instance("((a,b),(c,d));\n");
    CHECK(inst.n() == 4);
    CHECK(inst.t() == 1);
    CHECK(inst.taxa.label(0) == "a");
    CHECK(inst.taxa.label(3) == "d");
    SearchState st(inst);
    CHECK(st.cc(inst.taxa.find("a"), inst.taxa.find("b")) == 1);
    CHECK(st.cc(inst.taxa.find("c"), inst.taxa.find("d")) == 1);
    CHECK(st.unique_cherries() == 2);
}

TEST_CASE("multifurcation is rejected") {
    CHECK_THROWS_WITH_AS(nk::parse_instance("((a,b,c),d);\n"),
                         doctest::Contains("multifurcating"), nk::ParseError);
    try {
        nk::parse_instance("((a,b,c),d);\n");
    } catch (const nk::ParseError& e) {
        CHECK(e.kind() == nk::ErrorKind::Multifurcation);
    }
}

TEST_CASE("distinct error categories") {
    auto kind_of = [](const char* text) {
        try {
            nk::parse_instance(text);
        } catch (const nk::ParseError& e) {
            return e.kind();
        }
        return nk::ErrorKind::EmptyInput;
    };
    CHECK(kind_of("((a,b),(c,d);\n") == nk::ErrorKind::UnbalancedParens);
    CHECK(kind_of("((a,b),(a,d));\n") == nk::ErrorKind::DuplicateLeaf);
    CHECK(kind_of("((a,b),(c,d));\n((a,b),(c,e));\n") == nk::ErrorKind::LeafSetMismatch);
    CHECK(kind_of("((a),b);\n") == nk::ErrorKind::UnaryNode);
    CHECK(kind_of("((a,b),(c,d))\n") == nk::ErrorKind::MissingSemicolon);
    CHECK(kind_of("\n  \n") == nk::ErrorKind::EmptyInput);
}

TEST_CASE("the four-tree instance parses to t=4, n=5") {
    Instance inst = tcdata::four_trees();
    CHECK(inst.t() == 4);
    CHECK(inst.n() == 5);
}

TEST_CASE("canonical tree writing") {
    Instance inst = nk::parse_instance("((b,a),c);\n");
    CHECK(nk::write_tree(inst.trees[0], inst.taxa) == "((a,b),c);");

    Instance single = nk::parse_instance("a;\n");
    CHECK(nk::write_tree(single.trees[0], single.taxa) == "a;");
}

TEST_CASE("parse-write round trip is canonical") {
    Instance inst = tcdata::four_trees();
    for (const Tree& t : inst.trees) {
        std::string s = nk::write_tree(t, inst.taxa);
        Instance again = nk::parse_instance(s + "\n");
        CHECK(nk::write_tree(again.trees[0], again.taxa) == s);
    }
}

TEST_CASE("internal labels and branch lengths are ignored with warnings") {
    std::vector<std::string> warnings;
    Instance inst = nk::parse_instance("((a:0.5,b:1e-3)anc:2,c);\n", &warnings);
    CHECK(inst.n() == 3);
    CHECK(warnings.size() == 4);
    CHECK(nk::write_tree(inst.trees[0], inst.taxa) == "((a,b),c);");
}

TEST_CASE("comment lines are skipped") {
    Instance inst = nk::parse_instance("# generator_reticulations: 3\n((a,b),c);\n");
    CHECK(inst.t() == 1);
}

TEST_CASE("network round trip through eNewick") {
    Instance inst = tcdata::four_trees();
    CherryPickingSequence s = tcdata::optimal_sequence(inst.taxa);
    TreeChildNetwork net = network_from_sequence(inst.taxa, s);

    std::string text = nk::write_network(net, inst.taxa);
    // the sequence revisits c twice and a once: one in-3 reticulation above c
    // and one in-2 above a, so two hybrid tags across five occurrences
    int tags = 0;
    for (size_t p = text.find("#H"); p != std::string::npos; p = text.find("#H", p + 1)) ++tags;
    CHECK(tags == 5);
    CHECK(text.find("#H2") != std::string::npos);
    CHECK(text.find("#H3") == std::string::npos);
    CHECK(reticulation_number(net) == 3);

    TreeChildNetwork back = nk::parse_network(text);
    CHECK(isomorphic(net, back));
    CHECK(nk::write_network(back, back.taxa) == text);
}

TEST_CASE("a plain tree serializes without hybrid tags") {
    Instance inst = nk::parse_instance("((a,b),c);\n");
    CherryPickingSequence s;
    s.taxa_count = 3;
    s.entries = {Pair{inst.taxa.find("a"), inst.taxa.find("b")},
                 Pair{inst.taxa.find("b"), inst.taxa.find("c")},
                 Pair{inst.taxa.find("c"), kNoTaxon}};
    TreeChildNetwork net = network_from_sequence(inst.taxa, s);
    std::string text = nk::write_network(net, inst.taxa);
    CHECK(text == "((a,b),c);");
}

TEST_CASE("gap network literal parses and round-trips") {
    TreeChildNetwork net = nk::parse_network(tcdata::kGapNetwork);
    CHECK(net.leaf_count() == 5);
    CHECK(net.reticulation_count() == 2);
    std::string text = nk::write_network(net, net.taxa);
    TreeChildNetwork back = nk::parse_network(text);
    CHECK(nk::write_network(back, back.taxa) == text);
    CHECK(isomorphic(net, back));
}
