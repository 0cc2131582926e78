#include <doctest.h>

#include "test_data.hpp"
#include "treechild/generator.hpp"
#include "treechild/newick.hpp"
#include "treechild/oracle.hpp"
#include "treechild/search.hpp"

using namespace treechild;
namespace nk = treechild::newick;

TEST_CASE("tcs2 on the four-tree instance") {
    Instance inst = tcdata::four_trees();

    SearchState s2(inst);
    CHECK(!tcs2(s2, 2).has_value());

    SearchState s3(inst);
    auto seq = tcs2(s3, 3);
    REQUIRE(seq.has_value());
    SequenceReport rep = apply_sequence(inst, *seq);
    CHECK(rep.is_cps);
    CHECK(rep.is_tree_child);
    CHECK(rep.weight == 3);
}

TEST_CASE("degenerate leaf sets") {
    SUBCASE("one taxon") {
        Instance inst = nk::parse_instance("a;\n");
        SolveResult res = solve(inst);
        REQUIRE(res.outcome == SolveOutcome::Solved);
        CHECK(res.solution->weight == 0);
        REQUIRE(res.solution->sequence.entries.size() == 1);
        CHECK(res.solution->sequence.entries[0].is_terminal());
        CHECK(nk::write_network(res.solution->network, inst.taxa) == "a;");
    }
    SUBCASE("two taxa") {
        Instance inst = nk::parse_instance("(b,a);\n(b,a);\n");
        SolveResult res = solve(inst);
        REQUIRE(res.outcome == SolveOutcome::Solved);
        CHECK(res.solution->weight == 0);
        CHECK(nk::write_network(res.solution->network, inst.taxa) == "(a,b);");
    }
}

TEST_CASE("a single tree solves greedily at any k") {
    Instance inst = nk::parse_instance("((((a,b),c),d),e);\n");
    SearchState st(inst);
    auto seq = tcs2(st, 0);
    REQUIRE(seq.has_value());
    CHECK(seq->weight() == 0);
}

TEST_CASE("solve end to end on the four-tree instance") {
    Instance inst = tcdata::four_trees();
    SolveResult res = solve(inst);
    REQUIRE(res.outcome == SolveOutcome::Solved);
    const Solution& sol = *res.solution;
    CHECK(sol.weight == 3);
    CHECK(reticulation_number(sol.network) == 3);
    CHECK(is_tree_child(sol.network));
    for (const Tree& t : inst.trees) CHECK(displays(sol.network, t) == DisplayResult::Yes);
    CHECK(sol.stats.recursive_calls > 0);
    CHECK(sol.stats.max_kprime <= 3);
    CHECK(sol.stats.max_success_branch_unique <= 4 * 3);
}

TEST_CASE("solve honors max_k") {
    Instance inst = tcdata::four_trees();
    SolveOptions opts;
    opts.max_k = 2;
    SolveResult res = solve(inst, opts);
    CHECK(res.outcome == SolveOutcome::NoSolutionWithinMaxK);
}

TEST_CASE("identical trees solve at weight 0 and return the tree") {
    Instance inst = nk::parse_instance("((a,(b,c)),d);\n((a,(b,c)),d);\n((a,(b,c)),d);\n");
    SolveResult res = solve(inst);
    REQUIRE(res.outcome == SolveOutcome::Solved);
    CHECK(res.solution->weight == 0);
    CHECK(nk::write_network(res.solution->network, inst.taxa) == "((a,(b,c)),d);");
}

TEST_CASE("two quartets: weight 2") {
    Instance inst = nk::parse_instance("((a,b),(c,d));\n((a,c),(b,d));\n");
    SolveResult res = solve(inst);
    REQUIRE(res.outcome == SolveOutcome::Solved);
    CHECK(res.solution->weight == 2);
}

TEST_CASE("redundant sibling branches are pruned") {
    // one tree with cherries {a,b} and {c,d}: after the (c,d) branch returns,
    // the (a,b) subtree finds (c,d) trivial-but-redundant and gives up
    Instance inst = nk::parse_instance("((a,b),(c,d));\n");
    SearchStats with_rbe, without_rbe;
    {
        SearchState st(inst);
        CHECK(tcs2(st, 1, true, &with_rbe).has_value());
    }
    {
        SearchState st(inst);
        CHECK(tcs2(st, 1, false, &without_rbe).has_value());
    }
    CHECK(with_rbe.recursive_calls <= without_rbe.recursive_calls);
}

TEST_CASE("a redundant trivial cherry aborts the branch") {
    // the didactic single-tree state: a record for (c,d) left by an explored
    // sibling, with (a,b) applied on the current path; the trivial-cherry
    // step then finds (c,d) redundant and gives up
    Instance inst = nk::parse_instance("((a,b),(c,d));\n");
    auto id = [&](const char* s) { return inst.taxa.find(s); };
    Pair cd{id("c"), id("d")};

    SearchState st(inst);
    st.set_branch_record(cd);
    st.apply_pair(Pair{id("a"), id("b")});
    REQUIRE(st.is_redundant(cd));
    CHECK(!tcs2(st, 5, true).has_value());

    SearchState st2(inst);
    st2.set_branch_record(cd);
    st2.apply_pair(Pair{id("a"), id("b")});
    CHECK(tcs2(st2, 5, false).has_value());
}

TEST_CASE("optimality matches the oracle on random small instances") {
    int checked = 0;
    for (uint64_t seed = 1; seed <= 60; ++seed) {
        GenParams params;
        params.n = 4 + static_cast<int>(seed % 3);
        params.k = 1 + static_cast<int>(seed % 3);
        params.t = 2 + static_cast<int>(seed % 3);
        params.seed = 5000 + seed;
        Instance inst = generate_instance(params).instance;

        OracleResult want = brute_force_htc(inst, params.k + 2);
        REQUIRE(want.min_weight.has_value());
        SolveResult got = solve(inst);
        REQUIRE(got.outcome == SolveOutcome::Solved);
        CHECK(got.solution->weight == *want.min_weight);
        ++checked;
    }
    CHECK(checked == 60);
}

TEST_CASE("weight is invariant under rbe and cluster flags") {
    for (uint64_t seed = 11; seed <= 25; ++seed) {
        GenParams params{5, 2, 3, seed};
        Instance inst = generate_instance(params).instance;
        std::optional<int> expect;
        for (bool rbe : {true, false}) {
            for (bool clusters : {true, false}) {
                SolveOptions opts;
                opts.use_rbe = rbe;
                opts.use_clusters = clusters;
                SolveResult res = solve(inst, opts);
                REQUIRE(res.outcome == SolveOutcome::Solved);
                if (!expect)
                    expect = res.solution->weight;
                else
                    CHECK(*expect == res.solution->weight);
            }
        }
    }
}

TEST_CASE("recursion counts respect the branching ceiling for small k") {
    Instance inst = tcdata::four_trees();
    SolveOptions opts;
    opts.use_clusters = false;
    SolveResult res = solve(inst, opts);
    REQUIRE(res.outcome == SolveOutcome::Solved);
    const auto& per_k = res.solution->stats.calls_per_k;
    for (size_t k = 0; k < per_k.size(); ++k) {
        long double ceiling = 1; // sum of (8k)^i for i = 0..k
        long double pow = 1;
        for (size_t i = 1; i <= k; ++i) {
            pow *= 8.0L * static_cast<long double>(k);
            ceiling += pow;
        }
        CHECK(static_cast<long double>(per_k[k]) <= ceiling);
    }
}

TEST_CASE("time limit aborts with a distinct outcome") {
    // large instance, absurd time limit
    GenParams params{24, 6, 8, 77};
    Instance inst = generate_instance(params).instance;
    SolveOptions opts;
    opts.time_limit_s = 1e-7;
    opts.poll_interval = 1;
    SolveResult res = solve(inst, opts);
    CHECK(res.outcome == SolveOutcome::TimedOut);
}
