#include <algorithm>
#include <chrono>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "qbex/homsolver.hpp"
#include "qbex/oracle.hpp"
#include "qbex/qbe_cq.hpp"
#include "qbex/qbe_crpq.hpp"
#include "support.hpp"

using namespace qbex;
using namespace qbex::testing;

namespace {

bool edge_preserving(const GraphDatabase& src, const GraphDatabase& dst, const Assignment& h) {
    for (const auto& e : src.edges()) {
        const Element image_src = h.at(src.node(e.src));
        const Element image_dst = h.at(src.node(e.dst));
        const auto u = dst.node_index(image_src);
        const auto u2 = dst.node_index(image_dst);
        if (!u || !u2)
            return false;
        const std::string& label = src.alphabet()[static_cast<std::size_t>(e.label)];
        const auto l = dst.label_index(label);
        if (!l)
            return false;
        if (!std::binary_search(dst.edges().begin(), dst.edges().end(),
                                GraphDatabase::Edge{*u, *l, *u2}))
            return false;
    }
    return true;
}

ExampleSets node_examples(const GraphDatabase& g, std::vector<Tuple> pos,
                          std::vector<Tuple> neg) {
    return make_examples(std::span<const Element>(g.nodes()), std::move(pos), std::move(neg));
}

} // namespace

TEST_CASE("no strong homomorphism onto the six-cycle despite a graph homomorphism") {
    const GraphDatabase c2 = cycle_graph(2);
    const GraphDatabase c3 = cycle_graph(3);
    const GraphDatabase c6 = cycle_graph(6);
    const std::vector<PointedGraph> factors{make_pointed(c2, Tuple{}),
                                            make_pointed(c3, Tuple{})};
    CHECK_FALSE(strong_hom(factors, make_pointed(c6, Tuple{})).has_value());

    const std::vector<GraphDatabase> raw{c2, c3};
    const Database prod_db = to_database(graph_product(raw));
    const Database c6_db = to_database(c6);
    CHECK(find_hom(make_pointed(prod_db, Tuple{}), make_pointed(c6_db, Tuple{})).has_value());
}

TEST_CASE("the identity is a strong homomorphism") {
    const GraphDatabase c3 = cycle_graph(3);
    const std::vector<PointedGraph> factors{make_pointed(c3, tup({0}))};
    const auto h = strong_hom(factors, make_pointed(c3, tup({0})));
    REQUIRE(h.has_value());
    for (const Element& v : c3.nodes())
        CHECK(h->at(v) == v);
}

TEST_CASE("strong maps are ordinary graph homomorphisms") {
    std::mt19937 rng(7001);
    int found = 0;
    for (int trial = 0; trial < 80 && found < 25; ++trial) {
        const GraphDatabase a = random_graph(rng, 3);
        const GraphDatabase b = random_graph(rng, 3);
        const std::vector<PointedGraph> factors{make_pointed(a, Tuple{}),
                                                make_pointed(GraphDatabase(b), Tuple{})};
        const GraphDatabase target = random_graph(rng, 4);
        const auto h = strong_hom(factors, make_pointed(GraphDatabase(target), Tuple{}));
        if (!h)
            continue;
        ++found;
        const std::vector<GraphDatabase> raw{a, b};
        CHECK(edge_preserving(graph_product(raw), target, *h));
    }
    CHECK(found > 0);
}

TEST_CASE("strong homomorphisms refine the strong game hierarchy") {
    std::mt19937 rng(7002);
    for (int trial = 0; trial < 50; ++trial) {
        const GraphDatabase a = random_graph(rng, 3);
        const GraphDatabase b = random_graph(rng, 2);
        const GraphDatabase target = random_graph(rng, 3);
        const std::vector<PointedGraph> factors{make_pointed(GraphDatabase(a), Tuple{}),
                                                make_pointed(GraphDatabase(b), Tuple{})};
        const auto pointed_target = make_pointed(GraphDatabase(target), Tuple{});
        const bool hom = strong_hom(factors, pointed_target).has_value();
        const bool g3 = strong_pebble_game(factors, pointed_target, 3);
        const bool g2 = strong_pebble_game(factors, pointed_target, 2);
        if (hom)
            CHECK(g3);
        if (g3)
            CHECK(g2);
    }
}

TEST_CASE("the strong game agrees with the explicit game solver") {
    std::mt19937 rng(7003);
    for (int trial = 0; trial < 30; ++trial) {
        const GraphDatabase a = random_graph(rng, 2, 2, 4);
        const GraphDatabase b = random_graph(rng, 3, 2, 5);
        const GraphDatabase target = random_graph(rng, 4, 2, 8);
        if (a.size() * b.size() > 6)
            continue;
        const std::vector<PointedGraph> factors{make_pointed(GraphDatabase(a), Tuple{}),
                                                make_pointed(GraphDatabase(b), Tuple{})};
        const auto pointed_target = make_pointed(GraphDatabase(target), Tuple{});
        for (int k : {2, 3}) {
            const bool game = strong_pebble_game(factors, pointed_target, k);
            CHECK(game == oracle::game_tree_pebble(factors, pointed_target, k,
                                                   oracle::Convention::incremental));
            CHECK(game == oracle::game_tree_pebble(factors, pointed_target, k,
                                                   oracle::Convention::simultaneous));
        }
    }
}

TEST_CASE("two pebbles already defeat the duplicator on the six-cycle target") {
    // Every single node fails its reflexive containment constraint: the
    // two-cycle and three-cycle loop languages are not inside the six-cycle
    // loop language. Value cross-checked against the explicit solver.
    const std::vector<PointedGraph> factors{make_pointed(cycle_graph(2), Tuple{}),
                                            make_pointed(cycle_graph(3), Tuple{})};
    const auto target = make_pointed(cycle_graph(6), Tuple{});
    const bool frozen_value = false;
    CHECK(strong_pebble_game(factors, target, 2) == frozen_value);
    CHECK(oracle::game_tree_pebble(factors, target, 2, oracle::Convention::incremental) ==
          frozen_value);
    CHECK(oracle::game_tree_pebble(factors, target, 2, oracle::Convention::simultaneous) ==
          frozen_value);
}

TEST_CASE("a single factor wins the strong game against itself") {
    const std::vector<PointedGraph> factors{make_pointed(cycle_graph(3), tup({0}))};
    CHECK(strong_pebble_game(factors, make_pointed(cycle_graph(3), tup({0})), 2));
    CHECK_THROWS_AS(strong_pebble_game(factors, make_pointed(cycle_graph(3), tup({0})), 1),
                    std::invalid_argument);
}

TEST_CASE("strong fixpoints are schedule-independent") {
    std::mt19937 rng(7004);
    for (int trial = 0; trial < 25; ++trial) {
        const GraphDatabase a = random_graph(rng, 2);
        const GraphDatabase b = random_graph(rng, 3);
        const GraphDatabase target = random_graph(rng, 3);
        const std::vector<PointedGraph> factors{make_pointed(GraphDatabase(a), Tuple{}),
                                                make_pointed(GraphDatabase(b), Tuple{})};
        const auto pointed_target = make_pointed(GraphDatabase(target), Tuple{});
        const auto forward = strong_pebble_fixpoint(factors, pointed_target, 2);
        const auto reverse =
            strong_pebble_fixpoint(factors, pointed_target, 2, detail::SweepOrder::reverse);
        const auto parallel = strong_pebble_fixpoint(factors, pointed_target, 2,
                                                     detail::SweepOrder::forward, Exec::parallel);
        CHECK(forward.root_alive == reverse.root_alive);
        CHECK(forward.survivors == reverse.survivors);
        CHECK(forward.root_alive == parallel.root_alive);
        CHECK(forward.survivors == parallel.survivors);
    }
}

TEST_CASE("a rotation defeats separating the two-cycle endpoints") {
    const GraphDatabase c2 = cycle_graph(2);
    const ExampleSets ex = node_examples(c2, {tup({0})}, {tup({1})});
    const Verdict v = qbe_test_crpq(c2, ex);
    REQUIRE_FALSE(v.accepted);
    const auto* w = std::get_if<FailingNegative>(&v.witness);
    REQUIRE(w != nullptr);
    CHECK(w->negative == tup({1}));
    REQUIRE(w->hom.has_value());
    CHECK(w->hom->at(el(0)) == el(1));
    CHECK(w->hom->at(el(1)) == el(0));
}

TEST_CASE("a shared node tuple rejects both test variants") {
    const GraphDatabase c3 = cycle_graph(3);
    const ExampleSets ex = node_examples(c3, {tup({0})}, {tup({0})});
    CHECK_FALSE(qbe_test_crpq(c3, ex).accepted);
    CHECK_FALSE(qbe_test_crpq_pebble(c3, ex, 2).accepted);
}

TEST_CASE("accepting the strong test implies the desynchronized relational test") {
    std::mt19937 rng(7005);
    int accepted = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const GraphDatabase g = random_graph(rng, 3);
        const Database db = to_database(g);
        if (db.size() < 2)
            continue;
        std::uniform_int_distribution<std::size_t> pick(0, db.domain().size() - 1);
        const Tuple pos{db.domain()[pick(rng)]};
        const Tuple neg{db.domain()[pick(rng)]};
        const ExampleSets ex = make_examples(db, {pos}, {neg});
        if (!qbe_test_crpq(g, ex).accepted)
            continue;
        ++accepted;
        CHECK(qbe_test_desync(db, ex).accepted);
    }
    CHECK(accepted > 0);
}

TEST_CASE("the pebble test is at least as strict as the plain test") {
    std::mt19937 rng(7006);
    for (int trial = 0; trial < 60; ++trial) {
        const GraphDatabase g = random_graph(rng, 3);
        if (g.size() < 2)
            continue;
        std::uniform_int_distribution<std::size_t> pick(0, g.nodes().size() - 1);
        const ExampleSets ex = node_examples(g, {Tuple{g.nodes()[pick(rng)]}},
                                             {Tuple{g.nodes()[pick(rng)]}});
        const Verdict pebble = qbe_test_crpq_pebble(g, ex, 2);
        if (pebble.accepted)
            CHECK(qbe_test_crpq(g, ex).accepted);

        bool expected = true;
        for (const Tuple& a : ex.positive)
            for (const Tuple& b : ex.negative) {
                const std::vector<PointedGraph> factors{make_pointed(GraphDatabase(g), a)};
                if (strong_pebble_game(factors, make_pointed(GraphDatabase(g), b), 2))
                    expected = false;
            }
        CHECK(pebble.accepted == expected);
    }
}

TEST_CASE("definability sweeps the full node space") {
    const GraphDatabase c2 = cycle_graph(2);
    CHECK(definability_test_crpq(c2, {tup({0}), tup({1})}).accepted);
    CHECK_FALSE(definability_test_crpq(c2, {tup({0})}).accepted);
    CHECK(definability_test_crpq_pebble(c2, {tup({0}), tup({1})}, 2).accepted);
}

TEST_CASE("strong evaluations cover the positives and avoid the negatives") {
    std::mt19937 rng(7007);
    int checked = 0;
    for (int trial = 0; trial < 120 && checked < 15; ++trial) {
        const GraphDatabase g = random_graph(rng, 4);
        if (g.size() < 2)
            continue;
        std::uniform_int_distribution<std::size_t> pick(0, g.nodes().size() - 1);
        const ExampleSets ex = node_examples(g, {Tuple{g.nodes()[pick(rng)]}},
                                             {Tuple{g.nodes()[pick(rng)]}});
        const int k = static_cast<int>(g.size());
        if (!qbe_test_crpq_pebble(g, ex, k + 1).accepted)
            continue;
        ++checked;
        const auto game_eval = evaluate_ctw_explanation(g, ex, k);
        for (const Tuple& a : ex.positive)
            CHECK(game_eval.count(a) == 1);
        for (const Tuple& b : ex.negative)
            CHECK(game_eval.count(b) == 0);

        // With more pebbles than product nodes the game coincides with the
        // total-map search.
        REQUIRE(qbe_test_crpq(g, ex).accepted);
        CHECK(game_eval == evaluate_crpq_explanation(g, ex));
    }
    CHECK(checked > 0);
}

TEST_CASE("evaluations require an accepting test") {
    const GraphDatabase c3 = cycle_graph(3);
    const ExampleSets shared = node_examples(c3, {tup({0})}, {tup({0})});
    CHECK_THROWS_AS(evaluate_ctw_explanation(c3, shared, 1), PreconditionError);
    CHECK_THROWS_AS(evaluate_crpq_explanation(c3, shared), PreconditionError);
}

TEST_CASE("a shared containment cache changes nothing but the counters") {
    const GraphDatabase c2 = cycle_graph(2);
    const ExampleSets ex = node_examples(c2, {tup({0})}, {tup({1})});
    ContainmentCache cache(std::vector<GraphDatabase>{c2}, c2);
    cache.precompute_all(Exec::serial);
    CHECK(qbe_test_crpq(c2, ex) == qbe_test_crpq(c2, ex, {}, &cache));

    ContainmentCache wrong(std::vector<GraphDatabase>{c2, c2}, c2);
    CHECK_THROWS_AS(qbe_test_crpq(c2, ex, {}, &wrong), std::invalid_argument);

    ContainmentCache other(std::vector<GraphDatabase>{c2}, cycle_graph(3));
    CHECK_THROWS_AS(qbe_test_crpq(c2, ex, {}, &other), std::invalid_argument);
}

TEST_CASE("the node budget guards the product search") {
    const GraphDatabase c3 = cycle_graph(3);
    const ExampleSets ex = node_examples(c3, {tup({0}), tup({1})}, {tup({2})});
    CHECK_THROWS_AS(qbe_test_crpq(c3, ex, {}, nullptr, 4), NodeBudgetExceeded);
}

TEST_CASE("an expired deadline aborts the strong sweep") {
    const GraphDatabase c2 = cycle_graph(2);
    const ExampleSets ex = node_examples(c2, {tup({0})}, {tup({1})});
    TestOptions opt;
    opt.deadline.at = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    CHECK_THROWS_AS(qbe_test_crpq(c2, ex, opt), TimeBudgetExceeded);
}

TEST_CASE("node sweeps enumerate tuples lexicographically") {
    const GraphDatabase c2 = cycle_graph(2);
    const std::vector<Tuple> pairs = node_tuples(c2, 2);
    const std::vector<Tuple> expected{tup({0, 0}), tup({0, 1}), tup({1, 0}), tup({1, 1})};
    CHECK(pairs == expected);
}
