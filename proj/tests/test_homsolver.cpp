#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "qbex/core.hpp"
#include "qbex/homsolver.hpp"
#include "qbex/oracle.hpp"
#include "support.hpp"

using namespace qbex;
using namespace qbex::testing;

TEST_CASE("partial map checks cover only fully mapped atoms") {
    const Database edge = single_edge_db();
    const Database loop = edge_db({{2, 2}});
    const Database cycle = directed_cycle_db(2);

    CHECK(check_partial_hom(edge, loop, {}));
    CHECK(check_partial_hom(edge, loop, {{el(0), el(2)}, {el(1), el(2)}}));
    CHECK_FALSE(check_partial_hom(cycle, edge, {{el(0), el(0)}, {el(1), el(1)}}));

    CHECK(check_partial_hom(cycle, edge, {{el(0), el(0)}}));
    CHECK_FALSE(check_partial_hom(edge, loop, {{el(0), el(7)}}));
    CHECK_THROWS_AS(check_partial_hom(edge, loop, {{el(7), el(2)}}), std::invalid_argument);
}

TEST_CASE("identity is found as a homomorphism") {
    const Database db = example1();
    const auto h = find_hom(make_pointed(db, tup({0, 2})), make_pointed(db, tup({0, 2})));
    REQUIRE(h.has_value());
    CHECK(check_partial_hom(db, db, *h));
    CHECK(h->at(el(0)) == el(0));
    CHECK(h->at(el(2)) == el(2));
}

TEST_CASE("a product maps onto each factor") {
    const Database c2 = directed_cycle_db(2);
    const std::vector<PointedDatabase> factors{make_pointed(c2, tup({0})),
                                               make_pointed(c2, tup({1}))};
    const Product prod = product(factors);
    REQUIRE(prod.safe);
    const PointedDatabase pointed(prod.db, prod.point);
    for (const PointedDatabase& f : factors) {
        const auto h = find_hom(pointed, f);
        REQUIRE(h.has_value());
        CHECK(check_partial_hom(*prod.db, f.db(), *h));
    }
}

TEST_CASE("the two-cycle does not map onto a single edge") {
    const auto h = find_hom(make_pointed(directed_cycle_db(2), tup({0})),
                            make_pointed(single_edge_db(), tup({0})));
    CHECK_FALSE(h.has_value());
}

TEST_CASE("inconsistent point bindings yield no homomorphism") {
    const Database loop = edge_db({{0, 0}});
    const Database edge = single_edge_db();
    const auto h = find_hom(PointedDatabase(std::make_shared<Database>(loop), tup({0, 0})),
                            make_pointed(edge, tup({0, 1})));
    CHECK_FALSE(h.has_value());
    CHECK_THROWS_AS(find_hom(make_pointed(loop, tup({0})), make_pointed(edge, tup({0, 1}))),
                    std::invalid_argument);
}

TEST_CASE("single-atom query evaluates to the edge set") {
    const auto query = make_pointed(single_edge_db(), tup({0, 1}));
    const auto answers = evaluate_cq(query, edge_db({{5, 6}}));
    CHECK(answers == std::set<Tuple>{tup({5, 6})});
}

TEST_CASE("the canonical query of an instance answers its own point") {
    const Database db = example1();
    const Tuple point = tup({0, 1});
    const auto answers = evaluate_cq(make_pointed(db, point), db);
    CHECK(answers.count(point) == 1);
}

TEST_CASE("two-cycle query finds both symmetric endpoints") {
    const auto query = make_pointed(directed_cycle_db(2), tup({0}));
    const auto answers = evaluate_cq(query, edge_db({{0, 1}, {1, 0}, {1, 2}}));
    CHECK(answers == std::set<Tuple>{tup({0}), tup({1})});
}

TEST_CASE("found homomorphisms are sound") {
    std::mt19937 rng(9001);
    for (int trial = 0; trial < 80; ++trial) {
        const Database src = random_database(rng);
        const Database dst = random_database(rng);
        if (src.size() == 0 || dst.size() == 0)
            continue;
        const Tuple sp = random_tuple(rng, src.domain(), 1);
        const Tuple dp = random_tuple(rng, dst.domain(), 1);
        const auto h = find_hom(make_pointed(src, sp), make_pointed(dst, dp));
        if (!h)
            continue;
        CHECK(h->size() == src.size());
        CHECK(check_partial_hom(src, dst, *h));
        CHECK(h->at(sp[0]) == dp[0]);
    }
}

TEST_CASE("search agrees with exhaustive map enumeration") {
    std::mt19937 rng(9002);
    for (int trial = 0; trial < 60; ++trial) {
        const Database src = random_database(rng, 3, 4);
        const Database dst = random_database(rng, 3, 4);
        if (src.size() == 0 || dst.size() == 0)
            continue;
        const auto sp = make_pointed(src, random_tuple(rng, src.domain(), 1));
        const auto dp = make_pointed(dst, random_tuple(rng, dst.domain(), 1));
        const auto all = oracle::all_homs(sp, dp);
        const auto h = find_hom(sp, dp);
        CHECK(h.has_value() == !all.empty());
        if (h)
            CHECK(std::count(all.begin(), all.end(), *h) == 1);
    }
}

TEST_CASE("mapping into a product is mapping into every factor") {
    std::mt19937 rng(9003);
    int checked = 0;
    for (int trial = 0; trial < 80 && checked < 30; ++trial) {
        const Database x = random_database(rng, 3, 4);
        const Database y(x.schema(), random_database(rng, 3, 4).atoms());
        const Database w = random_database(rng, 3, 3);
        if (x.size() == 0 || y.size() == 0 || w.size() == 0)
            continue;
        const std::vector<PointedDatabase> factors{make_pointed(x, Tuple{}),
                                                   make_pointed(y, Tuple{})};
        const Product prod = product(factors);
        const auto wp = make_pointed(w, Tuple{});
        const bool into_product = find_hom(wp, PointedDatabase(prod.db, prod.point)).has_value();
        const bool into_both = find_hom(wp, factors[0]).has_value() &&
                               find_hom(wp, factors[1]).has_value();
        CHECK(into_product == into_both);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("enumeration visits every homomorphism and honors early stops") {
    std::mt19937 rng(9004);
    for (int trial = 0; trial < 40; ++trial) {
        const Database src = random_database(rng, 3, 3);
        const Database dst = random_database(rng, 3, 4);
        if (src.size() == 0 || dst.size() == 0)
            continue;
        const auto all =
            oracle::all_homs(make_pointed(src, Tuple{}), make_pointed(dst, Tuple{}));
        std::size_t count = 0;
        for_each_hom(src, dst, {}, [&](const Assignment&) {
            ++count;
            return true;
        });
        CHECK(count == all.size());
        if (!all.empty()) {
            std::size_t stopped = 0;
            for_each_hom(src, dst, {}, [&](const Assignment&) {
                ++stopped;
                return false;
            });
            CHECK(stopped == 1);
        }
    }
}

TEST_CASE("enumeration validates its inputs") {
    const Database edge = single_edge_db();
    CHECK_THROWS_AS(for_each_hom(edge, example1(), {}, [](const Assignment&) { return true; }),
                    std::invalid_argument);
    CHECK_THROWS_AS(for_each_hom(edge, edge, {{el(9), el(0)}},
                                 [](const Assignment&) { return true; }),
                    std::invalid_argument);

    std::size_t count = 0;
    const Database empty(edge.schema(), {});
    for_each_hom(empty, edge, {}, [&](const Assignment& h) {
        ++count;
        CHECK(h.empty());
        return true;
    });
    CHECK(count == 1);
}
