// Compares the serial and OpenMP schedules of the batched kernels on
// randomized instances and prints a timing table. Verdicts are cross-checked
// between the two schedules as it runs.

#include <chrono>
#include <iomanip>
#include <iostream>
#include <random>
#include <vector>

#include "qbex/qbe_cq.hpp"
#include "qbex/qbe_crpq.hpp"

using namespace qbex;

namespace {

Database random_database(std::mt19937& rng, int domain, int atom_count) {
    Schema schema({{"E", 2}, {"F", 2}});
    std::uniform_int_distribution<int> elem(0, domain - 1);
    std::uniform_int_distribution<int> rel(0, 1);
    std::vector<Atom> atoms;
    for (int i = 0; i < atom_count; ++i)
        atoms.push_back(Atom{rel(rng), {Element::base(elem(rng)), Element::base(elem(rng))}});
    return Database(std::move(schema), std::move(atoms));
}

GraphDatabase random_graph(std::mt19937& rng, int nodes, int labels, int edge_count) {
    std::uniform_int_distribution<int> node(0, nodes - 1);
    std::uniform_int_distribution<int> label(0, labels - 1);
    std::vector<std::tuple<Element, std::string, Element>> edges;
    for (int i = 0; i < edge_count; ++i)
        edges.emplace_back(Element::base(node(rng)), std::string(1, static_cast<char>('a' + label(rng))),
                           Element::base(node(rng)));
    return GraphDatabase::from_edges(std::move(edges));
}

template <typename Fn>
double time_ms(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void report(const std::string& name, double serial, double parallel, bool agree) {
    std::cout << std::left << std::setw(34) << name << std::right << std::fixed
              << std::setprecision(1) << std::setw(10) << serial << " ms" << std::setw(10)
              << parallel << " ms" << std::setw(8) << std::setprecision(2)
              << (parallel > 0 ? serial / parallel : 0.0) << "x   " << (agree ? "agree" : "DISAGREE")
              << "\n";
}

} // namespace

int main() {
    std::cout << "worker threads: " << worker_count() << "\n\n";
    std::cout << std::left << std::setw(34) << "kernel" << std::right << std::setw(13) << "serial"
              << std::setw(13) << "parallel" << std::setw(9) << "speedup" << "\n";

    // Definability sweeps: one verdict per database, negatives swept inside.
    {
        std::mt19937 rng(7001);
        std::vector<Database> dbs;
        std::vector<Tuple> points;
        for (int i = 0; i < 10; ++i) {
            Database db = random_database(rng, 5, 12);
            if (db.size() < 2)
                continue;
            points.push_back({db.domain()[0], db.domain()[1]});
            dbs.push_back(std::move(db));
        }
        std::vector<Verdict> serial_out, parallel_out;
        const double ts = time_ms([&] {
            for (std::size_t i = 0; i < dbs.size(); ++i)
                serial_out.push_back(definability_test_pebble(dbs[i], {points[i]}, 3,
                                                              {Exec::serial, {}}));
        });
        const double tp = time_ms([&] {
            for (std::size_t i = 0; i < dbs.size(); ++i)
                parallel_out.push_back(definability_test_pebble(dbs[i], {points[i]}, 3,
                                                                {Exec::parallel, {}}));
        });
        report("definability sweep, 3-pebble", ts, tp, serial_out == parallel_out);
    }

    // Desynchronized pair matrices.
    {
        std::mt19937 rng(7002);
        std::vector<Database> dbs;
        std::vector<ExampleSets> exs;
        for (int i = 0; i < 12; ++i) {
            Database db = random_database(rng, 5, 12);
            if (db.size() < 4)
                continue;
            auto all = domain_tuples(db, 2);
            std::vector<Tuple> pos(all.begin(), all.begin() + 3);
            std::vector<Tuple> neg(all.end() - 8, all.end());
            exs.push_back(make_examples(db, pos, neg));
            dbs.push_back(std::move(db));
        }
        std::vector<Verdict> serial_out, parallel_out;
        const double ts = time_ms([&] {
            for (std::size_t i = 0; i < dbs.size(); ++i)
                serial_out.push_back(
                    qbe_test_desync_pebble(dbs[i], exs[i], 3, {Exec::serial, {}}));
        });
        const double tp = time_ms([&] {
            for (std::size_t i = 0; i < dbs.size(); ++i)
                parallel_out.push_back(
                    qbe_test_desync_pebble(dbs[i], exs[i], 3, {Exec::parallel, {}}));
        });
        report("desync pair matrix, 3-pebble", ts, tp, serial_out == parallel_out);
    }

    // Evaluation sweeps on accepted instances (no negatives, safe products).
    {
        std::mt19937 rng(7003);
        std::vector<Database> dbs;
        std::vector<ExampleSets> exs;
        while (dbs.size() < 8) {
            Database db = random_database(rng, 5, 14);
            if (db.size() < 2)
                continue;
            ExampleSets ex = make_examples(db, {{db.domain()[0], db.domain()[1]}}, {});
            if (!qbe_test_pebble(db, ex, 3).accepted)
                continue;
            exs.push_back(std::move(ex));
            dbs.push_back(std::move(db));
        }
        std::vector<std::set<Tuple>> serial_out, parallel_out;
        const double ts = time_ms([&] {
            for (std::size_t i = 0; i < dbs.size(); ++i)
                serial_out.push_back(
                    evaluate_tw_explanation(dbs[i], exs[i], 2, {Exec::serial, {}}));
        });
        const double tp = time_ms([&] {
            for (std::size_t i = 0; i < dbs.size(); ++i)
                parallel_out.push_back(
                    evaluate_tw_explanation(dbs[i], exs[i], 2, {Exec::parallel, {}}));
        });
        report("evaluation sweep, treewidth 2", ts, tp, serial_out == parallel_out);
    }

    // Fixpoint marking rounds inside a single large game.
    {
        std::mt19937 rng(7004);
        Database big = random_database(rng, 7, 24);
        Database target = random_database(rng, 6, 20);
        while (big.size() < 2 || target.size() < 1) {
            big = random_database(rng, 7, 24);
            target = random_database(rng, 6, 20);
        }
        PointedDatabase src = make_pointed(big, {big.domain()[0]});
        PointedDatabase dst = make_pointed(target, {target.domain()[0]});
        bool rs = false, rp = false;
        const double ts = time_ms([&] { rs = pebble_game(src, dst, 4, Exec::serial); });
        const double tp = time_ms([&] { rp = pebble_game(src, dst, 4, Exec::parallel); });
        report("single game marking, 4-pebble", ts, tp, rs == rp);
    }

    // Containment cache precompute.
    {
        std::mt19937 rng(7005);
        GraphDatabase g = random_graph(rng, 9, 2, 22);
        ContainmentCache serial_cache({g, g}, g);
        ContainmentCache parallel_cache({g, g}, g);
        const double ts = time_ms([&] { serial_cache.precompute_all(Exec::serial); });
        const double tp = time_ms([&] { parallel_cache.precompute_all(Exec::parallel); });
        bool agree = true;
        for (std::size_t f = 0; f < 2; ++f)
            for (int v = 0; v < static_cast<int>(g.size()); ++v)
                for (int v2 = 0; v2 < static_cast<int>(g.size()); ++v2)
                    for (int u = 0; u < static_cast<int>(g.size()); ++u)
                        for (int u2 = 0; u2 < static_cast<int>(g.size()); ++u2)
                            agree = agree && serial_cache.query(f, v, v2, u, u2) ==
                                                 parallel_cache.query(f, v, v2, u, u2);
        report("containment cache precompute", ts, tp, agree);
    }

    return 0;
}
