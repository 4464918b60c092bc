// Batch frontend: parses database and example files, dispatches to the
// class/task matrix, prints one JSON report to standard output.
//
// Exit codes: 0 accept, 2 reject, 1 usage/parse/budget error.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbex/io.hpp"
#include "qbex/oracle.hpp"
#include "qbex/qbe_cq.hpp"
#include "qbex/qbe_crpq.hpp"

using nlohmann::json;

namespace {

struct Options {
    std::string model;
    std::string task = "qbe";
    std::string cls;
    std::string db_path;
    std::string pos_path;
    std::string neg_path;
    bool emit_witness = false;
    bool emit_eval = false;
    bool emit_canonical = false;
    bool dump = false;
    bool oracle = false;
    std::size_t budget_nodes = qbex::kDefaultNodeBudget;
    double budget_seconds = 0;
};

struct ClassSpec {
    bool graph = false;
    bool pebble = false;
    int k = 0; // treewidth bound; the game parameter is k + 1
    bool desync = false;
};

ClassSpec parse_class(const std::string& cls) {
    ClassSpec spec;
    std::string head = cls;
    const std::size_t colon = cls.find(':');
    if (colon != std::string::npos) {
        head = cls.substr(0, colon);
        const std::string tail = cls.substr(colon + 1);
        try {
            std::size_t used = 0;
            spec.k = std::stoi(tail, &used);
            if (used != tail.size())
                throw std::invalid_argument(tail);
        } catch (const std::exception&) {
            throw std::runtime_error("class parameter must be an integer: '" + cls + "'");
        }
        if (spec.k < 1)
            throw std::runtime_error("class parameter must be >= 1: '" + cls + "'");
        spec.pebble = true;
    }
    if (head == "cq" || head == "ucq" || head == "crpq") {
        if (spec.pebble)
            throw std::runtime_error("class '" + head + "' takes no parameter");
    } else if (head == "tw" || head == "utw" || head == "ctw") {
        if (!spec.pebble)
            throw std::runtime_error("class '" + head + "' needs a parameter, e.g. " + head + ":2");
    } else {
        throw std::runtime_error("unknown class '" + cls + "'");
    }
    spec.graph = head == "crpq" || head == "ctw";
    spec.desync = head == "ucq" || head == "utw";
    return spec;
}

json element_json(const qbex::Element& e, const qbex::NameTable& names) {
    if (e.depth() == 1)
        return names.name(e.base_id());
    json arr = json::array();
    for (qbex::Symbol s : e.parts())
        arr.push_back(names.name(s));
    return arr;
}

json tuple_json(const qbex::Tuple& t, const qbex::NameTable& names) {
    json arr = json::array();
    for (const qbex::Element& e : t)
        arr.push_back(element_json(e, names));
    return arr;
}

json assignment_json(const qbex::Assignment& h, const qbex::NameTable& names) {
    json arr = json::array();
    for (const auto& [src, dst] : h)
        arr.push_back(json::array({element_json(src, names), element_json(dst, names)}));
    return arr;
}

json witness_json(const qbex::Verdict& v, const qbex::NameTable& names) {
    json w = json::object();
    if (std::holds_alternative<qbex::UnsafeProduct>(v.witness)) {
        w["kind"] = "unsafe-product";
    } else if (const auto* neg = std::get_if<qbex::FailingNegative>(&v.witness)) {
        w["kind"] = "failing-negative";
        w["negative"] = tuple_json(neg->negative, names);
        w["hom"] = neg->hom ? assignment_json(*neg->hom, names) : json();
    } else if (const auto* pair = std::get_if<qbex::FailingPair>(&v.witness)) {
        w["kind"] = "failing-pair";
        w["positive"] = tuple_json(pair->positive, names);
        w["negative"] = tuple_json(pair->negative, names);
        w["hom"] = pair->hom ? assignment_json(*pair->hom, names) : json();
    }
    return w;
}

json query_json(const qbex::PointedDatabase& q, const qbex::NameTable& names) {
    json atoms = json::array();
    for (const qbex::Atom& a : q.db().atoms()) {
        json atom = json::object();
        atom["rel"] = q.db().schema().name(a.rel);
        atom["args"] = tuple_json(a.args, names);
        atoms.push_back(std::move(atom));
    }
    json out = json::object();
    out["atoms"] = std::move(atoms);
    out["point"] = tuple_json(q.point(), names);
    return out;
}

json evaluation_json(const std::set<qbex::Tuple>& tuples, const qbex::NameTable& names) {
    json arr = json::array();
    for (const qbex::Tuple& t : tuples)
        arr.push_back(tuple_json(t, names));
    return arr;
}

std::uint64_t power_count(std::size_t base, std::size_t exponent) {
    double value = 1;
    for (std::size_t i = 0; i < exponent; ++i)
        value *= static_cast<double>(base);
    if (value > 1e18)
        return std::uint64_t{1} << 62;
    std::uint64_t out = 1;
    for (std::size_t i = 0; i < exponent; ++i)
        out *= base;
    return out;
}

// The relational dispatch. Fills the report and returns the verdict.
qbex::Verdict run_relational(const Options& opt, const ClassSpec& spec,
                             const qbex::NameTable& names, const qbex::Database& db,
                             const std::vector<qbex::Tuple>& pos,
                             const std::vector<qbex::Tuple>& neg, const qbex::TestOptions& topt,
                             json& report) {
    const bool define = opt.task == "define";
    qbex::ExampleSets ex = qbex::make_examples(db, pos, neg);

    qbex::Verdict verdict;
    if (spec.desync) {
        if (define)
            verdict = spec.pebble
                          ? qbex::definability_test_desync_pebble(db, pos, spec.k + 1, topt)
                          : qbex::definability_test_desync(db, pos, topt);
        else
            verdict = spec.pebble ? qbex::qbe_test_desync_pebble(db, ex, spec.k + 1, topt)
                                  : qbex::qbe_test_desync(db, ex, topt);
    } else {
        if (define)
            verdict = spec.pebble ? qbex::definability_test_pebble(db, pos, spec.k + 1, topt)
                                  : qbex::definability_test_cq(db, pos, topt);
        else
            verdict = spec.pebble ? qbex::qbe_test_pebble(db, ex, spec.k + 1, topt)
                                  : qbex::qbe_test_cq(db, ex, topt);
    }

    // Definability is the QBE instance whose negatives are the rest of the
    // domain sweep; evaluation, canonicalization, and the oracle use that
    // completed instance.
    qbex::ExampleSets eval_ex = ex;
    std::uint64_t sweep = ex.negative.size();
    if (define) {
        std::vector<qbex::Tuple> completion;
        for (qbex::Tuple& t : qbex::domain_tuples(db, ex.arity))
            if (!std::binary_search(ex.positive.begin(), ex.positive.end(), t))
                completion.push_back(std::move(t));
        sweep = completion.size();
        eval_ex = qbex::make_examples(db, pos, std::move(completion));
    }

    std::uint64_t product_nodes = 0;
    if (!spec.desync)
        product_nodes = qbex::product(qbex::positive_factors(db, ex)).db->size();

    json stats = json::object();
    stats["cache_hits"] = 0;
    stats["cache_lookups"] = 0;
    stats["product_nodes"] = product_nodes;
    stats["tests_run"] = spec.desync ? sweep * ex.positive.size() : sweep;
    report["stats"] = std::move(stats);

    if (opt.emit_eval && verdict.accepted) {
        std::set<qbex::Tuple> eval;
        if (spec.pebble)
            eval = spec.desync ? qbex::evaluate_utw_explanation(db, eval_ex, spec.k, topt)
                               : qbex::evaluate_tw_explanation(db, eval_ex, spec.k, topt);
        else {
            auto canonical = qbex::canonical_explanation(
                db, eval_ex, spec.desync ? qbex::QueryClass::ucq : qbex::QueryClass::cq);
            if (canonical.query)
                eval = qbex::evaluate_cq(*canonical.query, db);
            for (const qbex::PointedDatabase& d : canonical.disjuncts)
                for (const qbex::Tuple& t : qbex::evaluate_cq(d, db))
                    eval.insert(t);
        }
        report["evaluation"] = evaluation_json(eval, names);
    }

    if (opt.emit_canonical && verdict.accepted) {
        auto canonical = qbex::canonical_explanation(
            db, eval_ex, spec.desync ? qbex::QueryClass::ucq : qbex::QueryClass::cq);
        json c = json::object();
        if (canonical.query) {
            c = query_json(*canonical.query, names);
        } else {
            json disjuncts = json::array();
            for (const qbex::PointedDatabase& d : canonical.disjuncts)
                disjuncts.push_back(query_json(d, names));
            c["disjuncts"] = std::move(disjuncts);
        }
        report["canonical"] = std::move(c);
    }

    if (opt.oracle) {
        bool oracle_accepted = true;
        auto shared = std::make_shared<const qbex::Database>(db);
        std::vector<qbex::PointedDatabase> factors = qbex::positive_factors(db, eval_ex);
        if (spec.desync) {
            for (const qbex::PointedDatabase& a : factors)
                for (const qbex::Tuple& b : eval_ex.negative) {
                    qbex::PointedDatabase target(shared, b);
                    const bool reached =
                        spec.pebble ? qbex::oracle::game_tree_pebble(
                                          a, target, spec.k + 1,
                                          qbex::oracle::Convention::incremental)
                                    : !qbex::oracle::all_homs(a, target).empty();
                    oracle_accepted = oracle_accepted && !reached;
                }
        } else {
            qbex::Product prod = qbex::product(factors);
            oracle_accepted = prod.safe;
            if (oracle_accepted) {
                qbex::PointedDatabase pointed(prod.db, prod.point);
                for (const qbex::Tuple& b : eval_ex.negative) {
                    qbex::PointedDatabase target(shared, b);
                    const bool reached =
                        spec.pebble ? qbex::oracle::game_tree_pebble(
                                          pointed, target, spec.k + 1,
                                          qbex::oracle::Convention::incremental)
                                    : !qbex::oracle::all_homs(pointed, target).empty();
                    oracle_accepted = oracle_accepted && !reached;
                }
            }
        }
        if (oracle_accepted != verdict.accepted)
            throw std::runtime_error("oracle disagrees with the engine verdict");
        std::cerr << "qbex: oracle agrees\n";
    }

    return verdict;
}

// The graph dispatch; the shared containment cache supplies the stats.
qbex::Verdict run_graph(const Options& opt, const ClassSpec& spec, const qbex::NameTable& names,
                        const qbex::GraphDatabase& g, const std::vector<qbex::Tuple>& pos,
                        const std::vector<qbex::Tuple>& neg, const qbex::TestOptions& topt,
                        json& report) {
    const bool define = opt.task == "define";
    qbex::ExampleSets ex = qbex::make_examples(g.nodes(), pos, neg);

    qbex::ContainmentCache cache(std::vector<qbex::GraphDatabase>(ex.positive.size(), g), g);

    qbex::Verdict verdict;
    if (define)
        verdict = spec.pebble ? qbex::definability_test_crpq_pebble(g, pos, spec.k + 1, topt,
                                                                    &cache, opt.budget_nodes)
                              : qbex::definability_test_crpq(g, pos, topt, &cache,
                                                             opt.budget_nodes);
    else
        verdict = spec.pebble ? qbex::qbe_test_crpq_pebble(g, ex, spec.k + 1, topt, &cache,
                                                           opt.budget_nodes)
                              : qbex::qbe_test_crpq(g, ex, topt, &cache, opt.budget_nodes);

    qbex::ExampleSets eval_ex = ex;
    std::uint64_t sweep = ex.negative.size();
    if (define) {
        std::vector<qbex::Tuple> completion;
        for (qbex::Tuple& t : qbex::node_tuples(g, ex.arity))
            if (!std::binary_search(ex.positive.begin(), ex.positive.end(), t))
                completion.push_back(std::move(t));
        sweep = completion.size();
        eval_ex = qbex::make_examples(g.nodes(), pos, std::move(completion));
    }

    if (opt.emit_eval && verdict.accepted) {
        const std::set<qbex::Tuple> eval =
            spec.pebble ? qbex::evaluate_ctw_explanation(g, eval_ex, spec.k, topt, &cache,
                                                         opt.budget_nodes)
                        : qbex::evaluate_crpq_explanation(g, eval_ex, topt, &cache,
                                                          opt.budget_nodes);
        report["evaluation"] = evaluation_json(eval, names);
    }

    if (opt.oracle) {
        auto shared = std::make_shared<const qbex::GraphDatabase>(g);
        std::vector<qbex::PointedGraph> factors;
        for (const qbex::Tuple& a : eval_ex.positive)
            factors.emplace_back(shared, a);
        bool oracle_accepted = true;
        for (const qbex::Tuple& b : eval_ex.negative) {
            qbex::PointedGraph target(shared, b);
            const bool reached =
                spec.pebble
                    ? qbex::oracle::game_tree_pebble(factors, target, spec.k + 1,
                                                     qbex::oracle::Convention::incremental)
                    : !qbex::oracle::all_strong_homs(factors, target).empty();
            oracle_accepted = oracle_accepted && !reached;
        }
        if (oracle_accepted != verdict.accepted)
            throw std::runtime_error("oracle disagrees with the engine verdict");
        std::cerr << "qbex: oracle agrees\n";
    }

    json stats = json::object();
    stats["cache_hits"] = cache.hits();
    stats["cache_lookups"] = cache.lookups();
    stats["product_nodes"] = power_count(g.size(), ex.positive.size());
    stats["tests_run"] = sweep;
    report["stats"] = std::move(stats);

    return verdict;
}

int run(const Options& opt) {
    qbex::NameTable names;

    if (opt.dump) {
        if (opt.db_path.empty()) {
            std::cerr << "qbex: --dump needs --db\n";
            return 1;
        }
        bool graph = opt.model == "graph";
        if (opt.model.empty() && !opt.cls.empty())
            graph = parse_class(opt.cls).graph;
        if (graph)
            std::cout << qbex::dump_graph(qbex::parse_graph_file(opt.db_path, names), names);
        else
            std::cout << qbex::dump_database(qbex::parse_database_file(opt.db_path, names), names);
        return 0;
    }

    if (opt.cls.empty()) {
        std::cerr << "qbex: --class is required\n";
        return 1;
    }
    const ClassSpec spec = parse_class(opt.cls);
    if (!opt.model.empty() && (opt.model == "graph") != spec.graph) {
        std::cerr << "qbex: class '" << opt.cls << "' needs model "
                  << (spec.graph ? "graph" : "relational") << "\n";
        return 1;
    }
    if (opt.task != "qbe" && opt.task != "define") {
        std::cerr << "qbex: unknown task '" << opt.task << "'\n";
        return 1;
    }
    if (opt.task == "define" && !opt.neg_path.empty()) {
        std::cerr << "qbex: task define takes no negative examples\n";
        return 1;
    }
    if (opt.db_path.empty() || opt.pos_path.empty()) {
        std::cerr << "qbex: --db and --pos are required\n";
        return 1;
    }
    if (opt.emit_canonical && (spec.pebble || spec.graph)) {
        std::cerr << "qbex: --emit-canonical applies to classes cq and ucq only\n";
        return 1;
    }

    qbex::TestOptions topt;
    if (opt.budget_seconds > 0)
        topt.deadline.at = std::chrono::steady_clock::now() +
                           std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                               std::chrono::duration<double>(opt.budget_seconds));

    json report = json::object();
    report["accepted"] = nullptr;
    report["canonical"] = nullptr;
    report["class"] = opt.cls;
    report["evaluation"] = nullptr;
    report["stats"] = json::object();
    report["witness"] = nullptr;

    const auto started = std::chrono::steady_clock::now();
    try {
        qbex::Verdict verdict;
        if (spec.graph) {
            const qbex::GraphDatabase g = qbex::parse_graph_file(opt.db_path, names);
            const auto pos = qbex::parse_examples_file(opt.pos_path, names);
            const auto neg = opt.neg_path.empty()
                                 ? std::vector<qbex::Tuple>{}
                                 : qbex::parse_examples_file(opt.neg_path, names);
            verdict = run_graph(opt, spec, names, g, pos, neg, topt, report);
        } else {
            const qbex::Database db = qbex::parse_database_file(opt.db_path, names);
            const auto pos = qbex::parse_examples_file(opt.pos_path, names);
            const auto neg = opt.neg_path.empty()
                                 ? std::vector<qbex::Tuple>{}
                                 : qbex::parse_examples_file(opt.neg_path, names);
            verdict = run_relational(opt, spec, names, db, pos, neg, topt, report);
        }
        report["accepted"] = verdict.accepted;
        if (opt.emit_witness && !verdict.accepted)
            report["witness"] = witness_json(verdict, names);
        const auto elapsed = std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - started);
        std::cout << report.dump() << "\n";
        std::cerr << "qbex: elapsed " << elapsed.count() << " ms\n";
        return verdict.accepted ? 0 : 2;
    } catch (const qbex::TimeBudgetExceeded& e) {
        // Partial stats, never a partial verdict.
        std::cout << report.dump() << "\n";
        std::cerr << "qbex: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"Decides query-by-example and definability for CQ, UCQ, CRPQ "
                 "and their bounded-treewidth classes"};
    app.add_option("--model", opt.model, "relational or graph (inferred from --class)")
        ->check(CLI::IsMember({"relational", "graph"}));
    app.add_option("--task", opt.task, "qbe or define")->check(CLI::IsMember({"qbe", "define"}));
    app.add_option("--class", opt.cls, "cq | tw:<k> | ucq | utw:<k> | crpq | ctw:<k>");
    app.add_option("--db", opt.db_path, "database file (atoms or edges per --model)");
    app.add_option("--pos", opt.pos_path, "positive example tuples");
    app.add_option("--neg", opt.neg_path, "negative example tuples");
    app.add_flag("--emit-witness", opt.emit_witness, "include the rejection witness");
    app.add_flag("--emit-eval", opt.emit_eval, "include the explanation evaluation");
    app.add_flag("--emit-canonical", opt.emit_canonical,
                 "include the canonical explanation (cq/ucq)");
    app.add_option("--budget-nodes", opt.budget_nodes, "product node budget");
    app.add_option("--budget-seconds", opt.budget_seconds, "wall-clock budget");
    app.add_flag("--dump", opt.dump, "print the parsed database back out and exit");
    app.add_flag("--oracle", opt.oracle)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's exit codes onto the documented 0/1 surface.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return run(opt);
    } catch (const std::exception& e) {
        std::cerr << "qbex: " << e.what() << "\n";
        return 1;
    }
}
