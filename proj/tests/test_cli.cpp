// End-to-end tests for the qbex binary: exit codes, report shape, dumps,
// and byte determinism. Runs the tool as a subprocess.
//
// argv[1]: path to the qbex binary, argv[2]: fixtures directory.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

using nlohmann::json;

namespace {

int failures = 0;

#define EXPECT(cond)                                                          \
    do {                                                                      \
        if (!(cond)) {                                                        \
            std::cerr << "FAIL " << __FILE__ << ":" << __LINE__ << "  "       \
                      << #cond << "\n";                                       \
            ++failures;                                                       \
        }                                                                     \
    } while (0)

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string quoted(const std::string& path) { return "'" + path + "'"; }

RunResult run(const std::string& cmd) {
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!pipe) {
        std::perror("popen");
        std::exit(1);
    }
    RunResult r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0)
        r.out.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> object_keys(const json& j) {
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it)
        keys.push_back(it.key());
    return keys;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: " << argv[0] << " <qbex-binary> <fixtures-dir>\n";
        return 1;
    }
    const std::string cli = quoted(argv[1]);
    const std::string fix = argv[2];
    const auto fx = [&](const char* name) { return quoted(fix + "/" + name); };

    const std::string example1 = " --db " + fx("example1.db") + " --pos " + fx("example1.pos") +
                                 " --neg " + fx("example1.neg");
    const std::string c2_graph =
        " --db " + fx("c2.graph") + " --pos " + fx("c2.pos") + " --neg " + fx("c2.neg");
    const std::string edge_graph =
        " --db " + fx("edge.graph") + " --pos " + fx("edge.pos") + " --neg " + fx("edge.neg");

    // Unsafe product rejects under class cq; full report shape.
    const std::string cq_cmd =
        cli + " --model relational --task qbe --class cq" + example1 + " --emit-witness";
    {
        RunResult r = run(cq_cmd);
        EXPECT(r.exit_code == 2);
        const json rep = json::parse(r.out);
        EXPECT(object_keys(rep) == std::vector<std::string>({"accepted", "canonical", "class",
                                                             "evaluation", "stats", "witness"}));
        EXPECT(rep["accepted"] == false);
        EXPECT(rep["class"] == "cq");
        EXPECT(rep["canonical"].is_null());
        EXPECT(rep["evaluation"].is_null());
        EXPECT(rep["witness"]["kind"] == "unsafe-product");
        EXPECT(object_keys(rep["stats"]) ==
               std::vector<std::string>(
                   {"cache_hits", "cache_lookups", "product_nodes", "tests_run"}));
        EXPECT(rep["stats"]["product_nodes"] == 4);
        EXPECT(rep["stats"]["tests_run"] == 1);
        EXPECT(rep["stats"]["cache_hits"] == 0);
        EXPECT(rep["stats"]["cache_lookups"] == 0);
    }

    // Byte-identical output across repeated runs.
    EXPECT(run(cq_cmd).out == run(cq_cmd).out);

    // The same instance is union-explainable; model inferred from the class.
    {
        RunResult r = run(cli + " --task qbe --class ucq" + example1 +
                          " --emit-canonical --emit-eval");
        EXPECT(r.exit_code == 0);
        const json rep = json::parse(r.out);
        EXPECT(rep["accepted"] == true);
        EXPECT(rep["witness"].is_null());
        EXPECT(rep["canonical"]["disjuncts"].size() == 2);
        const json expected_eval = json::array({json::array({"a", "b"}), json::array({"c", "d"})});
        EXPECT(rep["evaluation"] == expected_eval);
        EXPECT(rep["stats"]["product_nodes"] == 0);
        EXPECT(rep["stats"]["tests_run"] == 2);
    }

    // Pebble variants keep the verdicts: tw:1 still trips the safety clause,
    // utw:1 accepts pairwise.
    EXPECT(run(cli + " --task qbe --class tw:1" + example1).exit_code == 2);
    EXPECT(run(cli + " --task qbe --class utw:1" + example1).exit_code == 0);

    // Graph classes. A single edge has no strong homomorphism onto its sink.
    {
        RunResult r = run(cli + " --model graph --task qbe --class crpq" + edge_graph);
        EXPECT(r.exit_code == 0);
        const json rep = json::parse(r.out);
        EXPECT(rep["accepted"] == true);
        EXPECT(rep["stats"]["product_nodes"] == 2);
        EXPECT(rep["stats"]["cache_lookups"].get<long long>() > 0);
    }
    EXPECT(run(cli + " --task qbe --class ctw:1" + edge_graph).exit_code == 0);

    // The rotation of a directed 2-cycle is a strong homomorphism, so both
    // graph classes reject and the witness carries the map.
    {
        RunResult r = run(cli + " --task qbe --class crpq" + c2_graph + " --emit-witness");
        EXPECT(r.exit_code == 2);
        const json rep = json::parse(r.out);
        EXPECT(rep["witness"]["kind"] == "failing-negative");
        EXPECT(rep["witness"]["negative"] == json::array({"2"}));
        const json rotation =
            json::array({json::array({"1", "2"}), json::array({"2", "1"})});
        EXPECT(rep["witness"]["hom"] == rotation);
    }
    EXPECT(run(cli + " --task qbe --class ctw:1" + c2_graph).exit_code == 2);

    // Definability: the directed 2-cycle cannot define one of its nodes.
    const std::string c2_define =
        cli + " --task define --class cq --db " + fx("c2.db") + " --pos " + fx("c2_def.pos");
    {
        RunResult r = run(c2_define + " --emit-witness");
        EXPECT(r.exit_code == 2);
        const json rep = json::parse(r.out);
        EXPECT(rep["accepted"] == false);
        EXPECT(rep["witness"]["kind"] == "failing-negative");
        EXPECT(rep["stats"]["tests_run"] == 1);
    }

    // The oracle cross-check must not disturb stdout.
    EXPECT(run(cq_cmd + " --oracle").out == run(cq_cmd).out);
    EXPECT(run(cli + " --task qbe --class ucq" + example1 + " --oracle").exit_code == 0);
    EXPECT(run(cli + " --task qbe --class crpq" + c2_graph + " --oracle").exit_code == 2);

    // Dumps reproduce the canonical fixture bytes.
    {
        RunResult r = run(cli + " --dump --model relational --db " + fx("example1.db"));
        EXPECT(r.exit_code == 0);
        EXPECT(r.out == "R(a,b)\nS(c,d)\n");
    }
    {
        RunResult r = run(cli + " --dump --class ctw:1 --db " + fx("c2.graph"));
        EXPECT(r.exit_code == 0);
        EXPECT(r.out == "1 a 2\n2 a 1\n");
    }

    // Usage and parse errors all exit 1.
    EXPECT(run(cli + " --task qbe" + example1).exit_code == 1);              // no --class
    EXPECT(run(cli + " --task qbe --class tw" + example1).exit_code == 1);   // missing :k
    EXPECT(run(cli + " --task qbe --class tw:0" + example1).exit_code == 1); // k < 1
    EXPECT(run(cli + " --task qbe --class nope" + example1).exit_code == 1);
    EXPECT(run(cli + " --model relational --task qbe --class crpq" + c2_graph).exit_code == 1);
    EXPECT(run(cli + " --task define --class cq" + example1).exit_code == 1); // define with --neg
    EXPECT(run(cli + " --task qbe --class cq --db " + fx("absent.db") + " --pos " +
               fx("example1.pos"))
               .exit_code == 1);
    EXPECT(run(cli + " --task qbe --class cq --db " + fx("example1.db")).exit_code == 1);
    EXPECT(run(cli + " --task qbe --class tw:1" + example1 + " --emit-canonical").exit_code == 1);
    EXPECT(run(cli + " --no-such-flag").exit_code == 1);

    // An exhausted time budget reports accepted null and exits 1.
    {
        RunResult r = run(c2_define + " --budget-seconds 0.0000001");
        EXPECT(r.exit_code == 1);
        const json rep = json::parse(r.out);
        EXPECT(rep["accepted"].is_null());
    }

    if (failures == 0) {
        std::cout << "cli: all checks passed\n";
        return 0;
    }
    std::cerr << "cli: " << failures << " check(s) failed\n";
    return 1;
}
