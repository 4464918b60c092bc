#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "qbex/io.hpp"
#include "support.hpp"

using namespace qbex;
using namespace qbex::testing;

TEST_CASE("name tables intern in first-appearance order") {
    NameTable names;
    CHECK(names.intern("b") == 0);
    CHECK(names.intern("a") == 1);
    CHECK(names.intern("b") == 0);
    CHECK(names.size() == 2);
    CHECK(names.find("a") == Symbol{1});
    CHECK_FALSE(names.find("c").has_value());
    CHECK(names.name(0) == "b");
}

TEST_CASE("databases parse and dump canonically") {
    std::istringstream in("R(a,b)\nS(c,d)\n");
    NameTable names;
    const Database db = parse_database(in, names);
    CHECK(db == example1());
    CHECK(names.name(0) == "a");
    CHECK(names.name(3) == "d");
    CHECK(dump_database(db, names) == "R(a,b)\nS(c,d)\n");
}

TEST_CASE("comments, blank lines, and stray whitespace are ignored") {
    std::istringstream in("# header\n\n  R( a , b )  # trailing\n\r\nS(c,d)\r\n");
    NameTable names;
    const Database db = parse_database(in, names);
    CHECK(db == example1());
}

TEST_CASE("parsing an empty stream yields an empty database") {
    std::istringstream in("");
    NameTable names;
    const Database db = parse_database(in, names);
    CHECK(db.size() == 0);
    CHECK(db.schema().size() == 0);
    CHECK(dump_database(db, names).empty());
}

TEST_CASE("a relation used at two arities is an error with the line number") {
    std::istringstream in("R(a,b)\nR(a)\n");
    NameTable names;
    try {
        parse_database(in, names);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("arity") != std::string::npos);
    }
}

TEST_CASE("malformed atom lines are rejected") {
    NameTable names;
    for (const char* text : {"R(a,", "R a b", "R(a,b) junk", "R()", "(a,b)"}) {
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_database(in, names), ParseError);
    }
}

TEST_CASE("graphs parse, dump, and round-trip") {
    std::istringstream in("1 a 2\n2 a 1\n");
    NameTable names;
    const GraphDatabase g = parse_graph(in, names);
    CHECK(g == cycle_graph(2));

    const std::string text = dump_graph(g, names);
    CHECK(text == "1 a 2\n2 a 1\n");
    std::istringstream again(text);
    NameTable names2;
    CHECK(parse_graph(again, names2) == g);
}

TEST_CASE("malformed edge lines are rejected") {
    NameTable names;
    for (const char* text : {"1 a", "1 a 2 3", "1"}) {
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_graph(in, names), ParseError);
    }
    std::istringstream empty("");
    CHECK(parse_graph(empty, names).size() == 0);
}

TEST_CASE("example tuples parse with optional parentheses") {
    NameTable names;
    std::istringstream pairs("(a,b)\n(c,d)\n");
    CHECK(parse_examples(pairs, names) == std::vector<Tuple>{tup({0, 1}), tup({2, 3})});

    std::istringstream unary("1\n1'\n");
    NameTable names2;
    CHECK(parse_examples(unary, names2) == std::vector<Tuple>{tup({0}), tup({1})});
    CHECK(names2.name(1) == "1'");

    std::istringstream dup("(a)\na\n");
    NameTable names3;
    CHECK(parse_examples(dup, names3) == std::vector<Tuple>{tup({0})});

    std::istringstream none("");
    CHECK(parse_examples(none, names).empty());
}

TEST_CASE("mixed example arities are an error with the line number") {
    std::istringstream in("(a)\n(a,b)\n");
    NameTable names;
    try {
        parse_examples(in, names);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("dumps round-trip exactly with the same table and structurally with a fresh one") {
    const auto sorted_lines = [](const std::string& text) {
        std::vector<std::string> lines;
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);)
            lines.push_back(line);
        std::sort(lines.begin(), lines.end());
        return lines;
    };

    std::mt19937 rng(11001);
    for (int trial = 0; trial < 20; ++trial) {
        const Database db = random_database(rng);
        NameTable names;
        for (Symbol s = 0; s < 8; ++s)
            names.intern("n" + std::to_string(s));
        const std::string text = dump_database(db, names);

        // With the writing table the round trip is exact, up to relations
        // that no atom mentions: those never reach the text.
        std::vector<std::pair<std::string, int>> live;
        for (RelId r = 0; r < static_cast<RelId>(db.schema().size()); ++r)
            if (std::any_of(db.atoms().begin(), db.atoms().end(),
                            [&](const Atom& a) { return a.rel == r; }))
                live.push_back({db.schema().name(r), db.schema().arity(r)});
        Schema live_schema(live);
        std::vector<Atom> live_atoms;
        for (const Atom& a : db.atoms())
            live_atoms.push_back(Atom{*live_schema.find(db.schema().name(a.rel)), a.args});
        std::istringstream same(text);
        CHECK(parse_database(same, names) == Database(live_schema, std::move(live_atoms)));

        // A fresh table renumbers by first appearance, which may reorder the
        // sorted atoms, but parsing stays deterministic and no line changes.
        std::istringstream in(text), in2(text);
        NameTable fresh, fresh2;
        const Database back = parse_database(in, fresh);
        const Database back2 = parse_database(in2, fresh2);
        CHECK(back == back2);
        const std::string redump = dump_database(back, fresh);
        CHECK(redump == dump_database(back2, fresh2));
        CHECK(sorted_lines(redump) == sorted_lines(text));
        std::istringstream reback(redump);
        CHECK(parse_database(reback, fresh) == back);

        // Renaming the original through the two tables gives the reparse.
        std::vector<Atom> relabeled;
        for (const Atom& a : db.atoms()) {
            Tuple args;
            for (const Element& e : a.args)
                args.push_back(el(*fresh.find(names.name(e.base_id()))));
            relabeled.push_back(Atom{*back.schema().find(db.schema().name(a.rel)),
                                     std::move(args)});
        }
        CHECK(Database(back.schema(), relabeled) == back);
    }
}

TEST_CASE("missing files raise parse errors") {
    NameTable names;
    CHECK_THROWS_AS(parse_database_file("/nonexistent/q.db", names), ParseError);
    CHECK_THROWS_AS(parse_graph_file("/nonexistent/q.graph", names), ParseError);
    CHECK_THROWS_AS(parse_examples_file("/nonexistent/q.pos", names), ParseError);
}
