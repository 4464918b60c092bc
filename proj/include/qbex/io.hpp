#pragma once

// Text formats for databases, graphs, and example tuples, plus the name
// interning that connects user-facing identifiers to engine symbols.
//
// Database files: one atom per line, `R(e1,e2,...)`. Graph files: one edge
// per line, `src label dst`. Example files: one tuple per line, `(e1,...)`,
// parentheses optional for unary tuples. Identifiers match [A-Za-z0-9_']+,
// `#` starts a comment, blank lines are ignored.

#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qbex/core.hpp"
#include "qbex/graphcore.hpp"

namespace qbex {

// Bidirectional name/symbol mapping. Symbols are handed out in first
// appearance order; reusing one table across several files of a fixture keeps
// shared names on the same symbol.
class NameTable {
public:
    Symbol intern(std::string_view name);
    std::optional<Symbol> find(std::string_view name) const;
    const std::string& name(Symbol s) const;
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::map<std::string, Symbol, std::less<>> index_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line);

    int line() const { return line_; }

private:
    int line_;
};

Database parse_database(std::istream& in, NameTable& names);
Database parse_database_file(const std::string& path, NameTable& names);

GraphDatabase parse_graph(std::istream& in, NameTable& names);
GraphDatabase parse_graph_file(const std::string& path, NameTable& names);

// Tuples in file order, duplicates removed, uniform arity enforced.
std::vector<Tuple> parse_examples(std::istream& in, NameTable& names);
std::vector<Tuple> parse_examples_file(const std::string& path, NameTable& names);

// Canonical text renderings; parsing a dump with the same table reproduces
// the value exactly, except that relations no atom mentions never reach the
// text and so cannot come back.
std::string dump_database(const Database& db, const NameTable& names);
std::string dump_graph(const GraphDatabase& g, const NameTable& names);

// `a` for base elements, `(a,b)` for product elements.
std::string format_element(const Element& e, const NameTable& names);
std::string format_tuple(const Tuple& t, const NameTable& names);

} // namespace qbex
