#include "qbex/io.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace qbex {

Symbol NameTable::intern(std::string_view name) {
    auto it = index_.find(name);
    if (it != index_.end())
        return it->second;
    const Symbol s = static_cast<Symbol>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), s);
    return s;
}

std::optional<Symbol> NameTable::find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

const std::string& NameTable::name(Symbol s) const {
    return names_.at(static_cast<std::size_t>(s));
}

ParseError::ParseError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
}

// One content line with the comment and outer whitespace removed.
std::string_view strip(std::string_view line) {
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos)
        line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front())))
        line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
        line.remove_suffix(1);
    return line;
}

struct Scanner {
    std::string_view text;
    std::size_t pos = 0;
    int line = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    std::string_view ident() {
        skip_ws();
        std::size_t end = pos;
        while (end < text.size() && ident_char(text[end]))
            ++end;
        if (end == pos)
            throw ParseError("expected an identifier in '" + std::string(text) + "'", line);
        std::string_view out = text.substr(pos, end - pos);
        pos = end;
        return out;
    }

    void expect(char c) {
        if (peek() != c)
            throw ParseError(std::string("expected '") + c + "' in '" + std::string(text) + "'",
                             line);
        ++pos;
    }

    void finish() {
        if (peek() != '\0')
            throw ParseError("trailing characters in '" + std::string(text) + "'", line);
    }
};

Tuple paren_tuple(Scanner& sc, NameTable& names) {
    Tuple t;
    sc.expect('(');
    for (;;) {
        t.push_back(Element::base(names.intern(sc.ident())));
        if (sc.peek() != ',')
            break;
        ++sc.pos;
    }
    sc.expect(')');
    return t;
}

template <typename Fn>
void for_each_content_line(std::istream& in, Fn&& fn) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string_view text = strip(line);
        if (text.empty())
            continue;
        fn(text, number);
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'", 0);
    return in;
}

} // namespace

Database parse_database(std::istream& in, NameTable& names) {
    std::map<std::string, int> arities;
    std::vector<std::pair<std::string, Tuple>> raw;
    for_each_content_line(in, [&](std::string_view text, int number) {
        Scanner sc{text, 0, number};
        std::string rel(sc.ident());
        Tuple args = paren_tuple(sc, names);
        sc.finish();
        auto [it, fresh] = arities.emplace(rel, static_cast<int>(args.size()));
        if (!fresh && it->second != static_cast<int>(args.size()))
            throw ParseError("relation '" + rel + "' used with arity " +
                                 std::to_string(args.size()) + " after arity " +
                                 std::to_string(it->second),
                             number);
        raw.emplace_back(std::move(rel), std::move(args));
    });
    Schema schema(std::vector<std::pair<std::string, int>>(arities.begin(), arities.end()));
    std::vector<Atom> atoms;
    atoms.reserve(raw.size());
    for (auto& [rel, args] : raw)
        atoms.push_back(Atom{*schema.find(rel), std::move(args)});
    return Database(std::move(schema), std::move(atoms));
}

Database parse_database_file(const std::string& path, NameTable& names) {
    std::ifstream in = open_input(path);
    return parse_database(in, names);
}

GraphDatabase parse_graph(std::istream& in, NameTable& names) {
    std::vector<std::tuple<Element, std::string, Element>> edges;
    for_each_content_line(in, [&](std::string_view text, int number) {
        Scanner sc{text, 0, number};
        const Element src = Element::base(names.intern(sc.ident()));
        std::string label(sc.ident());
        const Element dst = Element::base(names.intern(sc.ident()));
        sc.finish();
        edges.emplace_back(src, std::move(label), dst);
    });
    return GraphDatabase::from_edges(std::move(edges));
}

GraphDatabase parse_graph_file(const std::string& path, NameTable& names) {
    std::ifstream in = open_input(path);
    return parse_graph(in, names);
}

std::vector<Tuple> parse_examples(std::istream& in, NameTable& names) {
    std::vector<Tuple> out;
    std::set<Tuple> seen;
    int arity = -1;
    for_each_content_line(in, [&](std::string_view text, int number) {
        Scanner sc{text, 0, number};
        Tuple t;
        if (sc.peek() == '(')
            t = paren_tuple(sc, names);
        else
            t.push_back(Element::base(names.intern(sc.ident())));
        sc.finish();
        if (arity >= 0 && arity != static_cast<int>(t.size()))
            throw ParseError("tuple of arity " + std::to_string(t.size()) +
                                 " after arity " + std::to_string(arity),
                             number);
        arity = static_cast<int>(t.size());
        if (seen.insert(t).second)
            out.push_back(std::move(t));
    });
    return out;
}

std::vector<Tuple> parse_examples_file(const std::string& path, NameTable& names) {
    std::ifstream in = open_input(path);
    return parse_examples(in, names);
}

std::string format_element(const Element& e, const NameTable& names) {
    if (e.depth() == 1)
        return names.name(e.base_id());
    std::string out = "(";
    for (std::size_t i = 0; i < e.depth(); ++i) {
        if (i)
            out += ',';
        out += names.name(e.parts()[i]);
    }
    out += ')';
    return out;
}

std::string format_tuple(const Tuple& t, const NameTable& names) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i)
            out += ',';
        out += format_element(t[i], names);
    }
    out += ')';
    return out;
}

std::string dump_database(const Database& db, const NameTable& names) {
    std::string out;
    for (const Atom& a : db.atoms()) {
        out += db.schema().name(a.rel);
        out += '(';
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (i)
                out += ',';
            out += format_element(a.args[i], names);
        }
        out += ")\n";
    }
    return out;
}

std::string dump_graph(const GraphDatabase& g, const NameTable& names) {
    std::string out;
    for (const GraphDatabase::Edge& e : g.edges()) {
        out += format_element(g.node(e.src), names);
        out += ' ';
        out += g.alphabet().at(static_cast<std::size_t>(e.label));
        out += ' ';
        out += format_element(g.node(e.dst), names);
        out += '\n';
    }
    return out;
}

} // namespace qbex
