#pragma once

// Fixtures and randomized instance generators shared by the test suites and
// the acceptance driver. Elements are built over small integer symbols; names
// only matter in the io and cli tests.

#include <initializer_list>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "qbex/core.hpp"
#include "qbex/graphcore.hpp"

namespace qbex::testing {

inline Element el(Symbol s) { return Element::base(s); }

inline Element el2(Symbol x, Symbol y) {
    std::vector<Element> parts{Element::base(x), Element::base(y)};
    return Element::tuple(parts);
}

inline Element el3(Symbol x, Symbol y, Symbol z) {
    std::vector<Element> parts{Element::base(x), Element::base(y), Element::base(z)};
    return Element::tuple(parts);
}

inline Tuple tup(std::initializer_list<Symbol> ids) {
    Tuple t;
    for (Symbol s : ids)
        t.push_back(el(s));
    return t;
}

inline Schema edge_schema() { return Schema({{"E", 2}}); }

inline Database edge_db(const std::vector<std::pair<int, int>>& edges) {
    Schema schema = edge_schema();
    std::vector<Atom> atoms;
    for (const auto& [u, v] : edges)
        atoms.push_back(Atom{*schema.find("E"), {el(u), el(v)}});
    return Database(std::move(schema), std::move(atoms));
}

// R(0,1), S(2,3): the two-relation instance whose positive pair has an
// unsafe product.
inline Database example1() {
    Schema schema({{"R", 2}, {"S", 2}});
    std::vector<Atom> atoms{Atom{*schema.find("R"), {el(0), el(1)}},
                            Atom{*schema.find("S"), {el(2), el(3)}}};
    return Database(std::move(schema), std::move(atoms));
}

inline Database directed_cycle_db(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        edges.emplace_back(i, (i + 1) % n);
    return edge_db(edges);
}

inline Database single_edge_db() { return edge_db({{0, 1}}); }

// Complete graph with both edge directions; no loops.
inline Database sym_clique_db(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v)
                edges.emplace_back(u, v);
    return edge_db(edges);
}

inline GraphDatabase graph_from(const std::vector<std::tuple<int, char, int>>& edges) {
    std::vector<std::tuple<Element, std::string, Element>> out;
    for (const auto& [u, l, v] : edges)
        out.emplace_back(el(u), std::string(1, l), el(v));
    return GraphDatabase::from_edges(std::move(out));
}

inline GraphDatabase cycle_graph(int n) {
    std::vector<std::tuple<int, char, int>> edges;
    for (int i = 0; i < n; ++i)
        edges.emplace_back(i, 'a', (i + 1) % n);
    return graph_from(edges);
}

// Uniform random database over schema {E/2, U/1}; the active domain may be
// smaller than the drawn domain bound.
inline Database random_database(std::mt19937& rng, int max_domain = 4, int max_atoms = 6) {
    Schema schema({{"E", 2}, {"U", 1}});
    const RelId e = *schema.find("E");
    const RelId u = *schema.find("U");
    std::uniform_int_distribution<int> domain_dist(1, max_domain);
    std::uniform_int_distribution<int> atoms_dist(1, max_atoms);
    const int domain = domain_dist(rng);
    const int atom_count = atoms_dist(rng);
    std::uniform_int_distribution<int> elem(0, domain - 1);
    std::uniform_int_distribution<int> which(0, 3);
    std::vector<Atom> atoms;
    for (int i = 0; i < atom_count; ++i) {
        if (which(rng) == 0)
            atoms.push_back(Atom{u, {el(elem(rng))}});
        else
            atoms.push_back(Atom{e, {el(elem(rng)), el(elem(rng))}});
    }
    return Database(std::move(schema), std::move(atoms));
}

inline Tuple random_tuple(std::mt19937& rng, const std::vector<Element>& domain, int arity) {
    std::uniform_int_distribution<std::size_t> pick(0, domain.size() - 1);
    Tuple t;
    for (int i = 0; i < arity; ++i)
        t.push_back(domain[pick(rng)]);
    return t;
}

// Examples over the database's own domain, arity 1 or 2, |S+| in [1, max_pos],
// |S-| in [0, max_neg]. Absent when the domain is empty.
inline std::optional<ExampleSets> random_examples(std::mt19937& rng, const Database& db,
                                                  int max_pos = 2, int max_neg = 3) {
    if (db.size() == 0)
        return std::nullopt;
    std::uniform_int_distribution<int> arity_dist(1, 2);
    std::uniform_int_distribution<int> pos_dist(1, max_pos);
    std::uniform_int_distribution<int> neg_dist(0, max_neg);
    const int arity = arity_dist(rng);
    std::vector<Tuple> pos, neg;
    const int pos_count = pos_dist(rng);
    const int neg_count = neg_dist(rng);
    for (int i = 0; i < pos_count; ++i)
        pos.push_back(random_tuple(rng, db.domain(), arity));
    for (int i = 0; i < neg_count; ++i)
        neg.push_back(random_tuple(rng, db.domain(), arity));
    return make_examples(db, std::move(pos), std::move(neg));
}

// All random graphs share the alphabet {a, b} so factors and targets mix
// freely; isolated nodes are possible and intended.
inline GraphDatabase random_graph(std::mt19937& rng, int max_nodes = 4, int labels = 2,
                                  int max_edges = 8) {
    std::uniform_int_distribution<int> nodes_dist(1, max_nodes);
    std::uniform_int_distribution<int> edges_dist(1, max_edges);
    const int node_count = nodes_dist(rng);
    const int edge_count = edges_dist(rng);
    std::uniform_int_distribution<int> node(0, node_count - 1);
    std::uniform_int_distribution<int> label(0, labels - 1);
    std::vector<Element> nodes;
    for (int i = 0; i < node_count; ++i)
        nodes.push_back(el(i));
    std::vector<std::tuple<Element, std::string, Element>> edges;
    for (int i = 0; i < edge_count; ++i)
        edges.emplace_back(el(node(rng)), std::string(1, static_cast<char>('a' + label(rng))),
                           el(node(rng)));
    return GraphDatabase(std::move(nodes), {"a", "b"}, std::move(edges));
}

// Random NFA with the given state count over {a, b}; start set nonempty.
inline Nfa random_nfa(std::mt19937& rng, int states = 3) {
    Nfa nfa;
    nfa.states = states;
    nfa.alphabet = {"a", "b"};
    std::uniform_int_distribution<int> coin(0, 9);
    for (int s = 0; s < states; ++s)
        for (LabelId l = 0; l < 2; ++l)
            for (int t = 0; t < states; ++t)
                if (coin(rng) < 3)
                    nfa.transitions.emplace_back(s, l, t);
    std::uniform_int_distribution<int> state(0, states - 1);
    nfa.start.push_back(state(rng));
    for (int s = 0; s < states; ++s)
        if (coin(rng) < 3 && s != nfa.start.front())
            nfa.start.push_back(s);
    for (int s = 0; s < states; ++s)
        if (coin(rng) < 4)
            nfa.accept.push_back(s);
    return nfa;
}

// Accepts exactly the given word over the NFA alphabet {a, b} plus whatever
// labels the word uses.
inline Nfa word_nfa(const std::vector<std::string>& word) {
    Nfa nfa;
    nfa.states = static_cast<int>(word.size()) + 1;
    std::vector<std::string> alphabet = word;
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    if (alphabet.empty())
        alphabet.push_back("a");
    nfa.alphabet = alphabet;
    for (std::size_t i = 0; i < word.size(); ++i) {
        const auto it = std::lower_bound(alphabet.begin(), alphabet.end(), word[i]);
        nfa.transitions.emplace_back(static_cast<int>(i),
                                     static_cast<LabelId>(it - alphabet.begin()),
                                     static_cast<int>(i) + 1);
    }
    nfa.start.push_back(0);
    nfa.accept.push_back(static_cast<int>(word.size()));
    return nfa;
}

// Union-explainable but not product-explainable: the unary atoms block both
// pairwise maps onto 4 while the safe product of (D,0) and (D,2) still maps
// onto 4 through the loop.
inline Database union_only_db() {
    Schema schema({{"E", 2}, {"U", 1}, {"V", 1}});
    const RelId e = *schema.find("E");
    std::vector<Atom> atoms{Atom{e, {el(0), el(1)}},
                            Atom{e, {el(2), el(3)}},
                            Atom{e, {el(4), el(4)}},
                            Atom{*schema.find("U"), {el(0)}},
                            Atom{*schema.find("V"), {el(2)}}};
    return Database(std::move(schema), std::move(atoms));
}

} // namespace qbex::testing
