#pragma once

// Brute-force reference implementations used by the test suites (and the
// hidden CLI debugging flag). Each oracle avoids the search machinery of the
// module it checks: homomorphisms by exhaustive map enumeration, games by
// explicit alternating reachability over configurations, containment by word
// enumeration, treewidth by elimination orderings. The strong-game oracle's
// admissibility does reuse graphcore's containment check, which is itself
// oracle-checked against word enumeration.

#include <optional>
#include <span>
#include <vector>

#include "qbex/core.hpp"
#include "qbex/graphcore.hpp"
#include "qbex/homsolver.hpp"

namespace qbex::oracle {

// Every total homomorphism src -> dst respecting the points, by filtering
// all |dst|^|src| maps. Enumeration order: odometer over target indices.
std::vector<Assignment> all_homs(const PointedDatabase& src, const PointedDatabase& dst);

// Spoiler's opening convention: place all k pebbles at once, or start from an
// empty board placing one per round. Both must agree; the tests assert it.
enum class Convention { simultaneous, incremental };

// Explicit game solver: greatest fixpoint over the finite configuration
// graph (per-pebble placement plus response), duplicator wins iff he can stay
// within partial homomorphisms forever.
bool game_tree_pebble(const PointedDatabase& src, const PointedDatabase& dst, int k,
                      Convention convention);

// Strong variant over graphs: admissibility is the pairwise containment
// condition over all ordered pairs of covered product nodes.
bool game_tree_pebble(std::span<const PointedGraph> factors, const PointedGraph& target, int k,
                      Convention convention);

// Exhaustive strong homomorphisms, guarded by a map-count budget.
std::vector<Assignment> all_strong_homs(std::span<const PointedGraph> factors,
                                        const PointedGraph& target,
                                        std::size_t max_maps = 10'000'000);

// Exact treewidth of an undirected simple graph by elimination orderings.
// Vertices are 0..n-1; the empty graph has treewidth -1, a single vertex 0.
int treewidth(int vertices, std::span<const std::pair<int, int>> edges);

struct TreeDecomposition {
    std::vector<int> parent;             // tree node -> parent, -1 at the root
    std::vector<std::vector<int>> bags;  // tree node -> sorted vertices
    int width() const;
};

TreeDecomposition decomposition_from_order(int vertices,
                                           std::span<const std::pair<int, int>> edges,
                                           std::span<const int> order);
bool valid_decomposition(int vertices, std::span<const std::pair<int, int>> edges,
                         const TreeDecomposition& td);

// A conjunctive query candidate over variables 0..: atoms over the ambient
// schema, plus the free tuple. Variables are base elements.
struct CqCandidate {
    std::vector<Atom> atoms;
    Tuple free;
};

// The candidate as a pointed canonical database, for evaluation.
PointedDatabase as_query(const CqCandidate& q, const Schema& schema);

// First CQ explanation within the bounds whose existential variables have
// Gaifman treewidth <= k, found by canonical enumeration and evaluation, or
// nullopt. Deterministic order: fewer atoms first.
std::optional<CqCandidate> enumerate_tw_explanations(const Database& db, const ExampleSets& ex,
                                                     int k, int max_atoms, int max_vars);

// Union variant: one candidate per positive tuple, each covering its tuple
// and avoiding every negative; nullopt if any positive cannot be covered.
std::optional<std::vector<CqCandidate>> enumerate_utw_explanations(const Database& db,
                                                                   const ExampleSets& ex, int k,
                                                                   int max_atoms, int max_vars);

// Bounded word enumeration: the shortest, lexicographically least word in
// L(a) \ L(b) of length <= max_len, or nullopt if none found. One-sided.
std::optional<std::vector<std::string>> word_counterexample(const Nfa& a, const Nfa& b,
                                                            int max_len);
bool word_containment(const Nfa& a, const Nfa& b, int max_len);

} // namespace qbex::oracle
