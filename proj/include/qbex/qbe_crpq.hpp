#pragma once

// Strong homomorphisms, the strong existential k-pebble game, and the
// QBE/definability tests for CRPQs and their bounded-treewidth relaxation.

#include <set>
#include <span>

#include "qbex/family.hpp"
#include "qbex/graphcore.hpp"
#include "qbex/homsolver.hpp"
#include "qbex/qbe_cq.hpp"
#include "qbex/verdict.hpp"

namespace qbex {

// Total map over ALL product nodes such that every ordered node pair,
// reflexive pairs included, has its pair language contained in the image
// pair's language on some coordinate. Solved as a binary constraint problem:
// variables are product nodes, domains are target nodes, the point pins
// unary values. Returns the first map in deterministic search order.
// An external cache must have been built over exactly the factor graphs and
// the target graph; pass nullptr for a private one.
std::optional<Assignment> strong_hom(std::span<const PointedGraph> factors,
                                     const PointedGraph& target,
                                     const ContainmentCache* cache = nullptr,
                                     std::size_t node_budget = kDefaultNodeBudget);

// Duplicator win in the strong existential k-pebble game; same fixpoint
// skeleton as the relational game with strong-partial-homomorphism
// admissibility.
bool strong_pebble_game(std::span<const PointedGraph> factors, const PointedGraph& target, int k,
                        const ContainmentCache* cache = nullptr,
                        std::size_t node_budget = kDefaultNodeBudget, Exec exec = Exec::serial);

// Surviving family for the schedule-equivalence tests, pairs over (product
// node index, target node index).
detail::FamilyResult strong_pebble_fixpoint(std::span<const PointedGraph> factors,
                                            const PointedGraph& target, int k,
                                            detail::SweepOrder order = detail::SweepOrder::forward,
                                            Exec exec = Exec::serial,
                                            std::size_t node_budget = kDefaultNodeBudget);

// QBE test for CRPQs: accept iff no negative tuple admits a strong
// homomorphism from the product of the positives. No safety clause.
Verdict qbe_test_crpq(const GraphDatabase& g, const ExampleSets& ex, const TestOptions& opt = {},
                      const ContainmentCache* cache = nullptr,
                      std::size_t node_budget = kDefaultNodeBudget);

Verdict definability_test_crpq(const GraphDatabase& g, const std::vector<Tuple>& positive,
                               const TestOptions& opt = {},
                               const ContainmentCache* cache = nullptr,
                               std::size_t node_budget = kDefaultNodeBudget);

// Game variants; deciding treewidth-k explanations uses game parameter k + 1,
// mapped at the caller.
Verdict qbe_test_crpq_pebble(const GraphDatabase& g, const ExampleSets& ex, int k,
                             const TestOptions& opt = {},
                             const ContainmentCache* cache = nullptr,
                             std::size_t node_budget = kDefaultNodeBudget);

Verdict definability_test_crpq_pebble(const GraphDatabase& g, const std::vector<Tuple>& positive,
                                      int k, const TestOptions& opt = {},
                                      const ContainmentCache* cache = nullptr,
                                      std::size_t node_budget = kDefaultNodeBudget);

// S^e over the strong (k+1)-pebble game; requires the corresponding pebble
// QBE test to accept.
std::set<Tuple> evaluate_ctw_explanation(const GraphDatabase& g, const ExampleSets& ex, int k,
                                         const TestOptions& opt = {},
                                         const ContainmentCache* cache = nullptr,
                                         std::size_t node_budget = kDefaultNodeBudget);

// Strong-homomorphism sweep over all node tuples; requires qbe_test_crpq to
// accept.
std::set<Tuple> evaluate_crpq_explanation(const GraphDatabase& g, const ExampleSets& ex,
                                          const TestOptions& opt = {},
                                          const ContainmentCache* cache = nullptr,
                                          std::size_t node_budget = kDefaultNodeBudget);

// All tuples of the given arity over the nodes, in lexicographic order.
std::vector<Tuple> node_tuples(const GraphDatabase& g, int arity);

} // namespace qbex
