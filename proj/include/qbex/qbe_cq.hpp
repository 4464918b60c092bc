#pragma once

// The relational test battery: {plain, k-pebble, desynchronized,
// desynchronized k-pebble} x {QBE, definability}, canonical explanations, and
// evaluation of bounded-treewidth explanations without materializing them.

#include <set>
#include <vector>

#include "qbex/core.hpp"
#include "qbex/pebble.hpp"
#include "qbex/verdict.hpp"

namespace qbex {

// Thrown when canonical_explanation or an evaluation is requested for an
// instance whose corresponding test rejects.
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

// Plain QBE test: accept iff the product of the positives is safe and admits
// no homomorphism onto any negative.
Verdict qbe_test_cq(const Database& db, const ExampleSets& ex, const TestOptions& opt = {});

// Definability: negatives are the full domain sweep outside the positives.
Verdict definability_test_cq(const Database& db, const std::vector<Tuple>& positive,
                             const TestOptions& opt = {});

// Game variants. k is the game parameter (>= 2); deciding treewidth-k
// explanations uses game parameter k + 1, mapped at the caller.
Verdict qbe_test_pebble(const Database& db, const ExampleSets& ex, int k,
                        const TestOptions& opt = {});
Verdict definability_test_pebble(const Database& db, const std::vector<Tuple>& positive, int k,
                                 const TestOptions& opt = {});

// Desynchronized variants: independent per-pair tests, no safety clause.
Verdict qbe_test_desync(const Database& db, const ExampleSets& ex, const TestOptions& opt = {});
Verdict definability_test_desync(const Database& db, const std::vector<Tuple>& positive,
                                 const TestOptions& opt = {});
Verdict qbe_test_desync_pebble(const Database& db, const ExampleSets& ex, int k,
                               const TestOptions& opt = {});
Verdict definability_test_desync_pebble(const Database& db, const std::vector<Tuple>& positive,
                                        int k, const TestOptions& opt = {});

enum class QueryClass { cq, ucq };

// The canonical explanation once the corresponding test accepted: the safe
// product read as a query (class cq), or one disjunct per positive tuple
// (class ucq).
struct CanonicalExplanation {
    QueryClass cls = QueryClass::cq;
    std::optional<PointedDatabase> query;
    std::vector<PointedDatabase> disjuncts;
};

CanonicalExplanation canonical_explanation(const Database& db, const ExampleSets& ex,
                                           QueryClass cls);

// The evaluation S^e of some treewidth-k explanation: all tuples the product
// reaches under the (k+1)-pebble game. Requires the (k+1)-pebble QBE test to
// accept; guarantees positives inside, negatives outside.
std::set<Tuple> evaluate_tw_explanation(const Database& db, const ExampleSets& ex, int k,
                                        const TestOptions& opt = {});

// Union analogue over per-positive factors, for accepted desynchronized
// (k+1)-pebble instances.
std::set<Tuple> evaluate_utw_explanation(const Database& db, const ExampleSets& ex, int k,
                                         const TestOptions& opt = {});

// All tuples of the given arity over the domain, in lexicographic order.
std::vector<Tuple> domain_tuples(const Database& db, int arity);

// Pointed factors (db, a) for each positive tuple, in sorted order.
std::vector<PointedDatabase> positive_factors(const Database& db, const ExampleSets& ex);

} // namespace qbex
