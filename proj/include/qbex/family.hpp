#pragma once

// Greatest-fixpoint engine over families of partial maps bounded by a pebble
// count. Both game variants (relational partial homomorphisms, strong partial
// homomorphisms over graphs) instantiate this with their own admissibility
// callbacks. The admissibility predicate must be closed under restriction.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qbex/parallel.hpp"

namespace qbex::detail {

struct FamilyProblem {
    int src_size = 0;
    int dst_size = 0;
    int pebbles = 0;
    // Forced bindings from the distinguished tuples, sorted by source index,
    // one image per source. Pebbles placed on a pinned source must agree with
    // the pin; the engine enforces that before consulting the callback.
    std::vector<std::pair<int, int>> pins;
    // True iff the pins alone form an admissible map.
    std::function<bool()> root_admissible;
    // base is an admissible map (sorted, pins excluded); true iff base plus
    // the pair (c, d) is still admissible. Only constraints involving c need
    // rechecking since base was already accepted.
    std::function<bool(std::span<const std::pair<int, int>>, int, int)> extend_admissible;
};

// Scheduling order for the deletion worklist. The fixpoint is confluent, so
// both orders (and the parallel marking schedule) must yield the same family.
enum class SweepOrder { forward, reverse };

struct FamilyResult {
    bool root_alive = false;
    // Surviving maps as sorted (source, target) pair lists, themselves sorted;
    // filled only on request.
    std::vector<std::vector<std::pair<int, int>>> survivors;
};

FamilyResult family_fixpoint(const FamilyProblem& problem, SweepOrder order, Exec exec,
                             bool want_survivors);

} // namespace qbex::detail
