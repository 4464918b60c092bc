#pragma once

// Homomorphism search between databases over a common schema.

#include <functional>
#include <map>
#include <optional>
#include <set>

#include "qbex/core.hpp"

namespace qbex {

// A (partial) mapping between domains, keyed by source element.
using Assignment = std::map<Element, Element>;

// True iff the mapping is consistent with the atoms it fully covers: every
// source atom whose arguments all lie in the domain of the map has its image
// in the target.
bool check_partial_hom(const Database& src, const Database& dst, const Assignment& map);

// First homomorphism src -> dst extending the point binding, in the
// deterministic search order (variables by descending atom occurrence count,
// values ascending). Returns a total assignment, or nullopt if none exists or
// the point binding is not a function.
std::optional<Assignment> find_hom(const PointedDatabase& src, const PointedDatabase& dst);

// All homomorphisms src -> dst extending the binding, passed to the callback
// in search order; return false from the callback to stop. The binding must
// map source domain elements to target domain elements.
void for_each_hom(const Database& src, const Database& dst, const Assignment& binding,
                  const std::function<bool(const Assignment&)>& on_solution);

// Answers of the canonical query (query.db(), query.point()) on data: the
// images of the point under every homomorphism query.db() -> data.
std::set<Tuple> evaluate_cq(const PointedDatabase& query, const Database& data);

} // namespace qbex
