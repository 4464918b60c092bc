#pragma once

// The existential k-pebble game between pointed databases, decided by a
// greatest fixpoint over partial homomorphisms (strong k-consistency).

#include <span>
#include <vector>

#include "qbex/core.hpp"
#include "qbex/family.hpp"
#include "qbex/parallel.hpp"

namespace qbex {

// True iff the duplicator wins the existential k-pebble game from src to dst,
// i.e. src ->_k dst. Requires k >= 2 and matching schemas and point arities.
// The empty point is permitted here; example sets enforce arity >= 1 upstream.
bool pebble_game(const PointedDatabase& src, const PointedDatabase& dst, int k,
                 Exec exec = Exec::serial);

// Elementwise pebble_game against many targets sharing one source.
std::vector<bool> pebble_closure(const PointedDatabase& src,
                                 std::span<const PointedDatabase> targets, int k,
                                 Exec exec = Exec::serial);

// The surviving family at the fixpoint, exposed for the confluence and
// schedule-equivalence tests. Pairs are (source index, target index) over the
// respective domains.
detail::FamilyResult pebble_fixpoint(const PointedDatabase& src, const PointedDatabase& dst,
                                     int k, detail::SweepOrder order = detail::SweepOrder::forward,
                                     Exec exec = Exec::serial);

} // namespace qbex
