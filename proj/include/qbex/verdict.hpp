#pragma once

// Accept/reject results shared by the relational and graph test batteries.

#include <optional>
#include <variant>

#include "qbex/core.hpp"
#include "qbex/homsolver.hpp"
#include "qbex/parallel.hpp"

namespace qbex {

struct UnsafeProduct {
    bool operator==(const UnsafeProduct&) const = default;
};

// A negative tuple reached from the product; the map is present for
// homomorphism-based tests and absent for game-based ones.
struct FailingNegative {
    Tuple negative;
    std::optional<Assignment> hom;

    bool operator==(const FailingNegative&) const = default;
};

// A positive/negative pair that a desynchronized test could not separate.
struct FailingPair {
    Tuple positive;
    Tuple negative;
    std::optional<Assignment> hom;

    bool operator==(const FailingPair&) const = default;
};

struct Verdict {
    bool accepted = false;
    std::variant<std::monostate, UnsafeProduct, FailingNegative, FailingPair> witness;

    static Verdict accept() { return Verdict{true, std::monostate{}}; }
    static Verdict reject_unsafe() { return Verdict{false, UnsafeProduct{}}; }
    static Verdict reject(FailingNegative w) { return Verdict{false, std::move(w)}; }
    static Verdict reject(FailingPair w) { return Verdict{false, std::move(w)}; }

    bool operator==(const Verdict&) const = default;
};

// Shared knobs for the test batteries: execution mode for the batched sweeps
// and an optional cooperative deadline.
struct TestOptions {
    Exec exec = Exec::serial;
    Deadline deadline;
};

} // namespace qbex
