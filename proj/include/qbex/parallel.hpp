#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qbex {

// Execution mode for the batched kernels (sweeps over candidate tuples,
// pairwise test matrices, family marking rounds). Every kernel has a serial
// schedule and an OpenMP schedule; both must produce identical results.
enum class Exec { serial, parallel };

inline int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

struct TimeBudgetExceeded : std::runtime_error {
    TimeBudgetExceeded() : std::runtime_error("time budget exceeded") {}
};

// Cooperative deadline. Checked between work chunks, never inside them, so a
// verdict in flight is either completed or abandoned whole.
struct Deadline {
    std::optional<std::chrono::steady_clock::time_point> at;

    bool expired() const {
        return at && std::chrono::steady_clock::now() > *at;
    }
    void check() const {
        if (expired())
            throw TimeBudgetExceeded();
    }
};

// Runs fn(i) for every i in [0, n). In parallel mode fn must be safe to call
// concurrently for distinct i; iteration order is unspecified, so callers
// that need a deterministic result collect per-index output and reduce it
// afterwards in index order.
template <typename Fn>
void for_index(std::size_t n, Exec exec, Fn&& fn) {
#ifdef _OPENMP
    if (exec == Exec::parallel) {
        #pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i)
        fn(i);
}

// Chunked variant with a deadline check between chunks.
template <typename Fn>
void for_index_budgeted(std::size_t n, Exec exec, const Deadline& deadline, Fn&& fn) {
    const std::size_t chunk = 32;
    for (std::size_t start = 0; start < n; start += chunk) {
        deadline.check();
        const std::size_t end = start + chunk < n ? start + chunk : n;
        for_index(end - start, exec, [&](std::size_t i) { fn(start + i); });
    }
}

} // namespace qbex
