#include "qbex/qbe_cq.hpp"

#include <algorithm>

namespace qbex {

namespace {

struct CheckOutcome {
    bool failed = false;
    std::optional<Assignment> hom;
};

// First failing target index in ascending order, or nullopt. The serial
// schedule stops at the first failure; the parallel schedule computes every
// outcome and scans afterwards. Both return the same index.
template <typename Check>
std::optional<std::pair<std::size_t, std::optional<Assignment>>>
first_failure(std::size_t n, const TestOptions& opt, Check&& check) {
    if (opt.exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) {
            opt.deadline.check();
            CheckOutcome out = check(i);
            if (out.failed)
                return std::make_pair(i, std::move(out.hom));
        }
        return std::nullopt;
    }
    std::vector<CheckOutcome> outcomes(n);
    for_index_budgeted(n, opt.exec, opt.deadline, [&](std::size_t i) { outcomes[i] = check(i); });
    for (std::size_t i = 0; i < n; ++i)
        if (outcomes[i].failed)
            return std::make_pair(i, std::move(outcomes[i].hom));
    return std::nullopt;
}

std::shared_ptr<const Database> share(const Database& db) {
    return std::make_shared<const Database>(db);
}

// Negative sweep for the product-based tests.
template <typename Fails>
Verdict product_test(const Database& db, const std::vector<Tuple>& positive,
                     const std::vector<Tuple>& targets, const TestOptions& opt, Fails&& fails) {
    auto shared = share(db);
    std::vector<PointedDatabase> factors;
    factors.reserve(positive.size());
    for (const Tuple& a : positive)
        factors.emplace_back(shared, a);
    Product prod = product(factors);
    if (!prod.safe)
        return Verdict::reject_unsafe();
    PointedDatabase pointed(prod.db, prod.point);
    auto failure = first_failure(targets.size(), opt, [&](std::size_t i) {
        return fails(pointed, PointedDatabase(shared, targets[i]));
    });
    if (failure)
        return Verdict::reject(FailingNegative{targets[failure->first], std::move(failure->second)});
    return Verdict::accept();
}

// Pair sweep for the desynchronized tests, positive-major order.
template <typename Fails>
Verdict pair_test(const Database& db, const std::vector<Tuple>& positive,
                  const std::vector<Tuple>& targets, const TestOptions& opt, Fails&& fails) {
    auto shared = share(db);
    const std::size_t n = positive.size() * targets.size();
    auto failure = first_failure(n, opt, [&](std::size_t i) {
        const Tuple& a = positive[i / targets.size()];
        const Tuple& b = targets[i % targets.size()];
        return fails(PointedDatabase(shared, a), PointedDatabase(shared, b));
    });
    if (failure)
        return Verdict::reject(FailingPair{positive[failure->first / targets.size()],
                                           targets[failure->first % targets.size()],
                                           std::move(failure->second)});
    return Verdict::accept();
}

CheckOutcome hom_fails(const PointedDatabase& src, const PointedDatabase& dst) {
    auto hom = find_hom(src, dst);
    return CheckOutcome{hom.has_value(), std::move(hom)};
}

auto game_fails(int k) {
    return [k](const PointedDatabase& src, const PointedDatabase& dst) {
        return CheckOutcome{pebble_game(src, dst, k), std::nullopt};
    };
}

std::vector<Tuple> definability_targets(const Database& db, const std::vector<Tuple>& positive) {
    ExampleSets ex = make_examples(db, positive, {});
    std::vector<Tuple> all = domain_tuples(db, ex.arity);
    std::vector<Tuple> targets;
    targets.reserve(all.size());
    for (Tuple& t : all)
        if (!std::binary_search(ex.positive.begin(), ex.positive.end(), t))
            targets.push_back(std::move(t));
    return targets;
}

} // namespace

std::vector<Tuple> domain_tuples(const Database& db, int arity) {
    if (arity < 1)
        throw std::invalid_argument("arity must be >= 1");
    std::vector<Tuple> out;
    if (db.size() == 0)
        return out;
    std::vector<std::size_t> pick(static_cast<std::size_t>(arity), 0);
    for (;;) {
        Tuple t;
        t.reserve(pick.size());
        for (std::size_t p : pick)
            t.push_back(db.domain()[p]);
        out.push_back(std::move(t));
        std::size_t j = pick.size();
        while (j > 0) {
            --j;
            if (++pick[j] < db.size())
                break;
            pick[j] = 0;
            if (j == 0)
                return out;
        }
    }
}

std::vector<PointedDatabase> positive_factors(const Database& db, const ExampleSets& ex) {
    auto shared = share(db);
    std::vector<PointedDatabase> factors;
    factors.reserve(ex.positive.size());
    for (const Tuple& a : ex.positive)
        factors.emplace_back(shared, a);
    return factors;
}

Verdict qbe_test_cq(const Database& db, const ExampleSets& ex, const TestOptions& opt) {
    return product_test(db, ex.positive, ex.negative, opt, hom_fails);
}

Verdict definability_test_cq(const Database& db, const std::vector<Tuple>& positive,
                             const TestOptions& opt) {
    return product_test(db, positive, definability_targets(db, positive), opt, hom_fails);
}

Verdict qbe_test_pebble(const Database& db, const ExampleSets& ex, int k, const TestOptions& opt) {
    return product_test(db, ex.positive, ex.negative, opt, game_fails(k));
}

Verdict definability_test_pebble(const Database& db, const std::vector<Tuple>& positive, int k,
                                 const TestOptions& opt) {
    return product_test(db, positive, definability_targets(db, positive), opt, game_fails(k));
}

Verdict qbe_test_desync(const Database& db, const ExampleSets& ex, const TestOptions& opt) {
    return pair_test(db, ex.positive, ex.negative, opt, hom_fails);
}

Verdict definability_test_desync(const Database& db, const std::vector<Tuple>& positive,
                                 const TestOptions& opt) {
    return pair_test(db, positive, definability_targets(db, positive), opt, hom_fails);
}

Verdict qbe_test_desync_pebble(const Database& db, const ExampleSets& ex, int k,
                               const TestOptions& opt) {
    return pair_test(db, ex.positive, ex.negative, opt, game_fails(k));
}

Verdict definability_test_desync_pebble(const Database& db, const std::vector<Tuple>& positive,
                                        int k, const TestOptions& opt) {
    return pair_test(db, positive, definability_targets(db, positive), opt, game_fails(k));
}

CanonicalExplanation canonical_explanation(const Database& db, const ExampleSets& ex,
                                           QueryClass cls) {
    CanonicalExplanation out;
    out.cls = cls;
    if (cls == QueryClass::cq) {
        if (!qbe_test_cq(db, ex).accepted)
            throw PreconditionError("canonical explanation requested but the test rejects");
        Product prod = product(positive_factors(db, ex));
        out.query.emplace(prod.db, prod.point);
    } else {
        if (!qbe_test_desync(db, ex).accepted)
            throw PreconditionError("canonical explanation requested but the test rejects");
        out.disjuncts = positive_factors(db, ex);
    }
    return out;
}

std::set<Tuple> evaluate_tw_explanation(const Database& db, const ExampleSets& ex, int k,
                                        const TestOptions& opt) {
    if (k < 1)
        throw std::invalid_argument("treewidth bound must be >= 1");
    if (!qbe_test_pebble(db, ex, k + 1, opt).accepted)
        throw PreconditionError("evaluation requested but the pebble test rejects");
    Product prod = product(positive_factors(db, ex));
    PointedDatabase pointed(prod.db, prod.point);
    auto shared = share(db);
    std::vector<Tuple> candidates = domain_tuples(db, ex.arity);
    std::vector<std::uint8_t> wins(candidates.size(), 0);
    for_index_budgeted(candidates.size(), opt.exec, opt.deadline, [&](std::size_t i) {
        wins[i] = pebble_game(pointed, PointedDatabase(shared, candidates[i]), k + 1) ? 1 : 0;
    });
    std::set<Tuple> result;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (wins[i])
            result.insert(candidates[i]);
    return result;
}

std::set<Tuple> evaluate_utw_explanation(const Database& db, const ExampleSets& ex, int k,
                                         const TestOptions& opt) {
    if (k < 1)
        throw std::invalid_argument("treewidth bound must be >= 1");
    if (!qbe_test_desync_pebble(db, ex, k + 1, opt).accepted)
        throw PreconditionError("evaluation requested but the pebble test rejects");
    auto shared = share(db);
    std::vector<Tuple> candidates = domain_tuples(db, ex.arity);
    const std::size_t n = ex.positive.size() * candidates.size();
    std::vector<std::uint8_t> wins(n, 0);
    for_index_budgeted(n, opt.exec, opt.deadline, [&](std::size_t i) {
        const Tuple& a = ex.positive[i / candidates.size()];
        const Tuple& b = candidates[i % candidates.size()];
        wins[i] = pebble_game(PointedDatabase(shared, a), PointedDatabase(shared, b), k + 1) ? 1 : 0;
    });
    std::set<Tuple> result;
    for (std::size_t i = 0; i < n; ++i)
        if (wins[i])
            result.insert(candidates[i % candidates.size()]);
    return result;
}

} // namespace qbex
