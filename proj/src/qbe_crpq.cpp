#include "qbex/qbe_crpq.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

namespace qbex {

namespace {

// Everything the strong-map searches need: the materialized product, the
// coordinate decomposition of its nodes, the containment cache, and the pins.
struct StrongContext {
    GraphDatabase product;
    const GraphDatabase* target = nullptr;
    const ContainmentCache* cache = nullptr;
    std::unique_ptr<ContainmentCache> owned;
    std::vector<std::vector<int>> coords; // product node -> factor node indices
    std::optional<std::vector<std::pair<int, int>>> pins;
    std::vector<std::vector<std::vector<char>>> reach; // factor -> reachability matrix

    bool pair_ok(int x, int y, int ux, int uy) const {
        for (std::size_t i = 0; i < coords[static_cast<std::size_t>(x)].size(); ++i)
            if (cache->query(i, coords[static_cast<std::size_t>(x)][i],
                             coords[static_cast<std::size_t>(y)][i], ux, uy))
                return true;
        return false;
    }

    // An ordered pair is vacuously satisfied when some coordinate's pair
    // language is empty; only pairs reachable on every coordinate constrain.
    bool constrained(int x, int y) const {
        for (std::size_t i = 0; i < coords[static_cast<std::size_t>(x)].size(); ++i)
            if (!reach[i][static_cast<std::size_t>(coords[static_cast<std::size_t>(x)][i])]
                        [static_cast<std::size_t>(coords[static_cast<std::size_t>(y)][i])])
                return false;
        return true;
    }
};

std::vector<std::vector<char>> reach_matrix(const GraphDatabase& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    std::vector<std::vector<int>> out(n);
    for (const GraphDatabase::Edge& e : g.edges())
        out[static_cast<std::size_t>(e.src)].push_back(e.dst);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<int> stack{static_cast<int>(s)};
        reach[s][s] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : out[static_cast<std::size_t>(v)])
                if (!reach[s][static_cast<std::size_t>(w)]) {
                    reach[s][static_cast<std::size_t>(w)] = 1;
                    stack.push_back(w);
                }
        }
    }
    return reach;
}

StrongContext make_context(std::span<const PointedGraph> factors, const PointedGraph& target,
                           const ContainmentCache* cache, std::size_t node_budget) {
    if (factors.empty())
        throw std::invalid_argument("strong map with zero factors");
    std::vector<GraphDatabase> graphs;
    graphs.reserve(factors.size());
    for (const PointedGraph& f : factors) {
        if (f.graph().alphabet() != target.graph().alphabet())
            throw std::invalid_argument("strong map between graphs over different alphabets");
        if (f.point().size() != target.point().size())
            throw std::invalid_argument("strong map between points of different arities");
        graphs.push_back(f.graph());
    }

    StrongContext ctx;
    ctx.product = graph_product(graphs, node_budget);
    ctx.target = &target.graph();
    if (cache) {
        if (cache->factor_count() != graphs.size() || !(cache->target() == target.graph()))
            throw std::invalid_argument("containment cache built over different graphs");
        for (std::size_t i = 0; i < graphs.size(); ++i)
            if (!(cache->factor(i) == graphs[i]))
                throw std::invalid_argument("containment cache built over different graphs");
        ctx.cache = cache;
    } else {
        ctx.owned = std::make_unique<ContainmentCache>(graphs, target.graph());
        ctx.cache = ctx.owned.get();
    }

    ctx.coords.resize(ctx.product.size());
    for (std::size_t x = 0; x < ctx.product.size(); ++x) {
        const Element& node = ctx.product.node(static_cast<int>(x));
        std::size_t offset = 0;
        for (const GraphDatabase& g : graphs) {
            const Element part = node.slice(offset, g.node_depth());
            ctx.coords[x].push_back(*g.node_index(part));
            offset += g.node_depth();
        }
    }
    for (const GraphDatabase& g : graphs)
        ctx.reach.push_back(reach_matrix(g));

    std::vector<std::pair<int, int>> pins;
    for (std::size_t j = 0; j < target.point().size(); ++j) {
        std::vector<Element> parts;
        parts.reserve(factors.size());
        for (const PointedGraph& f : factors)
            parts.push_back(f.point()[j]);
        const int x = *ctx.product.node_index(Element::tuple(parts));
        const int u = *target.graph().node_index(target.point()[j]);
        pins.emplace_back(x, u);
    }
    std::sort(pins.begin(), pins.end());
    pins.erase(std::unique(pins.begin(), pins.end()), pins.end());
    bool functional = true;
    for (std::size_t i = 1; i < pins.size(); ++i)
        if (pins[i - 1].first == pins[i].first)
            functional = false;
    if (functional)
        ctx.pins = std::move(pins);
    return ctx;
}

// Backtracking search for a total strong map, smallest-remaining-domain
// variable order, ascending values, forward checking against both orders of
// every constrained pair.
struct StrongCsp {
    const StrongContext& ctx;
    int n, m;
    std::vector<std::vector<char>> allowed; // var -> candidate flags
    std::vector<int> assign;
    std::vector<int> component;

    explicit StrongCsp(const StrongContext& ctx)
        : ctx(ctx), n(static_cast<int>(ctx.product.size())),
          m(static_cast<int>(ctx.target->size())), assign(static_cast<std::size_t>(n), -1),
          component(static_cast<std::size_t>(n), -1) {}

    bool init() {
        allowed.assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(m), 1));
        for (const auto& [x, u] : *ctx.pins)
            for (int w = 0; w < m; ++w)
                allowed[static_cast<std::size_t>(x)][static_cast<std::size_t>(w)] = w == u;
        for (int x = 0; x < n; ++x) {
            bool any = false;
            for (int u = 0; u < m; ++u) {
                auto& flag = allowed[static_cast<std::size_t>(x)][static_cast<std::size_t>(u)];
                if (flag && !ctx.pair_ok(x, x, u, u))
                    flag = 0;
                any = any || flag;
            }
            if (!any)
                return false;
        }
        // Union components over the symmetric closure of the constraint graph.
        std::vector<int> parent(static_cast<std::size_t>(n));
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int v) {
            while (parent[static_cast<std::size_t>(v)] != v)
                v = parent[static_cast<std::size_t>(v)] =
                    parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            return v;
        };
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                if (ctx.constrained(x, y) || ctx.constrained(y, x))
                    parent[static_cast<std::size_t>(find(x))] = find(y);
        for (int x = 0; x < n; ++x)
            component[static_cast<std::size_t>(x)] = find(x);
        return true;
    }

    int count(int x) const {
        int c = 0;
        for (int u = 0; u < m; ++u)
            c += allowed[static_cast<std::size_t>(x)][static_cast<std::size_t>(u)];
        return c;
    }

    bool solve_component(const std::vector<int>& vars, std::size_t depth,
                         std::vector<std::pair<int, int>>& trail) {
        if (depth == vars.size())
            return true;
        int best = -1, best_count = m + 1;
        for (int x : vars)
            if (assign[static_cast<std::size_t>(x)] < 0) {
                const int c = count(x);
                if (c < best_count) {
                    best = x;
                    best_count = c;
                }
            }
        for (int u = 0; u < m; ++u) {
            if (!allowed[static_cast<std::size_t>(best)][static_cast<std::size_t>(u)])
                continue;
            assign[static_cast<std::size_t>(best)] = u;
            const std::size_t mark = trail.size();
            bool dead = false;
            for (int y : vars) {
                if (assign[static_cast<std::size_t>(y)] >= 0)
                    continue;
                const bool fwd = ctx.constrained(best, y);
                const bool bwd = ctx.constrained(y, best);
                if (!fwd && !bwd)
                    continue;
                bool any = false;
                for (int w = 0; w < m; ++w) {
                    auto& flag = allowed[static_cast<std::size_t>(y)][static_cast<std::size_t>(w)];
                    if (!flag)
                        continue;
                    if ((fwd && !ctx.pair_ok(best, y, u, w)) ||
                        (bwd && !ctx.pair_ok(y, best, w, u))) {
                        flag = 0;
                        trail.emplace_back(y, w);
                    } else {
                        any = true;
                    }
                }
                if (!any) {
                    dead = true;
                    break;
                }
            }
            if (!dead && solve_component(vars, depth + 1, trail))
                return true;
            while (trail.size() > mark) {
                const auto [y, w] = trail.back();
                trail.pop_back();
                allowed[static_cast<std::size_t>(y)][static_cast<std::size_t>(w)] = 1;
            }
            assign[static_cast<std::size_t>(best)] = -1;
        }
        return false;
    }

    bool solve() {
        std::vector<std::vector<int>> groups;
        std::vector<int> roots;
        for (int x = 0; x < n; ++x) {
            const int r = component[static_cast<std::size_t>(x)];
            auto it = std::find(roots.begin(), roots.end(), r);
            if (it == roots.end()) {
                roots.push_back(r);
                groups.emplace_back();
                it = roots.end() - 1;
            }
            groups[static_cast<std::size_t>(it - roots.begin())].push_back(x);
        }
        std::vector<std::pair<int, int>> trail;
        for (const auto& vars : groups)
            if (!solve_component(vars, 0, trail))
                return false;
        return true;
    }
};

struct StrongAdmissibility {
    const StrongContext& ctx;
    const std::vector<std::pair<int, int>>& pins;

    bool against(int c, int d, int x, int ux) const {
        return ctx.pair_ok(c, x, d, ux) && ctx.pair_ok(x, c, ux, d);
    }

    bool root() const {
        for (const auto& [x, ux] : pins)
            for (const auto& [y, uy] : pins)
                if (!ctx.pair_ok(x, y, ux, uy))
                    return false;
        return true;
    }

    bool extend(std::span<const std::pair<int, int>> base, int c, int d) const {
        if (!ctx.pair_ok(c, c, d, d))
            return false;
        for (const auto& [x, ux] : base)
            if (!against(c, d, x, ux))
                return false;
        for (const auto& [x, ux] : pins)
            if (!against(c, d, x, ux))
                return false;
        return true;
    }
};

detail::FamilyResult strong_fixpoint(std::span<const PointedGraph> factors,
                                     const PointedGraph& target, int k,
                                     const ContainmentCache* cache, std::size_t node_budget,
                                     detail::SweepOrder order, Exec exec, bool want_survivors) {
    if (k < 2)
        throw std::invalid_argument("pebble game requires k >= 2");
    StrongContext ctx = make_context(factors, target, cache, node_budget);
    if (!ctx.pins)
        return {};
    StrongAdmissibility adm{ctx, *ctx.pins};
    detail::FamilyProblem problem;
    problem.src_size = static_cast<int>(ctx.product.size());
    problem.dst_size = static_cast<int>(ctx.target->size());
    problem.pebbles = k;
    problem.pins = *ctx.pins;
    problem.root_admissible = [&adm] { return adm.root(); };
    problem.extend_admissible = [&adm](std::span<const std::pair<int, int>> base, int c, int d) {
        return adm.extend(base, c, d);
    };
    return detail::family_fixpoint(problem, order, exec, want_survivors);
}

std::vector<PointedGraph> graph_factors(const GraphDatabase& g, const std::vector<Tuple>& tuples) {
    auto shared = std::make_shared<const GraphDatabase>(g);
    std::vector<PointedGraph> out;
    out.reserve(tuples.size());
    for (const Tuple& t : tuples)
        out.emplace_back(shared, t);
    return out;
}

struct CheckOutcome {
    bool failed = false;
    std::optional<Assignment> hom;
};

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

template <typename Fails>
Verdict sweep_test(const GraphDatabase& g, const ExampleSets& ex,
                   const std::vector<Tuple>& targets, const TestOptions& opt,
                   const ContainmentCache* cache, std::size_t node_budget, Fails&& fails) {
    std::vector<PointedGraph> factors = graph_factors(g, ex.positive);
    std::optional<ContainmentCache> owned;
    if (!cache) {
        std::vector<GraphDatabase> graphs(ex.positive.size(), g);
        owned.emplace(std::move(graphs), g);
        cache = &*owned;
    }
    auto shared = std::make_shared<const GraphDatabase>(g);
    auto failure = first_failure(targets.size(), opt, [&](std::size_t i) {
        return fails(factors, PointedGraph(shared, targets[i]), cache, node_budget);
    });
    if (failure)
        return Verdict::reject(FailingNegative{targets[failure->first], std::move(failure->second)});
    return Verdict::accept();
}

CheckOutcome strong_hom_fails(const std::vector<PointedGraph>& factors, const PointedGraph& b,
                              const ContainmentCache* cache, std::size_t budget) {
    auto hom = strong_hom(factors, b, cache, budget);
    return CheckOutcome{hom.has_value(), std::move(hom)};
}

auto strong_game_fails(int k) {
    return [k](const std::vector<PointedGraph>& factors, const PointedGraph& b,
               const ContainmentCache* cache, std::size_t budget) {
        return CheckOutcome{strong_pebble_game(factors, b, k, cache, budget), std::nullopt};
    };
}

std::vector<Tuple> definability_targets(const GraphDatabase& g,
                                        const std::vector<Tuple>& positive, int arity) {
    std::vector<Tuple> sorted = positive;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Tuple> all = node_tuples(g, arity);
    std::vector<Tuple> targets;
    for (Tuple& t : all)
        if (!std::binary_search(sorted.begin(), sorted.end(), t))
            targets.push_back(std::move(t));
    return targets;
}

} // namespace

std::optional<Assignment> strong_hom(std::span<const PointedGraph> factors,
                                     const PointedGraph& target, const ContainmentCache* cache,
                                     std::size_t node_budget) {
    StrongContext ctx = make_context(factors, target, cache, node_budget);
    if (!ctx.pins)
        return std::nullopt;
    if (ctx.product.size() == 0)
        return Assignment{};
    if (ctx.target->size() == 0)
        return std::nullopt;
    StrongCsp csp(ctx);
    if (!csp.init() || !csp.solve())
        return std::nullopt;
    Assignment out;
    for (int x = 0; x < csp.n; ++x)
        out.emplace(ctx.product.node(x), ctx.target->node(csp.assign[static_cast<std::size_t>(x)]));
    return out;
}

bool strong_pebble_game(std::span<const PointedGraph> factors, const PointedGraph& target, int k,
                        const ContainmentCache* cache, std::size_t node_budget, Exec exec) {
    return strong_fixpoint(factors, target, k, cache, node_budget, detail::SweepOrder::forward,
                           exec, false)
        .root_alive;
}

detail::FamilyResult strong_pebble_fixpoint(std::span<const PointedGraph> factors,
                                            const PointedGraph& target, int k,
                                            detail::SweepOrder order, Exec exec,
                                            std::size_t node_budget) {
    return strong_fixpoint(factors, target, k, nullptr, node_budget, order, exec, true);
}

std::vector<Tuple> node_tuples(const GraphDatabase& g, int arity) {
    if (arity < 1)
        throw std::invalid_argument("arity must be >= 1");
    std::vector<Tuple> out;
    if (g.size() == 0)
        return out;
    std::vector<std::size_t> pick(static_cast<std::size_t>(arity), 0);
    for (;;) {
        Tuple t;
        t.reserve(pick.size());
        for (std::size_t p : pick)
            t.push_back(g.nodes()[p]);
        out.push_back(std::move(t));
        std::size_t j = pick.size();
        while (j > 0) {
            --j;
            if (++pick[j] < g.size())
                break;
            pick[j] = 0;
            if (j == 0)
                return out;
        }
    }
}

Verdict qbe_test_crpq(const GraphDatabase& g, const ExampleSets& ex, const TestOptions& opt,
                      const ContainmentCache* cache, std::size_t node_budget) {
    return sweep_test(g, ex, ex.negative, opt, cache, node_budget, strong_hom_fails);
}

Verdict definability_test_crpq(const GraphDatabase& g, const std::vector<Tuple>& positive,
                               const TestOptions& opt, const ContainmentCache* cache,
                               std::size_t node_budget) {
    ExampleSets ex = make_examples(g.nodes(), positive, {});
    return sweep_test(g, ex, definability_targets(g, ex.positive, ex.arity), opt, cache,
                      node_budget, strong_hom_fails);
}

Verdict qbe_test_crpq_pebble(const GraphDatabase& g, const ExampleSets& ex, int k,
                             const TestOptions& opt, const ContainmentCache* cache,
                             std::size_t node_budget) {
    return sweep_test(g, ex, ex.negative, opt, cache, node_budget, strong_game_fails(k));
}

Verdict definability_test_crpq_pebble(const GraphDatabase& g, const std::vector<Tuple>& positive,
                                      int k, const TestOptions& opt,
                                      const ContainmentCache* cache, std::size_t node_budget) {
    ExampleSets ex = make_examples(g.nodes(), positive, {});
    return sweep_test(g, ex, definability_targets(g, ex.positive, ex.arity), opt, cache,
                      node_budget, strong_game_fails(k));
}

std::set<Tuple> evaluate_ctw_explanation(const GraphDatabase& g, const ExampleSets& ex, int k,
                                         const TestOptions& opt, const ContainmentCache* cache,
                                         std::size_t node_budget) {
    if (k < 1)
        throw std::invalid_argument("treewidth bound must be >= 1");
    if (!qbe_test_crpq_pebble(g, ex, k + 1, opt, cache, node_budget).accepted)
        throw PreconditionError("evaluation requested but the pebble test rejects");
    std::vector<PointedGraph> factors = graph_factors(g, ex.positive);
    std::optional<ContainmentCache> owned;
    if (!cache) {
        std::vector<GraphDatabase> graphs(ex.positive.size(), g);
        owned.emplace(std::move(graphs), g);
        cache = &*owned;
    }
    auto shared = std::make_shared<const GraphDatabase>(g);
    std::vector<Tuple> candidates = node_tuples(g, ex.arity);
    std::vector<std::uint8_t> wins(candidates.size(), 0);
    for_index_budgeted(candidates.size(), opt.exec, opt.deadline, [&](std::size_t i) {
        wins[i] = strong_pebble_game(factors, PointedGraph(shared, candidates[i]), k + 1, cache,
                                     node_budget)
                      ? 1
                      : 0;
    });
    std::set<Tuple> result;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (wins[i])
            result.insert(candidates[i]);
    return result;
}

std::set<Tuple> evaluate_crpq_explanation(const GraphDatabase& g, const ExampleSets& ex,
                                          const TestOptions& opt, const ContainmentCache* cache,
                                          std::size_t node_budget) {
    if (!qbe_test_crpq(g, ex, opt, cache, node_budget).accepted)
        throw PreconditionError("evaluation requested but the test rejects");
    std::vector<PointedGraph> factors = graph_factors(g, ex.positive);
    std::optional<ContainmentCache> owned;
    if (!cache) {
        std::vector<GraphDatabase> graphs(ex.positive.size(), g);
        owned.emplace(std::move(graphs), g);
        cache = &*owned;
    }
    auto shared = std::make_shared<const GraphDatabase>(g);
    std::vector<Tuple> candidates = node_tuples(g, ex.arity);
    std::vector<std::uint8_t> wins(candidates.size(), 0);
    for_index_budgeted(candidates.size(), opt.exec, opt.deadline, [&](std::size_t i) {
        wins[i] =
            strong_hom(factors, PointedGraph(shared, candidates[i]), cache, node_budget).has_value()
                ? 1
                : 0;
    });
    std::set<Tuple> result;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (wins[i])
            result.insert(candidates[i]);
    return result;
}

} // namespace qbex
