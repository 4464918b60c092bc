#pragma once

// Graph databases, graph products, node-pair path languages as NFAs, and
// regular-language containment with a shared memoizing cache.

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qbex/core.hpp"
#include "qbex/parallel.hpp"

namespace qbex {

using LabelId = std::int32_t;

inline constexpr std::size_t kDefaultNodeBudget = 1'000'000;

struct NodeBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Edge-labeled directed graph. Nodes are Elements so product nodes reuse the
// flat-tuple machinery; node depth is uniform. Isolated nodes are kept.
class GraphDatabase {
public:
    GraphDatabase() = default;
    GraphDatabase(std::vector<Element> nodes, std::vector<std::string> alphabet,
                  std::vector<std::tuple<Element, std::string, Element>> edges);

    // Nodes and alphabet inferred from the edges.
    static GraphDatabase from_edges(std::vector<std::tuple<Element, std::string, Element>> edges);

    struct Edge {
        int src = 0;
        LabelId label = 0;
        int dst = 0;

        auto operator<=>(const Edge&) const = default;
    };

    const std::vector<Element>& nodes() const { return nodes_; }
    const std::vector<std::string>& alphabet() const { return alphabet_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t size() const { return nodes_.size(); }

    std::optional<int> node_index(const Element& e) const;
    std::optional<LabelId> label_index(std::string_view label) const;
    const Element& node(int idx) const { return nodes_.at(static_cast<std::size_t>(idx)); }

    // Uniform depth of the node elements; zero for the empty graph.
    std::size_t node_depth() const { return nodes_.empty() ? 0 : nodes_.front().depth(); }

    bool operator==(const GraphDatabase&) const = default;

private:
    std::vector<Element> nodes_;        // sorted
    std::vector<std::string> alphabet_; // sorted
    std::vector<Edge> edges_;           // sorted index triples
};

// Product with the full cartesian node set: strong homomorphisms constrain
// every node pair, so isolated product nodes are kept. Refuses products whose
// node count exceeds the budget.
GraphDatabase graph_product(std::span<const GraphDatabase> factors,
                            std::size_t node_budget = kDefaultNodeBudget);

// The graph encoded relationally: one binary relation per label. Isolated
// nodes are dropped (relational domains are the elements occurring in atoms).
Database to_database(const GraphDatabase& g);

class PointedGraph {
public:
    PointedGraph(std::shared_ptr<const GraphDatabase> graph, Tuple point);

    const GraphDatabase& graph() const { return *graph_; }
    const std::shared_ptr<const GraphDatabase>& graph_ptr() const { return graph_; }
    const Tuple& point() const { return point_; }

private:
    std::shared_ptr<const GraphDatabase> graph_;
    Tuple point_;
};

PointedGraph make_pointed(GraphDatabase graph, Tuple point);

struct Nfa {
    int states = 0;
    std::vector<std::string> alphabet; // sorted
    std::vector<std::tuple<int, LabelId, int>> transitions;
    std::vector<int> start;
    std::vector<int> accept;
};

// The language of path labels from v to v2: the graph itself as an NFA with
// start {v} and accept {v2}. Accepts the empty word iff v = v2.
Nfa pair_language(const GraphDatabase& g, const Element& v, const Element& v2);

struct Containment {
    bool holds = false;
    // Shortest, lexicographically least witness in L(a) \ L(b); meaningful
    // only when holds is false.
    std::vector<std::string> counterexample;
};

// Exact containment L(a) <= L(b): determinize b over the united alphabet by
// reachable subset construction (the empty subset doubles as the dead state),
// product with a, breadth-first emptiness.
Containment check_containment(const Nfa& a, const Nfa& b);
bool contains(const Nfa& a, const Nfa& b);

// Memoizes pair-language containments between fixed factor graphs and a fixed
// target, keyed by (factor, v, v2, u, u2). One reachability pass per
// (factor, v, u) answers every (v2, u2) query; safe for concurrent readers.
class ContainmentCache {
public:
    ContainmentCache(std::vector<GraphDatabase> factors, GraphDatabase target);

    bool query(std::size_t factor, int v, int v2, int u, int u2) const;
    bool query(std::size_t factor, const Element& v, const Element& v2, const Element& u,
               const Element& u2) const;

    // Opt-in: materialize every (factor, v, u) pass up front.
    void precompute_all(Exec exec);

    std::size_t factor_count() const { return factors_.size(); }
    const GraphDatabase& factor(std::size_t i) const { return factors_.at(i); }
    const GraphDatabase& target() const { return target_; }

    std::uint64_t lookups() const { return lookups_.load(); }
    std::uint64_t hits() const { return hits_.load(); }
    std::uint64_t computations() const { return computations_.load(); }

private:
    using Mask = std::vector<std::uint64_t>;

    struct Dense {
        // node -> sorted (label, successor) pairs over the united alphabet
        std::vector<std::vector<std::pair<LabelId, int>>> out;
    };

    Mask run_pass(std::size_t factor, int v, int u) const;
    std::uint64_t pass_key(std::size_t factor, int v, int u) const;
    const Mask* pass_for(std::size_t factor, int v, int u) const;

    std::vector<GraphDatabase> factors_;
    GraphDatabase target_;
    std::vector<std::string> united_; // union alphabet, sorted
    std::vector<Dense> factor_dense_;
    Dense target_dense_;
    std::size_t mask_words_ = 0;

    mutable std::mutex mutex_;
    // keyed by pass_key(factor, v, u); value = per factor-node AND-mask of
    // reachable target subsets, flattened
    mutable std::map<std::uint64_t, Mask> memo_;
    mutable std::atomic<std::uint64_t> lookups_{0};
    mutable std::atomic<std::uint64_t> hits_{0};
    mutable std::atomic<std::uint64_t> computations_{0};
};

} // namespace qbex
