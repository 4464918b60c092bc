#include "qbex/graphcore.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace qbex {

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// node -> sorted (label, successor) list, labels over the given alphabet.
std::vector<std::vector<std::pair<LabelId, int>>>
dense_out(const GraphDatabase& g, const std::vector<std::string>& alphabet) {
    std::vector<std::vector<std::pair<LabelId, int>>> out(g.size());
    for (const GraphDatabase::Edge& e : g.edges()) {
        const std::string& label = g.alphabet()[static_cast<std::size_t>(e.label)];
        auto it = std::lower_bound(alphabet.begin(), alphabet.end(), label);
        out[static_cast<std::size_t>(e.src)].emplace_back(
            static_cast<LabelId>(it - alphabet.begin()), e.dst);
    }
    for (auto& row : out) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return out;
}

} // namespace

GraphDatabase::GraphDatabase(std::vector<Element> nodes, std::vector<std::string> alphabet,
                             std::vector<std::tuple<Element, std::string, Element>> edges) {
    for (const Element& n : nodes)
        if (!n.valid())
            throw std::invalid_argument("graph node is an empty element");
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    nodes_ = std::move(nodes);
    alphabet_ = sorted_unique(std::move(alphabet));
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (nodes_[i].depth() != nodes_[0].depth())
            throw std::invalid_argument("graph nodes of mixed depth");

    for (const auto& [u, label, v] : edges) {
        auto ui = node_index(u);
        auto vi = node_index(v);
        auto li = label_index(label);
        if (!ui || !vi)
            throw std::invalid_argument("edge endpoint outside the node set");
        if (!li)
            throw std::invalid_argument("edge label '" + label + "' outside the alphabet");
        edges_.push_back(Edge{*ui, *li, *vi});
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

GraphDatabase GraphDatabase::from_edges(
    std::vector<std::tuple<Element, std::string, Element>> edges) {
    std::vector<Element> nodes;
    std::vector<std::string> alphabet;
    for (const auto& [u, label, v] : edges) {
        nodes.push_back(u);
        nodes.push_back(v);
        alphabet.push_back(label);
    }
    return GraphDatabase(std::move(nodes), std::move(alphabet), std::move(edges));
}

std::optional<int> GraphDatabase::node_index(const Element& e) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), e);
    if (it == nodes_.end() || *it != e)
        return std::nullopt;
    return static_cast<int>(it - nodes_.begin());
}

std::optional<LabelId> GraphDatabase::label_index(std::string_view label) const {
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), label);
    if (it == alphabet_.end() || *it != label)
        return std::nullopt;
    return static_cast<LabelId>(it - alphabet_.begin());
}

GraphDatabase graph_product(std::span<const GraphDatabase> factors, std::size_t node_budget) {
    if (factors.empty())
        throw std::invalid_argument("product of zero graphs");
    for (const GraphDatabase& g : factors)
        if (g.alphabet() != factors.front().alphabet())
            throw std::invalid_argument("product factors over different alphabets");
    if (factors.size() == 1)
        return factors.front();

    std::size_t count = 1;
    for (const GraphDatabase& g : factors) {
        if (g.size() == 0) {
            count = 0;
            break;
        }
        if (count > node_budget / g.size())
            throw NodeBudgetExceeded("graph product would exceed the node budget (" +
                                     std::to_string(node_budget) + " nodes)");
        count *= g.size();
    }

    std::vector<Element> nodes;
    nodes.reserve(count);
    if (count > 0) {
        std::vector<std::size_t> pick(factors.size(), 0);
        for (;;) {
            std::vector<Element> parts;
            parts.reserve(factors.size());
            for (std::size_t i = 0; i < factors.size(); ++i)
                parts.push_back(factors[i].nodes()[pick[i]]);
            nodes.push_back(Element::tuple(parts));
            std::size_t i = factors.size();
            bool done = true;
            while (i > 0) {
                --i;
                if (++pick[i] < factors[i].size()) {
                    done = false;
                    break;
                }
                pick[i] = 0;
            }
            if (done)
                break;
        }
    }

    std::vector<std::tuple<Element, std::string, Element>> edges;
    const std::vector<std::string>& alphabet = factors.front().alphabet();
    for (const std::string& label : alphabet) {
        std::vector<std::vector<const GraphDatabase::Edge*>> choices(factors.size());
        bool any_empty = false;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            const auto li = factors[i].label_index(label);
            for (const GraphDatabase::Edge& e : factors[i].edges())
                if (e.label == *li)
                    choices[i].push_back(&e);
            if (choices[i].empty())
                any_empty = true;
        }
        if (any_empty)
            continue;
        std::vector<std::size_t> pick(factors.size(), 0);
        for (;;) {
            std::vector<Element> srcs, dsts;
            srcs.reserve(factors.size());
            dsts.reserve(factors.size());
            for (std::size_t i = 0; i < factors.size(); ++i) {
                const GraphDatabase::Edge* e = choices[i][pick[i]];
                srcs.push_back(factors[i].node(e->src));
                dsts.push_back(factors[i].node(e->dst));
            }
            edges.emplace_back(Element::tuple(srcs), label, Element::tuple(dsts));
            std::size_t i = factors.size();
            bool done = true;
            while (i > 0) {
                --i;
                if (++pick[i] < choices[i].size()) {
                    done = false;
                    break;
                }
                pick[i] = 0;
            }
            if (done)
                break;
        }
    }

    return GraphDatabase(std::move(nodes), alphabet, std::move(edges));
}

Database to_database(const GraphDatabase& g) {
    std::vector<std::pair<std::string, int>> relations;
    for (const std::string& label : g.alphabet())
        relations.emplace_back(label, 2);
    Schema schema(std::move(relations));
    std::vector<Atom> atoms;
    atoms.reserve(g.edges().size());
    for (const GraphDatabase::Edge& e : g.edges()) {
        Atom a;
        a.rel = *schema.find(g.alphabet()[static_cast<std::size_t>(e.label)]);
        a.args = {g.node(e.src), g.node(e.dst)};
        atoms.push_back(std::move(a));
    }
    return Database(std::move(schema), std::move(atoms));
}

PointedGraph::PointedGraph(std::shared_ptr<const GraphDatabase> graph, Tuple point)
    : graph_(std::move(graph)), point_(std::move(point)) {
    if (!graph_)
        throw std::invalid_argument("pointed graph without a graph");
    for (const Element& e : point_)
        if (!graph_->node_index(e))
            throw std::invalid_argument("point node outside the graph");
}

PointedGraph make_pointed(GraphDatabase graph, Tuple point) {
    return PointedGraph(std::make_shared<GraphDatabase>(std::move(graph)), std::move(point));
}

Nfa pair_language(const GraphDatabase& g, const Element& v, const Element& v2) {
    auto vi = g.node_index(v);
    auto vi2 = g.node_index(v2);
    if (!vi || !vi2)
        throw std::invalid_argument("pair language endpoints outside the graph");
    Nfa nfa;
    nfa.states = static_cast<int>(g.size());
    nfa.alphabet = g.alphabet();
    nfa.transitions.reserve(g.edges().size());
    for (const GraphDatabase::Edge& e : g.edges())
        nfa.transitions.emplace_back(e.src, e.label, e.dst);
    nfa.start = {*vi};
    nfa.accept = {*vi2};
    return nfa;
}

namespace {

struct RemappedNfa {
    std::vector<std::vector<std::pair<LabelId, int>>> out; // per state, sorted
    std::vector<char> accept;
    std::vector<int> start;
};

RemappedNfa remap(const Nfa& nfa, const std::vector<std::string>& united) {
    RemappedNfa r;
    r.out.resize(static_cast<std::size_t>(nfa.states));
    r.accept.assign(static_cast<std::size_t>(nfa.states), 0);
    for (const auto& [s, l, t] : nfa.transitions) {
        const std::string& label = nfa.alphabet.at(static_cast<std::size_t>(l));
        auto it = std::lower_bound(united.begin(), united.end(), label);
        r.out[static_cast<std::size_t>(s)].emplace_back(
            static_cast<LabelId>(it - united.begin()), t);
    }
    for (auto& row : r.out) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    for (int s : nfa.accept)
        r.accept[static_cast<std::size_t>(s)] = 1;
    r.start = nfa.start;
    std::sort(r.start.begin(), r.start.end());
    return r;
}

std::vector<int> subset_step(const RemappedNfa& nfa, const std::vector<int>& subset, LabelId l) {
    std::set<int> next;
    for (int s : subset) {
        const auto& row = nfa.out[static_cast<std::size_t>(s)];
        auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(l, -1));
        for (; it != row.end() && it->first == l; ++it)
            next.insert(it->second);
    }
    return {next.begin(), next.end()};
}

bool subset_accepts(const RemappedNfa& nfa, const std::vector<int>& subset) {
    for (int s : subset)
        if (nfa.accept[static_cast<std::size_t>(s)])
            return true;
    return false;
}

} // namespace

Containment check_containment(const Nfa& a, const Nfa& b) {
    std::vector<std::string> united = a.alphabet;
    united.insert(united.end(), b.alphabet.begin(), b.alphabet.end());
    united = sorted_unique(std::move(united));

    const RemappedNfa ra = remap(a, united);
    const RemappedNfa rb = remap(b, united);

    // Product of a with the lazily determinized complement of b, explored
    // level by level with the frontier grouped by witness word. Distinct
    // pairs can share a witness, so groups rather than single pairs keep the
    // expansion in lexicographic word order, and the first accepting pair
    // (a-state accepting, b-subset rejecting) yields the shortest,
    // lexicographically least witness.
    using PairState = std::pair<int, std::vector<int>>;
    using Level = std::vector<std::pair<std::vector<std::string>, std::vector<PairState>>>;
    std::set<PairState> seen;
    const auto accepting = [&](const PairState& s) {
        return ra.accept[static_cast<std::size_t>(s.first)] && !subset_accepts(rb, s.second);
    };

    Containment result;
    result.holds = true;

    Level frontier;
    {
        std::vector<PairState> roots;
        for (int p0 : ra.start) {
            PairState s{p0, rb.start};
            if (!seen.insert(s).second)
                continue;
            if (accepting(s)) {
                result.holds = false; // the empty word is the witness
                return result;
            }
            roots.push_back(std::move(s));
        }
        if (!roots.empty())
            frontier.push_back({{}, std::move(roots)});
    }

    const auto label_count = static_cast<LabelId>(united.size());
    while (!frontier.empty()) {
        Level next;
        for (const auto& [word, group] : frontier) {
            for (LabelId l = 0; l < label_count; ++l) {
                std::vector<PairState> successors;
                for (const PairState& s : group) {
                    for (const auto& [lab, p2] : ra.out[static_cast<std::size_t>(s.first)]) {
                        if (lab != l)
                            continue;
                        PairState ns{p2, subset_step(rb, s.second, l)};
                        if (!seen.insert(ns).second)
                            continue;
                        if (accepting(ns)) {
                            result.holds = false;
                            result.counterexample = word;
                            result.counterexample.push_back(
                                united[static_cast<std::size_t>(l)]);
                            return result;
                        }
                        successors.push_back(std::move(ns));
                    }
                }
                if (!successors.empty()) {
                    std::vector<std::string> next_word = word;
                    next_word.push_back(united[static_cast<std::size_t>(l)]);
                    next.push_back({std::move(next_word), std::move(successors)});
                }
            }
        }
        frontier = std::move(next);
    }
    return result;
}

bool contains(const Nfa& a, const Nfa& b) {
    return check_containment(a, b).holds;
}

ContainmentCache::ContainmentCache(std::vector<GraphDatabase> factors, GraphDatabase target)
    : factors_(std::move(factors)), target_(std::move(target)) {
    std::vector<std::string> united = target_.alphabet();
    for (const GraphDatabase& g : factors_)
        united.insert(united.end(), g.alphabet().begin(), g.alphabet().end());
    united_ = sorted_unique(std::move(united));
    for (const GraphDatabase& g : factors_)
        factor_dense_.push_back(Dense{dense_out(g, united_)});
    target_dense_ = Dense{dense_out(target_, united_)};
    mask_words_ = (target_.size() + 63) / 64;
    if (mask_words_ == 0)
        mask_words_ = 1;
}

ContainmentCache::Mask ContainmentCache::run_pass(std::size_t factor, int v, int u) const {
    const GraphDatabase& g = factors_.at(factor);
    const Dense& fd = factor_dense_[factor];
    const std::size_t tn = target_.size();

    // Joint reachability of (factor node, target subset) from (v, {u});
    // accumulate per factor node the intersection of the reachable subsets.
    Mask result(g.size() * mask_words_, ~std::uint64_t{0});
    auto fold = [&](int p, const Mask& subset) {
        for (std::size_t w = 0; w < mask_words_; ++w)
            result[static_cast<std::size_t>(p) * mask_words_ + w] &= subset[w];
    };
    auto subset_mask = [&](const std::vector<int>& subset) {
        Mask m(mask_words_, 0);
        for (int s : subset)
            m[static_cast<std::size_t>(s) / 64] |= std::uint64_t{1} << (s % 64);
        return m;
    };

    std::set<std::pair<int, std::vector<int>>> visited;
    std::deque<std::pair<int, std::vector<int>>> queue;
    std::vector<int> s0;
    if (tn > 0)
        s0 = {u};
    queue.emplace_back(v, s0);
    visited.insert(queue.back());
    fold(v, subset_mask(s0));
    while (!queue.empty()) {
        auto [p, subset] = queue.front();
        queue.pop_front();
        for (const auto& [l, p2] : fd.out[static_cast<std::size_t>(p)]) {
            std::set<int> next;
            for (int s : subset) {
                const auto& row = target_dense_.out[static_cast<std::size_t>(s)];
                auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(l, -1));
                for (; it != row.end() && it->first == l; ++it)
                    next.insert(it->second);
            }
            std::pair<int, std::vector<int>> state{p2, {next.begin(), next.end()}};
            if (visited.insert(state).second) {
                fold(state.first, subset_mask(state.second));
                queue.push_back(std::move(state));
            }
        }
    }
    return result;
}

std::uint64_t ContainmentCache::pass_key(std::size_t factor, int v, int u) const {
    std::uint64_t offset = 0;
    for (std::size_t f = 0; f < factor; ++f)
        offset += factors_[f].size();
    return (offset + static_cast<std::uint64_t>(v)) *
               (target_.size() == 0 ? 1 : target_.size()) +
           static_cast<std::uint64_t>(u);
}

const ContainmentCache::Mask* ContainmentCache::pass_for(std::size_t factor, int v, int u) const {
    const std::uint64_t key = pass_key(factor, v, u);
    lookups_.fetch_add(1, std::memory_order_relaxed);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end()) {
            hits_.fetch_add(1, std::memory_order_relaxed);
            return &it->second;
        }
    }
    Mask pass = run_pass(factor, v, u);
    computations_.fetch_add(1, std::memory_order_relaxed);
    std::lock_guard<std::mutex> lock(mutex_);
    return &memo_.emplace(key, std::move(pass)).first->second;
}

bool ContainmentCache::query(std::size_t factor, int v, int v2, int u, int u2) const {
    if (factor >= factors_.size())
        throw std::out_of_range("containment cache factor index");
    const Mask& pass = *pass_for(factor, v, u);
    const std::size_t word = static_cast<std::size_t>(v2) * mask_words_ +
                             static_cast<std::size_t>(u2) / 64;
    return (pass[word] >> (u2 % 64)) & 1;
}

bool ContainmentCache::query(std::size_t factor, const Element& v, const Element& v2,
                             const Element& u, const Element& u2) const {
    const GraphDatabase& g = factors_.at(factor);
    auto vi = g.node_index(v);
    auto vi2 = g.node_index(v2);
    auto ui = target_.node_index(u);
    auto ui2 = target_.node_index(u2);
    if (!vi || !vi2 || !ui || !ui2)
        throw std::invalid_argument("containment cache query outside the graphs");
    return query(factor, *vi, *vi2, *ui, *ui2);
}

void ContainmentCache::precompute_all(Exec exec) {
    struct Job {
        std::size_t factor;
        int v, u;
        std::uint64_t key;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < factors_.size(); ++f)
        for (int v = 0; v < static_cast<int>(factors_[f].size()); ++v)
            for (int u = 0; u < static_cast<int>(target_.size()); ++u) {
                const std::uint64_t key = pass_key(f, v, u);
                bool have;
                {
                    std::lock_guard<std::mutex> lock(mutex_);
                    have = memo_.count(key) > 0;
                }
                if (!have)
                    jobs.push_back(Job{f, v, u, key});
            }
    std::vector<Mask> results(jobs.size());
    for_index(jobs.size(), exec,
              [&](std::size_t i) { results[i] = run_pass(jobs[i].factor, jobs[i].v, jobs[i].u); });
    std::lock_guard<std::mutex> lock(mutex_);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        computations_.fetch_add(1, std::memory_order_relaxed);
        memo_.emplace(jobs[i].key, std::move(results[i]));
    }
}

} // namespace qbex
