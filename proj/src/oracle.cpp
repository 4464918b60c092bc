#include "qbex/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace qbex::oracle {

namespace {

bool map_is_hom(const Database& src, const Database& dst, const std::vector<int>& map) {
    for (const Database::DenseAtom& atom : src.dense_atoms()) {
        std::vector<int> image;
        image.reserve(atom.args.size());
        for (int pos : atom.args) {
            const int d = map[static_cast<std::size_t>(pos)];
            if (d < 0)
                return true; // partial map variant stops caring here
            image.push_back(d);
        }
        if (!dst.contains_dense(atom.rel, image))
            return false;
    }
    return true;
}

bool map_is_partial_hom(const Database& src, const Database& dst, const std::vector<int>& map) {
    for (const Database::DenseAtom& atom : src.dense_atoms()) {
        std::vector<int> image;
        image.reserve(atom.args.size());
        bool covered = true;
        for (int pos : atom.args) {
            const int d = map[static_cast<std::size_t>(pos)];
            if (d < 0) {
                covered = false;
                break;
            }
            image.push_back(d);
        }
        if (covered && !dst.contains_dense(atom.rel, image))
            return false;
    }
    return true;
}

std::optional<std::vector<std::pair<int, int>>> point_pins(const PointedDatabase& src,
                                                           const PointedDatabase& dst) {
    if (src.point().size() != dst.point().size())
        throw std::invalid_argument("points of different arities");
    std::vector<std::pair<int, int>> pins;
    for (std::size_t j = 0; j < src.point().size(); ++j)
        pins.emplace_back(*src.db().index_of(src.point()[j]), *dst.db().index_of(dst.point()[j]));
    std::sort(pins.begin(), pins.end());
    pins.erase(std::unique(pins.begin(), pins.end()), pins.end());
    for (std::size_t i = 1; i < pins.size(); ++i)
        if (pins[i - 1].first == pins[i].first)
            return std::nullopt;
    return pins;
}

// Explicit configuration-space game. Slots encode one pebble each: 0 means
// unplaced, 1 + c*m + d means pebble on source c answered by target d.
struct ConfigGame {
    int n = 0, m = 0, k = 0;
    std::vector<std::pair<int, int>> pins;
    std::function<bool(const std::vector<int>&)> admissible_map; // map may be partial (-1)

    std::int64_t slot_states = 0;
    std::vector<std::int64_t> pow;
    std::vector<char> admissible;

    void build() {
        slot_states = 1 + static_cast<std::int64_t>(n) * m;
        std::int64_t total = 1;
        pow.assign(static_cast<std::size_t>(k), 0);
        for (int i = 0; i < k; ++i) {
            pow[static_cast<std::size_t>(i)] = total;
            if (total > (1 << 24) / slot_states + 1)
                throw std::invalid_argument("game configuration space too large for the oracle");
            total *= slot_states;
        }
        admissible.assign(static_cast<std::size_t>(total), 0);
        std::vector<int> map;
        for (std::int64_t cfg = 0; cfg < total; ++cfg)
            admissible[static_cast<std::size_t>(cfg)] = decode(cfg, map) && admissible_map(map);
    }

    // Merges slots and pins into a source-indexed map; false on conflicts.
    bool decode(std::int64_t cfg, std::vector<int>& map) const {
        map.assign(static_cast<std::size_t>(n), -1);
        for (const auto& [c, d] : pins)
            map[static_cast<std::size_t>(c)] = d;
        for (int i = 0; i < k; ++i) {
            const std::int64_t s = cfg / pow[static_cast<std::size_t>(i)] % slot_states;
            if (s == 0)
                continue;
            const int c = static_cast<int>((s - 1) / m);
            const int d = static_cast<int>((s - 1) % m);
            auto& slot = map[static_cast<std::size_t>(c)];
            if (slot >= 0 && slot != d)
                return false;
            slot = d;
        }
        return true;
    }

    bool solve(Convention convention) const {
        const std::int64_t total = static_cast<std::int64_t>(admissible.size());
        std::vector<char> alive = admissible;
        if (convention == Convention::simultaneous)
            for (std::int64_t cfg = 0; cfg < total; ++cfg)
                if (!full(cfg))
                    alive[static_cast<std::size_t>(cfg)] = 0;

        bool changed = true;
        while (changed) {
            changed = false;
            for (std::int64_t cfg = 0; cfg < total; ++cfg) {
                if (!alive[static_cast<std::size_t>(cfg)])
                    continue;
                if (!survives(alive, cfg, convention)) {
                    alive[static_cast<std::size_t>(cfg)] = 0;
                    changed = true;
                }
            }
        }

        if (convention == Convention::incremental)
            return alive[0] != 0;

        // Simultaneous opening: every spoiler placement must have some alive
        // response.
        if (n == 0)
            return !admissible.empty() && admissible[0] != 0;
        std::vector<int> cs(static_cast<std::size_t>(k), 0);
        for (;;) {
            if (!some_response(alive, cs))
                return false;
            std::size_t j = cs.size();
            bool done = true;
            while (j > 0) {
                --j;
                if (++cs[j] < n) {
                    done = false;
                    break;
                }
                cs[j] = 0;
            }
            if (done)
                return true;
        }
    }

    bool full(std::int64_t cfg) const {
        for (int i = 0; i < k; ++i)
            if (cfg / pow[static_cast<std::size_t>(i)] % slot_states == 0)
                return false;
        return true;
    }

    bool survives(const std::vector<char>& alive, std::int64_t cfg, Convention convention) const {
        for (int i = 0; i < k; ++i) {
            const std::int64_t s = cfg / pow[static_cast<std::size_t>(i)] % slot_states;
            const std::int64_t base = cfg - s * pow[static_cast<std::size_t>(i)];
            if (convention == Convention::incremental) {
                if (s != 0) {
                    // Spoiler may lift this pebble; the shrunk position must live.
                    if (!alive[static_cast<std::size_t>(base)])
                        return false;
                } else {
                    // Spoiler may place it anywhere; every choice needs a reply.
                    for (int c = 0; c < n; ++c) {
                        bool any = false;
                        for (int d = 0; d < m && !any; ++d)
                            any = alive[static_cast<std::size_t>(
                                      base + (1 + static_cast<std::int64_t>(c) * m + d) *
                                                 pow[static_cast<std::size_t>(i)])] != 0;
                        if (!any)
                            return false;
                    }
                }
            } else {
                // Spoiler repositions this pebble (all slots are placed).
                for (int c = 0; c < n; ++c) {
                    bool any = false;
                    for (int d = 0; d < m && !any; ++d)
                        any = alive[static_cast<std::size_t>(
                                  base + (1 + static_cast<std::int64_t>(c) * m + d) *
                                             pow[static_cast<std::size_t>(i)])] != 0;
                    if (!any)
                        return false;
                }
            }
        }
        return true;
    }

    bool some_response(const std::vector<char>& alive, const std::vector<int>& cs) const {
        std::vector<int> ds(static_cast<std::size_t>(k), 0);
        if (m == 0)
            return false;
        for (;;) {
            std::int64_t cfg = 0;
            for (int i = 0; i < k; ++i)
                cfg += (1 +
                        static_cast<std::int64_t>(cs[static_cast<std::size_t>(i)]) * m +
                        ds[static_cast<std::size_t>(i)]) *
                       pow[static_cast<std::size_t>(i)];
            if (alive[static_cast<std::size_t>(cfg)])
                return true;
            std::size_t j = ds.size();
            bool done = true;
            while (j > 0) {
                --j;
                if (++ds[j] < m) {
                    done = false;
                    break;
                }
                ds[j] = 0;
            }
            if (done)
                return false;
        }
    }
};

} // namespace

std::vector<Assignment> all_homs(const PointedDatabase& src, const PointedDatabase& dst) {
    if (!(src.db().schema() == dst.db().schema()))
        throw std::invalid_argument("databases over different schemas");
    auto pins = point_pins(src, dst);
    std::vector<Assignment> out;
    if (!pins)
        return out;
    const std::size_t n = src.db().size();
    const std::size_t m = dst.db().size();
    if (n == 0) {
        out.push_back(Assignment{});
        return out;
    }
    if (m == 0)
        return out;
    double count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        count *= static_cast<double>(m);
        if (count > 1e8)
            throw std::invalid_argument("map space too large for the oracle");
    }
    std::vector<int> map(n, 0);
    for (;;) {
        bool pinned_ok = true;
        for (const auto& [c, d] : *pins)
            if (map[static_cast<std::size_t>(c)] != d)
                pinned_ok = false;
        if (pinned_ok && map_is_hom(src.db(), dst.db(), map)) {
            Assignment h;
            for (std::size_t i = 0; i < n; ++i)
                h.emplace(src.db().element(static_cast<int>(i)),
                          dst.db().element(map[i]));
            out.push_back(std::move(h));
        }
        std::size_t j = n;
        bool done = true;
        while (j > 0) {
            --j;
            if (++map[j] < static_cast<int>(m)) {
                done = false;
                break;
            }
            map[j] = 0;
        }
        if (done)
            return out;
    }
}

bool game_tree_pebble(const PointedDatabase& src, const PointedDatabase& dst, int k,
                      Convention convention) {
    if (k < 2)
        throw std::invalid_argument("pebble game requires k >= 2");
    if (!(src.db().schema() == dst.db().schema()))
        throw std::invalid_argument("databases over different schemas");
    auto pins = point_pins(src, dst);
    if (!pins)
        return false;
    ConfigGame game;
    game.n = static_cast<int>(src.db().size());
    game.m = static_cast<int>(dst.db().size());
    game.k = k;
    game.pins = *pins;
    game.admissible_map = [&](const std::vector<int>& map) {
        return map_is_partial_hom(src.db(), dst.db(), map);
    };
    game.build();
    return game.solve(convention);
}

namespace {

// Per-factor containment tables for the strong admissibility condition,
// computed with the standalone containment check.
struct StrongTables {
    GraphDatabase product;
    const GraphDatabase* target = nullptr;
    std::vector<std::vector<int>> coords;
    std::vector<std::vector<char>> cont; // factor -> [v][v2][u][u2] flattened

    bool pair_ok(int x, int y, int ux, int uy) const {
        for (std::size_t i = 0; i < coords[static_cast<std::size_t>(x)].size(); ++i) {
            const auto& table = cont[i];
            const std::size_t fn = factor_sizes[i];
            const std::size_t tn = target->size();
            const std::size_t idx =
                ((static_cast<std::size_t>(coords[static_cast<std::size_t>(x)][i]) * fn +
                  static_cast<std::size_t>(coords[static_cast<std::size_t>(y)][i])) *
                     tn +
                 static_cast<std::size_t>(ux)) *
                    tn +
                static_cast<std::size_t>(uy);
            if (table[idx])
                return true;
        }
        return false;
    }

    std::vector<std::size_t> factor_sizes;
};

StrongTables make_tables(std::span<const PointedGraph> factors, const PointedGraph& target) {
    StrongTables t;
    std::vector<GraphDatabase> graphs;
    for (const PointedGraph& f : factors) {
        if (f.graph().alphabet() != target.graph().alphabet())
            throw std::invalid_argument("graphs over different alphabets");
        graphs.push_back(f.graph());
    }
    t.product = graph_product(graphs, 100'000);
    t.target = &target.graph();
    t.coords.resize(t.product.size());
    for (std::size_t x = 0; x < t.product.size(); ++x) {
        std::size_t offset = 0;
        for (const GraphDatabase& g : graphs) {
            const Element part = t.product.node(static_cast<int>(x)).slice(offset, g.node_depth());
            t.coords[x].push_back(*g.node_index(part));
            offset += g.node_depth();
        }
    }
    const std::size_t tn = target.graph().size();
    for (const GraphDatabase& g : graphs) {
        const std::size_t fn = g.size();
        t.factor_sizes.push_back(fn);
        std::vector<char> table(fn * fn * tn * tn, 0);
        for (std::size_t v = 0; v < fn; ++v)
            for (std::size_t v2 = 0; v2 < fn; ++v2)
                for (std::size_t u = 0; u < tn; ++u)
                    for (std::size_t u2 = 0; u2 < tn; ++u2)
                        table[((v * fn + v2) * tn + u) * tn + u2] =
                            contains(pair_language(g, g.node(static_cast<int>(v)),
                                                   g.node(static_cast<int>(v2))),
                                     pair_language(target.graph(),
                                                   target.graph().node(static_cast<int>(u)),
                                                   target.graph().node(static_cast<int>(u2))))
                                ? 1
                                : 0;
        t.cont.push_back(std::move(table));
    }
    return t;
}

std::optional<std::vector<std::pair<int, int>>> graph_pins(const StrongTables& t,
                                                           std::span<const PointedGraph> factors,
                                                           const PointedGraph& target) {
    std::vector<std::pair<int, int>> pins;
    for (std::size_t j = 0; j < target.point().size(); ++j) {
        std::vector<Element> parts;
        for (const PointedGraph& f : factors) {
            if (f.point().size() != target.point().size())
                throw std::invalid_argument("points of different arities");
            parts.push_back(f.point()[j]);
        }
        pins.emplace_back(*t.product.node_index(Element::tuple(parts)),
                          *target.graph().node_index(target.point()[j]));
    }
    std::sort(pins.begin(), pins.end());
    pins.erase(std::unique(pins.begin(), pins.end()), pins.end());
    for (std::size_t i = 1; i < pins.size(); ++i)
        if (pins[i - 1].first == pins[i].first)
            return std::nullopt;
    return pins;
}

bool strong_map_admissible(const StrongTables& t, const std::vector<int>& map) {
    const int n = static_cast<int>(t.product.size());
    for (int x = 0; x < n; ++x) {
        if (map[static_cast<std::size_t>(x)] < 0)
            continue;
        for (int y = 0; y < n; ++y) {
            if (map[static_cast<std::size_t>(y)] < 0)
                continue;
            if (!t.pair_ok(x, y, map[static_cast<std::size_t>(x)],
                           map[static_cast<std::size_t>(y)]))
                return false;
        }
    }
    return true;
}

} // namespace

bool game_tree_pebble(std::span<const PointedGraph> factors, const PointedGraph& target, int k,
                      Convention convention) {
    if (k < 2)
        throw std::invalid_argument("pebble game requires k >= 2");
    if (factors.empty())
        throw std::invalid_argument("game with zero factors");
    StrongTables t = make_tables(factors, target);
    auto pins = graph_pins(t, factors, target);
    if (!pins)
        return false;
    ConfigGame game;
    game.n = static_cast<int>(t.product.size());
    game.m = static_cast<int>(target.graph().size());
    game.k = k;
    game.pins = *pins;
    game.admissible_map = [&](const std::vector<int>& map) {
        return strong_map_admissible(t, map);
    };
    game.build();
    return game.solve(convention);
}

std::vector<Assignment> all_strong_homs(std::span<const PointedGraph> factors,
                                        const PointedGraph& target, std::size_t max_maps) {
    if (factors.empty())
        throw std::invalid_argument("strong map with zero factors");
    StrongTables t = make_tables(factors, target);
    auto pins = graph_pins(t, factors, target);
    std::vector<Assignment> out;
    if (!pins)
        return out;
    const std::size_t n = t.product.size();
    const std::size_t m = target.graph().size();
    if (n == 0) {
        out.push_back(Assignment{});
        return out;
    }
    if (m == 0)
        return out;
    double count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        count *= static_cast<double>(m);
        if (count > static_cast<double>(max_maps))
            throw std::invalid_argument("map space too large for the oracle");
    }
    std::vector<int> map(n, 0);
    for (;;) {
        bool ok = true;
        for (const auto& [c, d] : *pins)
            if (map[static_cast<std::size_t>(c)] != d)
                ok = false;
        if (ok && strong_map_admissible(t, map)) {
            Assignment h;
            for (std::size_t i = 0; i < n; ++i)
                h.emplace(t.product.node(static_cast<int>(i)),
                          target.graph().node(map[i]));
            out.push_back(std::move(h));
        }
        std::size_t j = n;
        bool done = true;
        while (j > 0) {
            --j;
            if (++map[j] < static_cast<int>(m)) {
                done = false;
                break;
            }
            map[j] = 0;
        }
        if (done)
            return out;
    }
}

namespace {

struct EliminationResult {
    int width = 0;
    std::vector<std::vector<int>> bags;
};

EliminationResult eliminate(int vertices, const std::vector<std::vector<char>>& adj,
                            std::span<const int> order) {
    std::vector<std::vector<char>> work = adj;
    std::vector<char> remaining(static_cast<std::size_t>(vertices), 1);
    EliminationResult r;
    for (int v : order) {
        std::vector<int> bag{v};
        for (int w = 0; w < vertices; ++w)
            if (w != v && remaining[static_cast<std::size_t>(w)] &&
                work[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)])
                bag.push_back(w);
        std::sort(bag.begin(), bag.end());
        r.width = std::max(r.width, static_cast<int>(bag.size()) - 1);
        for (std::size_t a = 0; a < bag.size(); ++a)
            for (std::size_t b = a + 1; b < bag.size(); ++b) {
                if (bag[a] == v || bag[b] == v)
                    continue;
                work[static_cast<std::size_t>(bag[a])][static_cast<std::size_t>(bag[b])] = 1;
                work[static_cast<std::size_t>(bag[b])][static_cast<std::size_t>(bag[a])] = 1;
            }
        remaining[static_cast<std::size_t>(v)] = 0;
        r.bags.push_back(std::move(bag));
    }
    return r;
}

std::vector<std::vector<char>> build_adj(int vertices,
                                         std::span<const std::pair<int, int>> edges) {
    std::vector<std::vector<char>> adj(static_cast<std::size_t>(vertices),
                                       std::vector<char>(static_cast<std::size_t>(vertices), 0));
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= vertices || b >= vertices)
            throw std::invalid_argument("edge endpoint out of range");
        if (a == b)
            throw std::invalid_argument("self loop in a simple graph");
        adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
        adj[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 1;
    }
    return adj;
}

} // namespace

int treewidth(int vertices, std::span<const std::pair<int, int>> edges) {
    if (vertices < 0)
        throw std::invalid_argument("negative vertex count");
    if (vertices == 0)
        return -1;
    if (vertices > 8)
        throw std::invalid_argument("treewidth oracle supports up to 8 vertices");
    const auto adj = build_adj(vertices, edges);
    std::vector<int> order(static_cast<std::size_t>(vertices));
    std::iota(order.begin(), order.end(), 0);
    int best = vertices - 1;
    do {
        best = std::min(best, eliminate(vertices, adj, order).width);
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

int TreeDecomposition::width() const {
    int w = -1;
    for (const auto& bag : bags)
        w = std::max(w, static_cast<int>(bag.size()) - 1);
    return w;
}

TreeDecomposition decomposition_from_order(int vertices,
                                           std::span<const std::pair<int, int>> edges,
                                           std::span<const int> order) {
    if (static_cast<int>(order.size()) != vertices)
        throw std::invalid_argument("order must list every vertex once");
    const auto adj = build_adj(vertices, edges);
    EliminationResult r = eliminate(vertices, adj, order);
    std::vector<int> position(static_cast<std::size_t>(vertices), -1);
    for (int j = 0; j < vertices; ++j)
        position[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] = j;
    TreeDecomposition td;
    td.bags = std::move(r.bags);
    td.parent.assign(static_cast<std::size_t>(vertices), -1);
    for (int j = 0; j < vertices; ++j) {
        // Parent bag: the earliest-eliminated other member of this bag.
        int parent = -1;
        for (int w : td.bags[static_cast<std::size_t>(j)]) {
            if (w == order[static_cast<std::size_t>(j)])
                continue;
            const int pw = position[static_cast<std::size_t>(w)];
            if (parent < 0 || pw < parent)
                parent = pw;
        }
        td.parent[static_cast<std::size_t>(j)] = parent;
    }
    // A disconnected graph leaves one parentless bag per component; graft all
    // but the final one onto it. Those bags are singletons of distinct
    // vertices, so bag connectedness and the width are unaffected.
    for (int j = 0; j + 1 < vertices; ++j)
        if (td.parent[static_cast<std::size_t>(j)] < 0)
            td.parent[static_cast<std::size_t>(j)] = vertices - 1;
    return td;
}

bool valid_decomposition(int vertices, std::span<const std::pair<int, int>> edges,
                         const TreeDecomposition& td) {
    const std::size_t t = td.bags.size();
    if (td.parent.size() != t || t == 0)
        return vertices == 0 && t == 0;
    int roots = 0;
    for (std::size_t j = 0; j < t; ++j) {
        if (td.parent[j] < 0) {
            ++roots;
            continue;
        }
        if (td.parent[j] >= static_cast<int>(t) || td.parent[j] == static_cast<int>(j))
            return false;
    }
    if (roots != 1)
        return false;

    std::vector<std::vector<int>> tree_adj(t);
    for (std::size_t j = 0; j < t; ++j)
        if (td.parent[j] >= 0) {
            tree_adj[j].push_back(td.parent[j]);
            tree_adj[static_cast<std::size_t>(td.parent[j])].push_back(static_cast<int>(j));
        }

    std::vector<std::vector<char>> holds(static_cast<std::size_t>(vertices),
                                         std::vector<char>(t, 0));
    for (std::size_t j = 0; j < t; ++j)
        for (int v : td.bags[j]) {
            if (v < 0 || v >= vertices)
                return false;
            holds[static_cast<std::size_t>(v)][j] = 1;
        }
    for (int v = 0; v < vertices; ++v) {
        // Occurrence and connectedness of this vertex's bags.
        int start = -1, cnt = 0;
        for (std::size_t j = 0; j < t; ++j)
            if (holds[static_cast<std::size_t>(v)][j]) {
                start = static_cast<int>(j);
                ++cnt;
            }
        if (cnt == 0)
            return false;
        std::vector<char> seen(t, 0);
        std::vector<int> stack{start};
        seen[static_cast<std::size_t>(start)] = 1;
        int reached = 1;
        while (!stack.empty()) {
            const int j = stack.back();
            stack.pop_back();
            for (int w : tree_adj[static_cast<std::size_t>(j)])
                if (holds[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] &&
                    !seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    ++reached;
                    stack.push_back(w);
                }
        }
        if (reached != cnt)
            return false;
    }
    for (const auto& [a, b] : edges) {
        bool inside = false;
        for (std::size_t j = 0; j < t && !inside; ++j)
            inside = holds[static_cast<std::size_t>(a)][j] && holds[static_cast<std::size_t>(b)][j];
        if (!inside)
            return false;
    }
    return true;
}

PointedDatabase as_query(const CqCandidate& q, const Schema& schema) {
    return make_pointed(Database(schema, q.atoms), q.free);
}

namespace {

// Restricted growth strings: the equality patterns of an n-position tuple.
std::vector<std::vector<int>> partitions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> rgs(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int pos, int blocks) {
        if (pos == n) {
            out.push_back(rgs);
            return;
        }
        for (int b = 0; b <= blocks; ++b) {
            rgs[static_cast<std::size_t>(pos)] = b;
            rec(pos + 1, std::max(blocks, b + 1));
        }
    };
    if (n > 0)
        rec(0, 0);
    return out;
}

struct Enumerator {
    const Database& db;
    int k, max_atoms, max_vars;
    std::vector<Atom> universe;

    Enumerator(const Database& db, int k, int max_atoms, int max_vars)
        : db(db), k(k), max_atoms(max_atoms), max_vars(max_vars) {
        if (max_atoms < 1 || max_vars < 1 || k < 0)
            throw std::invalid_argument("enumeration bounds must be positive");
        const Schema& schema = db.schema();
        for (RelId rel = 0; static_cast<std::size_t>(rel) < schema.size(); ++rel) {
            const int ar = schema.arity(rel);
            std::vector<int> pick(static_cast<std::size_t>(ar), 0);
            for (;;) {
                Atom a;
                a.rel = rel;
                for (int p : pick)
                    a.args.push_back(Element::base(p));
                universe.push_back(std::move(a));
                std::size_t j = pick.size();
                bool done = true;
                while (j > 0) {
                    --j;
                    if (++pick[j] < max_vars) {
                        done = false;
                        break;
                    }
                    pick[j] = 0;
                }
                if (done)
                    break;
            }
        }
        std::sort(universe.begin(), universe.end());
    }

    // Canonical-form filter: scanning the free tuple then the atoms in order,
    // first occurrences must read 0, 1, 2, ...; bound variables thus get ids
    // after the free ones. Also checks safety and the bound-variable Gaifman
    // treewidth.
    bool viable(const std::vector<Atom>& atoms, const Tuple& free, int free_vars) const {
        std::vector<char> seen(static_cast<std::size_t>(max_vars), 0);
        int next = 0;
        for (int f = 0; f < free_vars; ++f)
            seen[static_cast<std::size_t>(next++)] = 1;
        for (const Atom& a : atoms)
            for (const Element& e : a.args) {
                const int v = e.base_id();
                if (seen[static_cast<std::size_t>(v)])
                    continue;
                if (v != next)
                    return false;
                seen[static_cast<std::size_t>(next++)] = 1;
            }
        for (const Element& e : free) {
            bool occurs = false;
            for (const Atom& a : atoms)
                for (const Element& arg : a.args)
                    occurs = occurs || arg == e;
            if (!occurs)
                return false;
        }
        // Gaifman graph of the bound variables only.
        const int bound = next - free_vars;
        if (bound == 0)
            return true;
        std::set<std::pair<int, int>> edges;
        for (const Atom& a : atoms)
            for (const Element& e1 : a.args)
                for (const Element& e2 : a.args) {
                    const int v1 = e1.base_id(), v2 = e2.base_id();
                    if (v1 < free_vars || v2 < free_vars || v1 >= v2)
                        continue;
                    edges.emplace(v1 - free_vars, v2 - free_vars);
                }
        std::vector<std::pair<int, int>> edge_list(edges.begin(), edges.end());
        return treewidth(bound, edge_list) <= k;
    }

    bool explains(const CqCandidate& cand, const ExampleSets& ex) const {
        const std::set<Tuple> answers = evaluate_cq(as_query(cand, db.schema()), db);
        for (const Tuple& a : ex.positive)
            if (!answers.count(a))
                return false;
        for (const Tuple& b : ex.negative)
            if (answers.count(b))
                return false;
        return true;
    }

    std::optional<CqCandidate> search(const ExampleSets& ex) const {
        const auto patterns = partitions(ex.arity);
        for (int s = 1; s <= max_atoms && s <= static_cast<int>(universe.size()); ++s) {
            std::vector<int> comb(static_cast<std::size_t>(s));
            std::iota(comb.begin(), comb.end(), 0);
            for (;;) {
                std::vector<Atom> atoms;
                atoms.reserve(comb.size());
                for (int idx : comb)
                    atoms.push_back(universe[static_cast<std::size_t>(idx)]);
                for (const auto& rgs : patterns) {
                    const int free_vars = 1 + *std::max_element(rgs.begin(), rgs.end());
                    Tuple free;
                    free.reserve(rgs.size());
                    for (int b : rgs)
                        free.push_back(Element::base(b));
                    if (!viable(atoms, free, free_vars))
                        continue;
                    CqCandidate cand{atoms, free};
                    if (explains(cand, ex))
                        return cand;
                }
                // next combination
                int j = s - 1;
                while (j >= 0 &&
                       comb[static_cast<std::size_t>(j)] ==
                           static_cast<int>(universe.size()) - s + j)
                    --j;
                if (j < 0)
                    break;
                ++comb[static_cast<std::size_t>(j)];
                for (int l = j + 1; l < s; ++l)
                    comb[static_cast<std::size_t>(l)] = comb[static_cast<std::size_t>(l - 1)] + 1;
            }
        }
        return std::nullopt;
    }
};

} // namespace

std::optional<CqCandidate> enumerate_tw_explanations(const Database& db, const ExampleSets& ex,
                                                     int k, int max_atoms, int max_vars) {
    Enumerator e(db, k, max_atoms, max_vars);
    return e.search(ex);
}

std::optional<std::vector<CqCandidate>> enumerate_utw_explanations(const Database& db,
                                                                   const ExampleSets& ex, int k,
                                                                   int max_atoms, int max_vars) {
    Enumerator e(db, k, max_atoms, max_vars);
    std::vector<CqCandidate> out;
    for (const Tuple& a : ex.positive) {
        ExampleSets single;
        single.positive = {a};
        single.negative = ex.negative;
        single.arity = ex.arity;
        auto cand = e.search(single);
        if (!cand)
            return std::nullopt;
        out.push_back(std::move(*cand));
    }
    return out;
}

namespace {

struct WordNfa {
    std::vector<std::vector<std::pair<LabelId, int>>> out;
    std::uint64_t start = 0, accept = 0;
};

WordNfa remap_for_words(const Nfa& nfa, const std::vector<std::string>& united) {
    if (nfa.states > 64)
        throw std::invalid_argument("word oracle supports up to 64 states");
    WordNfa w;
    w.out.resize(static_cast<std::size_t>(nfa.states));
    for (const auto& [s, l, t] : nfa.transitions) {
        const std::string& label = nfa.alphabet.at(static_cast<std::size_t>(l));
        auto it = std::lower_bound(united.begin(), united.end(), label);
        w.out[static_cast<std::size_t>(s)].emplace_back(
            static_cast<LabelId>(it - united.begin()), t);
    }
    for (int s : nfa.start)
        w.start |= std::uint64_t{1} << s;
    for (int s : nfa.accept)
        w.accept |= std::uint64_t{1} << s;
    return w;
}

std::uint64_t word_step(const WordNfa& nfa, std::uint64_t set, LabelId l) {
    std::uint64_t next = 0;
    for (int s = 0; s < 64; ++s)
        if ((set >> s) & 1)
            for (const auto& [label, t] : nfa.out[static_cast<std::size_t>(s)])
                if (label == l)
                    next |= std::uint64_t{1} << t;
    return next;
}

} // namespace

std::optional<std::vector<std::string>> word_counterexample(const Nfa& a, const Nfa& b,
                                                            int max_len) {
    std::vector<std::string> united = a.alphabet;
    united.insert(united.end(), b.alphabet.begin(), b.alphabet.end());
    std::sort(united.begin(), united.end());
    united.erase(std::unique(united.begin(), united.end()), united.end());
    const WordNfa wa = remap_for_words(a, united);
    const WordNfa wb = remap_for_words(b, united);

    std::vector<LabelId> word;
    std::function<bool(int, std::uint64_t, std::uint64_t)> dfs =
        [&](int remaining, std::uint64_t sa, std::uint64_t sb) {
            if (remaining == 0)
                return (sa & wa.accept) != 0 && (sb & wb.accept) == 0;
            for (LabelId l = 0; l < static_cast<LabelId>(united.size()); ++l) {
                word.push_back(l);
                if (dfs(remaining - 1, word_step(wa, sa, l), word_step(wb, sb, l)))
                    return true;
                word.pop_back();
            }
            return false;
        };
    for (int len = 0; len <= max_len; ++len)
        if (dfs(len, wa.start, wb.start)) {
            std::vector<std::string> out;
            for (LabelId l : word)
                out.push_back(united[static_cast<std::size_t>(l)]);
            return out;
        }
    return std::nullopt;
}

bool word_containment(const Nfa& a, const Nfa& b, int max_len) {
    return !word_counterexample(a, b, max_len).has_value();
}

} // namespace qbex::oracle
