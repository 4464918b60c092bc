#include "qbex/family.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

namespace qbex::detail {

namespace {

using Pairs = std::vector<std::pair<int, int>>;

struct Engine {
    const FamilyProblem& p;
    std::vector<Pairs> pairs;          // entry id -> sorted map
    std::vector<char> alive;
    std::vector<std::vector<int>> support; // entry id -> per-source alive-child count
    std::map<Pairs, int> index;

    explicit Engine(const FamilyProblem& p) : p(p) {}

    int pin_image(int c) const {
        auto it = std::lower_bound(p.pins.begin(), p.pins.end(),
                                   std::make_pair(c, std::numeric_limits<int>::min()));
        if (it != p.pins.end() && it->first == c)
            return it->second;
        return -1;
    }

    bool pebbled(const Pairs& f, int c) const {
        auto it = std::lower_bound(f.begin(), f.end(),
                                   std::make_pair(c, std::numeric_limits<int>::min()));
        return it != f.end() && it->first == c;
    }

    int lookup(const Pairs& f) const {
        auto it = index.find(f);
        return it == index.end() ? -1 : it->second;
    }

    void build() {
        if (!p.root_admissible())
            return;
        pairs.push_back({});
        alive.push_back(1);
        index.emplace(Pairs{}, 0);

        std::size_t level_begin = 0;
        for (int level = 0; level < p.pebbles; ++level) {
            const std::size_t level_end = pairs.size();
            for (std::size_t id = level_begin; id < level_end; ++id) {
                const int first_c = pairs[id].empty() ? 0 : pairs[id].back().first + 1;
                for (int c = first_c; c < p.src_size; ++c) {
                    const int forced = pin_image(c);
                    for (int d = 0; d < p.dst_size; ++d) {
                        if (forced >= 0 && d != forced)
                            continue;
                        if (!p.extend_admissible(pairs[id], c, d))
                            continue;
                        Pairs child = pairs[id];
                        child.emplace_back(c, d);
                        index.emplace(child, static_cast<int>(pairs.size()));
                        pairs.push_back(std::move(child));
                        alive.push_back(1);
                    }
                }
            }
            level_begin = level_end;
        }

        support.assign(pairs.size(), {});
        for (std::size_t id = 0; id < pairs.size(); ++id)
            if (static_cast<int>(pairs[id].size()) < p.pebbles)
                support[id].assign(static_cast<std::size_t>(p.src_size), 0);
        for (std::size_t id = 1; id < pairs.size(); ++id) {
            for (std::size_t j = 0; j < pairs[id].size(); ++j) {
                Pairs parent = pairs[id];
                const int c = parent[j].first;
                parent.erase(parent.begin() + static_cast<std::ptrdiff_t>(j));
                const int pid = lookup(parent);
                if (pid < 0)
                    throw std::logic_error("admissibility not closed under restriction");
                support[static_cast<std::size_t>(pid)][static_cast<std::size_t>(c)] += 1;
            }
        }
    }

    bool unsupported(std::size_t id) const {
        if (static_cast<int>(pairs[id].size()) >= p.pebbles)
            return false;
        for (int c = 0; c < p.src_size; ++c)
            if (!pebbled(pairs[id], c) && support[id][static_cast<std::size_t>(c)] == 0)
                return true;
        return false;
    }

    void run_worklist(SweepOrder order) {
        std::deque<std::size_t> work;
        auto kill = [&](std::size_t id) {
            if (!alive[id])
                return;
            alive[id] = 0;
            work.push_back(id);
        };
        for (std::size_t id = 0; id < pairs.size(); ++id)
            if (unsupported(id))
                kill(id);
        while (!work.empty()) {
            std::size_t id;
            if (order == SweepOrder::forward) {
                id = work.front();
                work.pop_front();
            } else {
                id = work.back();
                work.pop_back();
            }
            // Losing a member invalidates its extensions outright (rule a)
            // and may strand a restriction without cover (rule b).
            for (std::size_t j = 0; j < pairs[id].size(); ++j) {
                Pairs parent = pairs[id];
                const int c = parent[j].first;
                parent.erase(parent.begin() + static_cast<std::ptrdiff_t>(j));
                const int pid = lookup(parent);
                if (pid < 0 || !alive[static_cast<std::size_t>(pid)])
                    continue;
                auto& count =
                    support[static_cast<std::size_t>(pid)][static_cast<std::size_t>(c)];
                if (--count == 0)
                    kill(static_cast<std::size_t>(pid));
            }
            if (static_cast<int>(pairs[id].size()) < p.pebbles) {
                for (int c = 0; c < p.src_size; ++c) {
                    if (pebbled(pairs[id], c))
                        continue;
                    Pairs child = pairs[id];
                    child.emplace_back(c, -1);
                    std::sort(child.begin(), child.end());
                    auto slot = std::find_if(child.begin(), child.end(),
                                             [&](const auto& e) { return e.first == c; });
                    for (int d = 0; d < p.dst_size; ++d) {
                        slot->second = d;
                        const int cid = lookup(child);
                        if (cid >= 0)
                            kill(static_cast<std::size_t>(cid));
                    }
                }
            }
        }
    }

    // Round-based schedule: mark every violating member concurrently, then
    // apply the marks, until stable. Reaches the same fixpoint by confluence.
    void run_rounds(Exec exec) {
        std::vector<char> doomed(pairs.size(), 0);
        for (;;) {
            std::fill(doomed.begin(), doomed.end(), 0);
            for_index(pairs.size(), exec, [&](std::size_t id) {
                if (!alive[id])
                    return;
                for (std::size_t j = 0; j < pairs[id].size(); ++j) {
                    Pairs parent = pairs[id];
                    parent.erase(parent.begin() + static_cast<std::ptrdiff_t>(j));
                    const int pid = lookup(parent);
                    if (pid < 0 || !alive[static_cast<std::size_t>(pid)]) {
                        doomed[id] = 1;
                        return;
                    }
                }
                if (static_cast<int>(pairs[id].size()) >= p.pebbles)
                    return;
                for (int c = 0; c < p.src_size; ++c) {
                    if (pebbled(pairs[id], c))
                        continue;
                    Pairs child = pairs[id];
                    child.emplace_back(c, -1);
                    std::sort(child.begin(), child.end());
                    auto slot = std::find_if(child.begin(), child.end(),
                                             [&](const auto& e) { return e.first == c; });
                    bool covered = false;
                    for (int d = 0; d < p.dst_size && !covered; ++d) {
                        slot->second = d;
                        const int cid = lookup(child);
                        covered = cid >= 0 && alive[static_cast<std::size_t>(cid)];
                    }
                    if (!covered) {
                        doomed[id] = 1;
                        return;
                    }
                }
            });
            bool changed = false;
            for (std::size_t id = 0; id < pairs.size(); ++id)
                if (doomed[id]) {
                    alive[id] = 0;
                    changed = true;
                }
            if (!changed)
                return;
        }
    }
};

} // namespace

FamilyResult family_fixpoint(const FamilyProblem& problem, SweepOrder order, Exec exec,
                             bool want_survivors) {
    if (problem.src_size < 0 || problem.dst_size < 0 || problem.pebbles < 1)
        throw std::invalid_argument("malformed family problem");
    Engine engine(problem);
    engine.build();
    FamilyResult result;
    if (engine.pairs.empty())
        return result;
    if (exec == Exec::parallel)
        engine.run_rounds(exec);
    else
        engine.run_worklist(order);
    result.root_alive = engine.alive[0] != 0;
    if (want_survivors) {
        for (std::size_t id = 0; id < engine.pairs.size(); ++id)
            if (engine.alive[id])
                result.survivors.push_back(engine.pairs[id]);
        std::sort(result.survivors.begin(), result.survivors.end());
    }
    return result;
}

} // namespace qbex::detail
