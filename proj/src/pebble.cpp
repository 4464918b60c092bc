#include "qbex/pebble.hpp"

#include <algorithm>
#include <optional>

namespace qbex {

namespace {

// Shared state for the admissibility callbacks: a scratch assignment with the
// pins preloaded, refreshed per query.
struct RelationalAdmissibility {
    const Database& src;
    const Database& dst;
    std::vector<int> pinned;  // source index -> target index or -1
    std::vector<int> scratch;

    RelationalAdmissibility(const Database& src, const Database& dst,
                            const std::vector<std::pair<int, int>>& pins)
        : src(src), dst(dst), pinned(src.size(), -1) {
        for (const auto& [c, d] : pins)
            pinned[static_cast<std::size_t>(c)] = d;
    }

    bool atom_ok(const Database::DenseAtom& atom) const {
        std::vector<int> image;
        image.reserve(atom.args.size());
        for (int pos : atom.args) {
            const int d = scratch[static_cast<std::size_t>(pos)];
            if (d < 0)
                return true;
            image.push_back(d);
        }
        return dst.contains_dense(atom.rel, image);
    }

    bool root() {
        scratch = pinned;
        for (const Database::DenseAtom& atom : src.dense_atoms())
            if (!atom_ok(atom))
                return false;
        return true;
    }

    bool extend(std::span<const std::pair<int, int>> base, int c, int d) {
        scratch = pinned;
        for (const auto& [bc, bd] : base)
            scratch[static_cast<std::size_t>(bc)] = bd;
        scratch[static_cast<std::size_t>(c)] = d;
        for (int ai : src.incident_atoms()[static_cast<std::size_t>(c)])
            if (!atom_ok(src.dense_atoms()[static_cast<std::size_t>(ai)]))
                return false;
        return true;
    }
};

// Builds the pin list from the points; nullopt when the binding is not a
// function, which loses the game outright.
std::optional<std::vector<std::pair<int, int>>> make_pins(const PointedDatabase& src,
                                                          const PointedDatabase& dst) {
    std::vector<std::pair<int, int>> pins;
    for (std::size_t j = 0; j < src.point().size(); ++j) {
        const int c = *src.db().index_of(src.point()[j]);
        const int d = *dst.db().index_of(dst.point()[j]);
        pins.emplace_back(c, d);
    }
    std::sort(pins.begin(), pins.end());
    pins.erase(std::unique(pins.begin(), pins.end()), pins.end());
    for (std::size_t i = 1; i < pins.size(); ++i)
        if (pins[i - 1].first == pins[i].first)
            return std::nullopt;
    return pins;
}

void validate(const PointedDatabase& src, const PointedDatabase& dst, int k) {
    if (k < 2)
        throw std::invalid_argument("pebble game requires k >= 2");
    if (!(src.db().schema() == dst.db().schema()))
        throw std::invalid_argument("pebble game between databases over different schemas");
    if (src.point().size() != dst.point().size())
        throw std::invalid_argument("pebble game between points of different arities");
}

detail::FamilyResult run_fixpoint(const PointedDatabase& src, const PointedDatabase& dst, int k,
                                  detail::SweepOrder order, Exec exec, bool want_survivors) {
    validate(src, dst, k);
    auto pins = make_pins(src, dst);
    if (!pins)
        return {};
    RelationalAdmissibility adm(src.db(), dst.db(), *pins);
    detail::FamilyProblem problem;
    problem.src_size = static_cast<int>(src.db().size());
    problem.dst_size = static_cast<int>(dst.db().size());
    problem.pebbles = k;
    problem.pins = std::move(*pins);
    problem.root_admissible = [&adm] { return adm.root(); };
    problem.extend_admissible = [&adm](std::span<const std::pair<int, int>> base, int c, int d) {
        return adm.extend(base, c, d);
    };
    return detail::family_fixpoint(problem, order, exec, want_survivors);
}

} // namespace

bool pebble_game(const PointedDatabase& src, const PointedDatabase& dst, int k, Exec exec) {
    return run_fixpoint(src, dst, k, detail::SweepOrder::forward, exec, false).root_alive;
}

std::vector<bool> pebble_closure(const PointedDatabase& src,
                                 std::span<const PointedDatabase> targets, int k, Exec exec) {
    for (const PointedDatabase& t : targets)
        validate(src, t, k);
    std::vector<std::uint8_t> wins(targets.size(), 0);
    for_index(targets.size(), exec, [&](std::size_t i) {
        wins[i] = pebble_game(src, targets[i], k, Exec::serial) ? 1 : 0;
    });
    return std::vector<bool>(wins.begin(), wins.end());
}

detail::FamilyResult pebble_fixpoint(const PointedDatabase& src, const PointedDatabase& dst,
                                     int k, detail::SweepOrder order, Exec exec) {
    return run_fixpoint(src, dst, k, order, exec, true);
}

} // namespace qbex
