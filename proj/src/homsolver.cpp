#include "qbex/homsolver.hpp"

#include <algorithm>

namespace qbex {

namespace {

struct Search {
    const Database& src;
    const Database& dst;
    std::vector<int> assign; // src position -> dst position, -1 if unassigned
    std::vector<int> order;  // unassigned positions in decision order
    const std::function<bool(const Assignment&)>& on_solution;

    Search(const Database& src, const Database& dst,
           const std::function<bool(const Assignment&)>& on_solution)
        : src(src), dst(dst), assign(src.size(), -1), on_solution(on_solution) {}

    bool image_ok(const Database::DenseAtom& atom) const {
        std::vector<int> image;
        image.reserve(atom.args.size());
        for (int pos : atom.args) {
            const int d = assign[static_cast<std::size_t>(pos)];
            if (d < 0)
                return true; // not yet fully assigned
            image.push_back(d);
        }
        return dst.contains_dense(atom.rel, image);
    }

    bool consistent_at(int v) const {
        for (int ai : src.incident_atoms()[static_cast<std::size_t>(v)])
            if (!image_ok(src.dense_atoms()[static_cast<std::size_t>(ai)]))
                return false;
        return true;
    }

    void pick_order() {
        for (int v = 0; v < static_cast<int>(src.size()); ++v)
            if (assign[static_cast<std::size_t>(v)] < 0)
                order.push_back(v);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return src.incident_atoms()[static_cast<std::size_t>(a)].size() >
                   src.incident_atoms()[static_cast<std::size_t>(b)].size();
        });
    }

    Assignment to_assignment() const {
        Assignment out;
        for (int v = 0; v < static_cast<int>(src.size()); ++v)
            out.emplace(src.element(v), dst.element(assign[static_cast<std::size_t>(v)]));
        return out;
    }

    // Returns false when the callback asked to stop.
    bool run(std::size_t depth) {
        if (depth == order.size())
            return on_solution(to_assignment());
        const int v = order[depth];
        for (int d = 0; d < static_cast<int>(dst.size()); ++d) {
            assign[static_cast<std::size_t>(v)] = d;
            if (consistent_at(v) && !run(depth + 1)) {
                assign[static_cast<std::size_t>(v)] = -1;
                return false;
            }
            assign[static_cast<std::size_t>(v)] = -1;
        }
        return true;
    }
};

} // namespace

bool check_partial_hom(const Database& src, const Database& dst, const Assignment& map) {
    for (const auto& [from, to] : map) {
        if (!src.index_of(from))
            throw std::invalid_argument("mapping key outside the source domain");
        if (!dst.index_of(to))
            return false;
    }
    for (const Atom& atom : src.atoms()) {
        Atom image;
        image.rel = atom.rel;
        bool covered = true;
        for (const Element& e : atom.args) {
            auto it = map.find(e);
            if (it == map.end()) {
                covered = false;
                break;
            }
            image.args.push_back(it->second);
        }
        if (covered && !dst.contains(image))
            return false;
    }
    return true;
}

void for_each_hom(const Database& src, const Database& dst, const Assignment& binding,
                  const std::function<bool(const Assignment&)>& on_solution) {
    if (!(src.schema() == dst.schema()))
        throw std::invalid_argument("homomorphism between databases over different schemas");
    if (src.size() == 0) {
        if (binding.empty())
            on_solution(Assignment{});
        else
            throw std::invalid_argument("binding over an empty source domain");
        return;
    }
    Search search(src, dst, on_solution);
    for (const auto& [from, to] : binding) {
        auto v = src.index_of(from);
        auto d = dst.index_of(to);
        if (!v)
            throw std::invalid_argument("binding key outside the source domain");
        if (!d)
            return; // image outside the target domain, no extension exists
        search.assign[static_cast<std::size_t>(*v)] = *d;
    }
    for (const Database::DenseAtom& atom : src.dense_atoms()) {
        bool covered = true;
        for (int pos : atom.args)
            if (search.assign[static_cast<std::size_t>(pos)] < 0)
                covered = false;
        if (covered && !search.image_ok(atom))
            return;
    }
    search.pick_order();
    search.run(0);
}

std::optional<Assignment> find_hom(const PointedDatabase& src, const PointedDatabase& dst) {
    if (src.point().size() != dst.point().size())
        throw std::invalid_argument("pointed databases with different point arities");
    Assignment binding;
    for (std::size_t j = 0; j < src.point().size(); ++j) {
        auto [it, inserted] = binding.emplace(src.point()[j], dst.point()[j]);
        if (!inserted && it->second != dst.point()[j])
            return std::nullopt; // the point binding is not a function
    }
    std::optional<Assignment> found;
    for_each_hom(src.db(), dst.db(), binding, [&](const Assignment& h) {
        found = h;
        return false;
    });
    return found;
}

std::set<Tuple> evaluate_cq(const PointedDatabase& query, const Database& data) {
    std::set<Tuple> answers;
    for_each_hom(query.db(), data, {}, [&](const Assignment& h) {
        Tuple image;
        image.reserve(query.point().size());
        for (const Element& e : query.point())
            image.push_back(h.at(e));
        answers.insert(std::move(image));
        return true;
    });
    return answers;
}

} // namespace qbex
