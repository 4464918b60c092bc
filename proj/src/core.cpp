#include "qbex/core.hpp"

#include <algorithm>
#include <set>

namespace qbex {

Element Element::tuple(std::span<const Element> parts) {
    Element e;
    std::size_t total = 0;
    for (const Element& p : parts)
        total += p.parts_.size();
    e.parts_.reserve(total);
    for (const Element& p : parts)
        e.parts_.insert(e.parts_.end(), p.parts_.begin(), p.parts_.end());
    return e;
}

Symbol Element::base_id() const {
    if (parts_.size() != 1)
        throw std::logic_error("base_id on element of depth " + std::to_string(parts_.size()));
    return parts_[0];
}

Element Element::component(std::size_t i) const {
    if (i >= parts_.size())
        throw std::out_of_range("element coordinate out of range");
    return base(parts_[i]);
}

Element Element::slice(std::size_t start, std::size_t len) const {
    if (len == 0 || start + len > parts_.size())
        throw std::out_of_range("element slice out of range");
    Element e;
    e.parts_.assign(parts_.begin() + static_cast<std::ptrdiff_t>(start),
                    parts_.begin() + static_cast<std::ptrdiff_t>(start + len));
    return e;
}

Element projection(const Element& e, std::size_t coordinate) {
    return e.component(coordinate);
}

Tuple projection(const Tuple& t, std::size_t coordinate) {
    Tuple out;
    out.reserve(t.size());
    for (const Element& e : t)
        out.push_back(projection(e, coordinate));
    return out;
}

Schema::Schema(std::vector<std::pair<std::string, int>> relations) {
    std::sort(relations.begin(), relations.end());
    for (std::size_t i = 0; i < relations.size(); ++i) {
        const auto& [name, arity] = relations[i];
        if (name.empty())
            throw std::invalid_argument("relation with empty name");
        if (arity < 1)
            throw std::invalid_argument("relation " + name + " has arity " +
                                        std::to_string(arity) + ", expected >= 1");
        if (i > 0 && relations[i - 1].first == name)
            throw std::invalid_argument("relation " + name + " declared twice");
        names_.push_back(name);
        arities_.push_back(arity);
    }
}

std::optional<RelId> Schema::find(std::string_view name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name)
        return std::nullopt;
    return static_cast<RelId>(it - names_.begin());
}

Database::Database(Schema schema, std::vector<Atom> atoms)
    : schema_(std::move(schema)), atoms_(std::move(atoms)) {
    for (const Atom& a : atoms_) {
        if (a.rel < 0 || static_cast<std::size_t>(a.rel) >= schema_.size())
            throw std::invalid_argument("atom over unknown relation id");
        if (static_cast<int>(a.args.size()) != schema_.arity(a.rel))
            throw std::invalid_argument("atom over " + schema_.name(a.rel) + " has " +
                                        std::to_string(a.args.size()) + " arguments, expected " +
                                        std::to_string(schema_.arity(a.rel)));
        for (const Element& e : a.args)
            if (!e.valid())
                throw std::invalid_argument("atom argument is an empty element");
    }
    std::sort(atoms_.begin(), atoms_.end());
    atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());

    std::set<Element> dom;
    for (const Atom& a : atoms_)
        dom.insert(a.args.begin(), a.args.end());
    domain_.assign(dom.begin(), dom.end());

    dense_.reserve(atoms_.size());
    incident_.resize(domain_.size());
    for (std::size_t ai = 0; ai < atoms_.size(); ++ai) {
        DenseAtom d;
        d.rel = atoms_[ai].rel;
        for (const Element& e : atoms_[ai].args)
            d.args.push_back(*index_of(e));
        for (int pos : d.args) {
            auto& inc = incident_[static_cast<std::size_t>(pos)];
            if (inc.empty() || inc.back() != static_cast<int>(ai))
                inc.push_back(static_cast<int>(ai));
        }
        dense_.push_back(std::move(d));
    }
}

bool Database::contains(const Atom& atom) const {
    return std::binary_search(atoms_.begin(), atoms_.end(), atom);
}

std::optional<int> Database::index_of(const Element& e) const {
    auto it = std::lower_bound(domain_.begin(), domain_.end(), e);
    if (it == domain_.end() || *it != e)
        return std::nullopt;
    return static_cast<int>(it - domain_.begin());
}

bool Database::contains_dense(RelId rel, std::span<const int> args) const {
    DenseAtom probe;
    probe.rel = rel;
    probe.args.assign(args.begin(), args.end());
    return std::binary_search(dense_.begin(), dense_.end(), probe);
}

PointedDatabase::PointedDatabase(std::shared_ptr<const Database> db, Tuple point)
    : db_(std::move(db)), point_(std::move(point)) {
    if (!db_)
        throw std::invalid_argument("pointed database without a database");
    for (const Element& e : point_)
        if (!db_->index_of(e))
            throw std::invalid_argument("point element outside the database domain");
}

PointedDatabase make_pointed(Database db, Tuple point) {
    return PointedDatabase(std::make_shared<Database>(std::move(db)), std::move(point));
}

static ExampleSets make_examples_impl(const std::vector<Element>& domain,
                                      std::vector<Tuple> positive, std::vector<Tuple> negative) {
    if (positive.empty())
        throw std::invalid_argument("no positive examples");
    const int arity = static_cast<int>(positive.front().size());
    if (arity < 1)
        throw std::invalid_argument("examples must have arity >= 1");
    auto validate = [&](const std::vector<Tuple>& tuples, const char* which) {
        for (const Tuple& t : tuples) {
            if (static_cast<int>(t.size()) != arity)
                throw std::invalid_argument(std::string(which) + " example of arity " +
                                            std::to_string(t.size()) + ", expected " +
                                            std::to_string(arity));
            for (const Element& e : t)
                if (!std::binary_search(domain.begin(), domain.end(), e))
                    throw std::invalid_argument(std::string(which) +
                                                " example element outside the domain");
        }
    };
    validate(positive, "positive");
    validate(negative, "negative");
    for (auto* tuples : {&positive, &negative}) {
        std::sort(tuples->begin(), tuples->end());
        tuples->erase(std::unique(tuples->begin(), tuples->end()), tuples->end());
    }
    return ExampleSets{std::move(positive), std::move(negative), arity};
}

ExampleSets make_examples(const Database& db, std::vector<Tuple> positive,
                          std::vector<Tuple> negative) {
    return make_examples_impl(db.domain(), std::move(positive), std::move(negative));
}

ExampleSets make_examples(std::span<const Element> domain, std::vector<Tuple> positive,
                          std::vector<Tuple> negative) {
    std::vector<Element> sorted(domain.begin(), domain.end());
    std::sort(sorted.begin(), sorted.end());
    return make_examples_impl(sorted, std::move(positive), std::move(negative));
}

Product product(std::span<const PointedDatabase> factors) {
    if (factors.empty())
        throw std::invalid_argument("product of zero factors");
    const std::size_t arity = factors.front().point().size();
    for (const PointedDatabase& f : factors) {
        if (!(f.db().schema() == factors.front().db().schema()))
            throw std::invalid_argument("product factors over different schemas");
        if (f.point().size() != arity)
            throw std::invalid_argument("product factors with different point arities");
    }

    if (factors.size() == 1) {
        const PointedDatabase& only = factors.front();
        return Product{only.db_ptr(), only.point(), true};
    }

    const Schema& schema = factors.front().db().schema();
    std::vector<Atom> atoms;
    for (RelId rel = 0; static_cast<std::size_t>(rel) < schema.size(); ++rel) {
        std::vector<const Atom*> scratch(factors.size(), nullptr);
        // Odometer over one atom choice per factor for this relation.
        std::vector<std::vector<const Atom*>> choices(factors.size());
        bool any_empty = false;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            for (const Atom& a : factors[i].db().atoms())
                if (a.rel == rel)
                    choices[i].push_back(&a);
            if (choices[i].empty())
                any_empty = true;
        }
        if (any_empty)
            continue;
        std::vector<std::size_t> pick(factors.size(), 0);
        const int n = schema.arity(rel);
        while (true) {
            for (std::size_t i = 0; i < factors.size(); ++i)
                scratch[i] = choices[i][pick[i]];
            Atom synced;
            synced.rel = rel;
            synced.args.reserve(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) {
                std::vector<Element> column;
                column.reserve(factors.size());
                for (const Atom* a : scratch)
                    column.push_back(a->args[static_cast<std::size_t>(j)]);
                synced.args.push_back(Element::tuple(column));
            }
            atoms.push_back(std::move(synced));
            std::size_t i = factors.size();
            while (i > 0) {
                --i;
                if (++pick[i] < choices[i].size())
                    break;
                pick[i] = 0;
                if (i == 0)
                    goto rel_done;
            }
        }
    rel_done:;
    }

    auto db = std::make_shared<Database>(schema, std::move(atoms));
    Tuple point;
    point.reserve(arity);
    for (std::size_t j = 0; j < arity; ++j) {
        std::vector<Element> column;
        column.reserve(factors.size());
        for (const PointedDatabase& f : factors)
            column.push_back(f.point()[j]);
        point.push_back(Element::tuple(column));
    }
    bool safe = true;
    for (const Element& e : point)
        if (!db->index_of(e))
            safe = false;
    return Product{std::move(db), std::move(point), safe};
}

} // namespace qbex
