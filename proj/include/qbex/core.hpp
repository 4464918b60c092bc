#pragma once

// Relational data model: elements, schemas, databases, pointed databases,
// example sets, and the synchronized direct product.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qbex {

// Interned base identifier. The mapping to user-facing names lives in the io
// layer; the engine only ever compares and orders these.
using Symbol = std::int32_t;

// A domain element. Base elements wrap a single identifier; product elements
// are flat tuples of identifiers in factor order, so nested products are
// already associative by construction.
class Element {
public:
    Element() = default;

    static Element base(Symbol s) {
        Element e;
        e.parts_.push_back(s);
        return e;
    }

    // Concatenates the given elements into one product element.
    static Element tuple(std::span<const Element> parts);

    std::size_t depth() const { return parts_.size(); }
    bool valid() const { return !parts_.empty(); }

    Symbol base_id() const;

    // The base element at the given coordinate.
    Element component(std::size_t i) const;

    // The contiguous run of coordinates [start, start + len) as one element.
    Element slice(std::size_t start, std::size_t len) const;

    std::span<const Symbol> parts() const { return parts_; }

    auto operator<=>(const Element&) const = default;

private:
    std::vector<Symbol> parts_;
};

using Tuple = std::vector<Element>;

// Coordinate projection, defined on elements and lifted pointwise to tuples.
Element projection(const Element& e, std::size_t coordinate);
Tuple projection(const Tuple& t, std::size_t coordinate);

// Relation symbols with fixed arities, ordered by name.
using RelId = std::int32_t;

class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<std::pair<std::string, int>> relations);

    std::size_t size() const { return names_.size(); }
    std::optional<RelId> find(std::string_view name) const;
    const std::string& name(RelId r) const { return names_.at(static_cast<std::size_t>(r)); }
    int arity(RelId r) const { return arities_.at(static_cast<std::size_t>(r)); }

    bool operator==(const Schema&) const = default;

private:
    std::vector<std::string> names_;
    std::vector<int> arities_;
};

struct Atom {
    RelId rel = 0;
    Tuple args;

    auto operator<=>(const Atom&) const = default;
};

// A finite relational structure. Atoms are kept sorted and deduplicated; the
// domain is exactly the set of elements occurring in some atom. Dense indices
// (element positions, per-element atom incidence, binary-searchable atom
// list) back the solvers.
class Database {
public:
    Database() = default;
    Database(Schema schema, std::vector<Atom> atoms);

    const Schema& schema() const { return schema_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Element>& domain() const { return domain_; }
    std::size_t size() const { return domain_.size(); }

    bool contains(const Atom& atom) const;
    std::optional<int> index_of(const Element& e) const;
    const Element& element(int idx) const { return domain_.at(static_cast<std::size_t>(idx)); }

    // Atoms with arguments replaced by domain positions, in atom order.
    struct DenseAtom {
        RelId rel = 0;
        std::vector<int> args;

        auto operator<=>(const DenseAtom&) const = default;
    };
    const std::vector<DenseAtom>& dense_atoms() const { return dense_; }
    bool contains_dense(RelId rel, std::span<const int> args) const;

    // For each domain position, the indices of the atoms mentioning it.
    const std::vector<std::vector<int>>& incident_atoms() const { return incident_; }

    bool operator==(const Database& other) const {
        return schema_ == other.schema_ && atoms_ == other.atoms_;
    }

private:
    Schema schema_;
    std::vector<Atom> atoms_;
    std::vector<Element> domain_;
    std::vector<DenseAtom> dense_;
    std::vector<std::vector<int>> incident_;
};

// A database with a distinguished tuple over its domain. The tuple may be
// empty; example sets enforce positive arity at the interface boundary.
class PointedDatabase {
public:
    PointedDatabase(std::shared_ptr<const Database> db, Tuple point);

    const Database& db() const { return *db_; }
    const std::shared_ptr<const Database>& db_ptr() const { return db_; }
    const Tuple& point() const { return point_; }

private:
    std::shared_ptr<const Database> db_;
    Tuple point_;
};

PointedDatabase make_pointed(Database db, Tuple point);

// Validated positive/negative example tuples over a common domain: positives
// nonempty, uniform arity >= 1, both sets sorted and duplicate-free.
struct ExampleSets {
    std::vector<Tuple> positive;
    std::vector<Tuple> negative;
    int arity = 0;
};

ExampleSets make_examples(const Database& db, std::vector<Tuple> positive,
                          std::vector<Tuple> negative);
ExampleSets make_examples(std::span<const Element> domain, std::vector<Tuple> positive,
                          std::vector<Tuple> negative);

// Synchronized direct product of pointed databases over a common schema. The
// product is safe when every coordinate of its point occurs in some product
// atom; only safe products are queries.
struct Product {
    std::shared_ptr<const Database> db;
    Tuple point;
    bool safe = false;
};

Product product(std::span<const PointedDatabase> factors);

} // namespace qbex
