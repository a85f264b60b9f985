#ifndef PGP_STRIPS_H
#define PGP_STRIPS_H

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pgp {
using TypeId = int;
using ObjectId = int;
using PredicateId = int;
using SchemaId = int;
using AtomId = int;

// Raised when a model violates its typing or arity contract.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/*
  Dense truth assignment over the ground-atom universe of one instance.
  Two states of the same instance compare word by word.
*/
class State {
public:
    State() = default;
    explicit State(std::size_t num_atoms);

    bool test(AtomId atom) const {
        return (words_[static_cast<std::size_t>(atom) >> 6] >> (atom & 63)) & 1u;
    }
    void set(AtomId atom) {
        words_[static_cast<std::size_t>(atom) >> 6] |= std::uint64_t{1} << (atom & 63);
    }
    void reset(AtomId atom) {
        words_[static_cast<std::size_t>(atom) >> 6] &= ~(std::uint64_t{1} << (atom & 63));
    }

    std::size_t size() const { return num_atoms_; }
    std::size_t count() const;
    bool contains_all(std::span<const AtomId> atoms) const;
    std::vector<AtomId> atoms() const;
    std::uint64_t hash() const;
    std::span<const std::uint64_t> words() const { return words_; }

    friend bool operator==(const State &, const State &) = default;

private:
    std::size_t num_atoms_ = 0;
    std::vector<std::uint64_t> words_;
};

struct TypeDecl {
    std::string name;
    TypeId parent = -1;
};

struct PredicateDecl {
    std::string name;
    std::vector<TypeId> param_types;

    std::size_t arity() const { return param_types.size(); }
    friend bool operator==(const PredicateDecl &, const PredicateDecl &) = default;
};

// Argument of a schema atom: a schema parameter or a domain constant.
struct Term {
    enum class Kind : std::uint8_t { Parameter, Constant };
    Kind kind = Kind::Parameter;
    int index = 0;

    friend bool operator==(const Term &, const Term &) = default;
};

struct SchemaAtom {
    PredicateId predicate = 0;
    std::vector<Term> args;

    friend bool operator==(const SchemaAtom &, const SchemaAtom &) = default;
};

struct ActionSchema {
    std::string name;
    std::vector<std::string> param_names;
    std::vector<TypeId> param_types;
    std::vector<SchemaAtom> preconditions;
    std::vector<SchemaAtom> add_effects;
    std::vector<SchemaAtom> del_effects;

    std::size_t arity() const { return param_types.size(); }
    friend bool operator==(const ActionSchema &, const ActionSchema &) = default;
};

struct Constant {
    std::string name;
    TypeId type = 0;

    friend bool operator==(const Constant &, const Constant &) = default;
};

/*
  Typed STRIPS domain. Type 0 is always the implicit root "object", so
  untyped domains need no declarations at all.
*/
class DomainModel {
public:
    DomainModel();

    std::string name;
    std::vector<TypeDecl> types;
    std::vector<Constant> constants;
    std::vector<PredicateDecl> predicates;
    std::vector<ActionSchema> schemas;

    bool is_subtype(TypeId type, TypeId of) const;
    std::optional<TypeId> find_type(std::string_view name) const;
    std::optional<PredicateId> find_predicate(std::string_view name) const;
    std::optional<SchemaId> find_schema(std::string_view name) const;
    std::optional<int> find_constant(std::string_view name) const;

    // Predicates that occur in no add or delete effect.
    std::vector<bool> static_predicates() const;

    // Throws ModelError on undeclared predicates, arity or type mismatches.
    void validate() const;
};

bool structurally_equal(const DomainModel &a, const DomainModel &b);

struct Object {
    std::string name;
    TypeId type = 0;
};

struct GroundAtom {
    PredicateId predicate = 0;
    std::vector<ObjectId> args;

    friend bool operator==(const GroundAtom &, const GroundAtom &) = default;
};

/*
  A planning instance over a shared domain. Atoms are numbered
  lexicographically by (predicate declaration order, per-type object
  index tuple); the numbering is fixed at construction.
*/
class Instance {
public:
    Instance(std::shared_ptr<const DomainModel> domain, std::string name,
             std::vector<Object> objects, const std::vector<GroundAtom> &init,
             const std::vector<GroundAtom> &goal);

    const DomainModel &domain() const { return *domain_; }
    const std::shared_ptr<const DomainModel> &domain_ptr() const { return domain_; }
    const std::string &name() const { return name_; }

    std::span<const Object> objects() const { return objects_; }
    std::optional<ObjectId> find_object(std::string_view name) const;
    std::span<const ObjectId> objects_of_type(TypeId type) const {
        return objects_of_type_[type];
    }
    // Position of `object` among the objects of `type`, or -1.
    int index_in_type(TypeId type, ObjectId object) const {
        return index_in_type_[static_cast<std::size_t>(type) * objects_.size() + object];
    }
    ObjectId constant_object(int constant) const { return constant_objects_[constant]; }

    std::size_t num_atoms() const { return num_atoms_; }
    AtomId atom_index(PredicateId predicate, std::span<const ObjectId> args) const;
    AtomId atom_index(const GroundAtom &atom) const {
        return atom_index(atom.predicate, atom.args);
    }
    GroundAtom atom(AtomId id) const;
    std::string atom_name(AtomId id) const;
    PredicateId predicate_of(AtomId id) const;

    // Index arithmetic used by the interpreter's hot path.
    std::size_t predicate_offset(PredicateId p) const { return offsets_[p]; }
    std::span<const std::size_t> predicate_strides(PredicateId p) const {
        return strides_[p];
    }

    const State &init() const { return init_; }
    std::span<const AtomId> goal() const { return goal_; }

private:
    std::shared_ptr<const DomainModel> domain_;
    std::string name_;
    std::vector<Object> objects_;
    std::vector<ObjectId> constant_objects_;
    std::vector<std::vector<ObjectId>> objects_of_type_;
    std::vector<int> index_in_type_;
    std::vector<std::size_t> offsets_;
    std::vector<std::vector<std::size_t>> strides_;
    std::size_t num_atoms_ = 0;
    State init_;
    std::vector<AtomId> goal_;
};

struct GroundAction {
    SchemaId schema = 0;
    std::vector<ObjectId> args;
    std::vector<AtomId> pre;
    std::vector<AtomId> add;
    std::vector<AtomId> del;

    friend bool operator==(const GroundAction &, const GroundAction &) = default;
};

// Instantiates `schema` over `args`; throws ModelError on arity or typing errors.
GroundAction instantiate(const Instance &instance, SchemaId schema,
                         std::span<const ObjectId> args);
std::string action_name(const Instance &instance, const GroundAction &action);

/*
  Ground actions of an instance together with per-atom indices of
  achievers and consumers.
*/
struct GroundTask {
    const Instance *instance = nullptr;
    std::vector<GroundAction> actions;
    std::vector<std::vector<int>> achievers;
    std::vector<std::vector<int>> consumers;
};

// Every type-respecting instantiation of every schema, in schema order
// then lexicographic object order.
GroundTask ground_universe(const Instance &instance);

bool applicable(const GroundAction &action, const State &state);
// Throws std::logic_error when the action is not applicable.
State apply(const GroundAction &action, const State &state);
bool satisfies_goal(const State &state, std::span<const AtomId> goal);
}

#endif
