#include "pgp/strips.h"

#include <algorithm>
#include <bit>
#include <numeric>

using namespace std;

namespace pgp {
State::State(size_t num_atoms)
    : num_atoms_(num_atoms), words_((num_atoms + 63) / 64, 0) {
}

size_t State::count() const {
    size_t total = 0;
    for (uint64_t w : words_)
        total += popcount(w);
    return total;
}

bool State::contains_all(span<const AtomId> atoms) const {
    for (AtomId a : atoms)
        if (!test(a))
            return false;
    return true;
}

vector<AtomId> State::atoms() const {
    vector<AtomId> result;
    for (size_t i = 0; i < words_.size(); ++i) {
        uint64_t w = words_[i];
        while (w) {
            int bit = countr_zero(w);
            result.push_back(static_cast<AtomId>(i * 64 + bit));
            w &= w - 1;
        }
    }
    return result;
}

uint64_t State::hash() const {
    uint64_t h = 0x9e3779b97f4a7c15ULL ^ num_atoms_;
    for (uint64_t w : words_) {
        h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdULL;
    }
    return h;
}

DomainModel::DomainModel() {
    types.push_back({"object", -1});
}

bool DomainModel::is_subtype(TypeId type, TypeId of) const {
    for (TypeId t = type; t >= 0; t = types[t].parent)
        if (t == of)
            return true;
    return false;
}

template<typename T>
static optional<int> find_named(const vector<T> &items, string_view name) {
    for (size_t i = 0; i < items.size(); ++i)
        if (items[i].name == name)
            return static_cast<int>(i);
    return nullopt;
}

optional<TypeId> DomainModel::find_type(string_view name) const {
    return find_named(types, name);
}

optional<PredicateId> DomainModel::find_predicate(string_view name) const {
    return find_named(predicates, name);
}

optional<SchemaId> DomainModel::find_schema(string_view name) const {
    return find_named(schemas, name);
}

optional<int> DomainModel::find_constant(string_view name) const {
    return find_named(constants, name);
}

vector<bool> DomainModel::static_predicates() const {
    vector<bool> result(predicates.size(), true);
    for (const ActionSchema &schema : schemas) {
        for (const SchemaAtom &a : schema.add_effects)
            result[a.predicate] = false;
        for (const SchemaAtom &a : schema.del_effects)
            result[a.predicate] = false;
    }
    return result;
}

void DomainModel::validate() const {
    for (size_t t = 1; t < types.size(); ++t) {
        // Parents must be declared earlier; this rules out cycles.
        if (types[t].parent < 0 || types[t].parent >= static_cast<int>(t))
            throw ModelError("type '" + types[t].name + "' has an invalid parent");
    }
    for (const Constant &c : constants)
        if (c.type < 0 || c.type >= static_cast<int>(types.size()))
            throw ModelError("constant '" + c.name + "' has an unknown type");
    for (const PredicateDecl &p : predicates)
        for (TypeId t : p.param_types)
            if (t < 0 || t >= static_cast<int>(types.size()))
                throw ModelError("predicate '" + p.name + "' has an unknown type");

    for (const ActionSchema &schema : schemas) {
        if (schema.param_names.size() != schema.param_types.size())
            throw ModelError("schema '" + schema.name + "' has mismatched parameter lists");
        auto check = [&](const SchemaAtom &atom) {
            if (atom.predicate < 0 || atom.predicate >= static_cast<int>(predicates.size()))
                throw ModelError("schema '" + schema.name + "' uses an undeclared predicate");
            const PredicateDecl &pred = predicates[atom.predicate];
            if (atom.args.size() != pred.arity())
                throw ModelError("schema '" + schema.name + "': arity mismatch in '" +
                                 pred.name + "'");
            for (size_t i = 0; i < atom.args.size(); ++i) {
                const Term &term = atom.args[i];
                TypeId type;
                if (term.kind == Term::Kind::Parameter) {
                    if (term.index < 0 || term.index >= static_cast<int>(schema.arity()))
                        throw ModelError("schema '" + schema.name + "': unknown parameter");
                    type = schema.param_types[term.index];
                } else {
                    if (term.index < 0 || term.index >= static_cast<int>(constants.size()))
                        throw ModelError("schema '" + schema.name + "': unknown constant");
                    type = constants[term.index].type;
                }
                if (!is_subtype(type, pred.param_types[i]))
                    throw ModelError("schema '" + schema.name + "': type mismatch in '" +
                                     pred.name + "' argument " + to_string(i + 1));
            }
        };
        for (const SchemaAtom &a : schema.preconditions)
            check(a);
        for (const SchemaAtom &a : schema.add_effects)
            check(a);
        for (const SchemaAtom &a : schema.del_effects)
            check(a);
    }
}

bool structurally_equal(const DomainModel &a, const DomainModel &b) {
    if (a.types.size() != b.types.size())
        return false;
    for (size_t i = 0; i < a.types.size(); ++i)
        if (a.types[i].name != b.types[i].name || a.types[i].parent != b.types[i].parent)
            return false;
    return a.constants == b.constants && a.predicates == b.predicates &&
           a.schemas == b.schemas;
}

Instance::Instance(shared_ptr<const DomainModel> domain, string name,
                   vector<Object> objects, const vector<GroundAtom> &init,
                   const vector<GroundAtom> &goal)
    : domain_(move(domain)), name_(move(name)) {
    const DomainModel &dom = *domain_;
    for (const Constant &c : dom.constants) {
        constant_objects_.push_back(static_cast<ObjectId>(objects_.size()));
        objects_.push_back({c.name, c.type});
    }
    for (Object &o : objects) {
        if (o.type < 0 || o.type >= static_cast<int>(dom.types.size()))
            throw ModelError("object '" + o.name + "' has an unknown type");
        if (find_object(o.name))
            throw ModelError("object '" + o.name + "' declared twice");
        objects_.push_back(move(o));
    }

    const size_t num_types = dom.types.size();
    objects_of_type_.assign(num_types, {});
    index_in_type_.assign(num_types * objects_.size(), -1);
    for (size_t t = 0; t < num_types; ++t) {
        for (size_t o = 0; o < objects_.size(); ++o) {
            if (dom.is_subtype(objects_[o].type, static_cast<TypeId>(t))) {
                index_in_type_[t * objects_.size() + o] =
                    static_cast<int>(objects_of_type_[t].size());
                objects_of_type_[t].push_back(static_cast<ObjectId>(o));
            }
        }
    }

    size_t offset = 0;
    for (const PredicateDecl &p : dom.predicates) {
        offsets_.push_back(offset);
        vector<size_t> strides(p.arity(), 1);
        size_t size = 1;
        for (size_t i = p.arity(); i-- > 0;) {
            strides[i] = size;
            size *= objects_of_type_[p.param_types[i]].size();
        }
        strides_.push_back(move(strides));
        offset += size;
    }
    offsets_.push_back(offset);
    num_atoms_ = offset;

    init_ = State(num_atoms_);
    for (const GroundAtom &a : init)
        init_.set(atom_index(a));
    for (const GroundAtom &a : goal)
        goal_.push_back(atom_index(a));
    sort(goal_.begin(), goal_.end());
    goal_.erase(unique(goal_.begin(), goal_.end()), goal_.end());
}

optional<ObjectId> Instance::find_object(string_view name) const {
    return find_named(objects_, name);
}

AtomId Instance::atom_index(PredicateId predicate, span<const ObjectId> args) const {
    const DomainModel &dom = *domain_;
    if (predicate < 0 || predicate >= static_cast<int>(dom.predicates.size()))
        throw ModelError("unknown predicate id " + to_string(predicate));
    const PredicateDecl &pred = dom.predicates[predicate];
    if (args.size() != pred.arity())
        throw ModelError("arity mismatch for '" + pred.name + "'");
    size_t index = offsets_[predicate];
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] < 0 || args[i] >= static_cast<int>(objects_.size()))
            throw ModelError("unknown object in '" + pred.name + "'");
        int pos = index_in_type(pred.param_types[i], args[i]);
        if (pos < 0)
            throw ModelError("object '" + objects_[args[i]].name +
                             "' has the wrong type for '" + pred.name + "'");
        index += static_cast<size_t>(pos) * strides_[predicate][i];
    }
    return static_cast<AtomId>(index);
}

PredicateId Instance::predicate_of(AtomId id) const {
    auto it = upper_bound(offsets_.begin(), offsets_.end(), static_cast<size_t>(id));
    return static_cast<PredicateId>(it - offsets_.begin() - 1);
}

GroundAtom Instance::atom(AtomId id) const {
    if (id < 0 || static_cast<size_t>(id) >= num_atoms_)
        throw ModelError("atom index out of range");
    GroundAtom result;
    result.predicate = predicate_of(id);
    const PredicateDecl &pred = domain_->predicates[result.predicate];
    size_t rest = static_cast<size_t>(id) - offsets_[result.predicate];
    for (size_t i = 0; i < pred.arity(); ++i) {
        size_t pos = rest / strides_[result.predicate][i];
        rest %= strides_[result.predicate][i];
        result.args.push_back(objects_of_type_[pred.param_types[i]][pos]);
    }
    return result;
}

string Instance::atom_name(AtomId id) const {
    GroundAtom a = atom(id);
    string text = domain_->predicates[a.predicate].name + "(";
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (i)
            text += ",";
        text += objects_[a.args[i]].name;
    }
    return text + ")";
}

static void normalize(vector<AtomId> &atoms) {
    sort(atoms.begin(), atoms.end());
    atoms.erase(unique(atoms.begin(), atoms.end()), atoms.end());
}

GroundAction instantiate(const Instance &instance, SchemaId schema_id,
                         span<const ObjectId> args) {
    const DomainModel &dom = instance.domain();
    if (schema_id < 0 || schema_id >= static_cast<int>(dom.schemas.size()))
        throw ModelError("unknown schema id " + to_string(schema_id));
    const ActionSchema &schema = dom.schemas[schema_id];
    if (args.size() != schema.arity())
        throw ModelError("schema '" + schema.name + "' expects " +
                         to_string(schema.arity()) + " arguments");
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] < 0 || args[i] >= static_cast<int>(instance.objects().size()) ||
            instance.index_in_type(schema.param_types[i], args[i]) < 0)
            throw ModelError("schema '" + schema.name + "': argument " + to_string(i + 1) +
                             " has the wrong type");
    }

    GroundAction action;
    action.schema = schema_id;
    action.args.assign(args.begin(), args.end());
    vector<ObjectId> buffer;
    auto ground = [&](const SchemaAtom &atom) {
        buffer.clear();
        for (const Term &t : atom.args)
            buffer.push_back(t.kind == Term::Kind::Parameter ? args[t.index]
                                                             : instance.constant_object(t.index));
        return instance.atom_index(atom.predicate, buffer);
    };
    for (const SchemaAtom &a : schema.preconditions)
        action.pre.push_back(ground(a));
    for (const SchemaAtom &a : schema.add_effects)
        action.add.push_back(ground(a));
    for (const SchemaAtom &a : schema.del_effects)
        action.del.push_back(ground(a));
    normalize(action.pre);
    normalize(action.add);
    normalize(action.del);
    // An atom both added and deleted stays true.
    vector<AtomId> del;
    set_difference(action.del.begin(), action.del.end(), action.add.begin(),
                   action.add.end(), back_inserter(del));
    action.del = move(del);
    return action;
}

string action_name(const Instance &instance, const GroundAction &action) {
    string text = "(" + instance.domain().schemas[action.schema].name;
    for (ObjectId o : action.args)
        text += " " + instance.objects()[o].name;
    return text + ")";
}

GroundTask ground_universe(const Instance &instance) {
    GroundTask task;
    task.instance = &instance;
    const DomainModel &dom = instance.domain();
    for (size_t s = 0; s < dom.schemas.size(); ++s) {
        const ActionSchema &schema = dom.schemas[s];
        vector<span<const ObjectId>> domains;
        bool empty = false;
        for (TypeId t : schema.param_types) {
            domains.push_back(instance.objects_of_type(t));
            empty = empty || domains.back().empty();
        }
        if (empty)
            continue;
        vector<size_t> pos(schema.arity(), 0);
        vector<ObjectId> args(schema.arity());
        while (true) {
            for (size_t i = 0; i < pos.size(); ++i)
                args[i] = domains[i][pos[i]];
            task.actions.push_back(instantiate(instance, static_cast<SchemaId>(s), args));
            size_t i = pos.size();
            for (; i > 0; --i) {
                if (++pos[i - 1] < domains[i - 1].size())
                    break;
                pos[i - 1] = 0;
            }
            if (i == 0)
                break;
        }
    }

    task.achievers.assign(instance.num_atoms(), {});
    task.consumers.assign(instance.num_atoms(), {});
    for (size_t a = 0; a < task.actions.size(); ++a) {
        for (AtomId p : task.actions[a].add)
            task.achievers[p].push_back(static_cast<int>(a));
        for (AtomId p : task.actions[a].pre)
            task.consumers[p].push_back(static_cast<int>(a));
    }
    return task;
}

bool applicable(const GroundAction &action, const State &state) {
    return state.contains_all(action.pre);
}

State apply(const GroundAction &action, const State &state) {
    if (!applicable(action, state))
        throw logic_error("apply: action is not applicable in this state");
    State next = state;
    for (AtomId p : action.del)
        next.reset(p);
    for (AtomId p : action.add)
        next.set(p);
    return next;
}

bool satisfies_goal(const State &state, span<const AtomId> goal) {
    return state.contains_all(goal);
}
}
