#include "pgp/vm.h"

#include <algorithm>
#include <limits>

using namespace std;

namespace pgp {
const char *outcome_name(OutcomeKind kind) {
    switch (kind) {
    case OutcomeKind::Solved:
        return "solved";
    case OutcomeKind::FailedIncorrect:
        return "incorrect";
    case OutcomeKind::FailedInfinite:
        return "infinite";
    case OutcomeKind::PendingUndefined:
        return "pending";
    }
    return "?";
}

Interpreter::Interpreter(const Instance &instance, shared_ptr<const PointerSet> pointers)
    : instance_(&instance), pointers_(move(pointers)) {
    const DomainModel &dom = instance.domain();
    num_types_ = dom.types.size();
    if (pointers_->size() > static_cast<size_t>(kMaxPointers))
        throw ProgramError("too many pointers");

    for (const Pointer &p : pointers_->pointers)
        domain_sizes_.push_back(static_cast<int>(instance.objects_of_type(p.type).size()));

    conv_.resize(pointers_->size() * num_types_);
    for (size_t z = 0; z < pointers_->size(); ++z) {
        span<const ObjectId> objs = instance.objects_of_type(pointers_->pointers[z].type);
        for (size_t t = 0; t < num_types_; ++t) {
            vector<int> &table = conv_[z * num_types_ + t];
            table.reserve(objs.size());
            for (ObjectId o : objs)
                table.push_back(instance.index_in_type(static_cast<TypeId>(t), o));
        }
    }

    auto make = [&](const SchemaAtom &atom) {
        const PredicateDecl &pred = dom.predicates[atom.predicate];
        span<const size_t> strides = instance.predicate_strides(atom.predicate);
        AtomTemplate tpl{instance.predicate_offset(atom.predicate), {}};
        for (size_t i = 0; i < atom.args.size(); ++i) {
            const Term &term = atom.args[i];
            ArgRef ref{-1, 0, strides[i], pred.param_types[i]};
            if (term.kind == Term::Kind::Parameter)
                ref.param = term.index;
            else
                ref.fixed = instance.index_in_type(pred.param_types[i],
                                                   instance.constant_object(term.index));
            tpl.args.push_back(ref);
        }
        return tpl;
    };
    for (const ActionSchema &schema : dom.schemas) {
        if (schema.add_effects.size() > 64)
            throw ProgramError("schema '" + schema.name + "' has too many add effects");
        SchemaTemplate st;
        for (const SchemaAtom &a : schema.preconditions)
            st.pre.push_back(make(a));
        for (const SchemaAtom &a : schema.add_effects)
            st.add.push_back(make(a));
        for (const SchemaAtom &a : schema.del_effects)
            st.del.push_back(make(a));
        schemas_.push_back(move(st));
    }
}

ProgramState Interpreter::initial_state() const {
    ProgramState ps;
    ps.state = instance_->init();
    return ps;
}

uint64_t Interpreter::default_step_limit(int num_lines) const {
    // 10 x (lines x flag x pointer assignments x (atoms + 1)), saturating.
    constexpr uint64_t cap = uint64_t{1} << 40;
    uint64_t bound = 10ULL * static_cast<uint64_t>(max(num_lines, 1)) * 2ULL;
    auto mul = [&](uint64_t f) {
        if (f != 0 && bound > cap / f)
            bound = cap;
        else
            bound *= max<uint64_t>(f, 1);
    };
    for (int size : domain_sizes_)
        mul(static_cast<uint64_t>(size));
    mul(instance_->num_atoms() + 1);
    return min(bound, cap);
}

AtomId Interpreter::atom_of(const AtomTemplate &tpl, const uint8_t *ptr_of_param,
                            const ProgramState &ps) const {
    size_t index = tpl.offset;
    for (const ArgRef &ref : tpl.args) {
        int pos = ref.fixed;
        if (ref.param >= 0) {
            int z = ptr_of_param[ref.param];
            const vector<int> &table = conv_[static_cast<size_t>(z) * num_types_ + ref.type];
            int v = ps.pointers[z];
            if (v < 0 || v >= static_cast<int>(table.size()))
                return -1;
            pos = table[v];
        }
        if (pos < 0)
            return -1;
        index += static_cast<size_t>(pos) * ref.stride;
    }
    return static_cast<AtomId>(index);
}

GroundAction Interpreter::ground(const Instruction &ins, const ProgramState &ps) const {
    vector<ObjectId> args;
    for (uint8_t z : ins.pointer_args())
        args.push_back(object_of(z, ps.pointers[z]));
    return instantiate(*instance_, ins.id, args);
}

AtomId Interpreter::test_atom(const Instruction &ins, const ProgramState &ps) const {
    const PredicateDecl &pred = instance_->domain().predicates[ins.id];
    size_t index = instance_->predicate_offset(ins.id);
    span<const size_t> strides = instance_->predicate_strides(ins.id);
    for (size_t i = 0; i < ins.arity; ++i) {
        int z = ins.args[i];
        const vector<int> &table = conv_[static_cast<size_t>(z) * num_types_ + pred.param_types[i]];
        int v = ps.pointers[z];
        if (v < 0 || v >= static_cast<int>(table.size()) || table[v] < 0)
            return -1;
        index += static_cast<size_t>(table[v]) * strides[i];
    }
    return static_cast<AtomId>(index);
}

bool Interpreter::step(span<const Instruction> lines, ProgramState &ps, vector<AtomId> *added,
                       vector<AtomId> *deleted, StepInfo *info) const {
    const Instruction &ins = lines[ps.pc];
    StepInfo scratch;
    StepInfo &out = info ? *info : scratch;
    out = StepInfo();
    switch (ins.op) {
    case OpCode::Undefined:
    case OpCode::End:
        return false;
    case OpCode::Action: {
        const SchemaTemplate &tpl = schemas_[ins.id];
        const uint8_t *params = ins.args.data();
        bool ok = true;
        for (const AtomTemplate &pre : tpl.pre) {
            AtomId a = atom_of(pre, params, ps);
            if (a < 0 || !ps.state.test(a)) {
                ok = false;
                break;
            }
        }
        // Parameterless schemas with no preconditions are always applicable,
        // but a pointer into an empty type is not.
        for (size_t i = 0; ok && i < ins.arity; ++i)
            if (domain_sizes_[ins.args[i]] == 0)
                ok = false;
        if (!ok) {
            ps.flag = true;
        } else {
            AtomId add_buf[64];
            size_t num_add = 0;
            for (const AtomTemplate &e : tpl.add) {
                AtomId a = atom_of(e, params, ps);
                if (a >= 0 && num_add < 64)
                    add_buf[num_add++] = a;
            }
            for (const AtomTemplate &e : tpl.del) {
                AtomId a = atom_of(e, params, ps);
                if (a < 0 || find(add_buf, add_buf + num_add, a) != add_buf + num_add)
                    continue;
                if (ps.state.test(a)) {
                    ps.state.reset(a);
                    if (deleted)
                        deleted->push_back(a);
                }
            }
            for (size_t k = 0; k < num_add; ++k) {
                AtomId a = add_buf[k];
                if (!ps.state.test(a)) {
                    ps.state.set(a);
                    if (added)
                        added->push_back(a);
                }
            }
            out.action_applied = true;
        }
        ++ps.pc;
        return true;
    }
    case OpCode::Inc: {
        int z = ins.args[0];
        if (ps.pointers[z] + 1 < domain_sizes_[z]) {
            ++ps.pointers[z];
            ps.flag = false;
            out.pointer_written = z;
        } else {
            ps.flag = true;
        }
        ++ps.pc;
        return true;
    }
    case OpCode::Dec: {
        int z = ins.args[0];
        if (ps.pointers[z] > 0) {
            ps.flag = ps.pointers[z] == 1;
            --ps.pointers[z];
            out.pointer_written = z;
        } else {
            ps.flag = true;
        }
        ++ps.pc;
        return true;
    }
    case OpCode::Clear: {
        int z = ins.args[0];
        ps.pointers[z] = 0;
        ps.flag = true;
        out.pointer_written = z;
        ++ps.pc;
        return true;
    }
    case OpCode::Set: {
        int z1 = ins.args[0], z2 = ins.args[1];
        ps.pointers[z1] = ps.pointers[z2];
        ps.flag = ps.pointers[z2] == 0;
        out.pointer_written = z1;
        ++ps.pc;
        return true;
    }
    case OpCode::Test: {
        AtomId a = test_atom(ins, ps);
        ps.flag = !(a >= 0 && ps.state.test(a));
        ++ps.pc;
        return true;
    }
    case OpCode::Goto: {
        bool jump = ins.negated ? !ps.flag : ps.flag;
        ps.pc = jump ? ins.target : ps.pc + 1;
        return true;
    }
    }
    return false;
}

ExecutionOutcome Interpreter::execute(span<const Instruction> lines,
                                      const ExecutionOptions &options,
                                      ExecutionObserver *observer) const {
    ExecutionOutcome out;
    const uint64_t limit =
        options.step_limit ? options.step_limit : default_step_limit(static_cast<int>(lines.size()));
    ProgramState ps = initial_state();
    if (observer)
        observer->on_start(ps);

    // Brent's cycle detection: a repeated program state is met again at
    // the saved checkpoint, so no visited set is needed.
    ProgramState checkpoint = ps;
    uint64_t power = 1, since_checkpoint = 0;
    vector<AtomId> added, deleted;

    while (true) {
        const Instruction &ins = lines[ps.pc];
        if (ins.op == OpCode::Undefined) {
            out.kind = OutcomeKind::PendingUndefined;
            break;
        }
        if (ins.op == OpCode::End) {
            out.kind = satisfies_goal(ps.state, instance_->goal()) ? OutcomeKind::Solved
                                                                   : OutcomeKind::FailedIncorrect;
            break;
        }
        if (out.steps >= limit) {
            out.kind = OutcomeKind::FailedInfinite;
            out.hit_step_limit = true;
            break;
        }
        added.clear();
        deleted.clear();
        StepInfo info;
        step(lines, ps, &added, &deleted, &info);
        // Actions never move pointers, so grounding after the step is exact.
        if (options.record_plan && info.action_applied)
            out.plan.push_back(ground(ins, ps));
        ++out.steps;
        if (observer)
            observer->on_step(ps, StepChange{added, deleted, info.pointer_written});
        if (ps == checkpoint) {
            out.kind = OutcomeKind::FailedInfinite;
            break;
        }
        if (++since_checkpoint == power) {
            checkpoint = ps;
            power <<= 1;
            since_checkpoint = 0;
        }
    }
    out.last_state = move(ps);
    return out;
}

SolveReport solves(span<const Instruction> lines, span<const Interpreter *const> instances,
                   const ExecutionOptions &options) {
    SolveReport report;
    for (size_t i = 0; i < instances.size(); ++i) {
        ExecutionOutcome out = instances[i]->execute(lines, options);
        if (out.kind != OutcomeKind::Solved) {
            report.first_failed = static_cast<int>(i);
            report.failed_kind = out.kind;
            return report;
        }
    }
    report.solved = true;
    return report;
}
}
