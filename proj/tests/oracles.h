#ifndef PGP_TESTS_ORACLES_H
#define PGP_TESTS_ORACLES_H

#include "pgp/landmarks.h"
#include "pgp/program.h"
#include "pgp/vm.h"
#include "pgp/strips.h"

#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace pgp::testing {
// Reference interpreter kept deliberately naive: explicit visited set,
// grounding through instantiate() for every action.
struct NaiveResult {
    OutcomeKind kind;
    std::vector<AtomId> final_atoms;
    std::vector<std::string> plan;
    std::vector<int> pointers;
};

inline NaiveResult naive_run(const Program &program, const Instance &inst) {
    const PointerSet &z = program.pointers();
    std::vector<int> ptr(z.size(), 0);
    State s = inst.init();
    bool flag = false;
    int pc = 0;
    std::set<std::tuple<int, bool, std::vector<int>, std::vector<AtomId>>> seen;
    NaiveResult r;
    auto obj = [&](int k) { return inst.objects_of_type(z.pointers[k].type)[ptr[k]]; };
    auto size_of = [&](int k) {
        return static_cast<int>(inst.objects_of_type(z.pointers[k].type).size());
    };
    while (true) {
        const Instruction &ins = program[pc];
        if (ins.op == OpCode::Undefined) {
            r.kind = OutcomeKind::PendingUndefined;
            break;
        }
        if (ins.op == OpCode::End) {
            r.kind = satisfies_goal(s, inst.goal()) ? OutcomeKind::Solved
                                                    : OutcomeKind::FailedIncorrect;
            break;
        }
        if (!seen.insert({pc, flag, ptr, s.atoms()}).second) {
            r.kind = OutcomeKind::FailedInfinite;
            break;
        }
        std::vector<ObjectId> args;
        for (uint8_t k : ins.pointer_args())
            args.push_back(obj(k));
        switch (ins.op) {
        case OpCode::Action: {
            GroundAction a = instantiate(inst, ins.id, args);
            if (applicable(a, s)) {
                s = apply(a, s);
                r.plan.push_back(action_name(inst, a));
            } else {
                flag = true;
            }
            ++pc;
            break;
        }
        case OpCode::Test: {
            GroundAtom g{ins.id, args};
            flag = !s.test(inst.atom_index(g));
            ++pc;
            break;
        }
        case OpCode::Inc: {
            int k = ins.args[0];
            if (ptr[k] + 1 < size_of(k)) {
                ++ptr[k];
                flag = false;
            } else {
                flag = true;
            }
            ++pc;
            break;
        }
        case OpCode::Dec: {
            int k = ins.args[0];
            if (ptr[k] > 0) {
                --ptr[k];
                flag = ptr[k] == 0;
            } else {
                flag = true;
            }
            ++pc;
            break;
        }
        case OpCode::Clear:
            ptr[ins.args[0]] = 0;
            flag = true;
            ++pc;
            break;
        case OpCode::Set:
            ptr[ins.args[0]] = ptr[ins.args[1]];
            flag = ptr[ins.args[0]] == 0;
            ++pc;
            break;
        case OpCode::Goto:
            pc = (flag != ins.negated) ? ins.target : pc + 1;
            break;
        default:
            break;
        }
    }
    r.final_atoms = s.atoms();
    r.pointers = ptr;
    return r;
}

// Delete-relaxed goal reachability with some actions removed. Plain
// fixpoint, no layering.
inline bool relaxed_goal_reachable(const GroundTask &task, const std::vector<bool> &removed) {
    const Instance &inst = *task.instance;
    std::vector<bool> reached(inst.num_atoms(), false);
    for (AtomId a : inst.init().atoms())
        reached[a] = true;
    std::vector<bool> used(task.actions.size(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < task.actions.size(); ++i) {
            if (used[i] || removed[i])
                continue;
            const GroundAction &a = task.actions[i];
            bool ok = true;
            for (AtomId p : a.pre)
                ok = ok && reached[p];
            if (!ok)
                continue;
            used[i] = true;
            changed = true;
            for (AtomId e : a.add)
                reached[e] = true;
        }
    }
    for (AtomId g : inst.goal())
        if (!reached[g])
            return false;
    return true;
}

// True when removing every action that adds one of `atoms` makes the goal
// relaxed-unreachable. Atoms true initially are trivially landmarks.
inline bool passes_achiever_removal(const GroundTask &task, const std::vector<AtomId> &atoms) {
    for (AtomId a : atoms)
        if (task.instance->init().test(a))
            return true;
    std::vector<bool> removed(task.actions.size(), false);
    for (std::size_t i = 0; i < task.actions.size(); ++i)
        for (AtomId e : task.actions[i].add)
            for (AtomId a : atoms)
                if (e == a)
                    removed[i] = true;
    return !relaxed_goal_reachable(task, removed);
}

// Calls `visit` with the state sequence of every goal-reaching path that
// repeats no state.
inline void enumerate_plans(const GroundTask &task,
                            const std::function<void(const std::vector<State> &)> &visit) {
    const Instance &inst = *task.instance;
    std::vector<State> path{inst.init()};
    std::function<void()> rec = [&] {
        const State s = path.back();
        if (satisfies_goal(s, inst.goal())) {
            visit(path);
            return;
        }
        for (const GroundAction &a : task.actions) {
            if (!applicable(a, s))
                continue;
            State next = apply(a, s);
            bool seen = false;
            for (const State &p : path)
                seen = seen || p == next;
            if (seen)
                continue;
            path.push_back(next);
            rec();
            path.pop_back();
        }
    };
    rec();
}
}

#endif
