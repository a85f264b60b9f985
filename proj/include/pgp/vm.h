#ifndef PGP_VM_H
#define PGP_VM_H

#include "program.h"
#include "strips.h"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace pgp {
struct ProgramState {
    State state;
    std::array<int, kMaxPointers> pointers{};
    bool flag = false;
    int pc = 0;

    friend bool operator==(const ProgramState &a, const ProgramState &b) {
        return a.pc == b.pc && a.flag == b.flag && a.pointers == b.pointers &&
               a.state == b.state;
    }
};

// What one step changed: atoms that actually flipped, and the pointer written (or -1).
struct StepChange {
    std::span<const AtomId> added;
    std::span<const AtomId> deleted;
    int pointer = -1;
};

class ExecutionObserver {
public:
    virtual ~ExecutionObserver() = default;
    virtual void on_start(const ProgramState &) {}
    virtual void on_step(const ProgramState &, const StepChange &) {}
};

enum class OutcomeKind { Solved, FailedIncorrect, FailedInfinite, PendingUndefined };
const char *outcome_name(OutcomeKind kind);
inline bool is_failure(OutcomeKind k) {
    return k == OutcomeKind::FailedIncorrect || k == OutcomeKind::FailedInfinite;
}

struct ExecutionOutcome {
    OutcomeKind kind = OutcomeKind::PendingUndefined;
    ProgramState last_state;
    std::vector<GroundAction> plan;
    std::uint64_t steps = 0;
    // FailedInfinite because the step bound ran out, not because a state repeated.
    bool hit_step_limit = false;
};

struct ExecutionOptions {
    // 0 selects Interpreter::default_step_limit.
    std::uint64_t step_limit = 0;
    bool record_plan = false;
};

/*
  Executes programs over a fixed pointer set on one instance. Immutable
  after construction, so one interpreter can serve several threads.
*/
class Interpreter {
public:
    Interpreter(const Instance &instance, std::shared_ptr<const PointerSet> pointers);

    const Instance &instance() const { return *instance_; }
    const PointerSet &pointers() const { return *pointers_; }
    int domain_size(int pointer) const { return domain_sizes_[pointer]; }
    ObjectId object_of(int pointer, int value) const {
        return instance_->objects_of_type(pointers_->pointers[pointer].type)[value];
    }

    ProgramState initial_state() const;
    std::uint64_t default_step_limit(int num_lines) const;

    struct StepInfo {
        int pointer_written = -1;
        bool action_applied = false;
    };

    // Executes lines[ps.pc] in place. `added`/`deleted` receive flipped atoms.
    // Returns false (and leaves ps alone) on Undefined or End lines.
    bool step(std::span<const Instruction> lines, ProgramState &ps,
              std::vector<AtomId> *added = nullptr, std::vector<AtomId> *deleted = nullptr,
              StepInfo *info = nullptr) const;

    ExecutionOutcome execute(std::span<const Instruction> lines,
                             const ExecutionOptions &options = {},
                             ExecutionObserver *observer = nullptr) const;

    // Ground action an Action instruction maps to in the current pointer assignment.
    GroundAction ground(const Instruction &ins, const ProgramState &ps) const;
    AtomId test_atom(const Instruction &ins, const ProgramState &ps) const;

private:
    struct ArgRef {
        int param;   // schema parameter, or -1 for a constant
        int fixed;   // index in the predicate argument type, for constants
        std::size_t stride;
        TypeId type; // predicate argument type
    };
    struct AtomTemplate {
        std::size_t offset;
        std::vector<ArgRef> args;
    };
    struct SchemaTemplate {
        std::vector<AtomTemplate> pre, add, del;
    };

    const Instance *instance_;
    std::shared_ptr<const PointerSet> pointers_;
    std::vector<int> domain_sizes_;
    std::vector<SchemaTemplate> schemas_;
    // conv_[z * num_types + t][v]: position of pointer z's v-th object in type t, or -1.
    std::vector<std::vector<int>> conv_;
    std::size_t num_types_;

    AtomId atom_of(const AtomTemplate &tpl, const std::uint8_t *ptr_of_param,
                   const ProgramState &ps) const;
};

struct SolveReport {
    bool solved = false;
    int first_failed = -1;
    OutcomeKind failed_kind = OutcomeKind::Solved;
};

// Runs instances in order and stops at the first that is not Solved.
SolveReport solves(std::span<const Instruction> lines,
                   std::span<const Interpreter *const> instances,
                   const ExecutionOptions &options = {});
}

#endif
