#ifndef PGP_HEURISTICS_H
#define PGP_HEURISTICS_H

#include "landmarks.h"
#include "program.h"
#include "vm.h"

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pgp {
enum class Feature : std::uint8_t { GoalCount, Landmarks, LandmarksNormalized, Gotos, Zero };
const char *feature_name(Feature f);

// Normalized landmark terms are integers in units of 1/kNormScale.
constexpr std::int64_t kNormScale = 10000;

// Lexicographically compared, lower is better.
struct EvalVector {
    static constexpr int kMax = 4;
    std::array<std::int64_t, kMax> values{};
    std::uint8_t size = 0;

    void push(std::int64_t v) { values[size++] = v; }
    std::int64_t operator[](int i) const { return values[i]; }

    friend bool operator==(const EvalVector &a, const EvalVector &b) {
        return a.size == b.size && std::equal(a.values.begin(), a.values.begin() + a.size,
                                              b.values.begin());
    }
    friend bool operator<(const EvalVector &a, const EvalVector &b) {
        for (int i = 0; i < a.size && i < b.size; ++i)
            if (a.values[i] != b.values[i])
                return a.values[i] < b.values[i];
        return a.size < b.size;
    }
    std::string str() const;
};

/*
  Landmark graph flattened into CSR arrays for the per-step tracker.
*/
class LandmarkIndex {
public:
    LandmarkIndex(const LandmarkGraph &graph, const Instance &instance, const PointerSet &pointers);

    int size() const { return num_nodes_; }
    bool holds(int node, const ProgramState &ps) const;
    bool is_goal(int node) const { return goal_[node]; }

    std::span<const int> nodes_of_atom(AtomId a) const {
        return span_of(atom_start_, atom_nodes_, a);
    }
    std::span<const int> nodes_of_assignment(int pointer, int value) const;
    std::span<const int> predecessors(int node) const { return span_of(pred_start_, preds_, node); }
    std::span<const int> successors(int node) const { return span_of(succ_start_, succs_, node); }
    std::span<const int> gn_successors(int node) const {
        return span_of(gn_start_, gn_succs_, node);
    }

private:
    static std::span<const int> span_of(const std::vector<int> &start, const std::vector<int> &items,
                                        int i) {
        return {items.data() + start[i], static_cast<std::size_t>(start[i + 1] - start[i])};
    }

    int num_nodes_ = 0;
    std::vector<std::uint8_t> goal_;
    std::vector<std::uint8_t> kind_;
    std::vector<int> node_atom_start_, node_atoms_;
    std::vector<int> node_assign_start_, node_assign_;  // pairs (z, v)
    std::vector<int> atom_start_, atom_nodes_;
    std::vector<int> assign_offset_;                    // per pointer, into assign_start_
    std::vector<int> assign_start_, assign_nodes_;
    std::vector<int> pred_start_, preds_;
    std::vector<int> succ_start_, succs_;
    std::vector<int> gn_start_, gn_succs_;
};

// Reached / ReqAgain bookkeeping along one execution.
class LandmarkTracker : public ExecutionObserver {
public:
    explicit LandmarkTracker(const LandmarkIndex &index);

    void on_start(const ProgramState &ps) override;
    void on_step(const ProgramState &ps, const StepChange &change) override;

    bool reached(int node) const { return reached_[node]; }
    int num_reached() const { return num_reached_; }
    // Reached nodes false in `ps` that are goals or gn-precede an unreached node.
    std::vector<int> required_again(const ProgramState &ps) const;
    // |LM| - |Reached| + |ReqAgain|
    std::int64_t value(const ProgramState &ps) const;

private:
    const LandmarkIndex &index_;
    std::vector<std::uint8_t> reached_;
    std::vector<int> missing_preds_;
    std::vector<int> work_;
    int num_reached_ = 0;

    void try_reach(int node, const ProgramState &ps);
    bool needed_again(int node, const ProgramState &ps) const;
};

/*
  Everything needed to evaluate programs on one instance. Landmarks are
  optional (f_GC does not need them).
*/
struct InstanceContext {
    std::shared_ptr<const Instance> instance;
    std::unique_ptr<Interpreter> interpreter;
    std::unique_ptr<LandmarkGraph> graph;
    std::unique_ptr<LandmarkIndex> landmarks;

    InstanceContext(std::shared_ptr<const Instance> instance,
                    std::shared_ptr<const PointerSet> pointers);
    // Builds (or loads) the landmark graph with pointer landmarks.
    void attach_landmarks(const std::optional<std::filesystem::path> &cache_dir = std::nullopt);
};

struct InstanceEval {
    OutcomeKind kind = OutcomeKind::PendingUndefined;
    std::int64_t goal_count = 0;
    std::int64_t landmarks = 0;
    std::int64_t landmarks_total = 0;
    std::uint64_t steps = 0;
};

// One execution; landmark counting only when `track_landmarks`.
InstanceEval evaluate_instance(const InstanceContext &ctx, std::span<const Instruction> lines,
                               bool track_landmarks, const ExecutionOptions &options = {});

std::int64_t f_gc(std::span<const Instruction> lines,
                  std::span<const InstanceContext *const> instances);
std::int64_t f_lm_instance(std::span<const Instruction> lines, const InstanceContext &ctx);
std::int64_t f_lm(std::span<const Instruction> lines,
                  std::span<const InstanceContext *const> instances);
// round(f_lm_instance / |LM|) to 4 digits, returned in units of 1/kNormScale.
std::int64_t normalized_term(std::int64_t value, std::int64_t total);
std::int64_t f_lm_normalized(std::span<const Instruction> lines,
                             std::span<const InstanceContext *const> instances);
std::int64_t f1(std::span<const Instruction> lines);

bool needs_landmarks(std::span<const Feature> features);

// Assembles the configured features from per-instance evaluations.
EvalVector combine(std::span<const Feature> features, std::span<const InstanceEval> evals,
                   std::span<const Instruction> lines);
EvalVector evaluate(std::span<const Instruction> lines,
                    std::span<const InstanceContext *const> instances,
                    std::span<const Feature> features);
}

#endif
