#include "pgp/heuristics.h"

#include <algorithm>
#include <sstream>

using namespace std;

namespace pgp {
const char *feature_name(Feature f) {
    switch (f) {
    case Feature::GoalCount:
        return "gc";
    case Feature::Landmarks:
        return "lm";
    case Feature::LandmarksNormalized:
        return "lm-norm";
    case Feature::Gotos:
        return "f1";
    case Feature::Zero:
        return "zero";
    }
    return "?";
}

string EvalVector::str() const {
    ostringstream out;
    out << "<";
    for (int i = 0; i < size; ++i)
        out << (i ? "," : "") << values[i];
    out << ">";
    return out.str();
}

namespace {
// Builds CSR from (key, value) pairs; pairs keep their insertion order per key.
void build_csr(int num_keys, const vector<pair<int, int>> &pairs, vector<int> &start,
               vector<int> &items) {
    start.assign(num_keys + 1, 0);
    for (const auto &[k, _] : pairs)
        ++start[k + 1];
    for (int k = 0; k < num_keys; ++k)
        start[k + 1] += start[k];
    items.assign(pairs.size(), 0);
    vector<int> fill(start.begin(), start.end() - 1);
    for (const auto &[k, v] : pairs)
        items[fill[k]++] = v;
}
}

LandmarkIndex::LandmarkIndex(const LandmarkGraph &graph, const Instance &instance,
                             const PointerSet &pointers) {
    num_nodes_ = static_cast<int>(graph.nodes.size());
    vector<pair<int, int>> node_atoms, node_assign, atom_nodes, assign_nodes, preds, succs, gn;

    assign_offset_.assign(pointers.size() + 1, 0);
    for (size_t z = 0; z < pointers.size(); ++z)
        assign_offset_[z + 1] = assign_offset_[z] +
            static_cast<int>(instance.objects_of_type(pointers.pointers[z].type).size());

    for (int i = 0; i < num_nodes_; ++i) {
        const LandmarkNode &n = graph.nodes[i];
        goal_.push_back(n.goal);
        kind_.push_back(static_cast<uint8_t>(n.kind));
        for (AtomId a : n.atoms) {
            node_atoms.push_back({i, a});
            atom_nodes.push_back({a, i});
        }
        for (const auto &[z, v] : n.assignments) {
            if (z >= static_cast<int>(pointers.size()))
                throw runtime_error("landmark graph refers to an unknown pointer");
            node_assign.push_back({i, z});
            node_assign.push_back({i, v});
            assign_nodes.push_back({assign_offset_[z] + v, i});
        }
    }
    for (const Ordering &o : graph.orderings) {
        preds.push_back({o.to, o.from});
        succs.push_back({o.from, o.to});
        if (o.kind == OrderingKind::GreedyNecessary)
            gn.push_back({o.from, o.to});
    }
    build_csr(num_nodes_, node_atoms, node_atom_start_, node_atoms_);
    build_csr(num_nodes_, node_assign, node_assign_start_, node_assign_);
    build_csr(static_cast<int>(instance.num_atoms()), atom_nodes, atom_start_, atom_nodes_);
    build_csr(assign_offset_.back(), assign_nodes, assign_start_, assign_nodes_);
    build_csr(num_nodes_, preds, pred_start_, preds_);
    build_csr(num_nodes_, succs, succ_start_, succs_);
    build_csr(num_nodes_, gn, gn_start_, gn_succs_);
}

span<const int> LandmarkIndex::nodes_of_assignment(int pointer, int value) const {
    if (pointer < 0 || pointer + 1 >= static_cast<int>(assign_offset_.size()))
        return {};
    int key = assign_offset_[pointer] + value;
    if (value < 0 || key >= assign_offset_[pointer + 1])
        return {};
    return span_of(assign_start_, assign_nodes_, key);
}

bool LandmarkIndex::holds(int node, const ProgramState &ps) const {
    if (kind_[node] == static_cast<uint8_t>(LandmarkKind::Pointer)) {
        for (int k = node_assign_start_[node]; k < node_assign_start_[node + 1]; k += 2)
            if (ps.pointers[node_assign_[k]] == node_assign_[k + 1])
                return true;
        return false;
    }
    for (int k = node_atom_start_[node]; k < node_atom_start_[node + 1]; ++k)
        if (ps.state.test(node_atoms_[k]))
            return true;
    return false;
}

LandmarkTracker::LandmarkTracker(const LandmarkIndex &index) : index_(index) {
}

void LandmarkTracker::try_reach(int node, const ProgramState &ps) {
    if (reached_[node] || missing_preds_[node] != 0 || !index_.holds(node, ps))
        return;
    reached_[node] = 1;
    ++num_reached_;
    work_.push_back(node);
    // Successors whose last predecessor was just reached may hold already.
    while (!work_.empty()) {
        int v = work_.back();
        work_.pop_back();
        for (int s : index_.successors(v)) {
            if (--missing_preds_[s] == 0 && !reached_[s] && index_.holds(s, ps)) {
                reached_[s] = 1;
                ++num_reached_;
                work_.push_back(s);
            }
        }
    }
}

void LandmarkTracker::on_start(const ProgramState &ps) {
    const int n = index_.size();
    reached_.assign(n, 0);
    missing_preds_.resize(n);
    num_reached_ = 0;
    for (int i = 0; i < n; ++i)
        missing_preds_[i] = static_cast<int>(index_.predecessors(i).size());
    for (int i = 0; i < n; ++i)
        try_reach(i, ps);
}

void LandmarkTracker::on_step(const ProgramState &ps, const StepChange &change) {
    for (AtomId a : change.added)
        for (int node : index_.nodes_of_atom(a))
            try_reach(node, ps);
    if (change.pointer >= 0)
        for (int node : index_.nodes_of_assignment(change.pointer, ps.pointers[change.pointer]))
            try_reach(node, ps);
}

bool LandmarkTracker::needed_again(int node, const ProgramState &ps) const {
    if (!reached_[node] || index_.holds(node, ps))
        return false;
    if (index_.is_goal(node))
        return true;
    for (int s : index_.gn_successors(node))
        if (!reached_[s])
            return true;
    return false;
}

vector<int> LandmarkTracker::required_again(const ProgramState &ps) const {
    vector<int> result;
    for (int i = 0; i < index_.size(); ++i)
        if (needed_again(i, ps))
            result.push_back(i);
    return result;
}

int64_t LandmarkTracker::value(const ProgramState &ps) const {
    int64_t req_again = 0;
    for (int i = 0; i < index_.size(); ++i)
        req_again += needed_again(i, ps);
    return index_.size() - num_reached_ + req_again;
}

InstanceContext::InstanceContext(shared_ptr<const Instance> inst,
                                 shared_ptr<const PointerSet> pointers)
    : instance(move(inst)),
      interpreter(make_unique<Interpreter>(*instance, move(pointers))) {
}

void InstanceContext::attach_landmarks(const optional<filesystem::path> &cache_dir) {
    GroundTask task = ground_universe(*instance);
    graph = make_unique<LandmarkGraph>(
        cached_landmark_graph(task, &interpreter->pointers(), cache_dir));
    landmarks = make_unique<LandmarkIndex>(*graph, *instance, interpreter->pointers());
}

InstanceEval evaluate_instance(const InstanceContext &ctx, span<const Instruction> lines,
                               bool track_landmarks, const ExecutionOptions &options) {
    InstanceEval eval;
    if (track_landmarks && !ctx.landmarks)
        throw logic_error("landmark evaluation requested without a landmark graph");
    optional<LandmarkTracker> tracker;
    if (track_landmarks)
        tracker.emplace(*ctx.landmarks);
    ExecutionOutcome out =
        ctx.interpreter->execute(lines, options, tracker ? &*tracker : nullptr);
    eval.kind = out.kind;
    eval.steps = out.steps;
    for (AtomId g : ctx.instance->goal())
        eval.goal_count += !out.last_state.state.test(g);
    if (tracker) {
        eval.landmarks = tracker->value(out.last_state);
        eval.landmarks_total = ctx.landmarks->size();
    }
    return eval;
}

int64_t f_gc(span<const Instruction> lines, span<const InstanceContext *const> instances) {
    int64_t total = 0;
    for (const InstanceContext *ctx : instances)
        total += evaluate_instance(*ctx, lines, false).goal_count;
    return total;
}

int64_t f_lm_instance(span<const Instruction> lines, const InstanceContext &ctx) {
    return evaluate_instance(ctx, lines, true).landmarks;
}

int64_t f_lm(span<const Instruction> lines, span<const InstanceContext *const> instances) {
    int64_t total = 0;
    for (const InstanceContext *ctx : instances)
        total += f_lm_instance(lines, *ctx);
    return total;
}

int64_t normalized_term(int64_t value, int64_t total) {
    if (total <= 0)
        return 0;
    // Round half up.
    return (value * kNormScale * 2 + total) / (2 * total);
}

int64_t f_lm_normalized(span<const Instruction> lines,
                        span<const InstanceContext *const> instances) {
    int64_t total = 0;
    for (const InstanceContext *ctx : instances) {
        InstanceEval e = evaluate_instance(*ctx, lines, true);
        total += normalized_term(e.landmarks, e.landmarks_total);
    }
    return total;
}

int64_t f1(span<const Instruction> lines) {
    return count_if(lines.begin(), lines.end(),
                    [](const Instruction &i) { return i.op == OpCode::Goto; });
}

bool needs_landmarks(span<const Feature> features) {
    return any_of(features.begin(), features.end(), [](Feature f) {
        return f == Feature::Landmarks || f == Feature::LandmarksNormalized;
    });
}

EvalVector combine(span<const Feature> features, span<const InstanceEval> evals,
                   span<const Instruction> lines) {
    EvalVector v;
    for (Feature f : features) {
        int64_t value = 0;
        switch (f) {
        case Feature::GoalCount:
            for (const InstanceEval &e : evals)
                value += e.goal_count;
            break;
        case Feature::Landmarks:
            for (const InstanceEval &e : evals)
                value += e.landmarks;
            break;
        case Feature::LandmarksNormalized:
            for (const InstanceEval &e : evals)
                value += normalized_term(e.landmarks, e.landmarks_total);
            break;
        case Feature::Gotos:
            value = f1(lines);
            break;
        case Feature::Zero:
            break;
        }
        if (v.size >= EvalVector::kMax)
            throw logic_error("too many evaluation features");
        v.push(value);
    }
    return v;
}

EvalVector evaluate(span<const Instruction> lines, span<const InstanceContext *const> instances,
                    span<const Feature> features) {
    bool lm = needs_landmarks(features);
    vector<InstanceEval> evals;
    for (const InstanceContext *ctx : instances)
        evals.push_back(evaluate_instance(*ctx, lines, lm));
    return combine(features, evals, lines);
}
}
