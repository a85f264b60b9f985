#include "pgp/landmarks.h"

#include <algorithm>
#include <deque>
#include <map>

using namespace std;

namespace pgp {
int LandmarkGraph::find_fact(AtomId atom) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].kind == LandmarkKind::Fact && nodes[i].atoms[0] == atom)
            return static_cast<int>(i);
    return -1;
}

int LandmarkGraph::find_disjunction(span<const AtomId> sorted_atoms) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].kind == LandmarkKind::Disjunctive &&
            equal(nodes[i].atoms.begin(), nodes[i].atoms.end(), sorted_atoms.begin(),
                  sorted_atoms.end()))
            return static_cast<int>(i);
    return -1;
}

int LandmarkGraph::find_pointer(ObjectId object) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].kind == LandmarkKind::Pointer && nodes[i].object == object)
            return static_cast<int>(i);
    return -1;
}

bool LandmarkGraph::has_ordering(int from, int to) const {
    return any_of(orderings.begin(), orderings.end(),
                  [&](const Ordering &o) { return o.from == from && o.to == to; });
}

size_t LandmarkGraph::count(LandmarkKind kind) const {
    return static_cast<size_t>(
        count_if(nodes.begin(), nodes.end(), [&](const LandmarkNode &n) { return n.kind == kind; }));
}

RelaxedGraph build_rpg(const GroundTask &task) {
    const Instance &inst = *task.instance;
    RelaxedGraph g;
    g.atom_level.assign(inst.num_atoms(), -1);
    g.action_level.assign(task.actions.size(), -1);
    vector<int> missing(task.actions.size());
    vector<int> ready;
    for (size_t a = 0; a < task.actions.size(); ++a) {
        missing[a] = static_cast<int>(task.actions[a].pre.size());
        if (missing[a] == 0)
            ready.push_back(static_cast<int>(a));
    }
    vector<AtomId> layer = inst.init().atoms();
    for (AtomId p : layer)
        g.atom_level[p] = 0;

    for (int level = 0;; ++level) {
        for (AtomId p : layer)
            for (int a : task.consumers[p])
                if (--missing[a] == 0)
                    ready.push_back(a);
        vector<AtomId> next;
        for (int a : ready) {
            g.action_level[a] = level;
            for (AtomId q : task.actions[a].add)
                if (g.atom_level[q] < 0) {
                    g.atom_level[q] = level + 1;
                    next.push_back(q);
                }
        }
        ready.clear();
        g.num_layers = level + 1;
        if (next.empty())
            break;
        layer = move(next);
    }
    g.relaxed_solvable = all_of(inst.goal().begin(), inst.goal().end(),
                                [&](AtomId p) { return g.atom_level[p] >= 0; });
    return g;
}

vector<bool> relaxed_reachable(const GroundTask &task, span<const AtomId> forbidden,
                               const vector<bool> *excluded) {
    const Instance &inst = *task.instance;
    vector<bool> reached(inst.num_atoms(), false);
    vector<bool> banned(inst.num_atoms(), false);
    for (AtomId p : forbidden)
        banned[p] = true;
    vector<int> missing(task.actions.size());
    vector<AtomId> stack;
    auto fire = [&](int a) {
        if (excluded && (*excluded)[a])
            return;
        for (AtomId q : task.actions[a].add)
            if (!reached[q] && !banned[q]) {
                reached[q] = true;
                stack.push_back(q);
            }
    };
    for (AtomId p : inst.init().atoms())
        if (!banned[p]) {
            reached[p] = true;
            stack.push_back(p);
        }
    for (size_t a = 0; a < task.actions.size(); ++a) {
        missing[a] = static_cast<int>(task.actions[a].pre.size());
        if (missing[a] == 0)
            fire(static_cast<int>(a));
    }
    while (!stack.empty()) {
        AtomId p = stack.back();
        stack.pop_back();
        for (int a : task.consumers[p])
            if (--missing[a] == 0)
                fire(a);
    }
    return reached;
}

namespace {
void add_ordering(LandmarkGraph &graph, int from, int to, OrderingKind kind) {
    if (from != to && !graph.has_ordering(from, to))
        graph.orderings.push_back({from, to, kind});
}

// Achievers of `node` applicable in the relaxed task where the node never holds.
vector<int> first_achievers(const GroundTask &task, const LandmarkNode &node) {
    vector<bool> reach = relaxed_reachable(task, node.atoms);
    vector<int> candidates;
    for (AtomId p : node.atoms)
        candidates.insert(candidates.end(), task.achievers[p].begin(), task.achievers[p].end());
    sort(candidates.begin(), candidates.end());
    candidates.erase(unique(candidates.begin(), candidates.end()), candidates.end());
    vector<int> result;
    for (int a : candidates) {
        const vector<AtomId> &pre = task.actions[a].pre;
        if (all_of(pre.begin(), pre.end(), [&](AtomId p) { return reach[p]; }))
            result.push_back(a);
    }
    return result;
}
}

LandmarkGraph backchain_landmarks(const GroundTask &task) {
    const Instance &inst = *task.instance;
    const State &init = inst.init();
    LandmarkGraph graph;
    deque<int> open;

    auto add_fact = [&](AtomId p) {
        int id = graph.find_fact(p);
        if (id >= 0)
            return pair{id, false};
        LandmarkNode node;
        node.atoms = {p};
        node.initially_true = init.test(p);
        graph.nodes.push_back(move(node));
        return pair{static_cast<int>(graph.nodes.size()) - 1, true};
    };

    for (AtomId g : inst.goal()) {
        auto [id, created] = add_fact(g);
        graph.nodes[id].goal = true;
        if (created && !graph.nodes[id].initially_true)
            open.push_back(id);
    }
    for (AtomId p : init.atoms())
        add_fact(p);

    while (!open.empty()) {
        int q = open.front();
        open.pop_front();
        vector<int> first = first_achievers(task, graph.nodes[q]);
        graph.nodes[q].first_achievers = first;
        if (first.empty()) {
            graph.notes.push_back("landmark " + to_string(q) + " is relaxed-unreachable");
            continue;
        }

        vector<AtomId> shared = task.actions[first[0]].pre;
        for (size_t i = 1; i < first.size(); ++i) {
            const vector<AtomId> &pre = task.actions[first[i]].pre;
            vector<AtomId> both;
            set_intersection(shared.begin(), shared.end(), pre.begin(), pre.end(),
                             back_inserter(both));
            shared = move(both);
        }
        for (AtomId p : shared) {
            auto [id, created] = add_fact(p);
            add_ordering(graph, id, q, OrderingKind::GreedyNecessary);
            if (created && !graph.nodes[id].initially_true)
                open.push_back(id);
        }

        // Every first achiever needs some precondition of predicate P.
        map<PredicateId, vector<AtomId>> by_predicate;
        map<PredicateId, size_t> support;
        for (int a : first) {
            map<PredicateId, bool> seen;
            for (AtomId p : task.actions[a].pre) {
                PredicateId pred = inst.predicate_of(p);
                by_predicate[pred].push_back(p);
                seen[pred] = true;
            }
            for (const auto &[pred, _] : seen)
                ++support[pred];
        }
        for (auto &[pred, atoms] : by_predicate) {
            if (support[pred] != first.size())
                continue;
            sort(atoms.begin(), atoms.end());
            atoms.erase(unique(atoms.begin(), atoms.end()), atoms.end());
            if (atoms.size() < 2 || atoms.size() > 4)
                continue;
            bool usable = all_of(atoms.begin(), atoms.end(), [&](AtomId p) {
                return !init.test(p) && graph.find_fact(p) < 0;
            });
            if (!usable)
                continue;
            int id = graph.find_disjunction(atoms);
            if (id < 0) {
                LandmarkNode node;
                node.kind = LandmarkKind::Disjunctive;
                node.atoms = atoms;
                graph.nodes.push_back(move(node));
                id = static_cast<int>(graph.nodes.size()) - 1;
                open.push_back(id);
            }
            add_ordering(graph, id, q, OrderingKind::GreedyNecessary);
        }
    }
    return graph;
}

namespace {
// Tarjan's algorithm; returns the component index of every node.
vector<int> strongly_connected(int n, const vector<Ordering> &edges, int &num_components) {
    vector<vector<int>> succ(n);
    for (const Ordering &o : edges)
        succ[o.from].push_back(o.to);
    vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    vector<bool> on_stack(n, false);
    int counter = 0;
    num_components = 0;
    // Iterative to stay safe on long chains.
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0)
            continue;
        vector<pair<int, size_t>> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto &[v, next] = call.back();
            if (next < succ[v].size()) {
                int w = succ[v][next++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = num_components;
                } while (w != v);
                ++num_components;
            }
            int finished = v;
            call.pop_back();
            if (!call.empty())
                low[call.back().first] = min(low[call.back().first], low[finished]);
        }
    }
    return comp;
}

void break_cycles(LandmarkGraph &graph) {
    const int n = static_cast<int>(graph.nodes.size());
    while (true) {
        int num_components;
        vector<int> comp = strongly_connected(n, graph.orderings, num_components);
        if (num_components == n)
            return;
        // Newest natural edge inside any cycle goes first.
        int victim = -1;
        for (int e = static_cast<int>(graph.orderings.size()) - 1; e >= 0; --e) {
            const Ordering &o = graph.orderings[e];
            if (o.kind == OrderingKind::Natural && comp[o.from] == comp[o.to]) {
                victim = e;
                break;
            }
        }
        if (victim < 0) {
            graph.notes.push_back("cycle of greedy-necessary orderings left in place");
            return;
        }
        const Ordering &o = graph.orderings[victim];
        graph.notes.push_back("dropped natural ordering " + to_string(o.from) + " -> " +
                              to_string(o.to) + " (cycle)");
        graph.orderings.erase(graph.orderings.begin() + victim);
    }
}
}

void add_natural_orderings(LandmarkGraph &graph, const GroundTask &task) {
    const int n = static_cast<int>(graph.nodes.size());
    for (int q = 0; q < n; ++q) {
        const LandmarkNode &nq = graph.nodes[q];
        if (nq.kind == LandmarkKind::Pointer || nq.initially_true)
            continue;
        vector<bool> reach = relaxed_reachable(task, nq.atoms);
        for (int p = 0; p < n; ++p) {
            const LandmarkNode &np = graph.nodes[p];
            if (p == q || np.kind == LandmarkKind::Pointer || np.initially_true)
                continue;
            bool reachable =
                any_of(np.atoms.begin(), np.atoms.end(), [&](AtomId a) { return reach[a]; });
            if (!reachable)
                add_ordering(graph, q, p, OrderingKind::Natural);
        }
    }
    break_cycles(graph);
}

PointerLandmarkReport add_pointer_landmarks(LandmarkGraph &graph, const GroundTask &task,
                                            const PointerSet &pointers) {
    const Instance &inst = *task.instance;
    PointerLandmarkReport report;
    const int n = static_cast<int>(graph.nodes.size());
    for (int q = 0; q < n; ++q) {
        if (graph.nodes[q].kind == LandmarkKind::Pointer || graph.nodes[q].initially_true ||
            graph.nodes[q].first_achievers.empty())
            continue;
        // Objects every first achiever is grounded with.
        vector<ObjectId> common;
        bool first = true;
        for (int a : graph.nodes[q].first_achievers) {
            vector<ObjectId> objs = task.actions[a].args;
            sort(objs.begin(), objs.end());
            objs.erase(unique(objs.begin(), objs.end()), objs.end());
            if (first) {
                common = move(objs);
                first = false;
            } else {
                vector<ObjectId> both;
                set_intersection(common.begin(), common.end(), objs.begin(), objs.end(),
                                 back_inserter(both));
                common = move(both);
            }
        }
        for (ObjectId o : common) {
            vector<pair<int, int>> assignments;
            for (size_t z = 0; z < pointers.size(); ++z) {
                int pos = inst.index_in_type(pointers.pointers[z].type, o);
                if (pos >= 0)
                    assignments.push_back({static_cast<int>(z), pos});
            }
            if (assignments.empty()) {
                report.skipped.push_back({q, o});
                continue;
            }
            int id = graph.find_pointer(o);
            if (id < 0) {
                LandmarkNode node;
                node.kind = LandmarkKind::Pointer;
                node.object = o;
                node.assignments = move(assignments);
                graph.nodes.push_back(move(node));
                id = static_cast<int>(graph.nodes.size()) - 1;
            }
            add_ordering(graph, id, q, OrderingKind::GreedyNecessary);
        }
    }
    return report;
}

LandmarkGraph build_landmark_graph(const GroundTask &task, const PointerSet *pointers) {
    LandmarkGraph graph = backchain_landmarks(task);
    add_natural_orderings(graph, task);
    if (pointers)
        add_pointer_landmarks(graph, task, *pointers);
    return graph;
}
}
