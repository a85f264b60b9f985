#include "doctest.h"
#include "oracles.h"
#include "support.h"

#include <filesystem>
#include <map>

using namespace pgp;
using namespace pgp::testing;

namespace {
std::set<std::string> fact_labels_without_adjacency(const LandmarkGraph &g, const Instance &inst) {
    PredicateId adjacent = *inst.domain().find_predicate("adjacent");
    std::set<std::string> out;
    for (const LandmarkNode &n : g.nodes)
        if (n.kind == LandmarkKind::Fact && inst.predicate_of(n.atoms[0]) != adjacent)
            out.insert(inst.atom_name(n.atoms[0]));
    return out;
}

int fact(const LandmarkGraph &g, const Instance &inst, const std::string &pred,
         std::vector<std::string> args) {
    std::vector<ObjectId> ids;
    for (const std::string &a : args)
        ids.push_back(*inst.find_object(a));
    return g.find_fact(inst.atom_index(*inst.domain().find_predicate(pred), ids));
}

bool gn(const LandmarkGraph &g, int from, int to) {
    for (const Ordering &o : g.orderings)
        if (o.from == from && o.to == to && o.kind == OrderingKind::GreedyNecessary)
            return true;
    return false;
}

bool acyclic(const LandmarkGraph &g) {
    std::vector<int> indeg(g.nodes.size(), 0);
    for (const Ordering &o : g.orderings)
        ++indeg[o.to];
    std::vector<int> ready;
    for (std::size_t i = 0; i < indeg.size(); ++i)
        if (!indeg[i])
            ready.push_back(static_cast<int>(i));
    std::size_t done = 0;
    while (!ready.empty()) {
        int v = ready.back();
        ready.pop_back();
        ++done;
        for (const Ordering &o : g.orderings)
            if (o.from == v && --indeg[o.to] == 0)
                ready.push_back(o.to);
    }
    return done == g.nodes.size();
}
}

TEST_CASE("lock corridor of six cells has the ten expected fact landmarks") {
    auto inst = lock_instance(6, 2);
    GroundTask task = ground_universe(*inst);
    auto z = pointers_of(inst->domain(), "location", 2);
    LandmarkGraph g = build_landmark_graph(task, z.get());
    // Every plan walks p2..p5, takes the key, walks back to p0 and opens.
    std::set<std::string> expected{"unlocked()",    "lock-at(p0)",    "key-at(p5)",
                                   "agent-at(p2)",  "agent-at(p3)",   "agent-at(p4)",
                                   "agent-at(p5)",  "agent-has-key()", "agent-at(p1)",
                                   "agent-at(p0)"};
    CHECK(fact_labels_without_adjacency(g, *inst) == expected);
    CHECK(g.count(LandmarkKind::Disjunctive) == 0);

    int has_key = fact(g, *inst, "agent-has-key", {});
    int unlocked = fact(g, *inst, "unlocked", {});
    CHECK(gn(g, fact(g, *inst, "agent-at", {"p5"}), has_key));
    CHECK(gn(g, has_key, unlocked));
    CHECK(gn(g, fact(g, *inst, "agent-at", {"p0"}), unlocked));
    CHECK(gn(g, fact(g, *inst, "agent-at", {"p1"}), fact(g, *inst, "agent-at", {"p0"})));
    CHECK(gn(g, fact(g, *inst, "agent-at", {"p4"}), fact(g, *inst, "agent-at", {"p5"})));
    CHECK(g.nodes[unlocked].goal);
    CHECK(g.nodes[fact(g, *inst, "agent-at", {"p2"})].initially_true);
    CHECK(acyclic(g));
}

TEST_CASE("pointer landmark for the key cell precedes taking the key") {
    auto inst = lock_instance(6, 2);
    GroundTask task = ground_universe(*inst);
    auto z = pointers_of(inst->domain(), "location", 2);
    LandmarkGraph g = build_landmark_graph(task, z.get());
    int node = g.find_pointer(*inst->find_object("p5"));
    REQUIRE(node >= 0);
    const LandmarkNode &n = g.nodes[node];
    std::vector<std::pair<int, int>> expected{{0, 5}, {1, 5}};
    CHECK(n.assignments == expected);
    CHECK(gn(g, node, fact(g, *inst, "agent-has-key", {})));
    CHECK(g.count(LandmarkKind::Pointer) == 6);
}

TEST_CASE("fact and disjunctive landmarks pass the achiever-removal oracle") {
    for (const bench::DomainRecipe &r : bench::recipes()) {
        CAPTURE(r.name);
        auto d = domain_of(r.name);
        auto insts = training_instances(r.name, d);
        for (std::size_t k = 0; k < insts.size(); k += 3) {
            const Instance &inst = *insts[k];
            CAPTURE(inst.name());
            GroundTask task = ground_universe(inst);
            LandmarkGraph g = backchain_landmarks(task);
            add_natural_orderings(g, task);
            for (const LandmarkNode &n : g.nodes) {
                if (n.kind == LandmarkKind::Pointer)
                    continue;
                INFO(node_label(n, inst, nullptr));
                CHECK(passes_achiever_removal(task, n.atoms));
            }
            CHECK(acyclic(g));
        }
    }
}

TEST_CASE("fact landmarks hold on every plan of short corridors") {
    auto d = domain_of("corridor");
    for (int length = 2; length <= 4; ++length)
        for (int start = 0; start < length; ++start)
            for (int goal = 0; goal < length; ++goal) {
                if (goal == start)
                    continue;
                std::string s = "(define (problem c) (:domain corridor) (:objects";
                for (int i = 0; i < length; ++i)
                    s += " p" + std::to_string(i);
                s += " - location) (:init";
                for (int i = 0; i + 1 < length; ++i)
                    s += " (adjacent p" + std::to_string(i) + " p" + std::to_string(i + 1) +
                         ") (adjacent p" + std::to_string(i + 1) + " p" + std::to_string(i) + ")";
                s += " (at p" + std::to_string(start) + ") (goal-at p" + std::to_string(goal) +
                     ")) (:goal (at p" + std::to_string(goal) + ")))";
                Instance inst = parse_problem(s, d);
                GroundTask task = ground_universe(inst);
                LandmarkGraph g = build_landmark_graph(task, nullptr);
                int plans = 0;
                enumerate_plans(task, [&](const std::vector<State> &path) {
                    ++plans;
                    for (const LandmarkNode &n : g.nodes) {
                        if (n.kind != LandmarkKind::Fact)
                            continue;
                        bool seen = false;
                        for (const State &st : path)
                            seen = seen || st.test(n.atoms[0]);
                        CHECK(seen);
                    }
                });
                CHECK(plans >= 1);
                // the cells strictly between start and goal are landmarks
                for (int c = std::min(start, goal); c <= std::max(start, goal); ++c) {
                    std::vector<ObjectId> at{*inst.find_object("p" + std::to_string(c))};
                    CHECK(g.find_fact(inst.atom_index(*d->find_predicate("at"), at)) >= 0);
                }
            }
}

TEST_CASE("landmark graphs serialize and reload unchanged") {
    auto inst = lock_instance(5, 3);
    GroundTask task = ground_universe(*inst);
    auto z = pointers_of(inst->domain(), "location", 2);
    LandmarkGraph g = build_landmark_graph(task, z.get());
    LandmarkGraph back = deserialize_graph(serialize_graph(g));
    REQUIRE(back.nodes.size() == g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        CHECK(back.nodes[i].kind == g.nodes[i].kind);
        CHECK(back.nodes[i].atoms == g.nodes[i].atoms);
        CHECK(back.nodes[i].assignments == g.nodes[i].assignments);
        CHECK(back.nodes[i].goal == g.nodes[i].goal);
        CHECK(back.nodes[i].initially_true == g.nodes[i].initially_true);
    }
    CHECK(back.orderings == g.orderings);

    std::filesystem::path dir = std::filesystem::temp_directory_path() / "pgp_lm_cache_test";
    std::filesystem::remove_all(dir);
    LandmarkGraph first = cached_landmark_graph(task, z.get(), dir);
    CHECK(std::distance(std::filesystem::directory_iterator(dir),
                        std::filesystem::directory_iterator()) == 1);
    LandmarkGraph second = cached_landmark_graph(task, z.get(), dir);
    CHECK(second.orderings == first.orderings);
    CHECK(landmark_cache_key(*inst, z.get()) != landmark_cache_key(*inst, nullptr));
    std::filesystem::remove_all(dir);
}

TEST_CASE("dot output names every node") {
    auto inst = lock_instance(4, 1);
    GroundTask task = ground_universe(*inst);
    auto z = pointers_of(inst->domain(), "location", 2);
    LandmarkGraph g = build_landmark_graph(task, z.get());
    std::string dot = to_dot(g, *inst, z.get());
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(dot.find("agent-has-key") != std::string::npos);
    CHECK(dot.find("z1=3") != std::string::npos);
}

TEST_CASE("relaxed planning graph levels") {
    auto inst = lock_instance(4, 0);
    GroundTask task = ground_universe(*inst);
    RelaxedGraph rpg = build_rpg(task);
    CHECK(rpg.relaxed_solvable);
    std::vector<ObjectId> p3{*inst->find_object("p3")};
    CHECK(rpg.atom_level[inst->atom_index(*inst->domain().find_predicate("agent-at"), p3)] == 3);
    CHECK(rpg.atom_level[inst->goal()[0]] == 5);
}
