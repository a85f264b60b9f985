#include "doctest.h"
#include "support.h"

using namespace pgp;
using namespace pgp::testing;

namespace {
bool node_holds(const LandmarkNode &n, const ProgramState &ps) {
    if (n.kind == LandmarkKind::Pointer) {
        for (const auto &[z, v] : n.assignments)
            if (ps.pointers[z] == v)
                return true;
        return false;
    }
    for (AtomId a : n.atoms)
        if (ps.state.test(a))
            return true;
    return false;
}

// Landmark count recomputed from its definition over the full state
// sequence, stepping the interpreter one instruction at a time.
std::int64_t naive_f_lm(const Program &p, const InstanceContext &ctx) {
    const LandmarkGraph &g = *ctx.graph;
    const Interpreter &vm = *ctx.interpreter;
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<int>> preds(n), gn_succ(n);
    for (const Ordering &o : g.orderings) {
        preds[o.to].push_back(o.from);
        if (o.kind == OrderingKind::GreedyNecessary)
            gn_succ[o.from].push_back(o.to);
    }
    std::vector<bool> reached(n, false);
    auto settle = [&](const ProgramState &ps) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (reached[i] || !node_holds(g.nodes[i], ps))
                    continue;
                bool ok = true;
                for (int q : preds[i])
                    ok = ok && reached[q];
                if (ok) {
                    reached[i] = true;
                    changed = true;
                }
            }
        }
    };
    // Same termination as the interpreter: run to its step count.
    ExecutionOutcome out = vm.execute(p.lines());
    ProgramState ps = vm.initial_state();
    settle(ps);
    for (std::uint64_t k = 0; k < out.steps; ++k) {
        REQUIRE(vm.step(p.lines(), ps));
        settle(ps);
    }
    std::int64_t value = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!reached[i]) {
            ++value;
            continue;
        }
        if (node_holds(g.nodes[i], ps))
            continue;
        bool again = g.nodes[i].goal;
        for (int s : gn_succ[i])
            again = again || !reached[s];
        value += again;
    }
    return value;
}

GPProblem problem_for(const std::string &domain, int lines, int num_instances) {
    GPProblem gp;
    gp.domain = domain_of(domain);
    gp.instances = training_instances(domain, gp.domain);
    gp.instances.resize(num_instances);
    const bench::DomainRecipe &r = bench::find_recipe(domain);
    gp.pointers = bench::recipe_pointers(r, *gp.domain);
    gp.num_lines = lines;
    return gp;
}
}

TEST_CASE("incremental landmark count matches a recomputation from the definition") {
    std::mt19937_64 rng(11);
    for (std::string domain : {"lock", "gripper", "ontable", "corridor", "intrusion", "baking"}) {
        CAPTURE(domain);
        const bench::DomainRecipe &r = bench::find_recipe(domain);
        SearchSpace space(problem_for(domain, r.lines, 3), true, r.enable_tests);
        for (int trial = 0; trial < 150; ++trial) {
            Program p = random_program(space, rng, trial % 2 ? 0.3 : 0.0);
            for (std::size_t i = 0; i < space.num_instances(); ++i)
                CHECK(f_lm_instance(p.lines(), space.context(i)) ==
                      naive_f_lm(p, space.context(i)));
        }
    }
}

TEST_CASE("landmark count of the bundled lock program falls as lines are filled in") {
    auto d = lock_domain();
    Program full = fixture_program("lock", *d);
    GPProblem gp;
    gp.domain = d;
    gp.instances = {lock_instance(6, 2)};
    gp.pointers = full.pointers_ptr();
    gp.num_lines = full.size();
    SearchSpace space(gp, true, false);
    std::vector<const InstanceContext *> ctx{&space.context(0)};
    std::int64_t total = space.context(0).landmarks->size();
    std::int64_t prev = total + 1;
    for (int k = 0; k < full.size(); ++k) {
        Program partial(full.size(), full.pointers_ptr());
        for (int i = 0; i < k; ++i)
            partial.set_line(i, full[i]);
        std::int64_t v = f_lm(partial.lines(), ctx);
        CAPTURE(k);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK(f_lm(full.lines(), ctx) == 0);
    Program empty(full.size(), full.pointers_ptr());
    CHECK(f_lm(empty.lines(), ctx) < total);  // initial facts and z=0 are reached
}

TEST_CASE("normalized terms lie in [0,1] with four-digit precision") {
    for (std::int64_t total = 1; total <= 200; ++total)
        for (std::int64_t v = 0; v <= total; ++v) {
            std::int64_t t = normalized_term(v, total);
            REQUIRE(t >= 0);
            REQUIRE(t <= kNormScale);
            // nearest multiple of 1e-4, ties rounded up
            long double exact = static_cast<long double>(v) / total * kNormScale;
            CHECK(std::abs(static_cast<long double>(t) - exact) <= 0.5L + 1e-9L);
        }
    CHECK(normalized_term(1, 3) == 3333);
    CHECK(normalized_term(2, 3) == 6667);
    CHECK(normalized_term(1, 8) == 1250);
    CHECK(normalized_term(1, 20000) == 1);  // 0.00005 rounds up
    CHECK(normalized_term(0, 0) == 0);
}

TEST_CASE("normalized heuristic sums per-instance terms") {
    const bench::DomainRecipe &r = bench::find_recipe("lock");
    SearchSpace space(problem_for("lock", r.lines, 4), true, false);
    std::vector<const InstanceContext *> ctx;
    for (std::size_t i = 0; i < space.num_instances(); ++i)
        ctx.push_back(&space.context(i));
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Program p = random_program(space, rng, 0.2);
        std::int64_t expected = 0;
        for (const InstanceContext *c : ctx)
            expected += normalized_term(f_lm_instance(p.lines(), *c), c->landmarks->size());
        CHECK(f_lm_normalized(p.lines(), ctx) == expected);
        CHECK(f_lm_normalized(p.lines(), ctx) <= kNormScale * static_cast<std::int64_t>(ctx.size()));
    }
}

TEST_CASE("goal count and goto count") {
    auto d = lock_domain();
    Program full = fixture_program("lock", *d);
    GPProblem gp;
    gp.domain = d;
    gp.instances = {lock_instance(6, 2), lock_instance(4, 1)};
    gp.pointers = full.pointers_ptr();
    gp.num_lines = full.size();
    SearchSpace space(gp, false, false);
    std::vector<const InstanceContext *> ctx{&space.context(0), &space.context(1)};
    Program empty(full.size(), full.pointers_ptr());
    CHECK(f_gc(empty.lines(), ctx) == 2);
    CHECK(f_gc(full.lines(), ctx) == 0);
    CHECK(f1(full.lines()) == 2);
    std::vector<Feature> feats{Feature::GoalCount, Feature::Gotos, Feature::Zero};
    EvalVector v = evaluate(full.lines(), ctx, feats);
    CHECK(v.size == 3);
    CHECK(v[0] == 0);
    CHECK(v[1] == 2);
    CHECK(v[2] == 0);
}

TEST_CASE("evaluation vectors compare lexicographically") {
    EvalVector a, b, c;
    a.push(1);
    a.push(9);
    b.push(2);
    b.push(0);
    c.push(1);
    c.push(9);
    CHECK(a < b);
    CHECK_FALSE(b < a);
    CHECK(a == c);
    CHECK_FALSE(a < c);
    CHECK(a.str() == "<1,9>");
}
