#include "doctest.h"
#include "oracles.h"
#include "support.h"

#include <map>
#include <tuple>

using namespace pgp;
using namespace pgp::testing;

namespace {
GPProblem problem_of(std::shared_ptr<const DomainModel> d,
                     std::vector<std::shared_ptr<const Instance>> insts,
                     std::shared_ptr<const PointerSet> z, int lines) {
    GPProblem gp;
    gp.domain = std::move(d);
    gp.instances = std::move(insts);
    gp.pointers = std::move(z);
    gp.num_lines = lines;
    return gp;
}

ProgramState run_lines(const Interpreter &vm, const Program &p, int steps) {
    ProgramState ps = vm.initial_state();
    for (int i = 0; i < steps; ++i)
        REQUIRE(vm.step(p.lines(), ps));
    return ps;
}
}

TEST_CASE("lock program walks right, picks up the key and walks back") {
    auto inst = lock_instance(6, 2);
    Program p = fixture_program("lock", inst->domain());
    Interpreter vm(*inst, p.pointers_ptr());
    ExecutionOptions opt;
    opt.record_plan = true;
    ExecutionOutcome out = vm.execute(p.lines(), opt);
    REQUIRE(out.kind == OutcomeKind::Solved);
    std::vector<std::string> names;
    for (const GroundAction &a : out.plan)
        names.push_back(action_name(*inst, a));
    std::vector<std::string> expected{"(move p2 p3)", "(move p3 p4)", "(move p4 p5)",
                                      "(pickup p5)",  "(move p5 p4)", "(move p4 p3)",
                                      "(move p3 p2)", "(move p2 p1)", "(move p1 p0)",
                                      "(open p0)"};
    CHECK(names == expected);
    // the plan is a valid sequential plan
    State s = inst->init();
    for (const GroundAction &a : out.plan)
        s = apply(a, s);
    CHECK(satisfies_goal(s, inst->goal()));
}

TEST_CASE("zero flag semantics of pointer instructions") {
    auto inst = lock_instance(3, 0);
    auto z = pointers_of(inst->domain(), "location", 2);
    Interpreter vm(*inst, z);
    CHECK(vm.initial_state().flag == false);
    CHECK(vm.initial_state().pointers[0] == 0);

    SUBCASE("inc") {
        Program p = parse_program("0. inc(z1)\n1. inc(z1)\n2. inc(z1)\n3. end\n", inst->domain(), z);
        ProgramState ps = run_lines(vm, p, 1);
        CHECK(ps.pointers[0] == 1);
        CHECK(ps.flag == false);
        ps = run_lines(vm, p, 3);
        CHECK(ps.pointers[0] == 2);
        CHECK(ps.flag == true);  // failed at the last object
    }
    SUBCASE("dec") {
        Program p = parse_program(
            "0. inc(z1)\n1. inc(z1)\n2. dec(z1)\n3. dec(z1)\n4. dec(z1)\n5. end\n",
            inst->domain(), z);
        CHECK(run_lines(vm, p, 3).flag == false);  // 2 -> 1
        ProgramState ps = run_lines(vm, p, 4);     // 1 -> 0
        CHECK(ps.flag == true);
        CHECK(ps.pointers[0] == 0);
        ps = run_lines(vm, p, 5);                  // stays at 0
        CHECK(ps.flag == true);
        CHECK(ps.pointers[0] == 0);
    }
    SUBCASE("clear and set") {
        Program p = parse_program("0. inc(z2)\n1. set(z1,z2)\n2. clear(z2)\n3. set(z1,z2)\n4. end\n",
                                  inst->domain(), z);
        ProgramState ps = run_lines(vm, p, 2);
        CHECK(ps.pointers[0] == 1);
        CHECK(ps.flag == false);
        ps = run_lines(vm, p, 3);
        CHECK(ps.flag == true);
        ps = run_lines(vm, p, 4);
        CHECK(ps.pointers[0] == 0);
        CHECK(ps.flag == true);
    }
    SUBCASE("test") {
        Program p = parse_program(
            "0. test(agent-at(z1))\n1. inc(z1)\n2. test(agent-at(z1))\n3. end\n",
            inst->domain(), z);
        CHECK(run_lines(vm, p, 1).flag == false);
        CHECK(run_lines(vm, p, 3).flag == true);
    }
    SUBCASE("actions") {
        // inc leaves the flag false; a failing move sets it, a succeeding one keeps it
        Program p = parse_program(
            "0. inc(z2)\n1. move(z2,z1)\n2. move(z1,z2)\n3. inc(z2)\n4. move(z2,z1)\n5. end\n",
            inst->domain(), z);
        ProgramState ps = run_lines(vm, p, 2);
        CHECK(ps.flag == true);
        ps = run_lines(vm, p, 3);
        CHECK(ps.flag == true);
        CHECK(ps.state.test(inst->atom_index(GroundAtom{2, {1}})));
        ps = run_lines(vm, p, 4);
        CHECK(ps.flag == false);
        ps = run_lines(vm, p, 5);  // move(p2,p0) is not applicable
        CHECK(ps.flag == true);
    }
}

TEST_CASE("gotos branch on the flag") {
    auto inst = lock_instance(3, 0);
    auto z = pointers_of(inst->domain(), "location", 1);
    Interpreter vm(*inst, z);
    Program p = parse_program("0. inc(z1)\n1. goto(0,!yz)\n2. end\n", inst->domain(), z);
    ProgramState ps = run_lines(vm, p, 2);
    CHECK(ps.pc == 0);
    ps = run_lines(vm, p, 4);
    CHECK(ps.pc == 0);
    ps = run_lines(vm, p, 6);  // third inc fails
    CHECK(ps.pc == 2);
    CHECK_FALSE(vm.step(p.lines(), ps));
}

TEST_CASE("outcomes: pending, incorrect, repeated state, step bound") {
    auto inst = lock_instance(4, 1);
    auto z = pointers_of(inst->domain(), "location", 2);
    Interpreter vm(*inst, z);
    const DomainModel &d = inst->domain();

    Program pending(4, z);
    pending.set_line(0, Instruction::inc(0));
    CHECK(vm.execute(pending.lines()).kind == OutcomeKind::PendingUndefined);

    Program wrong = parse_program("0. inc(z1)\n1. end\n", d, z);
    CHECK(vm.execute(wrong.lines()).kind == OutcomeKind::FailedIncorrect);

    Program loop = parse_program("0. clear(z1)\n1. goto(0,yz)\n2. end\n", d, z);
    ExecutionOutcome out = vm.execute(loop.lines());
    CHECK(out.kind == OutcomeKind::FailedInfinite);
    CHECK_FALSE(out.hit_step_limit);

    Program walk = parse_program("0. inc(z1)\n1. goto(0,!yz)\n2. end\n", d, z);
    ExecutionOptions tight;
    tight.step_limit = 3;
    out = vm.execute(walk.lines(), tight);
    CHECK(out.kind == OutcomeKind::FailedInfinite);
    CHECK(out.hit_step_limit);
    CHECK(out.steps == 3);
}

TEST_CASE("interpreter agrees with a naive reference on random programs") {
    struct Case {
        std::string domain;
        std::vector<std::pair<std::string, int>> pointers;
        int lines;
        bool tests;
    };
    std::vector<Case> cases{{"lock", {{"location", 2}}, 6, true},
                            {"gripper", {{"room", 2}, {"ball", 1}, {"gripper", 1}}, 6, false},
                            {"ontable", {{"block", 3}}, 6, true},
                            {"spanner", {{"location", 2}, {"spanner", 1}, {"nut", 1}, {"man", 1}},
                             6, false},
                            {"corridor", {{"location", 2}}, 5, true}};
    std::mt19937_64 rng(7);
    for (const Case &c : cases) {
        CAPTURE(c.domain);
        auto d = domain_of(c.domain);
        auto insts = training_instances(c.domain, d);
        insts.resize(3);
        std::vector<std::pair<TypeId, int>> counts;
        for (const auto &[t, k] : c.pointers)
            counts.push_back({*d->find_type(t), k});
        auto z = make_pointers(*d, counts);
        SearchSpace space(problem_of(d, insts, z, c.lines), false, c.tests);
        for (int trial = 0; trial < 300; ++trial) {
            Program p = random_program(space, rng, trial % 3 == 0 ? 0.2 : 0.0);
            for (const auto &inst : insts) {
                Interpreter vm(*inst, z);
                ExecutionOptions opt;
                opt.record_plan = true;
                ExecutionOutcome fast = vm.execute(p.lines(), opt);
                NaiveResult slow = naive_run(p, *inst);
                REQUIRE(fast.kind == slow.kind);
                if (fast.kind == OutcomeKind::FailedInfinite)
                    continue;  // the two stop at different points of the cycle
                CHECK(fast.last_state.state.atoms() == slow.final_atoms);
                std::vector<std::string> plan;
                for (const GroundAction &a : fast.plan)
                    plan.push_back(action_name(*inst, a));
                CHECK(plan == slow.plan);
                for (std::size_t k = 0; k < z->size(); ++k)
                    CHECK(fast.last_state.pointers[k] == slow.pointers[k]);
            }
        }
    }
}

TEST_CASE("solves stops at the first unsolved instance") {
    auto z = pointers_of(*lock_domain(), "location", 2);
    Program p = fixture_program("lock", *lock_domain());
    auto a = lock_instance(5, 2), b = lock_instance(6, 4);
    Interpreter va(*a, p.pointers_ptr()), vb(*b, p.pointers_ptr());
    std::vector<const Interpreter *> both{&va, &vb};
    CHECK(solves(p.lines(), both).solved);
    Program wrong = parse_program("0. inc(z1)\n1. end\n", *lock_domain(), z);
    SolveReport r = solves(wrong.lines(), both);
    CHECK_FALSE(r.solved);
    CHECK(r.first_failed == 0);
    CHECK(r.failed_kind == OutcomeKind::FailedIncorrect);
}
