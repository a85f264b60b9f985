#include "doctest.h"
#include "support.h"
#include "toy.h"

#include <sstream>

using namespace pgp;
using namespace pgp::testing;

namespace {
std::set<std::string> legal_instructions(const DomainModel &d, const PointerSet &z, int line,
                                         int lines, bool tests) {
    std::set<std::string> out;
    int nz = static_cast<int>(z.size());
    auto try_add = [&](const Instruction &ins) {
        try {
            check_instruction(d, z, ins, line, lines);
        } catch (const ProgramError &) {
            return;
        }
        out.insert(format_instruction(d, z, ins));
    };
    auto tuples = [&](std::size_t arity, const std::function<void(std::vector<int> &)> &f) {
        std::vector<int> t(arity, 0);
        while (true) {
            f(t);
            std::size_t i = arity;
            for (; i > 0; --i) {
                if (++t[i - 1] < nz)
                    break;
                t[i - 1] = 0;
            }
            if (i == 0)
                break;
        }
    };
    for (std::size_t s = 0; s < d.schemas.size(); ++s)
        tuples(d.schemas[s].arity(), [&](std::vector<int> &t) {
            try_add(Instruction::action(static_cast<int>(s), t));
        });
    if (tests)
        for (std::size_t p = 0; p < d.predicates.size(); ++p)
            tuples(d.predicates[p].arity(), [&](std::vector<int> &t) {
                try_add(Instruction::test(static_cast<int>(p), t));
            });
    for (int a = 0; a < nz; ++a) {
        try_add(Instruction::inc(a));
        try_add(Instruction::dec(a));
        try_add(Instruction::clear(a));
        for (int b = 0; b < nz; ++b)
            if (a != b)
                try_add(Instruction::set(a, b));
    }
    for (int t = 0; t < lines; ++t) {
        try_add(Instruction::go(t, false));
        try_add(Instruction::go(t, true));
    }
    return out;
}
}

TEST_CASE("expansion fills the first undefined line with every legal instruction") {
    struct Case {
        std::string domain;
        bool tests;
    };
    for (const Case &c : {Case{"lock", false}, Case{"corridor", true}, Case{"spanner", false},
                          Case{"gripper", false}, Case{"baking", false}}) {
        CAPTURE(c.domain);
        auto d = domain_of(c.domain);
        const bench::DomainRecipe &r = bench::find_recipe(c.domain);
        GPProblem gp;
        gp.domain = d;
        gp.instances = training_instances(c.domain, d);
        gp.instances.resize(1);
        gp.pointers = bench::recipe_pointers(r, *d);
        gp.num_lines = r.lines;
        SearchSpace space(gp, false, c.tests);
        Program p(gp.num_lines, gp.pointers);
        for (int line = 0; line + 1 < gp.num_lines; ++line) {
            std::vector<Program> children = expand(p, space);
            std::set<std::string> got;
            for (const Program &child : children) {
                CHECK(child.first_undefined() != line);
                for (int i = 0; i < child.size(); ++i)
                    if (i != line)
                        CHECK(child[i] == p[i]);
                got.insert(format_instruction(*d, *gp.pointers, child[line]));
            }
            CHECK(got.size() == children.size());
            CHECK(got == legal_instructions(*d, *gp.pointers, line, gp.num_lines, c.tests));
            p.set_line(line, children.front()[line]);
        }
        CHECK(expand(p, space).empty());
    }
}

TEST_CASE("classification of complete, partial and failing programs") {
    auto d = lock_domain();
    Program lock = fixture_program("lock", *d);
    GPProblem gp;
    gp.domain = d;
    gp.instances = {lock_instance(5, 2), lock_instance(6, 1), lock_instance(8, 6)};
    gp.pointers = lock.pointers_ptr();
    gp.num_lines = lock.size();
    SearchSpace space(gp, false, false);
    std::vector<int> all{0, 1, 2};
    CHECK(classify(lock, space, all).kind == Classification::SolvesAll);
    Program empty(lock.size(), lock.pointers_ptr());
    CHECK(classify(empty, space, all).kind == Classification::Pending);

    Program loop(lock.size(), lock.pointers_ptr());
    loop.set_line(0, Instruction::clear(0));
    loop.set_line(1, Instruction::go(0, false));
    ClassifyResult r = classify(loop, space, all);
    CHECK(r.kind == Classification::DeadEnd);
    CHECK(r.failed_instance == 0);
}

TEST_CASE("trivial problems: one-line programs") {
    auto d = parse_domain(kToyDomain);
    auto solved_now = toy_instance(d, 1, "(first o0)", "a");
    for (SearchAlgorithm alg : {SearchAlgorithm::BFS, SearchAlgorithm::PGP}) {
        SearchConfig cfg;
        cfg.algorithm = alg;
        cfg.features = {Feature::Zero};
        SearchResult r = search(make_gp(d, {solved_now}, 1, 1), cfg);
        CHECK(r.status == SearchStatus::Solved);
        REQUIRE(r.solution);
        CHECK(r.solution->size() == 1);
        CHECK(r.metrics.expanded == 0);

        auto needs_work = toy_instance(d, 1, "(done o0)", "b");
        r = search(make_gp(d, {needs_work}, 1, 1), cfg);
        CHECK(r.status == SearchStatus::Unsolvable);
    }
}

TEST_CASE("search with no guidance agrees with brute force on three-line programs") {
    std::vector<ToyCase> cases = toy_cases();
    int solvable = 0, unsolvable = 0;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        CAPTURE(k);
        GPProblem gp = toy_problem(cases[k]);
        const DomainModel &d = *gp.domain;
        SearchSpace space(gp, false, true);
        std::vector<std::string> all = brute_force(space);
        for (SearchAlgorithm alg : {SearchAlgorithm::PGP, SearchAlgorithm::BFS}) {
            SearchConfig cfg;
            cfg.algorithm = alg;
            cfg.features = {Feature::Zero};
            cfg.enable_tests = true;
            SearchResult r = search(space, cfg);
            if (all.empty()) {
                CHECK(r.status == SearchStatus::Unsolvable);
            } else {
                REQUIRE(r.status == SearchStatus::Solved);
                std::string text = format_program(d, *r.solution);
                CHECK(std::find(all.begin(), all.end(), text) != all.end());
            }
        }
        (all.empty() ? unsolvable : solvable)++;
    }
    CHECK(solvable >= 2);
    CHECK(unsolvable >= 2);
}

TEST_CASE("returned solutions validate and searches are reproducible") {
    for (std::string domain : {"intrusion", "gripper", "visitall"}) {
        CAPTURE(domain);
        const bench::DomainRecipe &r = bench::find_recipe(domain);
        bench::LoadedSet set = bench::materialize(bench::generate(r, bench::kDefaultSeed));
        GPProblem gp = bench::training_problem(r, set);
        std::vector<std::string> traces;
        std::vector<SearchResult> results;
        for (unsigned threads : {1u, 1u, 3u, 3u}) {
            SearchConfig cfg;
            cfg.algorithm = SearchAlgorithm::PGP;
            cfg.threads = threads;
            std::ostringstream trace;
            cfg.trace = &trace;
            results.push_back(search(gp, cfg));
            traces.push_back(trace.str());
        }
        REQUIRE(results[0].status == SearchStatus::Solved);
        CHECK(validate(*results[0].solution, gp.instances).passed);
        for (std::size_t i = 1; i < results.size(); ++i) {
            CHECK(*results[i].solution == *results[0].solution);
            CHECK(results[i].metrics.expanded == results[0].metrics.expanded);
            CHECK(results[i].metrics.evaluated == results[0].metrics.evaluated);
            CHECK(results[i].metrics.dead_ends == results[0].metrics.dead_ends);
            CHECK(results[i].metrics.states_evaluated == results[0].metrics.states_evaluated);
            CHECK(traces[i] == traces[0]);
        }
        const SearchMetrics &m = results[0].metrics;
        CHECK(m.dead_ends <= m.evaluated);
        CHECK(m.max_depth <= static_cast<std::uint64_t>(gp.num_lines - 1));
        CHECK(m.active_size >= 1);
        CHECK(m.active_size <= gp.instances.size());
    }
}

TEST_CASE("queued vectors match a recomputation over the active set") {
    // Replays the trace: every expanded vector must equal f recomputed from scratch
    // on the instances active at that moment, so in-queue updates are exact.
    for (std::string domain : {"intrusion", "visitall"}) {
        CAPTURE(domain);
        const bench::DomainRecipe &r = bench::find_recipe(domain);
        bench::LoadedSet set = bench::materialize(bench::generate(r, bench::kDefaultSeed));
        GPProblem gp = bench::training_problem(r, set);
        SearchConfig cfg;
        cfg.features = {Feature::Landmarks, Feature::Gotos};
        std::ostringstream trace;
        cfg.trace = &trace;
        REQUIRE(search(gp, cfg).status == SearchStatus::Solved);

        SearchSpace space(gp, true, false);
        std::vector<Instruction> table{Instruction{}, Instruction::end()};
        for (const Instruction &ins : space.alphabet())
            table.push_back(ins);
        for (int t = 0; t < gp.num_lines; ++t) {
            table.push_back(Instruction::go(t, false));
            table.push_back(Instruction::go(t, true));
        }
        std::vector<const InstanceContext *> active{&space.context(0)};
        std::istringstream in(trace.str());
        std::string line;
        int checked = 0, grown = 0;
        while (std::getline(in, line)) {
            if (line.rfind("a ", 0) == 0) {
                std::string name = line.substr(2);
                for (std::size_t i = 0; i < space.num_instances(); ++i)
                    if (space.context(static_cast<int>(i)).instance->name() == name)
                        active.push_back(&space.context(static_cast<int>(i)));
                ++grown;
                continue;
            }
            std::size_t lt = line.find('<'), gt = line.find('>'), lb = line.find('[');
            std::string codes = line.substr(lb + 1, line.size() - lb - 2);
            std::istringstream cs(codes);
            std::vector<Instruction> lines;
            for (int c; cs >> c;)
                lines.push_back(table.at(c));
            REQUIRE(static_cast<int>(lines.size()) == gp.num_lines);
            std::string expected = "<" + std::to_string(f_lm(lines, active)) + "," +
                                   std::to_string(f1(lines)) + ">";
            CHECK(line.substr(lt, gt - lt + 1) == expected);
            ++checked;
        }
        CHECK(grown >= 1);
        CHECK(checked > 5);
    }
}

TEST_CASE("no program is generated twice") {
    const bench::DomainRecipe &r = bench::find_recipe("visitall");
    bench::LoadedSet set = bench::materialize(bench::generate(r, bench::kDefaultSeed));
    SearchConfig cfg;
    cfg.algorithm = SearchAlgorithm::BFS;
    cfg.features = {Feature::GoalCount};
    cfg.check_duplicates = true;
    SearchResult res = search(bench::training_problem(r, set), cfg);
    CHECK(res.status == SearchStatus::Solved);
    CHECK(res.metrics.evaluated > 0);
    CHECK(res.metrics.duplicates == 0);
}

TEST_CASE("budgets stop the search") {
    const bench::DomainRecipe &r = bench::find_recipe("lock");
    bench::LoadedSet set = bench::materialize(bench::generate(r, bench::kDefaultSeed));
    SearchConfig cfg;
    cfg.algorithm = SearchAlgorithm::BFS;
    cfg.features = {Feature::GoalCount};
    cfg.time_budget = 0.5;
    SearchResult res = search(bench::training_problem(r, set), cfg);
    CHECK(res.status == SearchStatus::TimeExceeded);
    CHECK_FALSE(res.solution);
    CHECK(std::string(status_name(res.status)) == "TE");

    cfg.time_budget = 60;
    cfg.memory_budget_mb = 1;
    res = search(bench::training_problem(r, set), cfg);
    CHECK(res.status == SearchStatus::MemoryExceeded);
}

TEST_CASE("problem checks") {
    GPProblem gp;
    gp.domain = lock_domain();
    gp.pointers = pointers_of(*gp.domain, "location", 1);
    gp.num_lines = 4;
    CHECK_THROWS_AS(gp.check(), std::invalid_argument);
    gp.instances = {lock_instance(4, 1)};
    CHECK_NOTHROW(gp.check());
    auto other = domain_of("corridor");
    gp.instances.push_back(std::make_shared<const Instance>(parse_problem(
        "(define (problem c) (:domain corridor) (:objects a b - location) (:init (at a))"
        " (:goal (at b)))",
        other)));
    CHECK_THROWS_AS(gp.check(), std::invalid_argument);
}

TEST_CASE("validation report rows") {
    auto d = lock_domain();
    Program p = fixture_program("lock", *d);
    std::vector<std::shared_ptr<const Instance>> insts{lock_instance(5, 2, "a"),
                                                       lock_instance(7, 3, "b")};
    ValidationReport rep = validate(p, insts);
    CHECK(rep.passed);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].plan_length == 2 + 1 + 4 + 1);
    CHECK(rep.rows[1].instance == "b");

    Program broken(p.size(), p.pointers_ptr());
    for (int i = 0; i + 1 < p.size(); ++i)
        if (i != 7)
            broken.set_line(i, p[i]);
    broken.set_line(7, Instruction::inc(0));
    ValidationReport bad = validate(broken, insts);
    CHECK_FALSE(bad.passed);
    CHECK(bad.first_failed == 0);
}
