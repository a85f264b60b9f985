#ifndef PGP_TESTS_SUPPORT_H
#define PGP_TESTS_SUPPORT_H

#include "pgp/bench.h"
#include "pgp/pddl.h"
#include "pgp/program.h"
#include "pgp/search.h"
#include "pgp/strips.h"
#include "pgp/vm.h"

#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace pgp::testing {
inline std::shared_ptr<const DomainModel> domain_of(const std::string &name) {
    return parse_domain(bench::domain_text(name), name);
}

inline std::shared_ptr<const DomainModel> lock_domain() {
    static const std::shared_ptr<const DomainModel> domain = domain_of("lock");
    return domain;
}

// Corridor of `length` cells, lock at p0, key at the far end.
inline std::string lock_problem_text(int length, int agent, const std::string &name = "t") {
    std::string s = "(define (problem " + name + ") (:domain lock) (:objects";
    for (int i = 0; i < length; ++i)
        s += " p" + std::to_string(i);
    s += " - location) (:init";
    for (int i = 0; i + 1 < length; ++i) {
        s += " (adjacent p" + std::to_string(i) + " p" + std::to_string(i + 1) + ")";
        s += " (adjacent p" + std::to_string(i + 1) + " p" + std::to_string(i) + ")";
    }
    s += " (lock-at p0) (key-at p" + std::to_string(length - 1) + ") (agent-at p" +
         std::to_string(agent) + ")) (:goal (unlocked)))";
    return s;
}

inline std::shared_ptr<const Instance> lock_instance(int length, int agent,
                                                     const std::string &name = "t") {
    return std::make_shared<const Instance>(
        parse_problem(lock_problem_text(length, agent, name), lock_domain()));
}

inline std::shared_ptr<const PointerSet> pointers_of(const DomainModel &domain,
                                                     const std::string &type, int count) {
    std::vector<std::pair<TypeId, int>> counts{{*domain.find_type(type), count}};
    return make_pointers(domain, counts);
}

inline Program fixture_program(const std::string &name, const DomainModel &domain) {
    return parse_program(bench::fixture_text(name), domain);
}

inline std::vector<std::shared_ptr<const Instance>> training_instances(
    const std::string &name, const std::shared_ptr<const DomainModel> &domain) {
    bench::GeneratedSet set = bench::generate(bench::find_recipe(name), bench::kDefaultSeed);
    std::vector<std::shared_ptr<const Instance>> out;
    for (const bench::GeneratedFile &f : set.training)
        out.push_back(std::make_shared<const Instance>(parse_problem(f.text, domain, f.name)));
    return out;
}

// Uniformly random partial or complete program built from legal candidates.
inline Program random_program(const SearchSpace &space, std::mt19937_64 &rng,
                              double undefined_prob = 0.0) {
    Program p(space.num_lines(), space.problem().pointers);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int line = 0; line + 1 < space.num_lines(); ++line) {
        if (coin(rng) < undefined_prob)
            continue;
        std::vector<Instruction> c = space.candidates(line);
        p.set_line(line, c[rng() % c.size()]);
    }
    return p;
}

inline std::set<std::string> atom_names(const Instance &instance, const State &state) {
    std::set<std::string> out;
    for (AtomId a : state.atoms())
        out.insert(instance.atom_name(a));
    return out;
}
}

#endif
