#ifndef PGP_BENCH_H
#define PGP_BENCH_H

#include "search.h"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pgp::bench {
constexpr std::uint64_t kDefaultSeed = 2022;

struct DomainRecipe {
    std::string name;
    int train_lo = 0, train_hi = 0, train_count = 0;
    int valid_lo = 0, valid_hi = 0;
    int lines = 0;                                     // synthesis bound n
    std::vector<std::pair<std::string, int>> pointers; // per-type counts, |Z| = sum
    bool enable_tests = false;

    int num_pointers() const;
    // Size parameter of the k-th training instance.
    int train_size(int k) const;
};

const std::vector<DomainRecipe> &recipes();
// Throws std::invalid_argument listing the known domains.
const DomainRecipe &find_recipe(std::string_view name);

std::string_view domain_text(std::string_view name);
// Published solution program (with a pointers header) for the domain.
std::string_view fixture_text(std::string_view name);

// One PDDL problem of the given size.
std::string generate_problem(const DomainRecipe &recipe, int size, std::mt19937_64 &rng,
                             const std::string &problem_name);

struct GeneratedFile {
    std::string name;
    std::string text;
};

struct GeneratedSet {
    std::string domain_name;
    std::string domain;
    std::vector<GeneratedFile> training, validation;
};

// Warns on `warnings` when a size falls outside the documented ranges.
GeneratedSet generate(const DomainRecipe &recipe, std::uint64_t seed,
                      std::ostream *warnings = nullptr);
// <dir>/domain.pddl, <dir>/training/*.pddl, <dir>/validation/*.pddl
void write_set(const GeneratedSet &set, const std::filesystem::path &dir);

struct LoadedSet {
    std::shared_ptr<const DomainModel> domain;
    std::vector<std::shared_ptr<const Instance>> training, validation;
};

LoadedSet materialize(const GeneratedSet &set);
// Fails with a message naming the generate step when files are missing.
LoadedSet load_set(const std::filesystem::path &dir);
// Every *.pddl in `dir` (excluding domain.pddl), in file-name order.
std::vector<std::shared_ptr<const Instance>> load_instances(
    const std::filesystem::path &dir, const std::shared_ptr<const DomainModel> &domain);

// "location=2,ball=1"
std::shared_ptr<const PointerSet> parse_pointer_spec(const DomainModel &domain,
                                                     std::string_view spec);
std::shared_ptr<const PointerSet> recipe_pointers(const DomainRecipe &recipe,
                                                  const DomainModel &domain);
GPProblem training_problem(const DomainRecipe &recipe, const LoadedSet &set);

struct FixtureReport {
    std::string domain;
    bool passed = false;
    std::size_t instances = 0;
    std::size_t solved = 0;
    std::string first_failed;
    OutcomeKind failed_kind = OutcomeKind::Solved;
};

// Validates a program (the bundled fixture by default) on training + validation.
FixtureReport fixture_check(const DomainRecipe &recipe, const LoadedSet &set,
                            std::optional<std::string_view> program_text = std::nullopt);

struct TableConfig {
    std::string label;  // e.g. "PGP(f_LM)"
    SearchAlgorithm algorithm = SearchAlgorithm::PGP;
    std::vector<Feature> features;
};
std::vector<TableConfig> table_configs(int table);

struct TableOptions {
    int table = 1;
    std::vector<std::string> domains;  // empty: all eight
    std::vector<std::string> configs;  // empty: all of the table
    std::filesystem::path data_dir = "data";
    double time_budget = 3600.0;
    std::uint64_t memory_budget_mb = 8192;
    unsigned threads = 1;
    std::optional<std::filesystem::path> landmark_cache;
    std::ostream *progress = nullptr;
};

struct TableRow {
    int table = 1;
    std::string domain;
    std::string config;
    int lines = 0;
    int pointers = 0;
    SearchResult result;
};

std::vector<TableRow> run_table(const TableOptions &options,
                                std::ostream *csv = nullptr);
void write_csv_header(std::ostream &out);
void write_csv_row(std::ostream &out, const TableRow &row);
}

#endif
