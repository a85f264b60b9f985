#ifndef PGP_SEARCH_H
#define PGP_SEARCH_H

#include "heuristics.h"
#include "program.h"
#include "vm.h"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pgp {
constexpr int kMaxLines = 32;

struct GPProblem {
    std::shared_ptr<const DomainModel> domain;
    std::vector<std::shared_ptr<const Instance>> instances;
    std::shared_ptr<const PointerSet> pointers;
    int num_lines = 0;

    // Throws std::invalid_argument on an empty instance list or a mixed domain.
    void check() const;
};

enum class SearchAlgorithm { BFS, PGP };

struct SearchConfig {
    SearchAlgorithm algorithm = SearchAlgorithm::PGP;
    std::vector<Feature> features{Feature::Landmarks};
    bool enable_tests = false;
    double time_budget = 3600.0;                 // seconds
    std::uint64_t memory_budget_mb = 8192;       // resident set
    unsigned threads = 1;
    // Hash every generated program and count repeats (slow; for checks).
    bool check_duplicates = false;
    std::ostream *trace = nullptr;
    std::optional<std::filesystem::path> landmark_cache;
};

enum class SearchStatus { Solved, Unsolvable, TimeExceeded, MemoryExceeded };
const char *status_name(SearchStatus s);

struct SearchMetrics {
    double seconds = 0;
    double peak_mb = 0;
    std::uint64_t expanded = 0;
    std::uint64_t evaluated = 0;
    std::uint64_t dead_ends = 0;
    std::uint64_t states_evaluated = 0;
    std::uint64_t reevaluated = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t max_depth = 0;
    std::size_t active_size = 0;
    double preprocessing_seconds = 0;
};

struct SearchResult {
    SearchStatus status = SearchStatus::Unsolvable;
    std::optional<Program> solution;
    SearchMetrics metrics;
};

/*
  Per-problem evaluation state: interpreters and (optionally) landmark
  graphs for every instance, plus the instruction alphabet for expansion.
*/
class SearchSpace {
public:
    SearchSpace(const GPProblem &problem, bool with_landmarks, bool enable_tests,
                const std::optional<std::filesystem::path> &landmark_cache = std::nullopt);

    const GPProblem &problem() const { return problem_; }
    int num_lines() const { return problem_.num_lines; }
    std::span<const Instruction> alphabet() const { return alphabet_; }
    const InstanceContext &context(int i) const { return *contexts_[i]; }
    std::size_t num_instances() const { return contexts_.size(); }

    // Instructions that may be placed on `line`, in expansion order.
    std::vector<Instruction> candidates(int line) const;

private:
    GPProblem problem_;
    std::vector<std::unique_ptr<InstanceContext>> contexts_;
    std::vector<Instruction> alphabet_;  // non-goto candidates
};

// Children of `program`: the first undefined line filled with every candidate.
std::vector<Program> expand(const Program &program, const SearchSpace &space);

enum class Classification { SolvesAll, DeadEnd, Pending };
struct ClassifyResult {
    Classification kind = Classification::Pending;
    int failed_instance = -1;
};
ClassifyResult classify(const Program &program, const SearchSpace &space,
                        std::span<const int> instances);

SearchResult search(const GPProblem &problem, const SearchConfig &config);
SearchResult search(const SearchSpace &space, const SearchConfig &config);

struct ValidationRow {
    std::string instance;
    OutcomeKind outcome = OutcomeKind::PendingUndefined;
    std::size_t plan_length = 0;
    std::uint64_t steps = 0;
};
struct ValidationReport {
    bool passed = false;
    int first_failed = -1;
    std::vector<ValidationRow> rows;
};
// Runs every instance (no early exit) and records plan lengths.
ValidationReport validate(const Program &program,
                          std::span<const std::shared_ptr<const Instance>> instances,
                          bool stop_at_first_failure = false);

double resident_mb();
}

#endif
