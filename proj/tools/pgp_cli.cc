#include "pgp/bench.h"
#include "pgp/heuristics.h"
#include "pgp/landmarks.h"
#include "pgp/pddl.h"
#include "pgp/search.h"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

using namespace std;
using namespace pgp;

namespace {
struct GenArgs {
    string domain;
    uint64_t seed = bench::kDefaultSeed;
    string out = "data";
};

struct BenchArgs {
    string table;
    string csv;
    string data = "data";
    double time_budget = 3600;
    uint64_t mem_budget = 8192;
    vector<string> domains;
    vector<string> configs;
    unsigned threads = 1;
    string lm_cache;
};

struct ValidateArgs {
    string program;
    string instances;
    string domain;
    bool verbose = false;
};

struct SynthArgs {
    string domain;
    string instances;
    int lines = 0;
    string pointers;
    string search = "pgp";
    string eval = "lm";
    bool tie_f1 = false;
    bool enable_tests = false;
    unsigned threads = 1;
    double time_budget = 3600;
    uint64_t mem_budget = 8192;
    string trace;
    string out;
    string lm_cache;
    bool check_duplicates = false;
};

struct LandmarkArgs {
    string domain;
    string problem;
    string pointers;
    string dot;
};

struct FixtureArgs {
    string data;
    uint64_t seed = bench::kDefaultSeed;
    vector<string> domains;
};

int run_gen(const GenArgs &a) {
    vector<string> names;
    if (a.domain == "all")
        for (const auto &r : bench::recipes())
            names.push_back(r.name);
    else
        names.push_back(a.domain);
    for (const string &name : names) {
        const bench::DomainRecipe &recipe = bench::find_recipe(name);
        bench::GeneratedSet set = bench::generate(recipe, a.seed, &cerr);
        filesystem::path dir = filesystem::path(a.out) / name;
        bench::write_set(set, dir);
        cout << name << ": " << set.training.size() << " training, " << set.validation.size()
             << " validation instances in " << dir.string() << "\n";
    }
    return 0;
}

int run_bench(const BenchArgs &a) {
    bench::TableOptions options;
    if (a.table == "table1")
        options.table = 1;
    else if (a.table == "table2")
        options.table = 2;
    else if (a.table == "table3")
        options.table = 3;
    else
        throw invalid_argument("expected table1, table2 or table3");
    options.data_dir = a.data;
    options.time_budget = a.time_budget;
    options.memory_budget_mb = a.mem_budget;
    options.domains = a.domains;
    options.configs = a.configs;
    options.threads = a.threads;
    if (!a.lm_cache.empty())
        options.landmark_cache = a.lm_cache;
    options.progress = &cerr;
    if (a.csv.empty()) {
        bench::run_table(options, &cout);
    } else {
        ofstream out(a.csv);
        if (!out)
            throw runtime_error("cannot write " + a.csv);
        bench::run_table(options, &out);
    }
    return 0;
}

// Instances of a directory; a generated set (training/ + validation/) counts as one.
vector<shared_ptr<const Instance>> collect_instances(const filesystem::path &dir,
                                                     const shared_ptr<const DomainModel> &domain) {
    if (filesystem::is_directory(dir / "training")) {
        auto all = bench::load_instances(dir / "training", domain);
        if (filesystem::is_directory(dir / "validation")) {
            auto more = bench::load_instances(dir / "validation", domain);
            all.insert(all.end(), more.begin(), more.end());
        }
        return all;
    }
    return bench::load_instances(dir, domain);
}

// Synthesis uses only the training half of a generated set.
vector<shared_ptr<const Instance>> collect_training(const filesystem::path &dir,
                                                   const shared_ptr<const DomainModel> &domain) {
    if (filesystem::is_directory(dir / "training"))
        return bench::load_instances(dir / "training", domain);
    return bench::load_instances(dir, domain);
}

filesystem::path find_domain_file(const filesystem::path &dir, const string &given) {
    if (!given.empty())
        return given;
    for (filesystem::path p : {dir / "domain.pddl", dir.parent_path() / "domain.pddl"})
        if (filesystem::exists(p))
            return p;
    throw runtime_error("no domain.pddl next to " + dir.string() + " (use --domain)");
}

int run_validate(const ValidateArgs &a) {
    filesystem::path dir = a.instances;
    auto domain = load_domain(find_domain_file(dir, a.domain));
    Program program = parse_program(read_text_file(a.program), *domain);
    check_program(*domain, program);
    auto instances = collect_instances(dir, domain);
    if (instances.empty())
        throw runtime_error("no instances found in " + dir.string());
    ValidationReport report = validate(program, instances);
    size_t solved = 0;
    for (const ValidationRow &row : report.rows) {
        solved += row.outcome == OutcomeKind::Solved;
        if (a.verbose || row.outcome != OutcomeKind::Solved)
            cout << left << setw(28) << row.instance << " " << setw(16)
                 << outcome_name(row.outcome) << " plan " << row.plan_length << " steps "
                 << row.steps << "\n";
    }
    cout << (report.passed ? "PASS" : "FAIL") << ": " << solved << "/" << report.rows.size()
         << " instances solved\n";
    return report.passed ? 0 : 1;
}

vector<Feature> features_of(const string &eval, bool tie_f1) {
    vector<Feature> f;
    if (eval == "gc")
        f.push_back(Feature::GoalCount);
    else if (eval == "lm")
        f.push_back(Feature::Landmarks);
    else if (eval == "lm-norm")
        f.push_back(Feature::LandmarksNormalized);
    else if (eval == "zero")
        f.push_back(Feature::Zero);
    else
        throw invalid_argument("--eval must be gc, lm, lm-norm or zero");
    if (tie_f1)
        f.push_back(Feature::Gotos);
    return f;
}

int run_synth(const SynthArgs &a) {
    auto domain = load_domain(a.domain);
    GPProblem gp;
    gp.domain = domain;
    gp.instances = collect_training(a.instances, domain);
    gp.pointers = bench::parse_pointer_spec(*domain, a.pointers);
    gp.num_lines = a.lines;

    SearchConfig config;
    if (a.search == "bfs")
        config.algorithm = SearchAlgorithm::BFS;
    else if (a.search == "pgp")
        config.algorithm = SearchAlgorithm::PGP;
    else
        throw invalid_argument("--search must be bfs or pgp");
    config.features = features_of(a.eval, a.tie_f1);
    config.enable_tests = a.enable_tests;
    config.threads = a.threads;
    config.time_budget = a.time_budget;
    config.memory_budget_mb = a.mem_budget;
    config.check_duplicates = a.check_duplicates;
    if (!a.lm_cache.empty())
        config.landmark_cache = a.lm_cache;
    ofstream trace;
    if (!a.trace.empty()) {
        trace.open(a.trace);
        if (!trace)
            throw runtime_error("cannot write " + a.trace);
        config.trace = &trace;
    }

    SearchResult r = search(gp, config);
    const SearchMetrics &m = r.metrics;
    cout << "status: " << status_name(r.status) << "\n";
    if (r.solution) {
        string text = format_program(*domain, *r.solution);
        cout << text;
        if (!a.out.empty()) {
            ofstream out(a.out);
            out << text;
        }
    }
    cout << fixed << setprecision(2) << "T " << m.seconds << " s (preprocessing "
         << m.preprocessing_seconds << " s)  M " << setprecision(1) << m.peak_mb << " MB\n"
         << "Ex " << m.expanded << "  Ev " << m.evaluated << "  Dead " << m.dead_ends << "  SE "
         << m.states_evaluated << "  active " << m.active_size << "/" << gp.instances.size()
         << "\n";
    if (a.check_duplicates)
        cout << "duplicates " << m.duplicates << "\n";
    return r.status == SearchStatus::Solved ? 0 : 2;
}

int run_landmarks(const LandmarkArgs &a) {
    auto domain = load_domain(a.domain);
    Instance instance = load_problem(a.problem, domain);
    shared_ptr<const PointerSet> pointers;
    if (!a.pointers.empty())
        pointers = bench::parse_pointer_spec(*domain, a.pointers);
    GroundTask task = ground_universe(instance);
    LandmarkGraph graph = build_landmark_graph(task, pointers.get());
    cout << graph.count(LandmarkKind::Fact) << " fact, "
         << graph.count(LandmarkKind::Disjunctive) << " disjunctive, "
         << graph.count(LandmarkKind::Pointer) << " pointer landmarks; "
         << graph.orderings.size() << " orderings\n";
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        const LandmarkNode &n = graph.nodes[i];
        cout << "  " << i << ": " << node_label(n, instance, pointers.get());
        if (n.goal)
            cout << " [goal]";
        if (n.initially_true)
            cout << " [init]";
        cout << "\n";
    }
    for (const Ordering &o : graph.orderings)
        cout << "  " << o.from << (o.kind == OrderingKind::Natural ? " ->nat " : " ->gn ")
             << o.to << "\n";
    for (const string &note : graph.notes)
        cout << "  note: " << note << "\n";
    if (!a.dot.empty()) {
        ofstream out(a.dot);
        if (!out)
            throw runtime_error("cannot write " + a.dot);
        out << to_dot(graph, instance, pointers.get());
    }
    return 0;
}

int run_fixtures(const FixtureArgs &a) {
    vector<string> names = a.domains;
    if (names.empty())
        for (const auto &r : bench::recipes())
            names.push_back(r.name);
    bool ok = true;
    for (const string &name : names) {
        const bench::DomainRecipe &recipe = bench::find_recipe(name);
        bench::LoadedSet set = a.data.empty()
                                   ? bench::materialize(bench::generate(recipe, a.seed))
                                   : bench::load_set(filesystem::path(a.data) / name);
        bench::FixtureReport rep = bench::fixture_check(recipe, set);
        cout << left << setw(10) << name << " " << (rep.passed ? "PASS" : "FAIL") << " "
             << rep.solved << "/" << rep.instances;
        if (!rep.passed)
            cout << " first failure " << rep.first_failed << " (" << outcome_name(rep.failed_kind)
                 << ")";
        cout << "\n";
        ok = ok && rep.passed;
    }
    return ok ? 0 : 1;
}
}

int main(int argc, char **argv) {
    CLI::App app{"Generalized planning program synthesis"};
    app.require_subcommand(1);

    GenArgs gen;
    auto *gen_cmd = app.add_subcommand("gen", "Generate training and validation instances");
    gen_cmd->add_option("domain", gen.domain, "Benchmark domain or 'all'")->required();
    gen_cmd->add_option("--seed", gen.seed, "Random seed");
    gen_cmd->add_option("--out", gen.out, "Output root; files go to <out>/<domain>");

    BenchArgs bench_args;
    auto *bench_cmd = app.add_subcommand("bench", "Reproduce a results table as CSV");
    bench_cmd->add_option("table", bench_args.table, "table1, table2 or table3")->required();
    bench_cmd->add_option("--csv", bench_args.csv, "CSV output file (default stdout)");
    bench_cmd->add_option("--data", bench_args.data, "Root of generated instances");
    bench_cmd->add_option("--time-budget", bench_args.time_budget, "Seconds per cell");
    bench_cmd->add_option("--mem-budget", bench_args.mem_budget, "MB of resident memory per cell");
    bench_cmd->add_option("--domains", bench_args.domains, "Subset of domains")->delimiter(',');
    bench_cmd->add_option("--configs", bench_args.configs, "Subset of configurations")
        ->delimiter(',');
    bench_cmd->add_option("--threads", bench_args.threads, "Evaluation threads");
    bench_cmd->add_option("--lm-cache", bench_args.lm_cache, "Landmark graph cache directory");

    ValidateArgs val;
    auto *val_cmd = app.add_subcommand("validate", "Run a program on a set of instances");
    val_cmd->add_option("program", val.program, "Program file")->required();
    val_cmd->add_option("instances", val.instances, "Instance directory")->required();
    val_cmd->add_option("--domain", val.domain, "Domain file (default: domain.pddl nearby)");
    val_cmd->add_flag("-v,--verbose", val.verbose, "Print every instance");

    SynthArgs syn;
    auto *syn_cmd = app.add_subcommand("synth", "Search for a planning program");
    syn_cmd->add_option("domain", syn.domain, "Domain file")->required();
    syn_cmd->add_option("instances", syn.instances, "Instance directory")->required();
    syn_cmd->add_option("--lines", syn.lines, "Program lines n")->required();
    syn_cmd->add_option("--pointers", syn.pointers, "type=count,...")->required();
    syn_cmd->add_option("--search", syn.search, "bfs or pgp");
    syn_cmd->add_option("--eval", syn.eval, "gc, lm, lm-norm or zero");
    syn_cmd->add_flag("--tie-f1", syn.tie_f1, "Break ties by the number of gotos");
    syn_cmd->add_flag("--enable-tests", syn.enable_tests, "Enumerate test instructions");
    syn_cmd->add_option("--threads", syn.threads, "Evaluation threads");
    syn_cmd->add_option("--time-budget", syn.time_budget, "Seconds");
    syn_cmd->add_option("--mem-budget", syn.mem_budget, "MB of resident memory");
    syn_cmd->add_option("--trace", syn.trace, "Write the expansion trace here");
    syn_cmd->add_option("--out", syn.out, "Write the solution program here");
    syn_cmd->add_option("--lm-cache", syn.lm_cache, "Landmark graph cache directory");
    syn_cmd->add_flag("--check-duplicates", syn.check_duplicates,
                      "Hash every generated program and report repeats");

    LandmarkArgs lm;
    auto *lm_cmd = app.add_subcommand("landmarks", "Print the landmark graph of a problem");
    lm_cmd->add_option("domain", lm.domain, "Domain file")->required();
    lm_cmd->add_option("problem", lm.problem, "Problem file")->required();
    lm_cmd->add_option("--pointers", lm.pointers, "type=count,... adds pointer landmarks");
    lm_cmd->add_option("--dot", lm.dot, "Write Graphviz output here");

    FixtureArgs fix;
    auto *fix_cmd = app.add_subcommand("fixtures", "Validate the bundled solution programs");
    fix_cmd->add_option("--data", fix.data, "Root of generated instances (default: in memory)");
    fix_cmd->add_option("--seed", fix.seed, "Seed for in-memory generation");
    fix_cmd->add_option("--domains", fix.domains, "Subset of domains")->delimiter(',');

    CLI11_PARSE(app, argc, argv);
    try {
        if (*gen_cmd)
            return run_gen(gen);
        if (*bench_cmd)
            return run_bench(bench_args);
        if (*val_cmd)
            return run_validate(val);
        if (*syn_cmd)
            return run_synth(syn);
        if (*lm_cmd)
            return run_landmarks(lm);
        if (*fix_cmd)
            return run_fixtures(fix);
    } catch (const exception &e) {
        cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
