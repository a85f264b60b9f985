#include "pgp/bench.h"

#include "pgp/pddl.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

using namespace std;

namespace pgp::bench {
int DomainRecipe::num_pointers() const {
    int total = 0;
    for (const auto &[_, count] : pointers)
        total += count;
    return total;
}

int DomainRecipe::train_size(int k) const {
    const int span = train_hi - train_lo + 1;
    if (train_count == span)
        return train_lo + k;
    return train_lo + k * span / train_count;
}

const vector<DomainRecipe> &recipes() {
    static const vector<DomainRecipe> all = {
        {"baking", 1, 10, 10, 11, 60, 13,
         {{"egg", 1}, {"flour", 1}, {"pan", 1}, {"oven", 1}, {"cake", 1}, {"soap", 1}}, false},
        {"corridor", 5, 14, 10, 12, 61, 11, {{"location", 2}}, true},
        {"gripper", 2, 11, 10, 12, 61, 8, {{"room", 2}, {"ball", 1}, {"gripper", 1}}, false},
        {"intrusion", 1, 10, 10, 11, 60, 9, {{"host", 1}}, false},
        {"lock", 5, 14, 10, 12, 61, 12, {{"location", 2}}, false},
        {"ontable", 10, 15, 12, 16, 65, 11, {{"block", 3}}, false},
        {"spanner", 1, 10, 10, 12, 61, 12,
         {{"location", 2}, {"spanner", 1}, {"nut", 1}, {"man", 1}}, false},
        {"visitall", 2, 11, 10, 12, 61, 7, {{"row", 1}, {"col", 1}}, false},
    };
    return all;
}

const DomainRecipe &find_recipe(string_view name) {
    for (const DomainRecipe &r : recipes())
        if (r.name == name)
            return r;
    string known;
    for (const DomainRecipe &r : recipes())
        known += (known.empty() ? "" : ", ") + r.name;
    throw invalid_argument("unknown benchmark domain '" + string(name) + "' (known: " + known +
                           ")");
}

namespace {
size_t draw(mt19937_64 &rng, size_t bound) {
    return static_cast<size_t>(rng() % bound);
}

string seq_names(const string &prefix, int count, int first = 0) {
    string out;
    for (int i = 0; i < count; ++i)
        out += (i ? " " : "") + prefix + to_string(first + i);
    return out;
}

// Collects :objects / :init / :goal text for one problem.
struct ProblemText {
    string objects;
    vector<string> init, goal;

    void add_objects(const string &names, const string &type) {
        objects += "    " + names + " - " + type + "\n";
    }
    string str(const string &name, const string &domain) const {
        ostringstream out;
        out << "(define (problem " << name << ")\n  (:domain " << domain << ")\n";
        out << "  (:objects\n" << objects << "  )\n  (:init\n";
        for (const string &a : init)
            out << "    " << a << "\n";
        out << "  )\n  (:goal (and\n";
        for (const string &g : goal)
            out << "    " << g << "\n";
        out << "  ))\n)\n";
        return out.str();
    }
};

void corridor_links(ProblemText &p, const string &pred, int length, bool both_ways) {
    for (int i = 0; i + 1 < length; ++i) {
        string a = "p" + to_string(i), b = "p" + to_string(i + 1);
        p.init.push_back("(" + pred + " " + a + " " + b + ")");
        if (both_ways)
            p.init.push_back("(" + pred + " " + b + " " + a + ")");
    }
}

ProblemText make_lock(int n, mt19937_64 &rng) {
    ProblemText p;
    p.add_objects(seq_names("p", n), "location");
    corridor_links(p, "adjacent", n, true);
    int agent = n > 2 ? 1 + static_cast<int>(draw(rng, n - 2)) : 0;
    p.init.push_back("(lock-at p0)");
    p.init.push_back("(key-at p" + to_string(n - 1) + ")");
    p.init.push_back("(agent-at p" + to_string(agent) + ")");
    p.goal.push_back("(unlocked)");
    return p;
}

ProblemText make_corridor(int n, mt19937_64 &rng) {
    ProblemText p;
    p.add_objects(seq_names("p", n), "location");
    corridor_links(p, "adjacent", n, true);
    int start = n > 2 ? 1 + static_cast<int>(draw(rng, n - 2)) : 0;
    int goal = static_cast<int>(draw(rng, n - 1));
    if (goal >= start)
        ++goal;
    p.init.push_back("(at p" + to_string(start) + ")");
    p.init.push_back("(goal-at p" + to_string(goal) + ")");
    p.goal.push_back("(at p" + to_string(goal) + ")");
    return p;
}

ProblemText make_gripper(int n, mt19937_64 &) {
    ProblemText p;
    p.add_objects("rooma roomb", "room");
    p.add_objects(seq_names("ball", n, 1), "ball");
    p.add_objects("left right", "gripper");
    p.init = {"(at-robby rooma)", "(free left)", "(free right)"};
    for (int i = 1; i <= n; ++i) {
        p.init.push_back("(at ball" + to_string(i) + " rooma)");
        p.goal.push_back("(at ball" + to_string(i) + " roomb)");
    }
    return p;
}

ProblemText make_intrusion(int n, mt19937_64 &) {
    ProblemText p;
    p.add_objects(seq_names("host", n, 1), "host");
    for (int i = 1; i <= n; ++i)
        p.goal.push_back("(data-stolen-from host" + to_string(i) + ")");
    return p;
}

ProblemText make_baking(int n, mt19937_64 &) {
    ProblemText p;
    p.add_objects(seq_names("egg", n, 1), "egg");
    p.add_objects(seq_names("flour", n, 1), "flour");
    p.add_objects("pan1", "pan");
    p.add_objects("oven1", "oven");
    p.add_objects(seq_names("cake", n, 1), "cake");
    p.add_objects(seq_names("soap", n, 1), "soap");
    p.init = {"(pan-no-egg pan1)", "(pan-no-flour pan1)", "(pan-out pan1)", "(oven-free oven1)"};
    for (int i = 1; i <= n; ++i) {
        string k = to_string(i);
        p.init.push_back("(egg-unused egg" + k + ")");
        p.init.push_back("(flour-unused flour" + k + ")");
        p.init.push_back("(unbaked cake" + k + ")");
        p.init.push_back("(soap-unused soap" + k + ")");
        p.goal.push_back("(baked cake" + k + ")");
    }
    return p;
}

// Random towers: blocks in shuffled order, each starting a new tower or
// going on top of the previous one with equal chance.
ProblemText make_ontable(int n, mt19937_64 &rng) {
    ProblemText p;
    p.add_objects(seq_names("b", n, 1), "block");
    vector<int> order(n);
    iota(order.begin(), order.end(), 1);
    for (int i = n - 1; i > 0; --i)
        swap(order[i], order[draw(rng, i + 1)]);
    auto name = [](int b) { return "b" + to_string(b); };
    vector<bool> covered(n + 1, false);
    p.init.push_back("(handempty)");
    for (int i = 0; i < n; ++i) {
        if (i == 0 || draw(rng, 2) == 0) {
            p.init.push_back("(ontable " + name(order[i]) + ")");
        } else {
            p.init.push_back("(on " + name(order[i]) + " " + name(order[i - 1]) + ")");
            covered[order[i - 1]] = true;
        }
    }
    for (int b = 1; b <= n; ++b) {
        if (!covered[b])
            p.init.push_back("(clear " + name(b) + ")");
        p.goal.push_back("(ontable " + name(b) + ")");
    }
    return p;
}

ProblemText make_spanner(int n, mt19937_64 &rng) {
    ProblemText p;
    const int tools = 2 * n;
    p.add_objects(seq_names("p", n), "location");
    p.add_objects("bob", "man");
    p.add_objects(seq_names("spanner", tools, 1), "spanner");
    p.add_objects(seq_names("nut", tools, 1), "nut");
    corridor_links(p, "link", n, false);
    p.init.push_back("(at bob p0)");
    const string gate = "p" + to_string(n - 1);
    for (int i = 1; i <= tools; ++i) {
        string k = to_string(i);
        p.init.push_back("(at spanner" + k + " p" + to_string(draw(rng, n)) + ")");
        p.init.push_back("(useable spanner" + k + ")");
    }
    for (int i = 1; i <= tools; ++i) {
        string k = to_string(i);
        p.init.push_back("(at nut" + k + " " + gate + ")");
        p.init.push_back("(loose nut" + k + ")");
        p.goal.push_back("(tightened nut" + k + ")");
    }
    return p;
}

ProblemText make_visitall(int n, mt19937_64 &) {
    ProblemText p;
    p.add_objects(seq_names("r", n), "row");
    p.add_objects(seq_names("c", n), "col");
    p.init.push_back("(visited r0 c0)");
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            p.goal.push_back("(visited r" + to_string(r) + " c" + to_string(c) + ")");
    return p;
}

string file_name(int k) {
    ostringstream out;
    out << "p" << setw(2) << setfill('0') << k << ".pddl";
    return out.str();
}

void write_file(const filesystem::path &path, const string &text) {
    ofstream out(path, ios::binary);
    if (!out)
        throw runtime_error("cannot write " + path.string());
    out << text;
    if (!out)
        throw runtime_error("error writing " + path.string());
}
}

string generate_problem(const DomainRecipe &recipe, int size, mt19937_64 &rng,
                        const string &problem_name) {
    if (size < 1)
        throw invalid_argument("instance size must be positive");
    ProblemText p;
    const string &d = recipe.name;
    if (d == "lock")
        p = make_lock(size, rng);
    else if (d == "corridor")
        p = make_corridor(max(size, 2), rng);
    else if (d == "gripper")
        p = make_gripper(size, rng);
    else if (d == "intrusion")
        p = make_intrusion(size, rng);
    else if (d == "baking")
        p = make_baking(size, rng);
    else if (d == "ontable")
        p = make_ontable(size, rng);
    else if (d == "spanner")
        p = make_spanner(size, rng);
    else if (d == "visitall")
        p = make_visitall(size, rng);
    else
        throw invalid_argument("no generator for domain '" + d + "'");
    return p.str(problem_name, d);
}

GeneratedSet generate(const DomainRecipe &recipe, uint64_t seed, ostream *warnings) {
    GeneratedSet set;
    set.domain_name = recipe.name;
    set.domain = string(domain_text(recipe.name));
    if (set.domain.front() == '\n')
        set.domain.erase(0, 1);
    mt19937_64 rng(seed);
    auto warn_range = [&](int lo, int hi, int doc_lo, int doc_hi) {
        if (warnings && (lo < doc_lo || hi > doc_hi))
            *warnings << "warning: " << recipe.name << " sizes " << lo << ".." << hi
                      << " fall outside " << doc_lo << ".." << doc_hi << "\n";
    };
    const DomainRecipe &doc = find_recipe(recipe.name);
    warn_range(recipe.train_lo, recipe.train_hi, doc.train_lo, doc.train_hi);
    warn_range(recipe.valid_lo, recipe.valid_hi, doc.valid_lo, doc.valid_hi);

    for (int k = 0; k < recipe.train_count; ++k) {
        ostringstream name;
        name << recipe.name << "-train-" << setw(2) << setfill('0') << k + 1;
        set.training.push_back(
            {file_name(k + 1), generate_problem(recipe, recipe.train_size(k), rng, name.str())});
    }
    for (int size = recipe.valid_lo, k = 1; size <= recipe.valid_hi; ++size, ++k) {
        ostringstream name;
        name << recipe.name << "-valid-" << setw(2) << setfill('0') << k;
        set.validation.push_back({file_name(k), generate_problem(recipe, size, rng, name.str())});
    }
    return set;
}

void write_set(const GeneratedSet &set, const filesystem::path &dir) {
    filesystem::create_directories(dir / "training");
    filesystem::create_directories(dir / "validation");
    write_file(dir / "domain.pddl", set.domain);
    for (const GeneratedFile &f : set.training)
        write_file(dir / "training" / f.name, f.text);
    for (const GeneratedFile &f : set.validation)
        write_file(dir / "validation" / f.name, f.text);
}

LoadedSet materialize(const GeneratedSet &set) {
    LoadedSet loaded;
    loaded.domain = parse_domain(set.domain, set.domain_name + "/domain.pddl");
    for (const GeneratedFile &f : set.training)
        loaded.training.push_back(
            make_shared<Instance>(parse_problem(f.text, loaded.domain, "training/" + f.name)));
    for (const GeneratedFile &f : set.validation)
        loaded.validation.push_back(
            make_shared<Instance>(parse_problem(f.text, loaded.domain, "validation/" + f.name)));
    return loaded;
}

vector<shared_ptr<const Instance>> load_instances(const filesystem::path &dir,
                                                  const shared_ptr<const DomainModel> &domain) {
    if (!filesystem::is_directory(dir))
        throw runtime_error("instance directory " + dir.string() + " does not exist");
    vector<filesystem::path> files;
    for (const auto &e : filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".pddl" &&
            e.path().filename() != "domain.pddl")
            files.push_back(e.path());
    sort(files.begin(), files.end());
    vector<shared_ptr<const Instance>> result;
    for (const auto &f : files)
        result.push_back(make_shared<Instance>(load_problem(f, domain)));
    return result;
}

LoadedSet load_set(const filesystem::path &dir) {
    const string name = dir.filename().string();
    if (!filesystem::exists(dir / "domain.pddl") || !filesystem::is_directory(dir / "training") ||
        !filesystem::is_directory(dir / "validation"))
        throw runtime_error("no generated instances in " + dir.string() + "; run `pgp gen " +
                            (name.empty() ? string("<domain>") : name) + " --out " +
                            dir.parent_path().string() + "` first");
    LoadedSet loaded;
    loaded.domain = load_domain(dir / "domain.pddl");
    loaded.training = load_instances(dir / "training", loaded.domain);
    loaded.validation = load_instances(dir / "validation", loaded.domain);
    if (loaded.training.empty())
        throw runtime_error("no training instances in " + (dir / "training").string() +
                            "; run `pgp gen " + name + "` first");
    return loaded;
}

shared_ptr<const PointerSet> parse_pointer_spec(const DomainModel &domain, string_view spec) {
    vector<pair<TypeId, int>> counts;
    size_t pos = 0;
    while (pos <= spec.size()) {
        size_t end = spec.find(',', pos);
        if (end == string_view::npos)
            end = spec.size();
        string_view item = spec.substr(pos, end - pos);
        pos = end + 1;
        if (item.empty())
            continue;
        size_t eq = item.find('=');
        if (eq == string_view::npos)
            throw invalid_argument("pointer spec items look like type=count, got '" +
                                   string(item) + "'");
        string type(item.substr(0, eq));
        auto t = domain.find_type(type);
        if (!t)
            throw invalid_argument("unknown type '" + type + "' in pointer spec");
        int count = 0;
        try {
            count = stoi(string(item.substr(eq + 1)));
        } catch (const exception &) {
            throw invalid_argument("bad pointer count in '" + string(item) + "'");
        }
        if (count < 0)
            throw invalid_argument("negative pointer count in '" + string(item) + "'");
        counts.push_back({*t, count});
    }
    if (counts.empty())
        throw invalid_argument("empty pointer spec");
    return make_pointers(domain, counts);
}

shared_ptr<const PointerSet> recipe_pointers(const DomainRecipe &recipe,
                                             const DomainModel &domain) {
    string spec;
    for (const auto &[type, count] : recipe.pointers)
        spec += (spec.empty() ? "" : ",") + type + "=" + to_string(count);
    return parse_pointer_spec(domain, spec);
}

GPProblem training_problem(const DomainRecipe &recipe, const LoadedSet &set) {
    GPProblem gp;
    gp.domain = set.domain;
    gp.instances = set.training;
    gp.pointers = recipe_pointers(recipe, *set.domain);
    gp.num_lines = recipe.lines;
    return gp;
}

FixtureReport fixture_check(const DomainRecipe &recipe, const LoadedSet &set,
                            optional<string_view> program_text) {
    FixtureReport report;
    report.domain = recipe.name;
    Program program =
        parse_program(program_text ? *program_text : fixture_text(recipe.name), *set.domain);
    vector<shared_ptr<const Instance>> all = set.training;
    all.insert(all.end(), set.validation.begin(), set.validation.end());
    ValidationReport v = validate(program, all);
    report.instances = all.size();
    report.passed = v.passed;
    for (const ValidationRow &row : v.rows)
        report.solved += row.outcome == OutcomeKind::Solved;
    if (!v.passed) {
        report.first_failed = v.rows[v.first_failed].instance;
        report.failed_kind = v.rows[v.first_failed].outcome;
    }
    return report;
}

vector<TableConfig> table_configs(int table) {
    switch (table) {
    case 1:
    case 3:
        return {{"BFS(f_GC)", SearchAlgorithm::BFS, {Feature::GoalCount}},
                {"BFS(f_LM)", SearchAlgorithm::BFS, {Feature::Landmarks}},
                {"PGP(f_GC)", SearchAlgorithm::PGP, {Feature::GoalCount}},
                {"PGP(f_LM)", SearchAlgorithm::PGP, {Feature::Landmarks}}};
    case 2:
        return {{"BFS(f_GC,f1)", SearchAlgorithm::BFS, {Feature::GoalCount, Feature::Gotos}},
                {"PGP(f_LM,f1)", SearchAlgorithm::PGP, {Feature::Landmarks, Feature::Gotos}}};
    }
    throw invalid_argument("tables are 1, 2 and 3");
}

void write_csv_header(ostream &out) {
    out << "table,domain,config,n,Z,status,T,M,Ex,Ev,Dead,SE\n";
}

void write_csv_row(ostream &out, const TableRow &row) {
    const SearchResult &r = row.result;
    out << row.table << "," << row.domain << ",\"" << row.config << "\"," << row.lines << ","
        << row.pointers << "," << status_name(r.status);
    if (r.status == SearchStatus::TimeExceeded || r.status == SearchStatus::MemoryExceeded) {
        for (int i = 0; i < 6; ++i)
            out << "," << status_name(r.status);
    } else {
        const SearchMetrics &m = r.metrics;
        out << "," << fixed << setprecision(2) << m.seconds << "," << setprecision(1)
            << m.peak_mb << "," << m.expanded << "," << m.evaluated << "," << m.dead_ends
            << "," << m.states_evaluated;
        out.unsetf(ios::floatfield);
    }
    out << "\n";
}

vector<TableRow> run_table(const TableOptions &options, ostream *csv) {
    vector<TableConfig> configs = table_configs(options.table);
    if (!options.configs.empty()) {
        vector<TableConfig> chosen;
        for (const string &label : options.configs) {
            auto it = find_if(configs.begin(), configs.end(),
                              [&](const TableConfig &c) { return c.label == label; });
            if (it == configs.end())
                throw invalid_argument("table " + to_string(options.table) +
                                       " has no configuration '" + label + "'");
            chosen.push_back(*it);
        }
        configs = chosen;
    }
    vector<string> domains = options.domains;
    if (domains.empty())
        for (const DomainRecipe &r : recipes())
            domains.push_back(r.name);

    vector<TableRow> rows;
    if (csv)
        write_csv_header(*csv);
    for (const string &d : domains) {
        const DomainRecipe &recipe = find_recipe(d);
        LoadedSet set = load_set(options.data_dir / d);
        GPProblem gp = training_problem(recipe, set);
        for (const TableConfig &c : configs) {
            SearchConfig sc;
            sc.algorithm = c.algorithm;
            sc.features = c.features;
            sc.enable_tests = recipe.enable_tests;
            sc.time_budget = options.time_budget;
            sc.memory_budget_mb = options.memory_budget_mb;
            sc.threads = options.threads;
            sc.landmark_cache = options.landmark_cache;
            if (options.progress)
                *options.progress << "[table " << options.table << "] " << d << " " << c.label
                                  << " ..." << flush;
            TableRow row{options.table, d, c.label, recipe.lines, recipe.num_pointers(),
                         search(gp, sc)};
            if (options.progress)
                *options.progress << " " << status_name(row.result.status) << " ("
                                  << fixed << setprecision(1) << row.result.metrics.seconds
                                  << " s, Ev " << row.result.metrics.evaluated << ")\n"
                                  << defaultfloat;
            if (csv) {
                write_csv_row(*csv, row);
                csv->flush();
            }
            rows.push_back(move(row));
        }
    }
    return rows;
}
}
