#include "pgp/search.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unistd.h>
#include <unordered_set>

using namespace std;

namespace pgp {
const char *status_name(SearchStatus s) {
    switch (s) {
    case SearchStatus::Solved:
        return "solved";
    case SearchStatus::Unsolvable:
        return "unsolvable";
    case SearchStatus::TimeExceeded:
        return "TE";
    case SearchStatus::MemoryExceeded:
        return "ME";
    }
    return "?";
}

double resident_mb() {
    ifstream in("/proc/self/statm");
    uint64_t size = 0, resident = 0;
    if (!(in >> size >> resident))
        return 0;
    return static_cast<double>(resident) * static_cast<double>(sysconf(_SC_PAGESIZE)) /
           (1024.0 * 1024.0);
}

void GPProblem::check() const {
    if (!domain)
        throw invalid_argument("generalized planning problem without a domain");
    if (instances.empty())
        throw invalid_argument("generalized planning problem needs at least one instance");
    if (!pointers)
        throw invalid_argument("generalized planning problem without pointers");
    if (num_lines < 1 || num_lines > kMaxLines)
        throw invalid_argument("program length must be in [1, " + to_string(kMaxLines) + "]");
    if (pointers->size() > static_cast<size_t>(kMaxPointers))
        throw invalid_argument("too many pointers");
    for (const auto &ins : instances) {
        if (!ins)
            throw invalid_argument("null instance");
        if (&ins->domain() != domain.get() && !structurally_equal(ins->domain(), *domain))
            throw invalid_argument("instance " + ins->name() + " belongs to another domain");
    }
}

namespace {
// Lexicographic pointer tuples with each position compatible with `types`.
void pointer_tuples(const DomainModel &domain, const PointerSet &pointers,
                    span<const TypeId> types, const function<void(span<const int>)> &emit) {
    const size_t arity = types.size();
    vector<vector<int>> options(arity);
    for (size_t k = 0; k < arity; ++k) {
        for (size_t z = 0; z < pointers.size(); ++z)
            if (domain.is_subtype(pointers.pointers[z].type, types[k]))
                options[k].push_back(static_cast<int>(z));
        if (options[k].empty())
            return;
    }
    vector<size_t> pos(arity, 0);
    vector<int> tuple(arity);
    while (true) {
        for (size_t k = 0; k < arity; ++k)
            tuple[k] = options[k][pos[k]];
        emit(tuple);
        size_t k = arity;
        for (; k > 0; --k) {
            if (++pos[k - 1] < options[k - 1].size())
                break;
            pos[k - 1] = 0;
        }
        if (k == 0)
            break;
    }
}
}

SearchSpace::SearchSpace(const GPProblem &problem, bool with_landmarks, bool enable_tests,
                         const optional<filesystem::path> &landmark_cache)
    : problem_(problem) {
    problem_.check();
    const DomainModel &domain = *problem_.domain;
    const PointerSet &pointers = *problem_.pointers;
    for (const auto &ins : problem_.instances) {
        auto ctx = make_unique<InstanceContext>(ins, problem_.pointers);
        if (with_landmarks)
            ctx->attach_landmarks(landmark_cache);
        contexts_.push_back(move(ctx));
    }

    for (size_t s = 0; s < domain.schemas.size(); ++s)
        pointer_tuples(domain, pointers, domain.schemas[s].param_types, [&](span<const int> t) {
            alphabet_.push_back(Instruction::action(static_cast<int>(s), t));
        });
    const int num_pointers = static_cast<int>(pointers.size());
    for (int z = 0; z < num_pointers; ++z) {
        alphabet_.push_back(Instruction::inc(z));
        alphabet_.push_back(Instruction::dec(z));
        alphabet_.push_back(Instruction::clear(z));
    }
    for (int z1 = 0; z1 < num_pointers; ++z1)
        for (int z2 = 0; z2 < num_pointers; ++z2)
            if (z1 != z2 && pointers.pointers[z1].type == pointers.pointers[z2].type)
                alphabet_.push_back(Instruction::set(z1, z2));
    if (enable_tests)
        for (size_t p = 0; p < domain.predicates.size(); ++p)
            pointer_tuples(domain, pointers, domain.predicates[p].param_types,
                           [&](span<const int> t) {
                               alphabet_.push_back(Instruction::test(static_cast<int>(p), t));
                           });
}

vector<Instruction> SearchSpace::candidates(int line) const {
    vector<Instruction> result(alphabet_.begin(), alphabet_.end());
    const int n = num_lines();
    for (int t = 0; t < n; ++t) {
        if (t == line || t == line + 1)
            continue;
        result.push_back(Instruction::go(t, false));
        result.push_back(Instruction::go(t, true));
    }
    return result;
}

vector<Program> expand(const Program &program, const SearchSpace &space) {
    vector<Program> children;
    int line = program.first_undefined();
    if (line < 0)
        return children;
    for (const Instruction &ins : space.candidates(line)) {
        Program child = program;
        child.set_line(line, ins);
        children.push_back(move(child));
    }
    return children;
}

ClassifyResult classify(const Program &program, const SearchSpace &space,
                        span<const int> instances) {
    ClassifyResult result;
    bool all_solved = true;
    for (int i : instances) {
        ExecutionOutcome out = space.context(i).interpreter->execute(program.lines());
        if (is_failure(out.kind))
            return {Classification::DeadEnd, i};
        all_solved = all_solved && out.kind == OutcomeKind::Solved;
    }
    result.kind = all_solved ? Classification::SolvesAll : Classification::Pending;
    return result;
}

ValidationReport validate(const Program &program,
                          span<const shared_ptr<const Instance>> instances,
                          bool stop_at_first_failure) {
    if (instances.empty())
        throw invalid_argument("validation needs at least one instance");
    ValidationReport report;
    report.passed = true;
    ExecutionOptions options;
    options.record_plan = true;
    for (size_t i = 0; i < instances.size(); ++i) {
        Interpreter interpreter(*instances[i], program.pointers_ptr());
        ExecutionOutcome out = interpreter.execute(program.lines(), options);
        report.rows.push_back({instances[i]->name(), out.kind, out.plan.size(), out.steps});
        if (out.kind != OutcomeKind::Solved) {
            if (report.passed)
                report.first_failed = static_cast<int>(i);
            report.passed = false;
            if (stop_at_first_failure)
                break;
        }
    }
    return report;
}

namespace {
using Clock = chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return chrono::duration<double>(Clock::now() - start).count();
}

/*
  Fixed workers for fanning out independent evaluations. run() blocks
  until every index is done; the caller works too.
*/
class WorkerPool {
public:
    explicit WorkerPool(unsigned threads) {
        for (unsigned i = 1; i < threads; ++i)
            workers_.emplace_back([this] { work_loop(); });
    }
    ~WorkerPool() {
        {
            lock_guard lock(mutex_);
            stop_ = true;
        }
        wake_.notify_all();
        for (thread &t : workers_)
            t.join();
    }
    WorkerPool(const WorkerPool &) = delete;
    WorkerPool &operator=(const WorkerPool &) = delete;

    void run(size_t count, const function<void(size_t)> &fn) {
        if (workers_.empty() || count < 2) {
            for (size_t i = 0; i < count; ++i)
                fn(i);
            return;
        }
        {
            lock_guard lock(mutex_);
            job_ = &fn;
            count_ = count;
            next_ = 0;
            busy_ = workers_.size();
            error_ = nullptr;
            ++generation_;
        }
        wake_.notify_all();
        drain();
        unique_lock lock(mutex_);
        done_.wait(lock, [this] { return busy_ == 0; });
        job_ = nullptr;
        if (error_)
            rethrow_exception(error_);
    }

private:
    vector<thread> workers_;
    mutex mutex_;
    condition_variable wake_, done_;
    const function<void(size_t)> *job_ = nullptr;
    size_t count_ = 0;
    atomic<size_t> next_{0};
    size_t busy_ = 0;
    uint64_t generation_ = 0;
    bool stop_ = false;
    exception_ptr error_;

    void drain() {
        for (size_t i = next_++; i < count_; i = next_++) {
            try {
                (*job_)(i);
            } catch (...) {
                lock_guard lock(mutex_);
                if (!error_)
                    error_ = current_exception();
            }
        }
    }

    void work_loop() {
        uint64_t seen = 0;
        while (true) {
            {
                unique_lock lock(mutex_);
                wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
                if (stop_)
                    return;
                seen = generation_;
            }
            drain();
            {
                lock_guard lock(mutex_);
                if (--busy_ == 0)
                    done_.notify_one();
            }
        }
    }
};

using Codes = array<uint16_t, kMaxLines>;
using PackedEval = array<int32_t, EvalVector::kMax>;

// Open-list entry. The program itself is kept in a CodeArena slot.
struct Entry {
    PackedEval eval{};
    uint64_t seq = 0;
    uint32_t slot = 0;
};

struct EntryOrder {
    // Max-heap comparator giving the smallest (eval, seq) on top.
    bool operator()(const Entry &a, const Entry &b) const {
        if (a.eval == b.eval)
            return a.seq > b.seq;
        return b.eval < a.eval;
    }
};

int32_t narrow_value(int64_t v) {
    if (v < numeric_limits<int32_t>::min() || v > numeric_limits<int32_t>::max())
        throw overflow_error("evaluation value out of range");
    return static_cast<int32_t>(v);
}

// Fixed-stride program storage. Chunks never move, and freed slots are reused.
class CodeArena {
public:
    CodeArena(int lines, bool wide) : lines_(lines), width_(wide ? 2 : 1) {}

    uint32_t store(const Codes &codes) {
        uint32_t slot;
        if (!free_.empty()) {
            slot = free_.back();
            free_.pop_back();
        } else {
            slot = next_++;
            if (slot % kChunk == 0)
                chunks_.push_back(make_unique<uint8_t[]>(kChunk * stride()));
        }
        uint8_t *p = at(slot);
        for (int i = 0; i < lines_; ++i) {
            p[width_ * i] = static_cast<uint8_t>(codes[i]);
            if (width_ == 2)
                p[2 * i + 1] = static_cast<uint8_t>(codes[i] >> 8);
        }
        return slot;
    }

    Codes load(uint32_t slot) const {
        Codes codes{};
        const uint8_t *p = at(slot);
        for (int i = 0; i < lines_; ++i)
            codes[i] = width_ == 2 ? static_cast<uint16_t>(p[2 * i] | (p[2 * i + 1] << 8))
                                   : p[i];
        return codes;
    }

    void release(uint32_t slot) { free_.push_back(slot); }

private:
    static constexpr size_t kChunk = size_t{1} << 16;
    int lines_;
    int width_;
    uint32_t next_ = 0;
    vector<unique_ptr<uint8_t[]>> chunks_;
    vector<uint32_t> free_;

    size_t stride() const { return static_cast<size_t>(lines_) * width_; }
    uint8_t *at(uint32_t slot) const { return chunks_[slot / kChunk].get() + (slot % kChunk) * stride(); }
};

// Partial sums over the instances evaluated so far.
struct ChildEval {
    bool dead = false;
    bool all_solved = true;
    size_t upto = 0;  // prefix of the active list already evaluated
    int64_t goal_count = 0, landmarks = 0, normalized = 0;
    uint64_t states = 0;
};

constexpr uint16_t kUndefinedCode = 0;
constexpr uint16_t kEndCode = 1;
constexpr uint16_t kAlphabetBase = 2;

class Searcher {
public:
    Searcher(const SearchSpace &space, const SearchConfig &config)
        : space_(space),
          config_(config),
          n_(space.num_lines()),
          track_landmarks_(needs_landmarks(config.features)),
          pool_(max(1u, config.threads)),
          arena_(n_, space.alphabet().size() + 2 + 2 * static_cast<size_t>(n_) > 0x100) {
        table_.push_back(Instruction{});
        table_.push_back(Instruction::end());
        for (const Instruction &ins : space.alphabet())
            table_.push_back(ins);
        goto_base_ = static_cast<uint16_t>(table_.size());
        for (int t = 0; t < n_; ++t) {
            table_.push_back(Instruction::go(t, false));
            table_.push_back(Instruction::go(t, true));
        }
        if (table_.size() > 0xffff)
            throw invalid_argument("instruction alphabet too large");
        for (Feature f : config.features)
            if (f == Feature::Landmarks || f == Feature::LandmarksNormalized)
                if (!space.context(0).landmarks)
                    throw invalid_argument("landmark features need a space built with landmarks");
    }

    SearchResult run(Clock::time_point start) {
        start_ = start;
        SearchResult result;
        result.metrics.peak_mb = resident_mb();
        if (config_.algorithm == SearchAlgorithm::BFS) {
            for (size_t i = 0; i < space_.num_instances(); ++i)
                active_.push_back(static_cast<int>(i));
        } else {
            active_.push_back(0);
        }
        in_active_.assign(space_.num_instances(), 0);
        for (int i : active_)
            in_active_[i] = 1;

        result.status = loop(result);
        result.metrics.seconds = seconds_since(start_);
        result.metrics.active_size = active_.size();
        if (result.status == SearchStatus::Solved) {
            // Independent re-validation on fresh interpreters.
            ValidationReport report = validate(*result.solution, space_.problem().instances);
            if (!report.passed)
                throw logic_error("search returned a program that does not validate on " +
                                  report.rows[report.first_failed].instance);
        }
        return result;
    }

private:
    const SearchSpace &space_;
    const SearchConfig &config_;
    const int n_;
    const bool track_landmarks_;
    WorkerPool pool_;
    vector<Instruction> table_;
    uint16_t goto_base_ = 0;
    vector<int> active_;
    vector<uint8_t> in_active_;
    CodeArena arena_;
    vector<Entry> open_;
    uint64_t next_seq_ = 0;
    Clock::time_point start_;
    unordered_set<string> generated_;
    SearchStatus interrupted_ = SearchStatus::Solved;  // Solved means not interrupted

    vector<Instruction> decode(const Codes &codes) const {
        vector<Instruction> lines(n_);
        for (int i = 0; i < n_; ++i)
            lines[i] = table_[codes[i]];
        return lines;
    }

    string code_key(const Codes &codes) const {
        return string(reinterpret_cast<const char *>(codes.data()), n_ * sizeof(uint16_t));
    }

    void extend(ChildEval &ce, span<const Instruction> lines) const {
        while (!ce.dead && ce.upto < active_.size()) {
            int i = active_[ce.upto++];
            InstanceEval e = evaluate_instance(space_.context(i), lines, track_landmarks_);
            ++ce.states;
            if (is_failure(e.kind)) {
                ce.dead = true;
                return;
            }
            ce.all_solved = ce.all_solved && e.kind == OutcomeKind::Solved;
            ce.goal_count += e.goal_count;
            ce.landmarks += e.landmarks;
            ce.normalized += normalized_term(e.landmarks, e.landmarks_total);
        }
    }

    EvalVector to_vector(const ChildEval &ce, span<const Instruction> lines) const {
        EvalVector v;
        for (Feature f : config_.features) {
            switch (f) {
            case Feature::GoalCount:
                v.push(ce.goal_count);
                break;
            case Feature::Landmarks:
                v.push(ce.landmarks);
                break;
            case Feature::LandmarksNormalized:
                v.push(ce.normalized);
                break;
            case Feature::Gotos:
                v.push(f1(lines));
                break;
            case Feature::Zero:
                v.push(0);
                break;
            }
        }
        return v;
    }

    static PackedEval pack(const EvalVector &v) {
        PackedEval p{};
        for (int i = 0; i < v.size; ++i)
            p[i] = narrow_value(v[i]);
        return p;
    }

    EvalVector unpack(const PackedEval &p) const {
        EvalVector v;
        for (size_t i = 0; i < config_.features.size(); ++i)
            v.push(p[i]);
        return v;
    }

    // Index of the first undefined line, which is also the node depth.
    int first_open_line(const Codes &codes) const {
        int line = 0;
        while (line < n_ && codes[line] != kUndefinedCode)
            ++line;
        return line;
    }

    bool out_of_budget(SearchMetrics &m) {
        if (seconds_since(start_) > config_.time_budget) {
            interrupted_ = SearchStatus::TimeExceeded;
            return true;
        }
        double mb = resident_mb();
        m.peak_mb = max(m.peak_mb, mb);
        if (mb > static_cast<double>(config_.memory_budget_mb)) {
            interrupted_ = SearchStatus::MemoryExceeded;
            return true;
        }
        return false;
    }

    // First instance outside the active set the program does not solve, or -1.
    int first_failed(span<const Instruction> lines) const {
        for (size_t i = 0; i < space_.num_instances(); ++i) {
            if (in_active_[i])
                continue;
            ExecutionOutcome out = space_.context(i).interpreter->execute(lines);
            if (out.kind != OutcomeKind::Solved)
                return static_cast<int>(i);
        }
        return -1;
    }

    // Adds instance `inst` to every queued node, dropping new dead ends.
    bool reevaluate_queue(int inst, SearchMetrics &m) {
        vector<InstanceEval> evals(open_.size());
        atomic<bool> stop{false};
        pool_.run(open_.size(), [&](size_t k) {
            if (stop.load(memory_order_relaxed))
                return;
            vector<Instruction> lines = decode(arena_.load(open_[k].slot));
            evals[k] = evaluate_instance(space_.context(inst), lines, track_landmarks_);
            if ((k & 1023) == 0 && seconds_since(start_) > config_.time_budget)
                stop = true;
        });
        if (stop) {
            interrupted_ = SearchStatus::TimeExceeded;
            return false;
        }
        m.reevaluated += open_.size();
        size_t kept = 0;
        for (size_t k = 0; k < open_.size(); ++k) {
            const InstanceEval &e = evals[k];
            Entry &entry = open_[k];
            if (is_failure(e.kind)) {
                arena_.release(entry.slot);
                continue;
            }
            for (size_t f = 0; f < config_.features.size(); ++f) {
                int64_t add = 0;
                switch (config_.features[f]) {
                case Feature::GoalCount:
                    add = e.goal_count;
                    break;
                case Feature::Landmarks:
                    add = e.landmarks;
                    break;
                case Feature::LandmarksNormalized:
                    add = normalized_term(e.landmarks, e.landmarks_total);
                    break;
                case Feature::Gotos:
                case Feature::Zero:
                    break;
                }
                entry.eval[f] = narrow_value(entry.eval[f] + add);
            }
            open_[kept++] = entry;
        }
        open_.resize(kept);
        make_heap(open_.begin(), open_.end(), EntryOrder{});
        return true;
    }

    void trace_expansion(const PackedEval &eval, const Codes &codes, uint64_t index) const {
        ostream &out = *config_.trace;
        out << "x " << index << " " << unpack(eval).str() << " [";
        for (int i = 0; i < n_; ++i)
            out << (i ? " " : "") << codes[i];
        out << "]\n";
    }

    enum class Verdict { Insert, Drop, Solution, Interrupted };

    // Solution check, active-set growth and dead-end test for one child.
    Verdict settle(ChildEval &ce, span<const Instruction> lines, SearchMetrics &m) {
        extend(ce, lines);
        while (!ce.dead && ce.all_solved) {
            int failed = first_failed(lines);
            if (failed < 0)
                return Verdict::Solution;
            active_.push_back(failed);
            in_active_[failed] = 1;
            if (config_.trace)
                *config_.trace << "a " << space_.context(failed).instance->name() << "\n";
            if (!reevaluate_queue(failed, m))
                return Verdict::Interrupted;
            extend(ce, lines);
        }
        return ce.dead ? Verdict::Drop : Verdict::Insert;
    }

    SearchStatus loop(SearchResult &result) {
        SearchMetrics &m = result.metrics;
        {
            Codes root{};
            root.fill(kUndefinedCode);
            root[n_ - 1] = kEndCode;
            vector<Instruction> lines = decode(root);
            ChildEval ce;
            Verdict v = settle(ce, lines, m);
            if (v == Verdict::Interrupted)
                return interrupted_;
            if (v == Verdict::Solution) {
                result.solution.emplace(move(lines), space_.problem().pointers);
                return SearchStatus::Solved;
            }
            if (v == Verdict::Drop)
                return SearchStatus::Unsolvable;
            open_.push_back(Entry{pack(to_vector(ce, lines)), next_seq_++, arena_.store(root)});
            if (config_.check_duplicates)
                generated_.insert(code_key(root));
        }

        vector<Codes> children;
        vector<ChildEval> evals;
        while (!open_.empty()) {
            if (out_of_budget(m))
                return interrupted_;
            pop_heap(open_.begin(), open_.end(), EntryOrder{});
            const Entry top = open_.back();
            open_.pop_back();
            const Codes codes = arena_.load(top.slot);
            arena_.release(top.slot);
            ++m.expanded;
            if (config_.trace)
                trace_expansion(top.eval, codes, m.expanded);

            const int line = first_open_line(codes);
            if (line >= n_ - 1)
                continue;
            const uint64_t child_depth = static_cast<uint64_t>(line) + 1;

            children.clear();
            for (size_t a = 0; a < space_.alphabet().size(); ++a) {
                children.push_back(codes);
                children.back()[line] = static_cast<uint16_t>(kAlphabetBase + a);
            }
            for (int t = 0; t < n_; ++t) {
                if (t == line || t == line + 1)
                    continue;
                for (int c = 0; c < 2; ++c) {
                    children.push_back(codes);
                    children.back()[line] = static_cast<uint16_t>(goto_base_ + 2 * t + c);
                }
            }

            // Fan out over the current active set, then settle in child order.
            evals.assign(children.size(), ChildEval{});
            pool_.run(children.size(), [&](size_t k) {
                vector<Instruction> lines = decode(children[k]);
                extend(evals[k], lines);
            });

            for (size_t k = 0; k < children.size(); ++k) {
                ++m.evaluated;
                if (config_.check_duplicates && !generated_.insert(code_key(children[k])).second)
                    ++m.duplicates;
                vector<Instruction> lines = decode(children[k]);
                Verdict v = settle(evals[k], lines, m);
                switch (v) {
                case Verdict::Interrupted:
                    return interrupted_;
                case Verdict::Solution:
                    m.states_evaluated += evals[k].states;
                    m.max_depth = max(m.max_depth, child_depth);
                    result.solution.emplace(move(lines), space_.problem().pointers);
                    return SearchStatus::Solved;
                case Verdict::Drop:
                    ++m.dead_ends;
                    break;
                case Verdict::Insert: {
                    m.states_evaluated += evals[k].states;
                    m.max_depth = max(m.max_depth, child_depth);
                    open_.push_back(
                        Entry{pack(to_vector(evals[k], lines)), next_seq_++, arena_.store(children[k])});
                    push_heap(open_.begin(), open_.end(), EntryOrder{});
                    break;
                }
                }
            }
        }
        return SearchStatus::Unsolvable;
    }
};
}

SearchResult search(const SearchSpace &space, const SearchConfig &config) {
    Searcher searcher(space, config);
    return searcher.run(Clock::now());
}

SearchResult search(const GPProblem &problem, const SearchConfig &config) {
    auto start = Clock::now();
    SearchSpace space(problem, needs_landmarks(config.features), config.enable_tests,
                      config.landmark_cache);
    double prep = seconds_since(start);
    Searcher searcher(space, config);
    SearchResult result = searcher.run(start);
    result.metrics.preprocessing_seconds = prep;
    return result;
}
}
