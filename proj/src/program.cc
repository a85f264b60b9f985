#include "pgp/program.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

using namespace std;

namespace pgp {
static Instruction with_pointers(OpCode op, int id, span<const int> pointers) {
    if (pointers.size() > static_cast<size_t>(kMaxArgs))
        throw ProgramError("too many arguments in instruction");
    Instruction ins;
    ins.op = op;
    ins.id = static_cast<int16_t>(id);
    ins.arity = static_cast<uint8_t>(pointers.size());
    for (size_t i = 0; i < pointers.size(); ++i)
        ins.args[i] = static_cast<uint8_t>(pointers[i]);
    return ins;
}

Instruction Instruction::action(int schema, span<const int> pointers) {
    return with_pointers(OpCode::Action, schema, pointers);
}

Instruction Instruction::test(int predicate, span<const int> pointers) {
    return with_pointers(OpCode::Test, predicate, pointers);
}

Instruction Instruction::inc(int z) {
    return with_pointers(OpCode::Inc, -1, array{z});
}

Instruction Instruction::dec(int z) {
    return with_pointers(OpCode::Dec, -1, array{z});
}

Instruction Instruction::clear(int z) {
    return with_pointers(OpCode::Clear, -1, array{z});
}

Instruction Instruction::set(int z1, int z2) {
    return with_pointers(OpCode::Set, -1, array{z1, z2});
}

Instruction Instruction::go(int target, bool negated) {
    Instruction ins;
    ins.op = OpCode::Goto;
    ins.target = static_cast<int16_t>(target);
    ins.negated = negated;
    return ins;
}

Instruction Instruction::end() {
    Instruction ins;
    ins.op = OpCode::End;
    return ins;
}

optional<int> PointerSet::find(string_view name) const {
    for (size_t i = 0; i < pointers.size(); ++i)
        if (pointers[i].name == name)
            return static_cast<int>(i);
    return nullopt;
}

string PointerSet::str(const DomainModel &domain) const {
    string text;
    for (const Pointer &p : pointers) {
        if (!text.empty())
            text += " ";
        text += p.name + ":" + domain.types[p.type].name;
    }
    return text;
}

shared_ptr<const PointerSet> make_pointers(const DomainModel &domain,
                                           span<const pair<TypeId, int>> counts) {
    auto set = make_shared<PointerSet>();
    for (const auto &[type, count] : counts) {
        for (int k = 1; k <= count; ++k) {
            string name = counts.size() == 1 ? "z" + to_string(k)
                                             : "z-" + domain.types[type].name + to_string(k);
            set->pointers.push_back({name, type});
        }
    }
    if (set->size() > static_cast<size_t>(kMaxPointers))
        throw ProgramError("at most " + to_string(kMaxPointers) + " pointers are supported");
    return set;
}

Program::Program(int num_lines, shared_ptr<const PointerSet> pointers)
    : pointers_(move(pointers)) {
    if (num_lines < 1)
        throw ProgramError("a program needs at least one line");
    if (num_lines > 32767)
        throw ProgramError("program too long");
    lines_.resize(num_lines);
    lines_.back() = Instruction::end();
}

Program::Program(vector<Instruction> lines, shared_ptr<const PointerSet> pointers)
    : lines_(move(lines)), pointers_(move(pointers)) {
    if (lines_.empty())
        throw ProgramError("a program needs at least one line");
    if (lines_.back().op != OpCode::End)
        throw ProgramError("the last line of a program must be 'end'");
}

int Program::first_undefined() const {
    for (size_t i = 0; i < lines_.size(); ++i)
        if (!lines_[i].defined())
            return static_cast<int>(i);
    return -1;
}

int Program::num_defined() const {
    return static_cast<int>(count_if(lines_.begin(), lines_.end(),
                                     [](const Instruction &i) { return i.defined(); }));
}

void Program::set_line(int line, const Instruction &instruction) {
    if (line < 0 || line >= size() - 1)
        throw ProgramError("line " + to_string(line) + " cannot be programmed");
    if (lines_[line].defined())
        throw ProgramError("line " + to_string(line) + " is already programmed");
    lines_[line] = instruction;
}

void check_instruction(const DomainModel &domain, const PointerSet &pointers,
                       const Instruction &ins, int line, int num_lines) {
    auto where = [&] { return "line " + to_string(line) + ": "; };
    for (uint8_t z : ins.pointer_args())
        if (z >= pointers.size())
            throw ProgramError(where() + "unknown pointer");
    switch (ins.op) {
    case OpCode::Undefined:
    case OpCode::End:
        return;
    case OpCode::Action: {
        if (ins.id < 0 || ins.id >= static_cast<int>(domain.schemas.size()))
            throw ProgramError(where() + "unknown action schema");
        const ActionSchema &schema = domain.schemas[ins.id];
        if (ins.arity != schema.arity())
            throw ProgramError(where() + "'" + schema.name + "' expects " +
                               to_string(schema.arity()) + " pointers");
        for (size_t i = 0; i < schema.arity(); ++i)
            if (!domain.is_subtype(pointers.pointers[ins.args[i]].type, schema.param_types[i]))
                throw ProgramError(where() + "pointer '" + pointers.pointers[ins.args[i]].name +
                                   "' has the wrong type for '" + schema.name + "'");
        return;
    }
    case OpCode::Test: {
        if (ins.id < 0 || ins.id >= static_cast<int>(domain.predicates.size()))
            throw ProgramError(where() + "unknown predicate");
        const PredicateDecl &pred = domain.predicates[ins.id];
        if (ins.arity != pred.arity())
            throw ProgramError(where() + "'" + pred.name + "' expects " +
                               to_string(pred.arity()) + " pointers");
        for (size_t i = 0; i < pred.arity(); ++i)
            if (!domain.is_subtype(pointers.pointers[ins.args[i]].type, pred.param_types[i]))
                throw ProgramError(where() + "pointer '" + pointers.pointers[ins.args[i]].name +
                                   "' has the wrong type for '" + pred.name + "'");
        return;
    }
    case OpCode::Inc:
    case OpCode::Dec:
    case OpCode::Clear:
        if (ins.arity != 1)
            throw ProgramError(where() + "pointer operation takes one pointer");
        return;
    case OpCode::Set:
        if (ins.arity != 2)
            throw ProgramError(where() + "set takes two pointers");
        if (pointers.pointers[ins.args[0]].type != pointers.pointers[ins.args[1]].type)
            throw ProgramError(where() + "set across pointers of different types");
        return;
    case OpCode::Goto:
        if (ins.target < 0 || ins.target >= num_lines)
            throw ProgramError(where() + "goto target out of range");
        if (ins.target == line || ins.target == line + 1)
            throw ProgramError(where() + "goto to itself or to the next line");
        return;
    }
}

void check_program(const DomainModel &domain, const Program &program) {
    for (int i = 0; i < program.size(); ++i) {
        if (program[i].op == OpCode::End && i != program.size() - 1)
            throw ProgramError("line " + to_string(i) + ": 'end' is only allowed on the last line");
        check_instruction(domain, program.pointers(), program[i], i, program.size());
    }
}

string format_instruction(const DomainModel &domain, const PointerSet &pointers,
                          const Instruction &ins) {
    auto args = [&] {
        string text;
        for (size_t i = 0; i < ins.arity; ++i)
            text += (i ? "," : "") + pointers.pointers[ins.args[i]].name;
        return text;
    };
    switch (ins.op) {
    case OpCode::Undefined:
        return "?";
    case OpCode::End:
        return "end";
    case OpCode::Action:
        return domain.schemas[ins.id].name + "(" + args() + ")";
    case OpCode::Test:
        return "test(" + domain.predicates[ins.id].name + "(" + args() + "))";
    case OpCode::Inc:
        return "inc(" + args() + ")";
    case OpCode::Dec:
        return "dec(" + args() + ")";
    case OpCode::Clear:
        return "clear(" + args() + ")";
    case OpCode::Set:
        return "set(" + args() + ")";
    case OpCode::Goto:
        return "goto(" + to_string(ins.target) + "," + (ins.negated ? "!yz" : "yz") + ")";
    }
    return "?";
}

string format_program(const DomainModel &domain, const Program &program) {
    ostringstream out;
    out << "pointers: " << program.pointers().str(domain) << "\n";
    for (int i = 0; i < program.size(); ++i)
        out << i << ". " << format_instruction(domain, program.pointers(), program[i]) << "\n";
    return out.str();
}

namespace {
string strip(string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return string(s.substr(b, e - b));
}

string lower(string s) {
    for (char &c : s)
        c = static_cast<char>(tolower(static_cast<unsigned char>(c)));
    return s;
}

// Splits "name(a,b)" into name and comma-separated arguments (one nesting level kept).
bool split_call(const string &text, string &name, vector<string> &args) {
    size_t open = text.find('(');
    if (open == string::npos || text.back() != ')')
        return false;
    name = strip(string_view(text).substr(0, open));
    string inner = text.substr(open + 1, text.size() - open - 2);
    args.clear();
    int depth = 0;
    string current;
    for (char c : inner) {
        if (c == '(')
            ++depth;
        if (c == ')')
            --depth;
        if (c == ',' && depth == 0) {
            args.push_back(strip(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!strip(current).empty() || !args.empty())
        args.push_back(strip(current));
    return depth == 0;
}

shared_ptr<const PointerSet> parse_pointer_header(const string &body, const DomainModel &domain,
                                                  int line_no) {
    auto set = make_shared<PointerSet>();
    istringstream in(body);
    string item;
    while (in >> item) {
        size_t colon = item.find(':');
        if (colon == string::npos)
            throw ProgramError("line " + to_string(line_no) + ": pointer '" + item +
                               "' needs a type (name:type)");
        string name = item.substr(0, colon);
        auto type = domain.find_type(item.substr(colon + 1));
        if (!type)
            throw ProgramError("line " + to_string(line_no) + ": unknown type '" +
                               item.substr(colon + 1) + "'");
        if (set->find(name))
            throw ProgramError("line " + to_string(line_no) + ": pointer '" + name +
                               "' declared twice");
        set->pointers.push_back({name, *type});
    }
    if (set->size() > static_cast<size_t>(kMaxPointers))
        throw ProgramError("too many pointers");
    return set;
}
}

Program parse_program(string_view text, const DomainModel &domain,
                      shared_ptr<const PointerSet> pointers) {
    vector<Instruction> lines;
    istringstream in{string(text)};
    string raw;
    int line_no = 0;
    while (getline(in, raw)) {
        ++line_no;
        size_t comment = raw.find('#');
        if (comment != string::npos)
            raw.resize(comment);
        string line = lower(strip(raw));
        if (line.empty())
            continue;
        auto err = [&](const string &msg) {
            return ProgramError("line " + to_string(line_no) + ": " + msg);
        };
        if (line.rfind("pointers:", 0) == 0) {
            if (!lines.empty())
                throw err("pointer declarations must precede the instructions");
            pointers = parse_pointer_header(line.substr(9), domain, line_no);
            continue;
        }
        if (!pointers)
            throw err("no pointers declared (add a 'pointers:' line)");

        size_t dot = line.find('.');
        if (dot == string::npos)
            throw err("expected 'k. instruction'");
        int index;
        try {
            size_t used = 0;
            index = stoi(line.substr(0, dot), &used);
            if (used != dot)
                throw invalid_argument("trailing");
        } catch (const exception &) {
            throw err("bad line number");
        }
        if (index != static_cast<int>(lines.size()))
            throw err("expected line number " + to_string(lines.size()));
        string body = strip(string_view(line).substr(dot + 1));

        auto pointer_ids = [&](const vector<string> &names) {
            vector<int> ids;
            for (const string &n : names) {
                auto z = pointers->find(n);
                if (!z)
                    throw err("unknown pointer '" + n + "'");
                ids.push_back(*z);
            }
            return ids;
        };

        Instruction ins;
        string name;
        vector<string> args;
        if (body == "?") {
            ins = Instruction();
        } else if (body == "end") {
            ins = Instruction::end();
        } else if (!split_call(body, name, args)) {
            throw err("malformed instruction '" + body + "'");
        } else if (name == "goto") {
            if (args.size() != 2)
                throw err("goto takes a target and a condition");
            int target;
            try {
                target = stoi(args[0]);
            } catch (const exception &) {
                throw err("bad goto target");
            }
            if (args[1] == "yz")
                ins = Instruction::go(target, false);
            else if (args[1] == "!yz")
                ins = Instruction::go(target, true);
            else
                throw err("goto condition must be 'yz' or '!yz'");
        } else if (name == "inc" || name == "dec" || name == "clear") {
            vector<int> z = pointer_ids(args);
            if (z.size() != 1)
                throw err(name + " takes one pointer");
            ins = name == "inc" ? Instruction::inc(z[0])
                  : name == "dec" ? Instruction::dec(z[0])
                                  : Instruction::clear(z[0]);
        } else if (name == "set") {
            vector<int> z = pointer_ids(args);
            if (z.size() != 2)
                throw err("set takes two pointers");
            ins = Instruction::set(z[0], z[1]);
        } else if (name == "test") {
            string pred;
            vector<string> pargs;
            if (args.size() != 1 || !split_call(args[0], pred, pargs))
                throw err("expected test(pred(z...))");
            auto p = domain.find_predicate(pred);
            if (!p)
                throw err("unknown predicate '" + pred + "'");
            vector<int> z = pointer_ids(pargs);
            if (z.size() > static_cast<size_t>(kMaxArgs))
                throw err("too many arguments");
            ins = Instruction::test(*p, z);
        } else {
            auto s = domain.find_schema(name);
            if (!s)
                throw err("unknown action schema '" + name + "'");
            vector<int> z = pointer_ids(args);
            if (z.size() > static_cast<size_t>(kMaxArgs))
                throw err("too many arguments");
            ins = Instruction::action(*s, z);
        }
        lines.push_back(ins);
    }
    if (lines.empty())
        throw ProgramError("empty program");
    Program program(move(lines), pointers);
    check_program(domain, program);
    return program;
}
}
