#include "pgp/pddl.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

using namespace std;

namespace pgp {
string ParseDiagnostic::str() const {
    ostringstream out;
    out << file << ":" << line << ":" << column << ": "
        << (severity == Severity::Error ? "error" : "warning") << ": " << message;
    return out.str();
}

namespace {
struct SExpr {
    bool is_list = false;
    string symbol;
    vector<SExpr> items;
    int line = 0;
    int column = 0;
};

class Reader {
public:
    Reader(string_view text, string_view file) : text_(text), file_(file) {
    }

    [[noreturn]] void fail(int line, int column, const string &message) const {
        throw ParseError({file_, line, column, message, ParseDiagnostic::Severity::Error});
    }
    [[noreturn]] void fail(const SExpr &at, const string &message) const {
        fail(at.line, at.column, message);
    }

    vector<SExpr> read_all() {
        vector<SExpr> result;
        skip_space();
        while (pos_ < text_.size()) {
            result.push_back(read());
            skip_space();
        }
        return result;
    }

private:
    string_view text_;
    string file_;
    size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else if (isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr read() {
        SExpr expr;
        expr.line = line_;
        expr.column = column_;
        char c = text_[pos_];
        if (c == ')')
            fail(line_, column_, "unexpected ')'");
        if (c == '(') {
            expr.is_list = true;
            advance();
            while (true) {
                skip_space();
                if (pos_ >= text_.size())
                    fail(expr.line, expr.column, "unbalanced '(' (missing ')')");
                if (text_[pos_] == ')') {
                    advance();
                    break;
                }
                expr.items.push_back(read());
            }
            return expr;
        }
        while (pos_ < text_.size()) {
            char d = text_[pos_];
            if (isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';')
                break;
            expr.symbol += static_cast<char>(tolower(static_cast<unsigned char>(d)));
            advance();
        }
        return expr;
    }
};

bool is_symbol(const SExpr &e, string_view s) {
    return !e.is_list && e.symbol == s;
}

struct TypedName {
    string name;
    string type;
    const SExpr *where;
};

// Parses "a b - t c" style typed lists; untyped names default to "object".
vector<TypedName> typed_list(const Reader &reader, span<const SExpr> items) {
    vector<TypedName> result;
    size_t pending = 0;
    for (size_t i = 0; i < items.size(); ++i) {
        const SExpr &e = items[i];
        if (e.is_list)
            reader.fail(e, "unexpected list in typed list");
        if (e.symbol == "-") {
            if (i + 1 >= items.size())
                reader.fail(e, "missing type after '-'");
            const SExpr &t = items[i + 1];
            if (t.is_list)
                reader.fail(t, "only simple types are supported (no 'either')");
            for (size_t k = pending; k < result.size(); ++k)
                result[k].type = t.symbol;
            pending = result.size();
            ++i;
        } else {
            result.push_back({e.symbol, "object", &e});
        }
    }
    return result;
}

class DomainParser {
public:
    DomainParser(const Reader &reader) : reader_(reader), domain_(make_shared<DomainModel>()) {
    }

    shared_ptr<DomainModel> parse(const SExpr &root) {
        if (!root.is_list || root.items.empty() || !is_symbol(root.items[0], "define"))
            reader_.fail(root, "expected (define (domain ...) ...)");
        if (root.items.size() < 2 || !root.items[1].is_list ||
            root.items[1].items.size() != 2 || !is_symbol(root.items[1].items[0], "domain"))
            reader_.fail(root, "expected (domain <name>)");
        domain_->name = root.items[1].items[1].symbol;

        for (size_t i = 2; i < root.items.size(); ++i) {
            const SExpr &section = root.items[i];
            if (!section.is_list || section.items.empty() || section.items[0].is_list)
                reader_.fail(section, "malformed domain section");
            const string &key = section.items[0].symbol;
            span<const SExpr> body(section.items.data() + 1, section.items.size() - 1);
            if (key == ":requirements")
                requirements(body);
            else if (key == ":types")
                types(body);
            else if (key == ":constants")
                constants(body);
            else if (key == ":predicates")
                predicates(body);
            else if (key == ":action")
                action(section);
            else
                reader_.fail(section, "unsupported domain section '" + key + "'");
        }
        try {
            domain_->validate();
        } catch (const ModelError &e) {
            reader_.fail(root, e.what());
        }
        return domain_;
    }

private:
    const Reader &reader_;
    shared_ptr<DomainModel> domain_;

    void requirements(span<const SExpr> body) {
        for (const SExpr &r : body) {
            if (!is_symbol(r, ":strips") && !is_symbol(r, ":typing"))
                reader_.fail(r, "unsupported requirement '" + (r.is_list ? "(...)" : r.symbol) +
                                    "'");
        }
    }

    TypeId type_id(const string &name, const SExpr &where) {
        auto t = domain_->find_type(name);
        if (!t)
            reader_.fail(where, "undeclared type '" + name + "'");
        return *t;
    }

    void types(span<const SExpr> body) {
        vector<TypedName> decls = typed_list(reader_, body);
        map<string, string> parent;
        for (const TypedName &d : decls) {
            if (d.name == "object")
                reader_.fail(*d.where, "'object' cannot be redeclared");
            parent[d.name] = d.type;
        }
        // Parents come before children so type ids follow the hierarchy.
        set<string> visiting;
        function<void(const string &, const SExpr &)> declare = [&](const string &name,
                                                                    const SExpr &where) {
            if (domain_->find_type(name))
                return;
            if (!visiting.insert(name).second)
                reader_.fail(where, "cyclic type hierarchy at '" + name + "'");
            string p = parent.count(name) ? parent[name] : "object";
            declare(p, where);
            domain_->types.push_back({name, *domain_->find_type(p)});
        };
        for (const TypedName &d : decls)
            declare(d.name, *d.where);
    }

    void constants(span<const SExpr> body) {
        for (const TypedName &c : typed_list(reader_, body)) {
            if (domain_->find_constant(c.name))
                reader_.fail(*c.where, "constant '" + c.name + "' declared twice");
            domain_->constants.push_back({c.name, type_id(c.type, *c.where)});
        }
    }

    void predicates(span<const SExpr> body) {
        for (const SExpr &p : body) {
            if (!p.is_list || p.items.empty() || p.items[0].is_list)
                reader_.fail(p, "malformed predicate declaration");
            PredicateDecl decl;
            decl.name = p.items[0].symbol;
            if (decl.name == "=")
                reader_.fail(p, "equality is not supported");
            if (domain_->find_predicate(decl.name))
                reader_.fail(p, "predicate '" + decl.name + "' declared twice");
            for (const TypedName &param :
                 typed_list(reader_, span<const SExpr>(p.items.data() + 1, p.items.size() - 1)))
                decl.param_types.push_back(type_id(param.type, *param.where));
            domain_->predicates.push_back(move(decl));
        }
    }

    SchemaAtom schema_atom(const SExpr &e, const ActionSchema &schema) {
        if (!e.is_list || e.items.empty() || e.items[0].is_list)
            reader_.fail(e, "expected an atom");
        const string &name = e.items[0].symbol;
        auto pred = domain_->find_predicate(name);
        if (!pred)
            reader_.fail(e, "undeclared predicate '" + name + "'");
        SchemaAtom atom;
        atom.predicate = *pred;
        for (size_t i = 1; i < e.items.size(); ++i) {
            const SExpr &arg = e.items[i];
            if (arg.is_list)
                reader_.fail(arg, "nested term in atom");
            if (!arg.symbol.empty() && arg.symbol[0] == '?') {
                auto it = find(schema.param_names.begin(), schema.param_names.end(), arg.symbol);
                if (it == schema.param_names.end())
                    reader_.fail(arg, "unknown parameter '" + arg.symbol + "'");
                atom.args.push_back(
                    {Term::Kind::Parameter, static_cast<int>(it - schema.param_names.begin())});
            } else {
                auto c = domain_->find_constant(arg.symbol);
                if (!c)
                    reader_.fail(arg, "unknown constant '" + arg.symbol + "'");
                atom.args.push_back({Term::Kind::Constant, *c});
            }
        }
        const PredicateDecl &decl = domain_->predicates[atom.predicate];
        if (atom.args.size() != decl.arity())
            reader_.fail(e, "arity mismatch for '" + name + "': expected " +
                                to_string(decl.arity()) + ", got " + to_string(atom.args.size()));
        for (size_t i = 0; i < atom.args.size(); ++i) {
            const Term &t = atom.args[i];
            TypeId type = t.kind == Term::Kind::Parameter ? schema.param_types[t.index]
                                                          : domain_->constants[t.index].type;
            if (!domain_->is_subtype(type, decl.param_types[i]))
                reader_.fail(e.items[i + 1], "type mismatch for argument " + to_string(i + 1) +
                                                 " of '" + name + "'");
        }
        return atom;
    }

    static bool is_connective(const string &s) {
        static const set<string> unsupported{"not", "or", "imply", "exists", "forall",
                                             "when", "increase", "decrease", "="};
        return unsupported.count(s) > 0;
    }

    void precondition(const SExpr &e, ActionSchema &schema) {
        if (!e.is_list)
            reader_.fail(e, "malformed precondition");
        if (e.items.empty())
            return;
        if (is_symbol(e.items[0], "and")) {
            for (size_t i = 1; i < e.items.size(); ++i)
                precondition(e.items[i], schema);
            return;
        }
        if (!e.items[0].is_list && is_connective(e.items[0].symbol))
            reader_.fail(e, "'" + e.items[0].symbol +
                                "' is not allowed in preconditions (STRIPS only)");
        schema.preconditions.push_back(schema_atom(e, schema));
    }

    void effect(const SExpr &e, ActionSchema &schema) {
        if (!e.is_list)
            reader_.fail(e, "malformed effect");
        if (e.items.empty())
            return;
        if (is_symbol(e.items[0], "and")) {
            for (size_t i = 1; i < e.items.size(); ++i)
                effect(e.items[i], schema);
            return;
        }
        if (is_symbol(e.items[0], "not")) {
            if (e.items.size() != 2)
                reader_.fail(e, "malformed negative effect");
            schema.del_effects.push_back(schema_atom(e.items[1], schema));
            return;
        }
        if (!e.items[0].is_list && is_connective(e.items[0].symbol))
            reader_.fail(e, "'" + e.items[0].symbol + "' is not allowed in effects (STRIPS only)");
        schema.add_effects.push_back(schema_atom(e, schema));
    }

    void action(const SExpr &section) {
        if (section.items.size() < 2 || section.items[1].is_list)
            reader_.fail(section, "action without a name");
        ActionSchema schema;
        schema.name = section.items[1].symbol;
        if (domain_->find_schema(schema.name))
            reader_.fail(section, "action '" + schema.name + "' declared twice");
        for (size_t i = 2; i < section.items.size(); i += 2) {
            const SExpr &key = section.items[i];
            if (key.is_list || i + 1 >= section.items.size())
                reader_.fail(key, "malformed action body");
            const SExpr &value = section.items[i + 1];
            if (key.symbol == ":parameters") {
                if (!value.is_list)
                    reader_.fail(value, "parameters must be a list");
                for (const TypedName &p : typed_list(reader_, value.items)) {
                    if (p.name.empty() || p.name[0] != '?')
                        reader_.fail(*p.where, "parameter names start with '?'");
                    if (find(schema.param_names.begin(), schema.param_names.end(), p.name) !=
                        schema.param_names.end())
                        reader_.fail(*p.where, "duplicate parameter '" + p.name + "'");
                    schema.param_names.push_back(p.name);
                    schema.param_types.push_back(type_id(p.type, *p.where));
                }
            } else if (key.symbol == ":precondition") {
                precondition(value, schema);
            } else if (key.symbol == ":effect") {
                effect(value, schema);
            } else {
                reader_.fail(key, "unsupported action field '" + key.symbol + "'");
            }
        }
        domain_->schemas.push_back(move(schema));
    }
};

const SExpr &single_root(const Reader &reader, const vector<SExpr> &roots, string_view what) {
    if (roots.size() != 1)
        reader.fail(roots.empty() ? 1 : roots[1].line, roots.empty() ? 1 : roots[1].column,
                    "expected exactly one " + string(what) + " definition");
    return roots[0];
}

GroundAtom ground_atom(const Reader &reader, const SExpr &e, const DomainModel &domain,
                       const map<string, pair<ObjectId, TypeId>> &objects) {
    if (!e.is_list || e.items.empty() || e.items[0].is_list)
        reader.fail(e, "expected a ground atom");
    const string &name = e.items[0].symbol;
    if (name == "not")
        reader.fail(e, "negative literals are not supported");
    if (name == "and" || name == "or" || name == "=")
        reader.fail(e, "expected a ground atom, found '" + name + "'");
    auto pred = domain.find_predicate(name);
    if (!pred)
        reader.fail(e, "undeclared predicate '" + name + "'");
    const PredicateDecl &decl = domain.predicates[*pred];
    if (e.items.size() - 1 != decl.arity())
        reader.fail(e, "arity mismatch for '" + name + "': expected " + to_string(decl.arity()));
    GroundAtom atom{*pred, {}};
    for (size_t i = 1; i < e.items.size(); ++i) {
        const SExpr &arg = e.items[i];
        auto it = arg.is_list ? objects.end() : objects.find(arg.symbol);
        if (it == objects.end())
            reader.fail(arg, "undeclared object '" + (arg.is_list ? "(...)" : arg.symbol) + "'");
        if (!domain.is_subtype(it->second.second, decl.param_types[i - 1]))
            reader.fail(arg, "object '" + arg.symbol + "' has the wrong type for '" + name + "'");
        atom.args.push_back(it->second.first);
    }
    return atom;
}
}

shared_ptr<DomainModel> parse_domain(string_view text, string_view file) {
    Reader reader(text, file);
    vector<SExpr> roots = reader.read_all();
    return DomainParser(reader).parse(single_root(reader, roots, "domain"));
}

Instance parse_problem(string_view text, shared_ptr<const DomainModel> domain,
                       string_view file) {
    Reader reader(text, file);
    vector<SExpr> roots = reader.read_all();
    const SExpr &root = single_root(reader, roots, "problem");
    if (!root.is_list || root.items.size() < 2 || !is_symbol(root.items[0], "define") ||
        !root.items[1].is_list || root.items[1].items.size() != 2 ||
        !is_symbol(root.items[1].items[0], "problem"))
        reader.fail(root, "expected (define (problem <name>) ...)");
    string name = root.items[1].items[1].symbol;

    map<string, pair<ObjectId, TypeId>> objects;
    for (size_t c = 0; c < domain->constants.size(); ++c)
        objects[domain->constants[c].name] = {static_cast<ObjectId>(c), domain->constants[c].type};
    vector<Object> declared;
    const SExpr *init = nullptr;
    const SExpr *goal = nullptr;

    for (size_t i = 2; i < root.items.size(); ++i) {
        const SExpr &section = root.items[i];
        if (!section.is_list || section.items.empty() || section.items[0].is_list)
            reader.fail(section, "malformed problem section");
        const string &key = section.items[0].symbol;
        if (key == ":domain") {
            if (section.items.size() != 2 || section.items[1].symbol != domain->name)
                reader.fail(section, "problem refers to a different domain (expected '" +
                                         domain->name + "')");
        } else if (key == ":requirements") {
            for (size_t k = 1; k < section.items.size(); ++k)
                if (!is_symbol(section.items[k], ":strips") &&
                    !is_symbol(section.items[k], ":typing"))
                    reader.fail(section.items[k], "unsupported requirement");
        } else if (key == ":objects") {
            for (const TypedName &o : typed_list(
                     reader, span<const SExpr>(section.items.data() + 1, section.items.size() - 1))) {
                auto type = domain->find_type(o.type);
                if (!type)
                    reader.fail(*o.where, "undeclared type '" + o.type + "'");
                if (objects.count(o.name))
                    reader.fail(*o.where, "object '" + o.name + "' declared twice");
                objects[o.name] = {static_cast<ObjectId>(domain->constants.size() + declared.size()),
                                   *type};
                declared.push_back({o.name, *type});
            }
        } else if (key == ":init") {
            init = &section;
        } else if (key == ":goal") {
            goal = &section;
        } else {
            reader.fail(section, "unsupported problem section '" + key + "'");
        }
    }

    vector<GroundAtom> init_atoms;
    if (init)
        for (size_t k = 1; k < init->items.size(); ++k)
            init_atoms.push_back(ground_atom(reader, init->items[k], *domain, objects));

    vector<GroundAtom> goal_atoms;
    if (!goal)
        reader.fail(root, "problem has no :goal");
    if (goal->items.size() != 2)
        reader.fail(*goal, "malformed :goal");
    const SExpr &g = goal->items[1];
    if (g.is_list && !g.items.empty() && is_symbol(g.items[0], "and")) {
        for (size_t k = 1; k < g.items.size(); ++k)
            goal_atoms.push_back(ground_atom(reader, g.items[k], *domain, objects));
    } else if (g.is_list && !g.items.empty()) {
        goal_atoms.push_back(ground_atom(reader, g, *domain, objects));
    } else if (!g.is_list) {
        reader.fail(g, "goal must be a conjunction of positive atoms");
    }

    try {
        return Instance(move(domain), name, move(declared), init_atoms, goal_atoms);
    } catch (const ModelError &e) {
        reader.fail(root, e.what());
    }
}

string read_text_file(const filesystem::path &path) {
    ifstream in(path, ios::binary);
    if (!in)
        throw runtime_error("cannot open '" + path.string() + "'");
    ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

shared_ptr<DomainModel> load_domain(const filesystem::path &path) {
    return parse_domain(read_text_file(path), path.string());
}

Instance load_problem(const filesystem::path &path, shared_ptr<const DomainModel> domain) {
    return parse_problem(read_text_file(path), move(domain), path.string());
}

static string typed_name(const string &name, const string &type) {
    return name + " - " + type;
}

string format_domain(const DomainModel &domain) {
    ostringstream out;
    out << "(define (domain " << domain.name << ")\n";
    out << "  (:requirements :strips :typing)\n";
    if (domain.types.size() > 1) {
        out << "  (:types";
        for (size_t t = 1; t < domain.types.size(); ++t)
            out << " " << typed_name(domain.types[t].name, domain.types[domain.types[t].parent].name);
        out << ")\n";
    }
    if (!domain.constants.empty()) {
        out << "  (:constants";
        for (const Constant &c : domain.constants)
            out << " " << typed_name(c.name, domain.types[c.type].name);
        out << ")\n";
    }
    out << "  (:predicates";
    for (const PredicateDecl &p : domain.predicates) {
        out << "\n    (" << p.name;
        for (size_t i = 0; i < p.arity(); ++i)
            out << " ?a" << i << " - " << domain.types[p.param_types[i]].name;
        out << ")";
    }
    out << ")\n";

    for (const ActionSchema &s : domain.schemas) {
        auto atom = [&](const SchemaAtom &a) {
            string text = "(" + domain.predicates[a.predicate].name;
            for (const Term &t : a.args)
                text += " " + (t.kind == Term::Kind::Parameter ? s.param_names[t.index]
                                                                : domain.constants[t.index].name);
            return text + ")";
        };
        out << "  (:action " << s.name << "\n    :parameters (";
        for (size_t i = 0; i < s.arity(); ++i)
            out << (i ? " " : "") << typed_name(s.param_names[i], domain.types[s.param_types[i]].name);
        out << ")\n    :precondition (and";
        for (const SchemaAtom &a : s.preconditions)
            out << " " << atom(a);
        out << ")\n    :effect (and";
        for (const SchemaAtom &a : s.add_effects)
            out << " " << atom(a);
        for (const SchemaAtom &a : s.del_effects)
            out << " (not " << atom(a) << ")";
        out << "))\n";
    }
    out << ")\n";
    return out.str();
}

string format_problem(const Instance &instance) {
    const DomainModel &domain = instance.domain();
    auto atom_text = [&](AtomId id) {
        GroundAtom a = instance.atom(id);
        string text = "(" + domain.predicates[a.predicate].name;
        for (ObjectId o : a.args)
            text += " " + instance.objects()[o].name;
        return text + ")";
    };
    ostringstream out;
    out << "(define (problem " << instance.name() << ")\n  (:domain " << domain.name << ")\n";
    out << "  (:objects";
    for (size_t o = domain.constants.size(); o < instance.objects().size(); ++o) {
        const Object &obj = instance.objects()[o];
        out << "\n    " << typed_name(obj.name, domain.types[obj.type].name);
    }
    out << ")\n  (:init";
    for (AtomId a : instance.init().atoms())
        out << "\n    " << atom_text(a);
    out << ")\n  (:goal (and";
    for (AtomId a : instance.goal())
        out << "\n    " << atom_text(a);
    out << ")))\n";
    return out.str();
}

string format_plan(const Instance &instance, span<const GroundAction> plan) {
    string text;
    for (const GroundAction &a : plan)
        text += action_name(instance, a) + "\n";
    return text;
}

vector<GroundAction> parse_plan(string_view text, const Instance &instance) {
    Reader reader(text, "<plan>");
    vector<GroundAction> plan;
    for (const SExpr &e : reader.read_all()) {
        if (!e.is_list || e.items.empty() || e.items[0].is_list)
            reader.fail(e, "expected (action obj...)");
        auto schema = instance.domain().find_schema(e.items[0].symbol);
        if (!schema)
            reader.fail(e, "unknown action '" + e.items[0].symbol + "'");
        vector<ObjectId> args;
        for (size_t i = 1; i < e.items.size(); ++i) {
            auto o = e.items[i].is_list ? nullopt : instance.find_object(e.items[i].symbol);
            if (!o)
                reader.fail(e.items[i], "unknown object");
            args.push_back(*o);
        }
        try {
            plan.push_back(instantiate(instance, *schema, args));
        } catch (const ModelError &err) {
            reader.fail(e, err.what());
        }
    }
    return plan;
}
}
