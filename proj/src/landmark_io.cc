#include "pgp/landmarks.h"
#include "pgp/pddl.h"

#include <fstream>
#include <sstream>

using namespace std;

namespace pgp {
string node_label(const LandmarkNode &node, const Instance &instance, const PointerSet *pointers) {
    string text;
    if (node.kind == LandmarkKind::Pointer) {
        for (const auto &[z, v] : node.assignments) {
            if (!text.empty())
                text += " v ";
            string name = pointers ? pointers->pointers[z].name : "z" + to_string(z);
            text += name + "=" + to_string(v);
        }
        return "(" + text + ")";
    }
    for (AtomId a : node.atoms) {
        if (!text.empty())
            text += " v ";
        text += instance.atom_name(a);
    }
    return text;
}

static string escape(const string &s) {
    string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

string to_dot(const LandmarkGraph &graph, const Instance &instance, const PointerSet *pointers) {
    ostringstream out;
    out << "digraph landmarks {\n  node [shape=box];\n";
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        const LandmarkNode &n = graph.nodes[i];
        out << "  n" << i << " [label=\"" << escape(node_label(n, instance, pointers)) << "\"";
        if (n.goal)
            out << ", peripheries=2";
        if (n.kind == LandmarkKind::Pointer)
            out << ", shape=ellipse";
        out << "];\n";
    }
    for (const Ordering &o : graph.orderings) {
        out << "  n" << o.from << " -> n" << o.to;
        if (o.kind == OrderingKind::Natural)
            out << " [style=dashed]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

uint64_t landmark_cache_key(const Instance &instance, const PointerSet *pointers) {
    string text = format_domain(instance.domain()) + format_problem(instance);
    if (pointers)
        text += "pointers " + pointers->str(instance.domain());
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

string serialize_graph(const LandmarkGraph &graph) {
    ostringstream out;
    out << "landmark-graph 1\n";
    for (const LandmarkNode &n : graph.nodes) {
        char kind = n.kind == LandmarkKind::Fact ? 'F' : n.kind == LandmarkKind::Disjunctive ? 'D' : 'P';
        out << "node " << kind << " " << n.goal << " " << n.initially_true << " " << n.object;
        out << " atoms " << n.atoms.size();
        for (AtomId a : n.atoms)
            out << " " << a;
        out << " assign " << n.assignments.size();
        for (const auto &[z, v] : n.assignments)
            out << " " << z << " " << v;
        out << " first " << n.first_achievers.size();
        for (int a : n.first_achievers)
            out << " " << a;
        out << "\n";
    }
    for (const Ordering &o : graph.orderings)
        out << "edge " << o.from << " " << o.to << " "
            << (o.kind == OrderingKind::Natural ? "nat" : "gn") << "\n";
    for (const string &note : graph.notes)
        out << "note " << note << "\n";
    return out.str();
}

LandmarkGraph deserialize_graph(const string &text) {
    istringstream in(text);
    string line;
    if (!getline(in, line) || line != "landmark-graph 1")
        throw runtime_error("not a landmark graph file");
    LandmarkGraph graph;
    auto expect = [](istringstream &s, const string &word) {
        string w;
        if (!(s >> w) || w != word)
            throw runtime_error("corrupt landmark graph: expected '" + word + "'");
    };
    while (getline(in, line)) {
        istringstream s(line);
        string tag;
        s >> tag;
        if (tag == "node") {
            LandmarkNode n;
            char kind;
            size_t count;
            s >> kind >> n.goal >> n.initially_true >> n.object;
            n.kind = kind == 'F' ? LandmarkKind::Fact
                     : kind == 'D' ? LandmarkKind::Disjunctive
                                   : LandmarkKind::Pointer;
            expect(s, "atoms");
            s >> count;
            n.atoms.resize(count);
            for (AtomId &a : n.atoms)
                s >> a;
            expect(s, "assign");
            s >> count;
            n.assignments.resize(count);
            for (auto &[z, v] : n.assignments)
                s >> z >> v;
            expect(s, "first");
            s >> count;
            n.first_achievers.resize(count);
            for (int &a : n.first_achievers)
                s >> a;
            if (!s)
                throw runtime_error("corrupt landmark graph node");
            graph.nodes.push_back(move(n));
        } else if (tag == "edge") {
            Ordering o;
            string kind;
            s >> o.from >> o.to >> kind;
            if (!s || o.from < 0 || o.to < 0 ||
                o.from >= static_cast<int>(graph.nodes.size()) ||
                o.to >= static_cast<int>(graph.nodes.size()))
                throw runtime_error("corrupt landmark graph edge");
            o.kind = kind == "nat" ? OrderingKind::Natural : OrderingKind::GreedyNecessary;
            graph.orderings.push_back(o);
        } else if (tag == "note") {
            graph.notes.push_back(line.size() > 5 ? line.substr(5) : "");
        } else if (!tag.empty()) {
            throw runtime_error("corrupt landmark graph: unknown record '" + tag + "'");
        }
    }
    return graph;
}

LandmarkGraph cached_landmark_graph(const GroundTask &task, const PointerSet *pointers,
                                    const optional<filesystem::path> &cache_dir) {
    if (!cache_dir)
        return build_landmark_graph(task, pointers);
    ostringstream name;
    name << hex << landmark_cache_key(*task.instance, pointers) << ".lmg";
    filesystem::path file = *cache_dir / name.str();
    if (filesystem::exists(file)) {
        try {
            return deserialize_graph(read_text_file(file));
        } catch (const exception &) {
            // Rebuild below and overwrite the bad file.
        }
    }
    LandmarkGraph graph = build_landmark_graph(task, pointers);
    filesystem::create_directories(*cache_dir);
    filesystem::path tmp = file;
    tmp += ".tmp";
    {
        ofstream out(tmp, ios::binary);
        out << serialize_graph(graph);
    }
    filesystem::rename(tmp, file);
    return graph;
}
}
