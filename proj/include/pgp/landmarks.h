#ifndef PGP_LANDMARKS_H
#define PGP_LANDMARKS_H

#include "program.h"
#include "strips.h"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pgp {
enum class LandmarkKind : std::uint8_t { Fact, Disjunctive, Pointer };
enum class OrderingKind : std::uint8_t { Natural, GreedyNecessary };

struct LandmarkNode {
    LandmarkKind kind = LandmarkKind::Fact;
    // Fact: one atom. Disjunctive: 2..4 atoms of one predicate.
    std::vector<AtomId> atoms;
    // Pointer: the object that must be pointed at and the (pointer, value)
    // assignments that point at it.
    ObjectId object = -1;
    std::vector<std::pair<int, int>> assignments;
    bool goal = false;
    bool initially_true = false;
    // Ground action ids (of the instance's GroundTask) that first achieve this node.
    std::vector<int> first_achievers;
};

struct Ordering {
    int from = 0;
    int to = 0;
    OrderingKind kind = OrderingKind::GreedyNecessary;

    friend bool operator==(const Ordering &, const Ordering &) = default;
};

struct LandmarkGraph {
    std::vector<LandmarkNode> nodes;
    std::vector<Ordering> orderings;
    // Dropped cycle edges and the like.
    std::vector<std::string> notes;

    int find_fact(AtomId atom) const;
    int find_disjunction(std::span<const AtomId> sorted_atoms) const;
    int find_pointer(ObjectId object) const;
    bool has_ordering(int from, int to) const;
    std::size_t count(LandmarkKind kind) const;
};

// Delete-relaxed layered reachability. Levels are -1 for unreachable.
struct RelaxedGraph {
    std::vector<int> atom_level;
    std::vector<int> action_level;
    int num_layers = 0;
    bool relaxed_solvable = false;
};

RelaxedGraph build_rpg(const GroundTask &task);

// Relaxed reachability from the initial state that never makes `forbidden`
// atoms true and never uses actions whose flag in `excluded` is set.
std::vector<bool> relaxed_reachable(const GroundTask &task, std::span<const AtomId> forbidden,
                                    const std::vector<bool> *excluded = nullptr);

LandmarkGraph backchain_landmarks(const GroundTask &task);
void add_natural_orderings(LandmarkGraph &graph, const GroundTask &task);

struct PointerLandmarkReport {
    // Landmarks whose achiever objects had no pointer of a compatible type.
    std::vector<std::pair<int, ObjectId>> skipped;
};
PointerLandmarkReport add_pointer_landmarks(LandmarkGraph &graph, const GroundTask &task,
                                            const PointerSet &pointers);

// backchain + natural orderings + pointer landmarks (when pointers are given).
LandmarkGraph build_landmark_graph(const GroundTask &task, const PointerSet *pointers);

std::string node_label(const LandmarkNode &node, const Instance &instance,
                       const PointerSet *pointers);
std::string to_dot(const LandmarkGraph &graph, const Instance &instance,
                   const PointerSet *pointers);

// Text cache keyed by a hash of the instance and pointer set.
std::uint64_t landmark_cache_key(const Instance &instance, const PointerSet *pointers);
std::string serialize_graph(const LandmarkGraph &graph);
LandmarkGraph deserialize_graph(const std::string &text);
LandmarkGraph cached_landmark_graph(const GroundTask &task, const PointerSet *pointers,
                                    const std::optional<std::filesystem::path> &cache_dir);
}

#endif
