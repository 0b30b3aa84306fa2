#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xtalkprint {

enum class DeviceKind { L5, T5, H7 };
enum class PatternName { P1, L2, L3, L4, T4, L5p, T5p };

std::string to_string(DeviceKind kind);
std::string to_string(PatternName name);
DeviceKind device_kind_from_string(std::string_view s);
PatternName pattern_from_string(std::string_view s);
std::vector<PatternName> all_patterns();

/// Undirected qubit pair in canonical (low, high) order.
using Coupling = std::pair<int, int>;

inline Coupling make_coupling(int a, int b) {
    return a < b ? Coupling{a, b} : Coupling{b, a};
}

/// Physical device graph. Couplings are stored directed low->high; all
/// adjacency queries are undirected. The underlying graph is always a tree.
struct DeviceTopology {
    std::string device_id;
    DeviceKind kind = DeviceKind::L5;
    int num_qubits = 0;
    std::vector<Coupling> couplings;

    bool adjacent(int a, int b) const;
    std::vector<std::vector<int>> adjacency() const;
    /// BFS distances from qubit q (tree, so unique paths).
    std::vector<int> distances_from(int q) const;
    bool is_tree() const;
};

/// Probe circuit topology in its canonical labeling: paths numbered along
/// the path, claw center at vertex 0, T5p labeled like the T5 device.
struct PatternTopology {
    PatternName name = PatternName::P1;
    int num_vertices = 0;
    std::vector<Coupling> edges;

    bool adjacent(int a, int b) const;
};

/// Injective adjacency-preserving map pattern vertex -> device qubit.
/// Orientation-reversed maps of a path are distinct embeddings.
struct Embedding {
    PatternName pattern = PatternName::P1;
    std::string device_id;
    std::vector<int> vertex_map;

    bool operator==(const Embedding&) const = default;
};

struct Fleet {
    std::uint64_t fleet_seed = 0;
    std::vector<DeviceTopology> devices;

    const DeviceTopology& device(std::string_view id) const;
};

DeviceTopology canonical_topology(DeviceKind kind, std::string device_id);
PatternTopology pattern_topology(PatternName name);

/// The 9-device evaluation fleet: d0..d2 L5, d3..d5 T5, d6..d8 H7.
Fleet default_fleet(std::uint64_t fleet_seed);

/// All injective adjacency-preserving maps of the pattern into the device,
/// in lexicographic vertex_map order.
std::vector<Embedding> enumerate_embeddings(const PatternTopology& pattern,
                                            const DeviceTopology& device);

/// Fleet-wide enumeration: device order, then lexicographic vertex_map.
std::vector<Embedding> enumerate_embeddings(const PatternTopology& pattern, const Fleet& fleet);

/// Independent validity check: injectivity plus edge preservation.
bool is_embedding(const Embedding& emb, const PatternTopology& pattern,
                  const DeviceTopology& device);

/// Minimal graph supporting a circuit set: every touched qubit, every
/// two-qubit-gate pair. Vertices are device qubit indices.
struct QubitGraph {
    std::vector<int> vertices;
    std::vector<Coupling> edges;
};

struct IdtCircuitSpec;  // experiments.hpp
QubitGraph topology_dependency(std::span<const IdtCircuitSpec> circuits);

}  // namespace xtalkprint
