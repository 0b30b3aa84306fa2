#include "xtalkprint/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

#include "xtalkprint/experiments.hpp"

namespace xtalkprint {

std::string to_string(DeviceKind kind) {
    switch (kind) {
        case DeviceKind::L5: return "L5";
        case DeviceKind::T5: return "T5";
        case DeviceKind::H7: return "H7";
    }
    throw std::logic_error("unknown device kind");
}

std::string to_string(PatternName name) {
    switch (name) {
        case PatternName::P1: return "P1";
        case PatternName::L2: return "L2";
        case PatternName::L3: return "L3";
        case PatternName::L4: return "L4";
        case PatternName::T4: return "T4";
        case PatternName::L5p: return "L5p";
        case PatternName::T5p: return "T5p";
    }
    throw std::logic_error("unknown pattern");
}

DeviceKind device_kind_from_string(std::string_view s) {
    if (s == "L5") return DeviceKind::L5;
    if (s == "T5") return DeviceKind::T5;
    if (s == "H7") return DeviceKind::H7;
    throw std::invalid_argument("unknown device kind: " + std::string(s));
}

PatternName pattern_from_string(std::string_view s) {
    for (PatternName p : all_patterns())
        if (to_string(p) == s) return p;
    throw std::invalid_argument("unknown pattern: " + std::string(s));
}

std::vector<PatternName> all_patterns() {
    return {PatternName::P1, PatternName::L2, PatternName::L3, PatternName::L4,
            PatternName::T4, PatternName::L5p, PatternName::T5p};
}

bool DeviceTopology::adjacent(int a, int b) const {
    return std::find(couplings.begin(), couplings.end(), make_coupling(a, b)) != couplings.end();
}

std::vector<std::vector<int>> DeviceTopology::adjacency() const {
    std::vector<std::vector<int>> adj(num_qubits);
    for (auto [a, b] : couplings) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

std::vector<int> DeviceTopology::distances_from(int q) const {
    std::vector<int> dist(num_qubits, -1);
    auto adj = adjacency();
    std::deque<int> queue{q};
    dist[q] = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
    }
    return dist;
}

bool DeviceTopology::is_tree() const {
    if (static_cast<int>(couplings.size()) != num_qubits - 1) return false;
    auto dist = distances_from(0);
    return std::all_of(dist.begin(), dist.end(), [](int d) { return d >= 0; });
}

bool PatternTopology::adjacent(int a, int b) const {
    return std::find(edges.begin(), edges.end(), make_coupling(a, b)) != edges.end();
}

const DeviceTopology& Fleet::device(std::string_view id) const {
    for (const auto& d : devices)
        if (d.device_id == id) return d;
    throw std::invalid_argument("no such device: " + std::string(id));
}

namespace {

std::vector<Coupling> path_edges(int n) {
    std::vector<Coupling> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return edges;
}

}  // namespace

DeviceTopology canonical_topology(DeviceKind kind, std::string device_id) {
    DeviceTopology topo;
    topo.device_id = std::move(device_id);
    topo.kind = kind;
    switch (kind) {
        case DeviceKind::L5:
            topo.num_qubits = 5;
            topo.couplings = path_edges(5);
            break;
        case DeviceKind::T5:
            topo.num_qubits = 5;
            topo.couplings = {{0, 1}, {1, 2}, {1, 3}, {3, 4}};
            break;
        case DeviceKind::H7:
            topo.num_qubits = 7;
            topo.couplings = {{0, 1}, {1, 2}, {1, 3}, {3, 5}, {4, 5}, {5, 6}};
            break;
    }
    return topo;
}

PatternTopology pattern_topology(PatternName name) {
    PatternTopology p;
    p.name = name;
    switch (name) {
        case PatternName::P1:
            p.num_vertices = 1;
            break;
        case PatternName::L2:
            p.num_vertices = 2;
            p.edges = path_edges(2);
            break;
        case PatternName::L3:
            p.num_vertices = 3;
            p.edges = path_edges(3);
            break;
        case PatternName::L4:
            p.num_vertices = 4;
            p.edges = path_edges(4);
            break;
        case PatternName::T4:
            p.num_vertices = 4;
            p.edges = {{0, 1}, {0, 2}, {0, 3}};
            break;
        case PatternName::L5p:
            p.num_vertices = 5;
            p.edges = path_edges(5);
            break;
        case PatternName::T5p:
            p.num_vertices = 5;
            p.edges = {{0, 1}, {1, 2}, {1, 3}, {3, 4}};
            break;
    }
    return p;
}

Fleet default_fleet(std::uint64_t fleet_seed) {
    Fleet fleet;
    fleet.fleet_seed = fleet_seed;
    const DeviceKind kinds[] = {DeviceKind::L5, DeviceKind::T5, DeviceKind::H7};
    int id = 0;
    for (DeviceKind kind : kinds)
        for (int i = 0; i < 3; ++i, ++id)
            fleet.devices.push_back(canonical_topology(kind, "d" + std::to_string(id)));
    return fleet;
}

namespace {

void extend_map(const PatternTopology& pattern, const DeviceTopology& device,
                const std::vector<std::vector<int>>& adj, std::vector<int>& map,
                std::vector<bool>& used, std::vector<Embedding>& out) {
    const int k = static_cast<int>(map.size());
    if (k == pattern.num_vertices) {
        out.push_back(Embedding{pattern.name, device.device_id, map});
        return;
    }
    // candidates in ascending order keeps vertex_map output lexicographic
    for (int q = 0; q < device.num_qubits; ++q) {
        if (used[q]) continue;
        bool ok = true;
        for (int v = 0; v < k && ok; ++v)
            if (pattern.adjacent(v, k)) ok = std::find(adj[q].begin(), adj[q].end(), map[v]) != adj[q].end();
        if (!ok) continue;
        map.push_back(q);
        used[q] = true;
        extend_map(pattern, device, adj, map, used, out);
        map.pop_back();
        used[q] = false;
    }
}

}  // namespace

std::vector<Embedding> enumerate_embeddings(const PatternTopology& pattern,
                                            const DeviceTopology& device) {
    std::vector<Embedding> out;
    std::vector<int> map;
    std::vector<bool> used(device.num_qubits, false);
    auto adj = device.adjacency();
    extend_map(pattern, device, adj, map, used, out);
    return out;
}

std::vector<Embedding> enumerate_embeddings(const PatternTopology& pattern, const Fleet& fleet) {
    std::vector<Embedding> out;
    for (const auto& device : fleet.devices) {
        auto per_device = enumerate_embeddings(pattern, device);
        out.insert(out.end(), per_device.begin(), per_device.end());
    }
    return out;
}

bool is_embedding(const Embedding& emb, const PatternTopology& pattern,
                  const DeviceTopology& device) {
    if (emb.pattern != pattern.name || emb.device_id != device.device_id) return false;
    if (static_cast<int>(emb.vertex_map.size()) != pattern.num_vertices) return false;
    std::set<int> image;
    for (int q : emb.vertex_map) {
        if (q < 0 || q >= device.num_qubits) return false;
        if (!image.insert(q).second) return false;  // not injective
    }
    for (auto [u, v] : pattern.edges)
        if (!device.adjacent(emb.vertex_map[u], emb.vertex_map[v])) return false;
    return true;
}

QubitGraph topology_dependency(std::span<const IdtCircuitSpec> circuits) {
    std::set<int> vertices;
    std::set<Coupling> edges;
    for (const auto& spec : circuits) {
        if (spec.drive.kind == DriveKind::Single) {
            vertices.insert(spec.drive.a);
        } else if (spec.drive.kind == DriveKind::Pair) {
            vertices.insert(spec.drive.a);
            vertices.insert(spec.drive.b);
            edges.insert(make_coupling(spec.drive.a, spec.drive.b));
        }
        for (int q : spec.spectators) vertices.insert(q);
    }
    QubitGraph g;
    g.vertices.assign(vertices.begin(), vertices.end());
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

}  // namespace xtalkprint
