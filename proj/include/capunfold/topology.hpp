#pragma once

// Index-level mesh connectivity shared by validation, forest growth and
// development. Triangles are CCW vertex triples; a directed edge a->b belongs
// to the unique face that lists it in that order.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "capunfold/error.hpp"

namespace capunfold {

using Triangle = std::array<int, 3>;

inline std::pair<int, int> edge_key(int a, int b) noexcept { return a < b ? std::pair{a, b} : std::pair{b, a}; }

struct MeshTopology {
    int vertex_count = 0;
    std::map<std::pair<int, int>, int> directed;               // (a, b) -> face
    std::map<std::pair<int, int>, std::vector<int>> edges;     // undirected -> faces
    std::vector<std::vector<int>> neighbors;                   // sorted ascending
    std::vector<std::vector<int>> vertex_faces;

    [[nodiscard]] int face_with(int a, int b) const {
        const auto it = directed.find({a, b});
        return it == directed.end() ? -1 : it->second;
    }

    [[nodiscard]] bool is_boundary_edge(int a, int b) const {
        const auto it = edges.find(edge_key(a, b));
        return it != edges.end() && it->second.size() == 1;
    }

    /// Boundary half-edges (a, b) as they appear in their single face.
    [[nodiscard]] std::vector<std::pair<int, int>> boundary_half_edges() const {
        std::vector<std::pair<int, int>> out;
        for (const auto& [key, faces] : edges) {
            if (faces.size() != 1) continue;
            const auto [a, b] = key;
            out.push_back(face_with(a, b) >= 0 ? std::pair{a, b} : std::pair{b, a});
        }
        return out;
    }
};

/// Position of v inside triangle t, or -1.
inline int corner_of(const Triangle& t, int v) noexcept {
    for (int i = 0; i < 3; ++i)
        if (t[static_cast<std::size_t>(i)] == v) return i;
    return -1;
}

/// The triangle rotated so that v comes first.
inline Triangle rotate_to(const Triangle& t, int v) noexcept {
    const int i = corner_of(t, v);
    return {t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % 3)],
            t[static_cast<std::size_t>((i + 2) % 3)]};
}

inline MeshTopology build_topology(int vertex_count, const std::vector<Triangle>& triangles) {
    MeshTopology topo;
    topo.vertex_count = vertex_count;
    topo.neighbors.assign(static_cast<std::size_t>(vertex_count), {});
    topo.vertex_faces.assign(static_cast<std::size_t>(vertex_count), {});
    for (std::size_t f = 0; f < triangles.size(); ++f) {
        const auto& t = triangles[f];
        for (int v : t)
            if (v < 0 || v >= vertex_count)
                throw Error(ErrorCode::bad_index, "face " + std::to_string(f) + " references vertex " + std::to_string(v));
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw Error(ErrorCode::degenerate_triangle, "face " + std::to_string(f) + " repeats a vertex");
        for (int i = 0; i < 3; ++i) {
            const int a = t[static_cast<std::size_t>(i)];
            const int b = t[static_cast<std::size_t>((i + 1) % 3)];
            if (!topo.directed.emplace(std::pair{a, b}, static_cast<int>(f)).second)
                throw Error(ErrorCode::inconsistent_orientation,
                            "directed edge " + std::to_string(a) + "->" + std::to_string(b) + " appears twice");
            auto& list = topo.edges[edge_key(a, b)];
            list.push_back(static_cast<int>(f));
            if (list.size() > 2)
                throw Error(ErrorCode::non_manifold_edge,
                            "edge " + std::to_string(a) + "-" + std::to_string(b) + " has more than two faces");
            topo.neighbors[static_cast<std::size_t>(a)].push_back(b);
            topo.neighbors[static_cast<std::size_t>(b)].push_back(a);
            topo.vertex_faces[static_cast<std::size_t>(a)].push_back(static_cast<int>(f));
        }
    }
    for (auto& nb : topo.neighbors) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return topo;
}

/// Orders boundary half-edges into one cycle (in half-edge direction).
/// Throws non_disk_topology unless they form exactly one simple cycle.
inline std::vector<int> boundary_cycle(const MeshTopology& topo) {
    const auto half = topo.boundary_half_edges();
    if (half.empty()) throw Error(ErrorCode::non_disk_topology, "mesh has no boundary");
    std::map<int, int> next;
    for (const auto& [a, b] : half)
        if (!next.emplace(a, b).second)
            throw Error(ErrorCode::non_disk_topology, "boundary vertex " + std::to_string(a) + " is pinched");
    std::vector<int> cycle;
    int v = half.front().first;
    for (std::size_t step = 0; step < half.size(); ++step) {
        cycle.push_back(v);
        const auto it = next.find(v);
        if (it == next.end()) throw Error(ErrorCode::non_disk_topology, "boundary is not closed");
        v = it->second;
    }
    if (v != cycle.front() || std::set<int>(cycle.begin(), cycle.end()).size() != cycle.size())
        throw Error(ErrorCode::non_disk_topology, "boundary is not a single cycle");
    return cycle;
}

/// Faces around v in CCW order. For a boundary vertex the fan starts at the
/// face holding the boundary half-edge (v, next) and ends at the face holding
/// (prev, v); for an interior vertex it starts at its lowest-index face.
inline std::vector<int> vertex_fan(const MeshTopology& topo, const std::vector<Triangle>& tris, int v,
                                   std::optional<int> boundary_next = std::nullopt) {
    const auto& incident = topo.vertex_faces[static_cast<std::size_t>(v)];
    if (incident.empty()) return {};
    int start = *std::min_element(incident.begin(), incident.end());
    if (boundary_next) start = topo.face_with(v, *boundary_next);
    std::vector<int> fan;
    int f = start;
    while (f >= 0 && fan.size() <= incident.size()) {
        fan.push_back(f);
        const Triangle t = rotate_to(tris[static_cast<std::size_t>(f)], v);
        f = topo.face_with(v, t[2]);
        if (f == start) break;
    }
    if (fan.size() != incident.size())
        throw Error(ErrorCode::non_manifold_edge, "vertex " + std::to_string(v) + " has a non-disk neighborhood");
    return fan;
}

} // namespace capunfold
