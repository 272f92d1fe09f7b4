#pragma once

// Convex caps: a triangulated disk in 3D whose boundary lies in the plane
// z = 0 and bounds a convex polygon B. Validation computes the face tilt,
// per-vertex curvature and the projected planar graph.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "capunfold/error.hpp"
#include "capunfold/geom.hpp"
#include "capunfold/topology.hpp"

namespace capunfold {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return {s * a.x, s * a.y, s * a.z}; }
    friend constexpr bool operator==(Vec3, Vec3) noexcept = default;
};

constexpr double dot(Vec3 a, Vec3 b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) noexcept {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) noexcept { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) noexcept { return norm(a - b); }
constexpr Point2 xy(Vec3 a) noexcept { return {a.x, a.y}; }

/// Angle between two vectors, accurate near 0 and pi.
inline double angle_between(Vec3 a, Vec3 b) noexcept { return std::atan2(norm(cross(a, b)), dot(a, b)); }
inline double angle_between(Point2 a, Point2 b) noexcept { return std::atan2(std::abs(cross(a, b)), dot(a, b)); }

struct Cap {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles; // CCW seen from +z
    std::vector<int> boundary;       // CCW cycle

    [[nodiscard]] int vertex_count() const noexcept { return static_cast<int>(vertices.size()); }
};

struct CapMetrics {
    double phi_max = 0.0;                // largest face-normal tilt from +z
    std::map<int, double> omega;         // curvature at internal vertices only
    double omega_total = 0.0;
    double delta_theta = 0.0;            // pi/2 minus the largest projected face angle
    double max_face_angle = 0.0;         // 3D
    double max_projected_angle = 0.0;
    bool projected_acute = true;
    double diameter = 0.0;
};

struct ProjectionGraph {
    std::vector<Point2> positions;
    std::vector<std::array<int, 2>> edges; // (a, b) with a < b, sorted
    std::vector<int> boundary;
    std::vector<int> internal;             // ascending
    std::vector<bool> on_boundary;
    std::vector<std::vector<int>> neighbors;
};

struct ValidationOptions {
    double acute_margin = 1e-6;   // radians
    double rel_tol = 1e-9;        // relative to the cap diameter
    double angle_tol = 1e-9;      // tolerated negative curvature, radians
};

namespace detail {

inline double diameter_of(const std::vector<Vec3>& pts) {
    if (pts.empty()) return 0.0;
    Vec3 lo = pts.front(), hi = pts.front();
    for (const auto& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    return norm(hi - lo);
}

inline std::array<double, 3> corner_angles(Vec3 a, Vec3 b, Vec3 c) noexcept {
    return {angle_between(b - a, c - a), angle_between(c - b, a - b), angle_between(a - c, b - c)};
}

inline std::array<double, 3> corner_angles(Point2 a, Point2 b, Point2 c) noexcept {
    return {angle_between(b - a, c - a), angle_between(c - b, a - b), angle_between(a - c, b - c)};
}

/// Throws crossing_edges if two projected edges meet other than at a shared endpoint.
inline void check_planar(const std::vector<Point2>& pos, const std::vector<std::array<int, 2>>& edges) {
    std::vector<std::size_t> order(edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto lo = [&](std::size_t i) { return std::min(pos[edges[i][0]].x, pos[edges[i][1]].x); };
    auto hi = [&](std::size_t i) { return std::max(pos[edges[i][0]].x, pos[edges[i][1]].x); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lo(a) < lo(b); });
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& e = edges[order[i]];
        const double reach = hi(order[i]);
        for (std::size_t j = i + 1; j < order.size() && lo(order[j]) <= reach; ++j) {
            const auto& f = edges[order[j]];
            const Point2 a = pos[e[0]], b = pos[e[1]], c = pos[f[0]], d = pos[f[1]];
            const bool shared = e[0] == f[0] || e[0] == f[1] || e[1] == f[0] || e[1] == f[1];
            const bool bad = shared ? segments_cross_properly(a, b, c, d) : segments_intersect(a, b, c, d);
            if (bad)
                throw Error(ErrorCode::crossing_edges, "projected edges " + std::to_string(e[0]) + "-" +
                                                           std::to_string(e[1]) + " and " + std::to_string(f[0]) +
                                                           "-" + std::to_string(f[1]) + " cross");
        }
    }
}

} // namespace detail

/// Planar projection (drop z). Checks that the projection is an embedding.
inline ProjectionGraph project(const Cap& cap) {
    const MeshTopology topo = build_topology(cap.vertex_count(), cap.triangles);
    ProjectionGraph g;
    g.positions.reserve(cap.vertices.size());
    for (const auto& v : cap.vertices) g.positions.push_back(xy(v));
    for (const auto& [key, faces] : topo.edges) g.edges.push_back({key.first, key.second});
    g.boundary = cap.boundary;
    g.on_boundary.assign(cap.vertices.size(), false);
    for (int b : cap.boundary) g.on_boundary[static_cast<std::size_t>(b)] = true;
    for (int v = 0; v < cap.vertex_count(); ++v)
        if (!g.on_boundary[static_cast<std::size_t>(v)]) g.internal.push_back(v);
    g.neighbors = topo.neighbors;
    detail::check_planar(g.positions, g.edges);
    return g;
}

/// Checks every cap hypothesis and returns the tilt and curvature metrics.
inline CapMetrics validate_cap(const Cap& cap, const ValidationOptions& opt = {}) {
    const int n = cap.vertex_count();
    if (n < 3 || cap.triangles.empty() || cap.boundary.size() < 3)
        throw Error(ErrorCode::invalid_argument, "a cap needs at least one triangle and a boundary of 3 vertices");
    for (const auto& v : cap.vertices)
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
            throw Error(ErrorCode::invalid_argument, "non-finite vertex coordinate");
    for (int b : cap.boundary)
        if (b < 0 || b >= n) throw Error(ErrorCode::bad_index, "boundary references vertex " + std::to_string(b));

    const MeshTopology topo = build_topology(n, cap.triangles);

    // The listed boundary must be exactly the set of single-face edges, in face order.
    const std::size_t nb = cap.boundary.size();
    std::size_t single = 0;
    for (const auto& [key, faces] : topo.edges) single += faces.size() == 1 ? 1 : 0;
    if (single != nb) throw Error(ErrorCode::boundary_mismatch, "boundary length disagrees with the mesh");
    for (std::size_t i = 0; i < nb; ++i) {
        const int a = cap.boundary[i], b = cap.boundary[(i + 1) % nb];
        if (!topo.is_boundary_edge(a, b) || topo.face_with(a, b) < 0)
            throw Error(ErrorCode::boundary_mismatch,
                        "boundary edge " + std::to_string(a) + "->" + std::to_string(b) + " is not a CCW mesh border");
    }
    for (int v = 0; v < n; ++v)
        if (topo.vertex_faces[static_cast<std::size_t>(v)].empty())
            throw Error(ErrorCode::bad_index, "vertex " + std::to_string(v) + " is unused");
    const long euler = static_cast<long>(n) - static_cast<long>(topo.edges.size()) +
                       static_cast<long>(cap.triangles.size());
    if (euler != 1) throw Error(ErrorCode::non_disk_topology, "mesh is not a topological disk");

    CapMetrics m;
    m.diameter = detail::diameter_of(cap.vertices);
    const double ltol = opt.rel_tol * std::max(m.diameter, 1e-300);

    std::vector<bool> on_boundary(static_cast<std::size_t>(n), false);
    Polygon base;
    for (int b : cap.boundary) {
        on_boundary[static_cast<std::size_t>(b)] = true;
        const Vec3 p = cap.vertices[static_cast<std::size_t>(b)];
        if (std::abs(p.z) > ltol)
            throw Error(ErrorCode::non_planar_boundary, "boundary vertex " + std::to_string(b) + " has z = " + std::to_string(p.z));
        base.push_back(xy(p));
    }
    if (!(signed_area(base) > 0.0)) throw Error(ErrorCode::non_convex_boundary, "boundary is not CCW");
    // Weakly convex: collinear boundary vertices are allowed up to rounding.
    double turning = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        const Point2 d0 = base[(i + 1) % nb] - base[i];
        const Point2 d1 = base[(i + 2) % nb] - base[(i + 1) % nb];
        const double turn = std::atan2(cross(d0, d1), dot(d0, d1));
        if (turn < -opt.angle_tol)
            throw Error(ErrorCode::non_convex_boundary,
                        "boundary turns clockwise at vertex " + std::to_string(cap.boundary[(i + 1) % nb]));
        turning += turn;
    }
    if (std::abs(turning - two_pi) > 1e-6) throw Error(ErrorCode::non_convex_boundary, "boundary winds more than once");

    for (int v = 0; v < n; ++v)
        if (!on_boundary[static_cast<std::size_t>(v)] && cap.vertices[static_cast<std::size_t>(v)].z < -ltol)
            throw Error(ErrorCode::below_base_plane, "internal vertex " + std::to_string(v) + " lies below the base");

    std::vector<double> angle_sum(static_cast<std::size_t>(n), 0.0);
    double worst = -1.0;
    std::size_t worst_face = 0;
    for (std::size_t f = 0; f < cap.triangles.size(); ++f) {
        const auto& t = cap.triangles[f];
        const Vec3 a = cap.vertices[static_cast<std::size_t>(t[0])];
        const Vec3 b = cap.vertices[static_cast<std::size_t>(t[1])];
        const Vec3 c = cap.vertices[static_cast<std::size_t>(t[2])];
        const Vec3 nrm = cross(b - a, c - a);
        const double len = norm(nrm);
        if (!(len > 0.0)) throw Error(ErrorCode::degenerate_triangle, "face " + std::to_string(f) + " has zero area");
        if (!(nrm.z > 0.0)) throw Error(ErrorCode::downward_face, "face " + std::to_string(f) + " faces downward");
        m.phi_max = std::max(m.phi_max, std::atan2(std::hypot(nrm.x, nrm.y), nrm.z));

        const auto ang = detail::corner_angles(a, b, c);
        for (int i = 0; i < 3; ++i) {
            angle_sum[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])] += ang[static_cast<std::size_t>(i)];
            if (ang[static_cast<std::size_t>(i)] > worst) {
                worst = ang[static_cast<std::size_t>(i)];
                worst_face = f;
            }
        }
        const auto pang = detail::corner_angles(xy(a), xy(b), xy(c));
        m.max_projected_angle = std::max({m.max_projected_angle, pang[0], pang[1], pang[2]});
    }
    m.max_face_angle = worst;
    if (worst >= pi / 2 - opt.acute_margin)
        throw Error(ErrorCode::obtuse_triangle,
                    "face " + std::to_string(worst_face) + " has angle " + std::to_string(worst) + " rad");
    m.delta_theta = pi / 2 - m.max_projected_angle;
    m.projected_acute = m.max_projected_angle < pi / 2 - opt.acute_margin;

    for (int v = 0; v < n; ++v) {
        if (on_boundary[static_cast<std::size_t>(v)]) continue;
        const double w = two_pi - angle_sum[static_cast<std::size_t>(v)];
        if (w < -opt.angle_tol)
            throw Error(ErrorCode::negative_curvature, "vertex " + std::to_string(v) + " has curvature " + std::to_string(w));
        m.omega[v] = std::max(w, 0.0);
        m.omega_total += m.omega[v];
    }

    (void)project(cap);
    return m;
}

struct CurvatureReport {
    double omega_total = 0.0;
    double phi = 0.0;
    double delta_theta = 0.0;

    double pi_phi_sq = 0.0;            // pi * Phi^2
    bool omega_below_pi_phi_sq = false;

    double phi_limit = 0.0;            // 0.3 * sqrt(delta_theta)
    bool phi_within_limit = false;

    double omega_threshold = 0.0;      // pi * (0.3)^2 * delta_theta, about 0.28 delta_theta

    double tree_sum = 0.0;             // largest single-tree curvature sum
    double tree_limit = 0.0;           // 2 delta_theta
    bool tree_within_limit = false;

    [[nodiscard]] bool all_pass() const noexcept {
        return omega_below_pi_phi_sq && phi_within_limit && tree_within_limit;
    }
};

/// Advisory check of the small-curvature hypotheses. Without a forest the
/// total curvature stands in for the largest tree sum.
inline CurvatureReport curvature_bounds_check(const CapMetrics& m, double delta_theta,
                                              std::optional<double> max_tree_sum = std::nullopt,
                                              double angle_tol = 1e-12) {
    CurvatureReport r;
    r.omega_total = m.omega_total;
    r.phi = m.phi_max;
    r.delta_theta = delta_theta;
    r.pi_phi_sq = pi * m.phi_max * m.phi_max;
    r.omega_below_pi_phi_sq = m.omega_total < r.pi_phi_sq || m.omega_total <= angle_tol;
    r.phi_limit = 0.3 * std::sqrt(std::max(delta_theta, 0.0));
    r.phi_within_limit = m.phi_max <= r.phi_limit;
    r.omega_threshold = pi * 0.09 * delta_theta;
    r.tree_sum = max_tree_sum.value_or(m.omega_total);
    r.tree_limit = 2.0 * delta_theta;
    r.tree_within_limit = r.tree_sum <= r.tree_limit;
    return r;
}

/// Surface area of the cap in 3D.
inline double cap_area(const Cap& cap) {
    double area = 0.0;
    for (const auto& t : cap.triangles) {
        const Vec3 a = cap.vertices[static_cast<std::size_t>(t[0])];
        const Vec3 b = cap.vertices[static_cast<std::size_t>(t[1])];
        const Vec3 c = cap.vertices[static_cast<std::size_t>(t[2])];
        area += 0.5 * norm(cross(b - a, c - a));
    }
    return area;
}

/// The base polygon B (boundary projected to the plane), CCW.
inline Polygon base_polygon(const Cap& cap) {
    Polygon b;
    for (int v : cap.boundary) b.push_back(xy(cap.vertices[static_cast<std::size_t>(v)]));
    return b;
}

} // namespace capunfold
