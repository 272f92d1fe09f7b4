#pragma once

// Quadrant-based angle-monotone spanning forest on the projected cap.
//
// Around the apex q the plane splits into a gap cone of aperture 4*dtheta
// centred on the axis direction and four quadrants of width
// theta = pi/2 - dtheta:
//
//     Q_i = [axis + 2 dtheta + i theta, axis + 2 dtheta + (i+1) theta)
//
// closed on the clockwise ray, open on the counterclockwise one, with q in Q_0.
// A vertex of Q_i steps to the neighbor whose direction lies in the closed
// wedge [beta_i, beta_i + theta] (beta_i = Q_i's clockwise ray) and is closest
// to the wedge bisector. Wedges are convex cones, so paths never leave their
// quadrant and move monotonically away from q until they hit the boundary.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "capunfold/cap.hpp"
#include "capunfold/error.hpp"
#include "capunfold/geom.hpp"

namespace capunfold {

struct ApexChoice {
    int apex = -1;
    double gap_direction = 0.0;
    int gap_edge = -1;              // boundary edge i runs boundary[i] -> boundary[i+1]
    Point2 nearest{};               // nearest boundary point
    double distance = 0.0;
    bool nearest_is_vertex = false; // gap edge chosen by the vertex fallback
};

struct QuadrantFrame {
    int apex = -1;
    double axis_angle = 0.0;
    double theta = 0.0;
    double delta_theta = 0.0;
    double gap_direction = 0.0;

    /// Clockwise bounding ray of quadrant i (i = 4 closes the gap cone).
    [[nodiscard]] double ray(int i) const noexcept { return axis_angle + 2.0 * delta_theta + i * theta; }
};

struct CutForest {
    std::vector<int> parent;   // -1 for boundary vertices
    std::vector<int> quadrant; // -1 for boundary vertices
    std::vector<int> roots;    // ascending

    [[nodiscard]] bool empty() const noexcept {
        return std::all_of(parent.begin(), parent.end(), [](int p) { return p < 0; });
    }

    [[nodiscard]] std::vector<int> children(int v) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < parent.size(); ++i)
            if (parent[i] == v) out.push_back(static_cast<int>(i));
        return out;
    }

    [[nodiscard]] bool is_cut(int a, int b) const noexcept {
        return (a >= 0 && parent[static_cast<std::size_t>(a)] == b) || (b >= 0 && parent[static_cast<std::size_t>(b)] == a);
    }

    /// Root reached from v (v itself for boundary vertices), or -1 on a cycle.
    [[nodiscard]] int root_of(int v) const {
        for (std::size_t steps = 0; steps <= parent.size(); ++steps) {
            const int p = parent[static_cast<std::size_t>(v)];
            if (p < 0) return v;
            v = p;
        }
        return -1;
    }
};

inline constexpr double axis_angle_tolerance = 1e-9;

/// True if no internal vertex other than the apex sees the apex inside the
/// open cone of half-aperture 2*delta_theta about `direction_angle`.
inline bool cone_is_empty(const ProjectionGraph& g, int apex, double direction_angle, double delta_theta) {
    const Point2 q = g.positions[static_cast<std::size_t>(apex)];
    for (int v : g.internal) {
        if (v == apex) continue;
        const Point2 d = g.positions[static_cast<std::size_t>(v)] - q;
        if (d == Point2{}) return false;
        if (std::abs(normalize_angle(angle_of(d) - direction_angle)) < 2.0 * delta_theta) return false;
    }
    return true;
}

/// Internal vertex nearest to the boundary polygon (ties: lower id).
inline ApexChoice select_apex(const ProjectionGraph& g, std::optional<double> delta_theta = std::nullopt) {
    if (g.internal.empty()) throw Error(ErrorCode::no_internal_vertices, "the cap has no internal vertex");
    const std::size_t nb = g.boundary.size();
    ApexChoice best;
    best.distance = std::numeric_limits<double>::infinity();
    double best_t = 0.5;
    for (int v : g.internal) {
        const Point2 p = g.positions[static_cast<std::size_t>(v)];
        for (std::size_t i = 0; i < nb; ++i) {
            const Point2 a = g.positions[static_cast<std::size_t>(g.boundary[i])];
            const Point2 b = g.positions[static_cast<std::size_t>(g.boundary[(i + 1) % nb])];
            const Point2 d = b - a;
            const double t = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
            const Point2 foot = a + t * d;
            const double dist = distance(p, foot);
            if (dist < best.distance) {
                best.apex = v;
                best.distance = dist;
                best.nearest = foot;
                best.gap_edge = static_cast<int>(i);
                best_t = t;
            }
        }
    }
    const Point2 q = g.positions[static_cast<std::size_t>(best.apex)];
    best.gap_direction = angle_of(best.nearest - q);
    if (best_t <= 0.0 || best_t >= 1.0) {
        // Nearest point is a boundary vertex: of its two edges take the one
        // whose outward normal is closest to the gap direction.
        best.nearest_is_vertex = true;
        const int corner = best_t <= 0.0 ? best.gap_edge : static_cast<int>((best.gap_edge + 1) % nb);
        const int before = static_cast<int>((corner + nb - 1) % nb);
        const Point2 dir = direction(best.gap_direction);
        auto alignment = [&](int e) {
            const Point2 a = g.positions[static_cast<std::size_t>(g.boundary[static_cast<std::size_t>(e)])];
            const Point2 b = g.positions[static_cast<std::size_t>(g.boundary[(static_cast<std::size_t>(e) + 1) % nb])];
            return dot(unit(perp_cw(b - a)), dir);
        };
        best.gap_edge = alignment(corner) > alignment(before) ? corner : before;
    }
    if (delta_theta && !cone_is_empty(g, best.apex, best.gap_direction, *delta_theta))
        throw Error(ErrorCode::non_empty_cone, "the gap cone at vertex " + std::to_string(best.apex) + " is not empty");
    return best;
}

namespace detail {

inline bool vertex_on_rays(const ProjectionGraph& g, const QuadrantFrame& f) {
    const Point2 q = g.positions[static_cast<std::size_t>(f.apex)];
    for (std::size_t v = 0; v < g.positions.size(); ++v) {
        if (static_cast<int>(v) == f.apex) continue;
        const Point2 d = g.positions[v] - q;
        if (d == Point2{}) return true;
        const double ang = angle_of(d);
        for (int i = 0; i < 4; ++i)
            if (std::abs(normalize_angle(ang - f.ray(i))) < axis_angle_tolerance) return true;
    }
    return false;
}

} // namespace detail

/// Aligns the axis with the gap direction, nudging it if a vertex sits on a
/// quadrant ray.
inline QuadrantFrame orient_axes(const ProjectionGraph& g, int apex, double gap_direction, double delta_theta) {
    if (!(delta_theta > 0.0) || !(delta_theta < pi / 4))
        throw Error(ErrorCode::invalid_argument, "delta_theta must lie in (0, pi/4)");
    if (apex < 0 || static_cast<std::size_t>(apex) >= g.positions.size())
        throw Error(ErrorCode::bad_index, "apex is not a vertex");
    if (!cone_is_empty(g, apex, gap_direction, delta_theta))
        throw Error(ErrorCode::non_empty_cone, "the gap cone at vertex " + std::to_string(apex) + " is not empty");

    QuadrantFrame f;
    f.apex = apex;
    f.delta_theta = delta_theta;
    f.theta = pi / 2 - delta_theta;
    f.gap_direction = gap_direction;
    f.axis_angle = gap_direction;
    if (!detail::vertex_on_rays(g, f)) return f;

    constexpr double step = 1e-7;
    const double limit = delta_theta / 4.0;
    for (long k = 1; k * step <= limit; ++k) {
        for (const double sgn : {1.0, -1.0}) {
            f.axis_angle = normalize_angle(gap_direction + sgn * static_cast<double>(k) * step);
            if (!detail::vertex_on_rays(g, f) && cone_is_empty(g, apex, f.axis_angle, delta_theta)) return f;
        }
    }
    throw Error(ErrorCode::cannot_orient, "no axis rotation within delta_theta/4 clears all vertices");
}

/// Quadrant containing p relative to the frame, or -1 inside the gap cone.
inline int quadrant_of_point(const QuadrantFrame& f, Point2 apex_pos, Point2 p) {
    if (p == apex_pos) return 0;
    const double rel = normalize_positive(angle_of(p - apex_pos) - f.ray(0));
    const int i = static_cast<int>(std::floor(rel / f.theta));
    return i < 4 ? i : -1;
}

/// Offset of direction d inside quadrant i's step wedge, mapped to
/// (-pi, pi] relative to the wedge's clockwise ray.
inline double wedge_offset(const QuadrantFrame& f, int i, double d) {
    return normalize_angle(d - f.ray(i));
}

inline constexpr double wedge_tolerance = 1e-12;

inline CutForest grow_forest(const ProjectionGraph& g, const QuadrantFrame& f) {
    const std::size_t n = g.positions.size();
    CutForest forest;
    forest.parent.assign(n, -1);
    forest.quadrant.assign(n, -1);
    const Point2 q = g.positions[static_cast<std::size_t>(f.apex)];
    std::vector<bool> is_root(n, false);
    for (int v : g.internal) {
        const Point2 p = g.positions[static_cast<std::size_t>(v)];
        const int qi = v == f.apex ? 0 : quadrant_of_point(f, q, p);
        if (qi < 0) throw Error(ErrorCode::non_empty_cone, "vertex " + std::to_string(v) + " lies in the gap cone");
        int best = -1;
        double best_dev = std::numeric_limits<double>::infinity();
        for (int u : g.neighbors[static_cast<std::size_t>(v)]) {
            const double off = wedge_offset(f, qi, angle_of(g.positions[static_cast<std::size_t>(u)] - p));
            if (off < -wedge_tolerance || off > f.theta + wedge_tolerance) continue;
            const double dev = std::abs(off - 0.5 * f.theta);
            if (dev < best_dev) {
                best_dev = dev;
                best = u;
            }
        }
        if (best < 0)
            throw Error(ErrorCode::stuck_vertex, "vertex " + std::to_string(v) + " has no edge inside quadrant " +
                                                     std::to_string(qi) + "'s wedge");
        forest.parent[static_cast<std::size_t>(v)] = best;
        forest.quadrant[static_cast<std::size_t>(v)] = qi;
    }
    for (int v : g.internal) {
        const int r = forest.root_of(v);
        if (r < 0) throw Error(ErrorCode::degenerate_tree, "forest contains a cycle through vertex " + std::to_string(v));
        is_root[static_cast<std::size_t>(r)] = true;
    }
    for (std::size_t v = 0; v < n; ++v)
        if (is_root[v]) forest.roots.push_back(static_cast<int>(v));
    return forest;
}

struct MonotoneReport {
    bool ok = true;
    int paths_checked = 0;
    double max_arc = 0.0;                      // widest step-direction arc seen
    std::vector<std::vector<int>> violations;  // offending leaf-to-root paths
};

/// Smallest circular arc covering all given directions.
inline double covering_arc(std::vector<double> angles) {
    if (angles.size() < 2) return 0.0;
    for (auto& a : angles) a = normalize_positive(a);
    std::sort(angles.begin(), angles.end());
    double gap = two_pi - (angles.back() - angles.front());
    for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
    return two_pi - gap;
}

/// Checks that every leaf-to-root path has all step directions inside one
/// closed wedge of width theta.
inline MonotoneReport verify_monotone(const CutForest& forest, const ProjectionGraph& g, const QuadrantFrame& f) {
    MonotoneReport r;
    const std::size_t n = forest.parent.size();
    std::vector<bool> has_child(n, false);
    for (std::size_t v = 0; v < n; ++v)
        if (forest.parent[v] >= 0) has_child[static_cast<std::size_t>(forest.parent[v])] = true;
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        if (forest.parent[leaf] < 0 || has_child[leaf]) continue;
        ++r.paths_checked;
        std::vector<int> path{static_cast<int>(leaf)};
        std::vector<double> dirs;
        int v = static_cast<int>(leaf);
        bool cyclic = true;
        for (std::size_t steps = 0; steps <= n; ++steps) {
            const int p = forest.parent[static_cast<std::size_t>(v)];
            if (p < 0) {
                cyclic = false;
                break;
            }
            dirs.push_back(angle_of(g.positions[static_cast<std::size_t>(p)] - g.positions[static_cast<std::size_t>(v)]));
            path.push_back(p);
            v = p;
        }
        const double arc = covering_arc(dirs);
        r.max_arc = std::max(r.max_arc, arc);
        if (cyclic || arc > f.theta + wedge_tolerance) {
            r.ok = false;
            r.violations.push_back(std::move(path));
        }
    }
    return r;
}

/// Curvature carried by each tree, keyed by root.
inline std::map<int, double> tree_curvature(const CutForest& forest, const CapMetrics& m) {
    std::map<int, double> sums;
    for (const auto& [v, w] : m.omega) {
        const int r = forest.root_of(v);
        if (r >= 0) sums[r] += w;
    }
    return sums;
}

} // namespace capunfold
