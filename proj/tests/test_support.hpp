#pragma once

// Independent oracles shared by the unit and acceptance tests. Nothing here
// calls the library routine it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "capunfold/capunfold.hpp"

namespace testsupport {

using capunfold::Point2;

// Homogeneous 3x3 matrices for planar rigid motions.
using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 mat_identity() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline Mat3 mat_mul(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

inline Mat3 mat_translate(double x, double y) { return {{{1, 0, x}, {0, 1, y}, {0, 0, 1}}}; }

inline Mat3 mat_rotate(double w) {
    const double c = std::cos(w), s = std::sin(w);
    return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

/// Rotation by w about p as T(p) R(w) T(-p).
inline Mat3 mat_rotation_about(double w, Point2 p) {
    return mat_mul(mat_translate(p.x, p.y), mat_mul(mat_rotate(w), mat_translate(-p.x, -p.y)));
}

/// Product for a sequence applied first to last: M_k ... M_1.
inline Mat3 mat_sequence(const capunfold::RotationSeq& seq) {
    Mat3 m = mat_identity();
    for (const auto& r : seq) m = mat_mul(mat_rotation_about(r.omega, r.center), m);
    return m;
}

inline Point2 mat_apply(const Mat3& m, Point2 p) {
    return {m[0][0] * p.x + m[0][1] * p.y + m[0][2], m[1][0] * p.x + m[1][1] * p.y + m[1][2]};
}

/// Fixed point from (I - A) c = t by Cramer's rule.
inline Point2 mat_fixed_point(const Mat3& m) {
    const double a = 1 - m[0][0], b = -m[0][1], c = -m[1][0], d = 1 - m[1][1];
    const double det = a * d - b * c;
    return {(m[0][2] * d - b * m[1][2]) / det, (a * m[1][2] - c * m[0][2]) / det};
}

inline capunfold::RotationSeq random_chain(std::mt19937_64& rng, int k, double max_omega, double spread = 1.0) {
    std::uniform_real_distribution<double> w(0.0, max_omega), p(-spread, spread);
    capunfold::RotationSeq seq;
    for (int i = 0; i < k; ++i) seq.push_back({w(rng), {p(rng), p(rng)}});
    return seq;
}

// ---------------------------------------------------------------------------
// Forest invariants, checked with plain vector arithmetic.
// ---------------------------------------------------------------------------

struct ForestAudit {
    int spanning = 0;       // internal vertex without a parent, or boundary vertex with one
    int non_edge = 0;       // parent link that is not a graph edge
    int cyclic = 0;         // walk that never reaches the boundary
    int quadrant = 0;       // step whose endpoints sit in different quadrants
    int monotone = 0;       // step outside its quadrant's closed wedge
    int cone = 0;           // internal vertex inside the open gap cone
    std::vector<std::string> details;

    [[nodiscard]] int total() const { return spanning + non_edge + cyclic + quadrant + monotone + cone; }
};

/// Quadrant of p seen from q by unit-vector tests, -1 inside the gap cone.
inline int oracle_quadrant(const capunfold::QuadrantFrame& f, Point2 q, Point2 p) {
    const double rel = std::fmod(std::atan2(p.y - q.y, p.x - q.x) - f.ray(0) + 8 * capunfold::pi, 2 * capunfold::pi);
    for (int i = 0; i < 4; ++i)
        if (rel >= i * f.theta - 1e-12 && rel < (i + 1) * f.theta) return i;
    return -1;
}

/// True if direction d lies in the closed wedge between unit rays r0 (cw) and r1 (ccw).
inline bool in_wedge(Point2 d, Point2 r0, Point2 r1, double tol) {
    const double len = std::hypot(d.x, d.y);
    const double c0 = r0.x * d.y - r0.y * d.x;   // >= 0: left of r0
    const double c1 = d.x * r1.y - d.y * r1.x;   // >= 0: right of r1
    return c0 >= -tol * len && c1 >= -tol * len;
}

inline ForestAudit audit_forest(const capunfold::ProjectionGraph& g, const capunfold::QuadrantFrame& f,
                                const capunfold::CutForest& forest, double tol = 1e-12) {
    ForestAudit a;
    const std::size_t n = g.positions.size();
    const Point2 q = g.positions[static_cast<std::size_t>(f.apex)];
    auto note = [&](int& counter, const std::string& msg) {
        ++counter;
        if (a.details.size() < 20) a.details.push_back(msg);
    };
    auto is_edge = [&](int u, int v) {
        for (const auto& e : g.edges)
            if ((e[0] == u && e[1] == v) || (e[0] == v && e[1] == u)) return true;
        return false;
    };
    for (std::size_t v = 0; v < n; ++v) {
        const int p = forest.parent[v];
        const bool internal = !g.on_boundary[v];
        if (internal != (p >= 0)) note(a.spanning, "vertex " + std::to_string(v));
        if (p < 0) continue;
        if (!is_edge(static_cast<int>(v), p)) note(a.non_edge, "link " + std::to_string(v) + "-" + std::to_string(p));

        int w = static_cast<int>(v);
        std::size_t steps = 0;
        while (forest.parent[static_cast<std::size_t>(w)] >= 0 && steps <= n) {
            w = forest.parent[static_cast<std::size_t>(w)];
            ++steps;
        }
        if (steps > n) note(a.cyclic, "walk from " + std::to_string(v));

        const int qi = static_cast<int>(v) == f.apex ? 0 : oracle_quadrant(f, q, g.positions[v]);
        if (qi < 0) {
            note(a.cone, "vertex " + std::to_string(v) + " in gap cone");
            continue;
        }
        if (!g.on_boundary[static_cast<std::size_t>(p)]) {
            const int qp = oracle_quadrant(f, q, g.positions[static_cast<std::size_t>(p)]);
            if (qp != qi) note(a.quadrant, "step " + std::to_string(v) + "->" + std::to_string(p));
        }
        const double r0 = f.ray(qi), r1 = f.ray(qi) + f.theta;
        const Point2 d = g.positions[static_cast<std::size_t>(p)] - g.positions[v];
        if (!in_wedge(d, {std::cos(r0), std::sin(r0)}, {std::cos(r1), std::sin(r1)}, tol))
            note(a.monotone, "step " + std::to_string(v) + "->" + std::to_string(p));
    }
    // Empty cone, exhaustively over every internal vertex.
    const Point2 axis{std::cos(f.axis_angle), std::sin(f.axis_angle)};
    for (int v : g.internal) {
        if (v == f.apex) continue;
        const Point2 d = g.positions[static_cast<std::size_t>(v)] - q;
        const double c = (d.x * axis.x + d.y * axis.y) / std::hypot(d.x, d.y);
        if (std::acos(std::clamp(c, -1.0, 1.0)) < 2 * f.delta_theta) note(a.cone, "vertex " + std::to_string(v) + " sees the axis");
    }
    return a;
}

// ---------------------------------------------------------------------------
// Small caps
// ---------------------------------------------------------------------------

/// Regular k-gon of radius 1 with a center vertex at height h.
inline capunfold::Cap fan_cap(int k, double h, Point2 apex = {0.0, 0.0}) {
    capunfold::Cap cap;
    for (int i = 0; i < k; ++i) cap.vertices.push_back({std::cos(2 * capunfold::pi * i / k), std::sin(2 * capunfold::pi * i / k), 0.0});
    cap.vertices.push_back({apex.x, apex.y, h});
    for (int i = 0; i < k; ++i) {
        cap.triangles.push_back({i, (i + 1) % k, k});
        cap.boundary.push_back(i);
    }
    return cap;
}

inline capunfold::Cap flattened(capunfold::Cap cap) {
    for (auto& v : cap.vertices) v.z = 0.0;
    return cap;
}

} // namespace testsupport
