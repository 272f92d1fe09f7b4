#pragma once

// Seeded test-instance factories.
//
// generate_cap builds a regular N-gon cut into N sectors (center, C_j, C_j+1),
// each refined into K rows parallel to its boundary side:
//
//     P(j, a, b) = (a/K) C_j + (b/K) (C_j+1 - C_j),   0 <= b <= a <= K.
//
// Every grid triangle is similar to the sector triangle, so the mesh is acute
// for N >= 5. Row vertices are jittered along their row, then lifted by a
// concave function of the distance to the boundary. Because a row keeps a
// constant height, each strip between two rows stays planar and the lift is
// convex; curvature concentrates on the sector rays and the center.
//
// generate_counterexample builds the planar adversarial scene: a regular
// n-gon where every boundary vertex v_i roots one shallow cut ending at w_i
// near v_i-1, plus a two-edge path from the center into v_0.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "capunfold/cap.hpp"
#include "capunfold/error.hpp"
#include "capunfold/geom.hpp"

namespace capunfold {

struct GenParams {
    std::uint64_t seed = 1;
    int n_target = 50;
    double phi_max = 0.05;
    int boundary_sides = 12;
    double jitter = 0.1;  // fraction of the row spacing
    double radius = 1.0;  // circumradius of the boundary polygon
};

namespace detail {

struct SectorGrid {
    int sides = 0;
    int rows = 0;

    [[nodiscard]] int vertex_count() const noexcept { return 1 + sides * rows * (rows + 1) / 2; }
    [[nodiscard]] int internal_count() const noexcept { return 1 + sides * rows * (rows - 1) / 2; }

    [[nodiscard]] int index(int j, int a, int b) const noexcept {
        if (a == 0) return 0;
        if (b == a) {
            j = (j + 1) % sides;
            b = 0;
        }
        return 1 + sides * a * (a - 1) / 2 + j * a + b;
    }
};

inline double unit_uniform(std::mt19937_64& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int rows_for_target(int sides, int n_target) {
    int best = 1;
    double best_err = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 2000; ++k) {
        const SectorGrid g{sides, k};
        const double err = std::abs(std::log(static_cast<double>(g.internal_count()) / n_target));
        if (err < best_err) {
            best_err = err;
            best = k;
        }
        if (g.internal_count() > 4 * n_target) break;
    }
    return best;
}

inline Cap build_sector_cap(const GenParams& p, int rows, double jitter, double rotation) {
    const int n = p.boundary_sides;
    const SectorGrid grid{n, rows};
    std::vector<Point2> corner(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) corner[static_cast<std::size_t>(j)] = p.radius * direction(rotation + two_pi * j / n);
    const double r_in = p.radius * std::cos(pi / n);

    std::mt19937_64 rng(p.seed ^ 0x9E3779B97F4A7C15ull);
    (void)rng();
    Cap cap;
    cap.vertices.assign(static_cast<std::size_t>(grid.vertex_count()), Vec3{});
    std::vector<int> row_of(cap.vertices.size(), 0);
    for (int a = 1; a <= rows; ++a) {
        for (int j = 0; j < n; ++j) {
            const Point2 cj = corner[static_cast<std::size_t>(j)];
            const Point2 step = (corner[static_cast<std::size_t>((j + 1) % n)] - cj) / rows;
            for (int b = 0; b < a; ++b) {
                double shift = 0.0;
                if (b > 0) shift = jitter * (2.0 * unit_uniform(rng) - 1.0);
                const Point2 pos = (static_cast<double>(a) / rows) * cj + (b + shift) * step;
                const int idx = grid.index(j, a, b);
                cap.vertices[static_cast<std::size_t>(idx)] = {pos.x, pos.y, 0.0};
                row_of[static_cast<std::size_t>(idx)] = a;
            }
        }
    }

    for (int j = 0; j < n; ++j) {
        for (int a = 1; a <= rows; ++a) {
            for (int b = 0; b < a; ++b) {
                cap.triangles.push_back({grid.index(j, a, b), grid.index(j, a, b + 1), grid.index(j, a - 1, b)});
                if (b + 1 < a)
                    cap.triangles.push_back(
                        {grid.index(j, a - 1, b), grid.index(j, a, b + 1), grid.index(j, a - 1, b + 1)});
            }
        }
    }
    for (auto& t : cap.triangles) {
        const Vec3 a = cap.vertices[static_cast<std::size_t>(t[0])];
        const Vec3 b = cap.vertices[static_cast<std::size_t>(t[1])];
        const Vec3 c = cap.vertices[static_cast<std::size_t>(t[2])];
        if (orientation(xy(a), xy(b), xy(c)) < 0) std::swap(t[1], t[2]);
    }
    for (int j = 0; j < n; ++j)
        for (int b = 0; b < rows; ++b) cap.boundary.push_back(grid.index(j, rows, b));

    // Height as a concave function of the distance to the boundary; rows have
    // constant distance r_in (1 - a/K).
    auto height = [&](int a) {
        const double d = r_in * (1.0 - static_cast<double>(a) / rows);
        return d * (2.0 - d / r_in);
    };
    double max_slope = 0.0;
    std::vector<double> z(cap.vertices.size());
    z[0] = height(0);
    for (std::size_t i = 1; i < z.size(); ++i) z[i] = height(row_of[i]);
    for (const auto& t : cap.triangles) {
        const Vec3 a{cap.vertices[static_cast<std::size_t>(t[0])].x, cap.vertices[static_cast<std::size_t>(t[0])].y, z[static_cast<std::size_t>(t[0])]};
        const Vec3 b{cap.vertices[static_cast<std::size_t>(t[1])].x, cap.vertices[static_cast<std::size_t>(t[1])].y, z[static_cast<std::size_t>(t[1])]};
        const Vec3 c{cap.vertices[static_cast<std::size_t>(t[2])].x, cap.vertices[static_cast<std::size_t>(t[2])].y, z[static_cast<std::size_t>(t[2])]};
        const Vec3 nrm = cross(b - a, c - a);
        max_slope = std::max(max_slope, std::hypot(nrm.x, nrm.y) / nrm.z);
    }
    const double scale = std::tan(p.phi_max * (1.0 - 1e-12)) / max_slope;
    for (std::size_t i = 0; i < z.size(); ++i) cap.vertices[i].z = row_of[i] == rows ? 0.0 : scale * z[i];
    return cap;
}

} // namespace detail

/// A seeded convex cap satisfying every validation hypothesis with tilt
/// below phi_max and roughly n_target internal vertices.
inline Cap generate_cap(const GenParams& p) {
    if (!(p.phi_max > 0.0) || !(p.phi_max < pi / 4))
        throw Error(ErrorCode::invalid_argument, "phi_max must lie in (0, pi/4)");
    if (p.boundary_sides < 3) throw Error(ErrorCode::invalid_argument, "boundary_sides must be at least 3");
    if (p.n_target < 1) throw Error(ErrorCode::invalid_argument, "n_target must be positive");
    if (!(p.radius > 0.0) || !(p.jitter >= 0.0) || !(p.jitter < 0.5))
        throw Error(ErrorCode::invalid_argument, "radius must be positive and jitter in [0, 0.5)");
    if (p.boundary_sides < 5)
        throw Error(ErrorCode::generation_failure,
                    "acuteness: sector triangles of a " + std::to_string(p.boundary_sides) + "-gon are not acute");

    const int rows = detail::rows_for_target(p.boundary_sides, p.n_target);
    const int internal = detail::SectorGrid{p.boundary_sides, rows}.internal_count();
    if (internal > 2 * p.n_target || 2 * internal < p.n_target)
        throw Error(ErrorCode::generation_failure, "vertex count: no grid has within 2x of " +
                                                       std::to_string(p.n_target) + " internal vertices for " +
                                                       std::to_string(p.boundary_sides) + " sides");

    std::mt19937_64 rng(p.seed);
    const double rotation = two_pi * detail::unit_uniform(rng);
    double jitter = p.jitter;
    std::string last;
    for (int attempt = 0; attempt < 32; ++attempt) {
        Cap cap = detail::build_sector_cap(p, rows, jitter, rotation);
        try {
            const CapMetrics m = validate_cap(cap);
            if (m.phi_max <= p.phi_max) return cap;
            last = "tilt " + std::to_string(m.phi_max) + " exceeds phi_max";
        } catch (const Error& e) {
            last = e.what();
        }
        jitter *= 0.5;
    }
    throw Error(ErrorCode::generation_failure, "no valid cap after 32 attempts: " + last);
}

struct AdversarialScene {
    int n_gon = 12;
    double omega = 1e-3;
    double cut_angle = 0.05;        // angle between each cut and the boundary edge it follows
    double cut_length_ratio = 0.95; // cut length relative to the boundary edge length
    double center_ratio = 0.01;     // center curvature relative to omega
};

struct Counterexample {
    AdversarialScene scene;
    Polygon boundary;                    // v_0 .. v_n-1, CCW, circumradius 1
    std::vector<Point2> cut_end;         // w_i, inner end of the cut rooted at v_i
    Point2 center{};                     // inner end of the two-edge path at v_0
    std::vector<RotationSeq> trees;      // per root, nearest vertex first
};

/// The planar adversarial configuration. Each root v_i carries a single cut
/// v_i w_i leaving v_i along the edge toward v_i-1, tilted cut_angle into the
/// interior, with curvature omega at w_i. Root v_0 additionally continues
/// from w_0 to the polygon center with curvature center_ratio * omega.
inline Counterexample generate_counterexample(const AdversarialScene& s) {
    if (s.n_gon < 3) throw Error(ErrorCode::invalid_argument, "n_gon must be at least 3");
    if (!(s.omega > 0.0)) throw Error(ErrorCode::invalid_argument, "omega must be positive");
    if (!(s.cut_angle > 0.0) || !(s.cut_angle < pi / 2))
        throw Error(ErrorCode::invalid_argument, "cut_angle must lie in (0, pi/2)");
    if (!(s.cut_length_ratio > 0.0) || !(s.cut_length_ratio < 1.0))
        throw Error(ErrorCode::invalid_argument, "cut_length_ratio must lie in (0, 1)");

    Counterexample cx;
    cx.scene = s;
    const int n = s.n_gon;
    for (int i = 0; i < n; ++i) cx.boundary.push_back(direction(two_pi * i / n - pi / 2));
    const double edge = distance(cx.boundary[0], cx.boundary[1]);
    for (int i = 0; i < n; ++i) {
        const Point2 v = cx.boundary[static_cast<std::size_t>(i)];
        const Point2 prev = cx.boundary[static_cast<std::size_t>((i + n - 1) % n)];
        cx.cut_end.push_back(v + s.cut_length_ratio * edge * rotate(unit(prev - v), -s.cut_angle));
    }
    cx.center = {0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        RotationSeq seq{{s.omega, cx.cut_end[static_cast<std::size_t>(i)]}};
        if (i == 0) seq.push_back({s.center_ratio * s.omega, cx.center});
        cx.trees.push_back(std::move(seq));
    }
    return cx;
}

/// Angle between B and its reflection across one edge, measured outside both
/// at a shared vertex of a regular n-gon.
inline double reflected_base_exterior_angle(int n_gon) {
    const double interior = pi - two_pi / n_gon;
    return two_pi - 2.0 * interior;
}

} // namespace capunfold
