#pragma once

// Planar primitives: points, rigid motions, rotation composition and the
// center-of-gravity approximation of a composite rotation, convex hulls and
// a tolerance-aware polygon overlap test.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capunfold/error.hpp"
#include "capunfold/predicates.hpp"

namespace capunfold {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Point2& operator+=(Point2 o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Point2& operator-=(Point2 o) noexcept { x -= o.x; y -= o.y; return *this; }
    constexpr Point2& operator*=(double s) noexcept { x *= s; y *= s; return *this; }
    friend constexpr Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator-(Point2 a) noexcept { return {-a.x, -a.y}; }
    friend constexpr Point2 operator*(double s, Point2 a) noexcept { return {s * a.x, s * a.y}; }
    friend constexpr Point2 operator*(Point2 a, double s) noexcept { return {s * a.x, s * a.y}; }
    friend constexpr Point2 operator/(Point2 a, double s) noexcept { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Point2, Point2) noexcept = default;
};

using Polygon = std::vector<Point2>;

constexpr double dot(Point2 a, Point2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) noexcept { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) noexcept { return norm(a - b); }
constexpr Point2 perp_ccw(Point2 a) noexcept { return {-a.y, a.x}; }
constexpr Point2 perp_cw(Point2 a) noexcept { return {a.y, -a.x}; }
inline Point2 unit(Point2 a) noexcept { return a / norm(a); }
inline Point2 direction(double angle) noexcept { return {std::cos(angle), std::sin(angle)}; }
inline double angle_of(Point2 a) noexcept { return std::atan2(a.y, a.x); }
inline Point2 rotate(Point2 a, double angle) noexcept {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}
inline bool is_finite(Point2 a) noexcept { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Maps an angle into (-pi, pi].
inline double normalize_angle(double a) noexcept {
    a = std::remainder(a, two_pi);
    if (a <= -pi) a += two_pi;
    return a;
}

/// Maps an angle into [0, 2pi).
inline double normalize_positive(double a) noexcept {
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a -= two_pi;
    return a;
}

inline int orientation(Point2 a, Point2 b, Point2 c) noexcept {
    return predicates::sign(predicates::orient2d(a.x, a.y, b.x, b.y, c.x, c.y));
}

// ---------------------------------------------------------------------------
// Rigid motions
// ---------------------------------------------------------------------------

/// Orientation-preserving isometry x -> R(angle) x + t, angle in (-pi, pi].
struct Rigid2 {
    double angle = 0.0;
    Point2 t{};

    [[nodiscard]] static Rigid2 identity() noexcept { return {}; }

    [[nodiscard]] Point2 apply(Point2 p) const noexcept { return rotate(p, angle) + t; }
    [[nodiscard]] Point2 apply_vector(Point2 v) const noexcept { return rotate(v, angle); }

    [[nodiscard]] Rigid2 inverse() const noexcept {
        return {normalize_angle(-angle), -rotate(t, -angle)};
    }

    /// Function composition: (a * b)(x) == a(b(x)).
    friend Rigid2 operator*(const Rigid2& a, const Rigid2& b) noexcept {
        return {normalize_angle(a.angle + b.angle), rotate(b.t, a.angle) + a.t};
    }

    /// The motion taking segment (a0, a1) onto the ray of (b0, b1) with a0 -> b0.
    /// Segment lengths are expected to agree; only the direction of b1 is used.
    [[nodiscard]] static Rigid2 from_segments(Point2 a0, Point2 a1, Point2 b0, Point2 b1) noexcept {
        const double ang = normalize_angle(angle_of(b1 - b0) - angle_of(a1 - a0));
        return {ang, b0 - rotate(a0, ang)};
    }
};

// ---------------------------------------------------------------------------
// Rotation sequences
// ---------------------------------------------------------------------------

/// Counterclockwise rotation by `omega` about `center`.
struct Rotation {
    double omega = 0.0;
    Point2 center{};
};

using RotationSeq = std::vector<Rotation>;

/// Throws unless every angle is finite and non-negative and the total stays below 2pi.
inline void validate_sequence(std::span<const Rotation> seq) {
    double total = 0.0;
    for (const auto& r : seq) {
        if (!std::isfinite(r.omega) || !is_finite(r.center))
            throw Error(ErrorCode::invalid_argument, "rotation sequence has non-finite entries");
        if (r.omega < 0.0)
            throw Error(ErrorCode::invalid_argument, "rotation angles must be non-negative");
        total += r.omega;
    }
    if (total >= two_pi)
        throw Error(ErrorCode::invalid_argument, "total rotation must stay below 2*pi");
}

inline double total_angle(std::span<const Rotation> seq) noexcept {
    double total = 0.0;
    for (const auto& r : seq) total += r.omega;
    return total;
}

inline Rigid2 rotation_about(double omega, Point2 center) noexcept {
    const double a = normalize_angle(omega);
    return {a, center - rotate(center, a)};
}

/// Composite motion of a sequence. The first element is applied first:
/// compose({r1, r2, r3}) == R3 * R2 * R1.
inline Rigid2 compose(std::span<const Rotation> seq) {
    if (seq.empty()) throw Error(ErrorCode::invalid_argument, "cannot compose an empty sequence");
    Rigid2 m = Rigid2::identity();
    for (const auto& r : seq) m = rotation_about(r.omega, r.center) * m;
    return m;
}

inline constexpr double default_translation_threshold = 1e-12;

/// The unique point fixed by a non-trivial rotation.
inline Point2 fixed_point(const Rigid2& m, double threshold = default_translation_threshold) {
    if (std::abs(m.angle) < threshold)
        throw Error(ErrorCode::pure_translation,
                    "rotation angle " + std::to_string(m.angle) + " is below the fixed-point threshold");
    // (I - R) c = t, with I - R = [[a, s], [-s, a]], a = 1 - cos = 2 sin^2(angle/2).
    const double h = std::sin(0.5 * m.angle);
    const double a = 2.0 * h * h;
    const double s = std::sin(m.angle);
    const double det = a * a + s * s;
    return {(a * m.t.x - s * m.t.y) / det, (s * m.t.x + a * m.t.y) / det};
}

/// Closed-form composite center for two rotations with centers p1 = (0,0),
/// p2 = (1,0), in the frame where rotating about p2 by omega2 happens first
/// and about p1 by omega1 second, i.e. the fixed point of
/// compose({{omega2, p2}, {omega1, p1}}). The center sits on the apex of the
/// triangle over p1 p2 with base angles omega1/2 and omega2/2:
///   c = (tan(w2/2), tan(w1/2) tan(w2/2)) / (tan(w1/2) + tan(w2/2)),
/// evaluated in the equivalent sine form to stay finite for large angles.
inline Point2 two_rotation_center(double omega1, double omega2) {
    const double total = omega1 + omega2;
    if (!(total > 0.0) || !(total < two_pi))
        throw Error(ErrorCode::degenerate_angles, "two_rotation_center needs 0 < omega1 + omega2 < 2*pi");
    const double denom = std::sin(0.5 * total);
    if (std::abs(denom) < default_translation_threshold)
        throw Error(ErrorCode::degenerate_angles, "two_rotation_center denominator vanishes");
    const double s1 = std::sin(0.5 * omega1), c1 = std::cos(0.5 * omega1);
    const double s2 = std::sin(0.5 * omega2);
    return {s2 * c1 / denom, s1 * s2 / denom};
}

/// Angle-weighted average of the rotation centers.
inline Point2 cg_center(std::span<const Rotation> seq) {
    const double total = total_angle(seq);
    if (!(total > 0.0)) throw Error(ErrorCode::zero_total_angle, "cg_center needs a positive total angle");
    Point2 acc{};
    for (const auto& r : seq) acc += (r.omega / total) * r.center;
    return acc;
}

/// Small-angle bound on |fixed_point(compose(seq)) - cg_center(seq)|:
///
///   1/2 * sum_{i=1}^{k-1} l_i * min(W_i, W - W_i)
///
/// where l_i = |p_{i+1} - p_i| is the i-th link, W_i = w_1 + ... + w_i is the
/// angle mass before the link and W the total. The leading-order error is
/// |sum_{i<j} w_i w_j (p_j - p_i)| / (2W); bounding each p_j - p_i by the links
/// between them gives the expression above. For two rotations with equal
/// angles and unit link it evaluates to w/2.
inline double cg_error_bound(std::span<const Rotation> seq) noexcept {
    if (seq.size() < 2) return 0.0;
    const double total = total_angle(seq);
    double before = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        before += seq[i].omega;
        const double mass = std::min(before, total - before);
        sum += distance(seq[i + 1].center, seq[i].center) * std::max(mass, 0.0);
    }
    return 0.5 * sum;
}

// ---------------------------------------------------------------------------
// Polygons
// ---------------------------------------------------------------------------

inline double signed_area(std::span<const Point2> poly) noexcept {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

/// Counterclockwise convex hull (Andrew's monotone chain), collinear points
/// dropped. One distinct point yields a single vertex, collinear input yields
/// the two extreme points.
inline Polygon convex_hull_2d(std::span<const Point2> points) {
    if (points.empty()) throw Error(ErrorCode::invalid_argument, "convex hull of no points");
    std::vector<Point2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;

    Polygon hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && orientation(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && orientation(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

/// Closed containment in a CCW convex polygon (as produced by convex_hull_2d),
/// with an absolute distance tolerance.
inline bool point_in_convex(Point2 p, std::span<const Point2> hull, double tol = 0.0) {
    if (hull.empty()) return false;
    if (hull.size() == 1) return distance(p, hull[0]) <= tol;
    if (hull.size() == 2) {
        const Point2 d = hull[1] - hull[0];
        const double len2 = dot(d, d);
        const double t = std::clamp(dot(p - hull[0], d) / len2, 0.0, 1.0);
        return distance(p, hull[0] + t * d) <= tol;
    }
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2 a = hull[i];
        const Point2 b = hull[(i + 1) % hull.size()];
        if (tol == 0.0) {
            if (orientation(a, b, p) < 0) return false;
        } else if (cross(b - a, p - a) / norm(b - a) < -tol) {
            return false;
        }
    }
    return true;
}

inline bool on_segment(Point2 a, Point2 b, Point2 p) noexcept {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

/// Closed segment intersection with exact orientation tests.
inline bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) noexcept {
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

/// True when segments cross or overlap anywhere other than at a shared endpoint.
inline bool segments_cross_properly(Point2 a, Point2 b, Point2 c, Point2 d) noexcept {
    const bool share = a == c || a == d || b == c || b == d;
    if (!share) return segments_intersect(a, b, c, d);
    // Sharing an endpoint: only a collinear overlap counts.
    Point2 s = a, p = b, q = (a == c) ? d : c;
    if (b == c || b == d) {
        s = b;
        p = a;
        q = (b == c) ? d : c;
    }
    if (orientation(s, p, q) != 0) return false;
    return dot(p - s, q - s) > 0.0;
}

inline bool is_simple_polygon(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (const auto& p : poly)
        if (!is_finite(p)) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (poly[i] == poly[(i + 1) % n]) return false;
    if (signed_area(poly) == 0.0) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i], b = poly[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point2 c = poly[j], d = poly[(j + 1) % n];
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                if (segments_cross_properly(a, b, c, d)) return false;
            } else if (segments_intersect(a, b, c, d)) {
                return false;
            }
        }
    }
    return true;
}

inline Polygon ccw_copy(std::span<const Point2> poly) {
    Polygon out(poly.begin(), poly.end());
    if (signed_area(out) < 0.0) std::reverse(out.begin(), out.end());
    return out;
}

/// Weak convexity of a CCW polygon (collinear vertices allowed).
inline bool is_convex_ccw(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        if (orientation(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) < 0) return false;
    return true;
}

/// Ear-clipping triangulation of a simple CCW polygon.
inline std::vector<std::array<Point2, 3>> triangulate(std::span<const Point2> poly) {
    std::vector<Point2> v(poly.begin(), poly.end());
    std::vector<std::array<Point2, 3>> tris;
    auto inside_or_on = [](Point2 p, Point2 a, Point2 b, Point2 c) {
        return orientation(a, b, p) >= 0 && orientation(b, c, p) >= 0 && orientation(c, a, p) >= 0;
    };
    while (v.size() > 3) {
        const std::size_t n = v.size();
        bool clipped = false;
        for (std::size_t i = 0; i < n && !clipped; ++i) {
            const Point2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
            if (orientation(a, b, c) <= 0) continue;
            bool ear = true;
            for (std::size_t j = 0; j < n && ear; ++j) {
                if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
                if (v[j] == a || v[j] == b || v[j] == c) continue;
                if (inside_or_on(v[j], a, b, c)) ear = false;
            }
            if (ear) {
                tris.push_back({a, b, c});
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
            }
        }
        if (clipped) continue;
        // No strictly convex ear: drop a collinear vertex, which adds no area.
        bool dropped = false;
        for (std::size_t i = 0; i < n && !dropped; ++i) {
            if (orientation(v[(i + n - 1) % n], v[i], v[(i + 1) % n]) == 0) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                dropped = true;
            }
        }
        if (!dropped) break;
    }
    if (v.size() == 3 && orientation(v[0], v[1], v[2]) > 0) tris.push_back({v[0], v[1], v[2]});
    return tris;
}

/// Separating-axis overlap depth of two CCW convex polygons: the smallest
/// projected interval overlap over all edge normals. Negative when separated.
inline double convex_overlap_depth(std::span<const Point2> a, std::span<const Point2> b) {
    double depth = std::numeric_limits<double>::infinity();
    auto axes_of = [&](std::span<const Point2> poly) {
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 e = poly[(i + 1) % n] - poly[i];
            const double len = norm(e);
            if (len == 0.0) continue;
            const Point2 axis = perp_cw(e) / len;
            double amin = std::numeric_limits<double>::infinity(), amax = -amin;
            double bmin = amin, bmax = -amin;
            for (const auto& p : a) {
                const double s = dot(p, axis);
                amin = std::min(amin, s);
                amax = std::max(amax, s);
            }
            for (const auto& p : b) {
                const double s = dot(p, axis);
                bmin = std::min(bmin, s);
                bmax = std::max(bmax, s);
            }
            depth = std::min(depth, std::min(amax, bmax) - std::max(amin, bmin));
        }
    };
    axes_of(a);
    axes_of(b);
    return depth;
}

/// Interpenetration depth of two simple polygons (either orientation).
/// Convex pairs use the separating-axis test directly; otherwise both are
/// triangulated and the deepest triangle pair is reported.
inline double overlap_depth(std::span<const Point2> a, std::span<const Point2> b) {
    if (!is_simple_polygon(a) || !is_simple_polygon(b))
        throw Error(ErrorCode::non_simple_polygon, "polygons_overlap needs simple polygons");
    const Polygon ca = ccw_copy(a);
    const Polygon cb = ccw_copy(b);
    if (is_convex_ccw(ca) && is_convex_ccw(cb)) return convex_overlap_depth(ca, cb);
    const auto ta = is_convex_ccw(ca) ? std::vector<std::array<Point2, 3>>{} : triangulate(ca);
    const auto tb = is_convex_ccw(cb) ? std::vector<std::array<Point2, 3>>{} : triangulate(cb);
    double depth = -std::numeric_limits<double>::infinity();
    auto pieces = [](const Polygon& whole, const std::vector<std::array<Point2, 3>>& tris) {
        std::vector<Polygon> out;
        if (tris.empty()) {
            out.push_back(whole);
        } else {
            for (const auto& t : tris) out.push_back({t[0], t[1], t[2]});
        }
        return out;
    };
    for (const auto& pa : pieces(ca, ta))
        for (const auto& pb : pieces(cb, tb)) depth = std::max(depth, convex_overlap_depth(pa, pb));
    return depth;
}

inline constexpr double default_touch_tolerance = 1e-9;

/// True iff the interiors intersect; interpenetration no deeper than `tol`
/// counts as touching.
inline bool polygons_overlap(std::span<const Point2> a, std::span<const Point2> b,
                             double tol = default_touch_tolerance) {
    return overlap_depth(a, b) > tol;
}

/// Mirror image of p in the line through a and b.
inline Point2 reflect_across_line(Point2 p, Point2 a, Point2 b) noexcept {
    const Point2 d = unit(b - a);
    const Point2 r = p - a;
    return a + 2.0 * dot(r, d) * d - r;
}

struct BoundingBox {
    Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

    void add(Point2 p) noexcept {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    [[nodiscard]] bool empty() const noexcept { return lo.x > hi.x; }
    [[nodiscard]] double diagonal() const noexcept { return empty() ? 0.0 : norm(hi - lo); }
};

} // namespace capunfold
