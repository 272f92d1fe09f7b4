#pragma once

// Adaptive-exact 2D orientation test. The fast path is a plain determinant;
// when its magnitude is below the forward error bound the determinant is
// re-evaluated exactly with floating-point expansions (two-sum/two-product).

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace capunfold::predicates {

namespace detail {

struct TwoTerm {
    double hi;
    double lo;
};

inline TwoTerm two_sum(double a, double b) noexcept {
    const double s = a + b;
    const double bv = s - a;
    const double av = s - bv;
    return {s, (a - av) + (b - bv)};
}

inline TwoTerm two_product(double a, double b) noexcept {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

// Adds b to a nonoverlapping expansion e[0..n) (increasing magnitude),
// writing the result to h and dropping zero components. Returns new length.
inline std::size_t grow_expansion(const double* e, std::size_t n, double b, double* h) noexcept {
    double q = b;
    std::size_t out = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [sum, err] = two_sum(q, e[i]);
        q = sum;
        if (err != 0.0) h[out++] = err;
    }
    if (q != 0.0 || out == 0) h[out++] = q;
    return out;
}

} // namespace detail

/// Exact sign of a sum of doubles; the returned value has the sign of the
/// true sum and approximates its magnitude.
template <std::size_t N>
double exact_sum(const std::array<double, N>& terms) noexcept {
    std::array<double, N + 1> a{};
    std::array<double, N + 1> b{};
    std::size_t len = 0;
    double* cur = a.data();
    double* next = b.data();
    for (double t : terms) {
        len = detail::grow_expansion(cur, len, t, next);
        std::swap(cur, next);
    }
    return len == 0 ? 0.0 : cur[len - 1];
}

/// Positive when (a, b, c) turn counterclockwise, negative when clockwise,
/// exactly zero when collinear.
inline double orient2d(double ax, double ay, double bx, double by, double cx, double cy) noexcept {
    const double detleft = (ax - cx) * (by - cy);
    const double detright = (ay - cy) * (bx - cx);
    const double det = detleft - detright;
    constexpr double eps = std::numeric_limits<double>::epsilon() * 0.5;
    constexpr double errbound = (3.0 + 16.0 * eps) * eps;
    const double detsum = std::abs(detleft) + std::abs(detright);
    if (std::abs(det) > errbound * detsum) return det;

    // det = ax*by - ax*cy - cx*by - ay*bx + ay*cx + cy*bx  (cx*cy cancels)
    const std::array<detail::TwoTerm, 6> p = {
        detail::two_product(ax, by),  detail::two_product(-ax, cy), detail::two_product(-cx, by),
        detail::two_product(-ay, bx), detail::two_product(ay, cx),  detail::two_product(cy, bx),
    };
    std::array<double, 12> terms{};
    for (std::size_t i = 0; i < p.size(); ++i) {
        terms[2 * i] = p[i].lo;
        terms[2 * i + 1] = p[i].hi;
    }
    return exact_sum(terms);
}

inline int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

} // namespace capunfold::predicates
