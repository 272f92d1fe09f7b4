#include <gtest/gtest.h>

#include <functional>

#include "capunfold/capgen.hpp"
#include "capunfold/unfold.hpp"
#include "test_support.hpp"

using namespace capunfold;

namespace {

const double dtheta = 3.0 * pi / 180.0;

struct Built {
    Cap cap;
    CapMetrics metrics;
    CutForest forest;
    Development dev;
};

Built build(const Cap& cap) {
    Built b;
    b.cap = cap;
    b.metrics = validate_cap(cap);
    const ProjectionGraph g = project(cap);
    const ApexChoice a = select_apex(g, dtheta);
    b.forest = grow_forest(g, orient_axes(g, a.apex, a.gap_direction, dtheta));
    b.dev = develop(cap, b.forest);
    return b;
}

Cap generated(std::uint64_t seed, double phi = 0.05) {
    GenParams p;
    p.seed = seed;
    p.n_target = 60;
    p.phi_max = phi;
    return generate_cap(p);
}

} // namespace

TEST(Unfold, FlatCapDevelopsOntoItself) {
    // A flat cap has no curvature: the development is its own projection up
    // to one rigid motion, and every gap closes.
    const Cap flat = testsupport::flattened(generated(1));
    const Built b = build(flat);
    const auto& t0 = flat.triangles[0];
    const Point2 p0 = xy(flat.vertices[static_cast<std::size_t>(t0[0])]);
    const Point2 p1 = xy(flat.vertices[static_cast<std::size_t>(t0[1])]);
    const Point2 d0 = b.dev.faces[0][0], d1 = b.dev.faces[0][1];
    // Oracle motion: rotate p1 - p0 onto d1 - d0, then translate.
    const double rot = std::atan2(d1.y - d0.y, d1.x - d0.x) - std::atan2(p1.y - p0.y, p1.x - p0.x);
    const testsupport::Mat3 m =
        testsupport::mat_mul(testsupport::mat_translate(d0.x, d0.y), testsupport::mat_mul(testsupport::mat_rotate(rot), testsupport::mat_translate(-p0.x, -p0.y)));
    double worst = 0.0;
    for (std::size_t f = 0; f < flat.triangles.size(); ++f)
        for (std::size_t i = 0; i < 3; ++i) {
            const Point2 want = testsupport::mat_apply(m, xy(flat.vertices[static_cast<std::size_t>(flat.triangles[f][i])]));
            worst = std::max(worst, distance(want, b.dev.faces[f][i]));
        }
    EXPECT_LT(worst, 1e-9);
    for (const auto& [root, gap] : b.dev.gap_segments) EXPECT_LT(gap.length(), 1e-9) << root;
}

TEST(Unfold, ResidualsAreAtRoundingLevel) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Built b = build(generated(seed));
        const DevelopmentResiduals r = development_residuals(b.cap, b.dev);
        EXPECT_LT(r.congruence, 1e-12) << seed;
        EXPECT_LT(r.fold, 1e-12) << seed;
        EXPECT_LT(r.cut_length, 1e-12) << seed;
        EXPECT_LT(r.area_relative, 1e-12) << seed;
    }
}

TEST(Unfold, FacesKeepOrientation) {
    const Built b = build(generated(2));
    for (const auto& f : b.dev.faces) EXPECT_GT(signed_area(f), 0.0);
}

TEST(Unfold, CompositeMotionClosesEveryGap) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Built b = build(generated(seed));
        for (const auto& r : composite_centers(b.cap, b.forest, b.dev, b.metrics)) {
            EXPECT_LT(r.closure_error, 1e-9) << "seed " << seed << " root " << r.root;
            // Same closure by matrix products.
            const Point2 image = testsupport::mat_apply(testsupport::mat_sequence(r.sequence), r.v);
            EXPECT_LT(distance(image, r.v_prime), 1e-9);
            if (r.degenerate) continue;
            const Point2 c = testsupport::mat_fixed_point(testsupport::mat_sequence(r.sequence));
            EXPECT_LT(distance(c, r.center), 1e-9 * std::max(1.0, norm(c)));
            EXPECT_LE(distance(r.center, r.cg), r.bound * (1 + 1e-9) + 1e-12);
        }
    }
}

TEST(Unfold, WholeRootCurvatureMatchesTree) {
    const Built b = build(generated(5));
    const auto sums = tree_curvature(b.forest, b.metrics);
    int flat_roots = 0;
    for (int root : b.forest.roots) {
        if (sums.count(root) == 0 || sums.at(root) < 1e-12) {
            EXPECT_THROW(composite_center(b.cap, b.forest, b.dev, b.metrics, root), Error);
            ++flat_roots;
            continue;
        }
        const CompositeCenterReport r = composite_center(b.cap, b.forest, b.dev, b.metrics, root);
        EXPECT_NEAR(r.curvature, sums.at(root), 1e-14);
        EXPECT_EQ(r.branch, -1);
    }
    EXPECT_LT(flat_roots, static_cast<int>(b.forest.roots.size()));
}

TEST(Unfold, PyramidGapIsAChord) {
    // One internal vertex with curvature w at slant distance L from the root:
    // the gap is the chord 2 L sin(w/2).
    const Cap cap = testsupport::fan_cap(6, 0.05, {0.02, 0.01});
    const Built b = build(cap);
    ASSERT_EQ(b.forest.roots.size(), 1u);
    const int root = b.forest.roots[0];
    const double len = distance(cap.vertices[static_cast<std::size_t>(root)], cap.vertices[6]);
    const double w = b.metrics.omega.at(6);
    EXPECT_NEAR(b.dev.gap_segments.at(root).length(), 2 * len * std::sin(w / 2), 1e-14);
    const CompositeCenterReport r = composite_center(cap, b.forest, b.dev, b.metrics, root);
    ASSERT_EQ(r.sequence.size(), 1u);
    EXPECT_NEAR(r.sequence[0].omega, w, 1e-15);
    // A single rotation's center is where the apex was developed.
    EXPECT_LT(distance(r.center, r.sequence[0].center), 1e-12);
}

TEST(Unfold, RootEdgeOptionAnchorsNet) {
    const Cap cap = generated(3);
    const Built b = build(cap);
    DevelopOptions opt;
    opt.root_edge = 2;
    const Development d = develop(cap, b.forest, opt);
    EXPECT_EQ(d.root_edge, 2);
    const DevelopmentResiduals r = development_residuals(cap, d);
    EXPECT_LT(r.congruence, 1e-12);
    EXPECT_LT(r.fold, 1e-12);
}

TEST(Unfold, RejectsMismatchedForest) {
    const Cap cap = generated(3);
    CutForest forest;
    forest.parent = {-1, -1};
    EXPECT_THROW(develop(cap, forest), Error);
    const Built b = build(cap);
    try {
        (void)composite_center(cap, b.forest, b.dev, b.metrics, b.metrics.omega.begin()->first);
        FAIL() << "internal vertex accepted as root";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
    }
}

TEST(Unfold, GeneratedNetsAreSimple) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Built b = build(generated(seed));
        const NetCheck c = check_net_simple(b.dev);
        EXPECT_TRUE(c.simple) << seed;
        EXPECT_FALSE(c.offending.has_value());
    }
}

TEST(Unfold, OverlappingFacesDetected) {
    Development d;
    d.faces = {{Point2{0, 0}, Point2{1, 0}, Point2{0, 1}},
               {Point2{0.2, 0.2}, Point2{1.2, 0.2}, Point2{0.2, 1.2}},
               {Point2{5, 5}, Point2{6, 5}, Point2{5, 6}}};
    const NetCheck c = check_net_simple(d);
    EXPECT_FALSE(c.simple);
    ASSERT_TRUE(c.offending.has_value());
    EXPECT_EQ(*c.offending, (std::pair<int, int>{0, 1}));
    EXPECT_GT(c.depth, 0.1);

    // Sharing an edge is touching, not overlapping.
    d.faces[1] = {Point2{1, 0}, Point2{1, 1}, Point2{0, 1}};
    EXPECT_TRUE(check_net_simple(d).simple);
}

TEST(Unfold, GapsShrinkWithHeight) {
    const Cap cap = generated(7);
    double previous = 1e300;
    for (double s : {1.0, 0.5, 0.25, 0.1, 0.01, 0.001}) {
        Cap lower = cap;
        for (auto& v : lower.vertices) v.z *= s;
        const Built b = build(lower);
        double widest = 0.0;
        for (const auto& [root, gap] : b.dev.gap_segments) widest = std::max(widest, gap.length());
        EXPECT_LT(widest, previous) << s;
        previous = widest;
    }
    EXPECT_LT(previous, 1e-6);
}
