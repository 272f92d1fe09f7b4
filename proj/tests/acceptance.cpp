// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
//   acceptance --cli <path to capunfold> --workdir <scratch dir>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "capunfold/capunfold.hpp"
#include "test_support.hpp"

using namespace capunfold;
namespace fs = std::filesystem;
namespace ts = testsupport;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;  // 0: no limit
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Cap seeded_cap(std::uint64_t seed, int n_target) {
    GenParams p;
    p.seed = seed;
    p.n_target = n_target;
    return generate_cap(p);
}

int n_target_for(int i) { return 50 + (150 * i) / 19; }  // 50 .. 200 over 20 caps

const double dtheta = 3.0 * pi / 180.0;

// 1. Closed form against the fixed point of the composed motion.
Outcome two_rotation_grid() {
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i)
        for (int j = 1; j <= 20; ++j) {
            const double w1 = 1e-4 + (0.3 - 1e-4) * (i - 1) / 19.0;
            const double w2 = 1e-4 + (0.3 - 1e-4) * (j - 1) / 19.0;
            const Point2 c = two_rotation_center(w1, w2);
            const Point2 f = fixed_point(compose(RotationSeq{{w2, {1, 0}}, {w1, {0, 0}}}));
            const Point2 m = ts::mat_fixed_point(ts::mat_sequence(RotationSeq{{w2, {1, 0}}, {w1, {0, 0}}}));
            worst = std::max({worst, distance(c, f), distance(c, m)});
        }
    return {worst <= 1e-10, "max |closed form - fixed point| = " + fmt("%.3e", worst) + " over 400 pairs"};
}

// 2. delta / (w1 + w2) for two equal rotations at unit distance.
Outcome error_constant() {
    const RotationSeq seq{{1e-3, {0, 0}}, {1e-3, {1, 0}}};
    const Point2 c = ts::mat_fixed_point(ts::mat_sequence(seq));
    const double ratio = distance(c, cg_center(seq)) / 2e-3;
    return {ratio >= 0.1225 && ratio <= 0.1275, "delta/(w1+w2) = " + fmt("%.6f", ratio)};
}

// 3. Composite center within 1.2 x the bound of the weighted average.
Outcome k_rotation_bound() {
    std::mt19937_64 rng(20240303);
    std::uniform_int_distribution<int> kd(2, 10);
    double worst = 0.0;
    int bad = 0;
    for (int t = 0; t < 200; ++t) {
        const RotationSeq seq = ts::random_chain(rng, kd(rng), 1e-3);
        const double err = distance(ts::mat_fixed_point(ts::mat_sequence(seq)), cg_center(seq));
        const double bound = cg_error_bound(seq);
        worst = std::max(worst, err / bound);
        if (err > 1.2 * bound) ++bad;
    }
    return {bad == 0, std::to_string(bad) + " violations, max error/bound = " + fmt("%.4f", worst)};
}

// 4. Weighted center inside the hull of the centers.
Outcome hull_membership() {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> kd(1, 12);
    int bad = 0, oracle_bad = 0;
    for (int t = 0; t < 1000; ++t) {
        const RotationSeq seq = ts::random_chain(rng, kd(rng), 0.3, 2.0);
        if (total_angle(seq) <= 0.0) continue;
        std::vector<Point2> pts;
        for (const auto& r : seq) pts.push_back(r.center);
        const Point2 p = cg_center(seq);
        if (!point_in_convex(p, convex_hull_2d(pts), 1e-12)) ++bad;
        // Brute-force oracle: no line through two centers has every center
        // strictly on one side while p lies beyond it.
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (i == j || pts[i] == pts[j]) continue;
                const Point2 d = pts[j] - pts[i];
                const double len = std::hypot(d.x, d.y);
                bool all_left = true;
                for (const auto& q : pts) all_left = all_left && (d.x * (q.y - pts[i].y) - d.y * (q.x - pts[i].x)) / len >= -1e-12;
                if (all_left && (d.x * (p.y - pts[i].y) - d.y * (p.x - pts[i].x)) / len < -1e-12) ++oracle_bad;
            }
    }
    return {bad == 0 && oracle_bad == 0,
            std::to_string(bad) + " outside hull, " + std::to_string(oracle_bad) + " oracle violations in 1000 sequences"};
}

// 5. Forest invariants on 20 caps.
Outcome forest_invariants() {
    int violations = 0, vertices = 0;
    std::string first;
    for (int i = 0; i < 20; ++i) {
        const Cap cap = seeded_cap(static_cast<std::uint64_t>(i + 1), n_target_for(i));
        const ProjectionGraph g = project(cap);
        const ApexChoice a = select_apex(g, dtheta);
        const QuadrantFrame f = orient_axes(g, a.apex, a.gap_direction, dtheta);
        const CutForest forest = grow_forest(g, f);
        const auto audit = ts::audit_forest(g, f, forest);
        violations += audit.total();
        if (first.empty() && !audit.details.empty()) first = "; first: " + audit.details[0];
        vertices += static_cast<int>(g.internal.size());
    }
    return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(vertices) +
                                 " internal vertices, theta = 87 deg" + first};
}

// 6. A flat cap develops onto its own projection.
Outcome flat_limit() {
    double worst = 0.0, worst_gap = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
        const Cap flat = ts::flattened(seeded_cap(seed, 80));
        const ProjectionGraph g = project(flat);
        const ApexChoice a = select_apex(g, dtheta);
        const CutForest forest = grow_forest(g, orient_axes(g, a.apex, a.gap_direction, dtheta));
        const Development d = develop(flat, forest);
        const auto& t0 = flat.triangles[0];
        const Point2 p0 = xy(flat.vertices[static_cast<std::size_t>(t0[0])]);
        const Point2 p1 = xy(flat.vertices[static_cast<std::size_t>(t0[1])]);
        const Point2 d0 = d.faces[0][0], d1 = d.faces[0][1];
        const double rot = std::atan2(d1.y - d0.y, d1.x - d0.x) - std::atan2(p1.y - p0.y, p1.x - p0.x);
        const ts::Mat3 m = ts::mat_mul(ts::mat_translate(d0.x, d0.y), ts::mat_mul(ts::mat_rotate(rot), ts::mat_translate(-p0.x, -p0.y)));
        for (std::size_t f = 0; f < flat.triangles.size(); ++f)
            for (std::size_t i = 0; i < 3; ++i) {
                const Point2 want = ts::mat_apply(m, xy(flat.vertices[static_cast<std::size_t>(flat.triangles[f][i])]));
                worst = std::max({worst, std::abs(want.x - d.faces[f][i].x), std::abs(want.y - d.faces[f][i].y)});
            }
        for (const auto& [root, gap] : d.gap_segments) worst_gap = std::max(worst_gap, gap.length());
    }
    return {worst <= 1e-9 && worst_gap <= 1e-9,
            "max coordinate error " + fmt("%.3e", worst) + ", max gap length " + fmt("%.3e", worst_gap)};
}

// 7. Composed rotations carry v onto v' at every root.
Outcome gap_closure() {
    double worst = 0.0;
    int roots = 0;
    for (int i = 0; i < 20; ++i) {
        const Cap cap = seeded_cap(static_cast<std::uint64_t>(i + 1), n_target_for(i));
        const CapMetrics m = validate_cap(cap);
        const ProjectionGraph g = project(cap);
        const ApexChoice a = select_apex(g, dtheta);
        const CutForest forest = grow_forest(g, orient_axes(g, a.apex, a.gap_direction, dtheta));
        const Development d = develop(cap, forest);
        for (const auto& r : composite_centers(cap, forest, d, m)) {
            if (r.branch >= 0) continue;
            ++roots;
            worst = std::max(worst, distance(ts::mat_apply(ts::mat_sequence(r.sequence), r.v), r.v_prime));
        }
    }
    return {worst <= 1e-9, std::to_string(roots) + " roots, max closure error " + fmt("%.3e", worst)};
}

// 8. Safe edge, attached base, simple net and conserved area.
Outcome base_safe() {
    int eligible = 0, failures = 0;
    double worst_area = 0.0;
    std::string first;
    for (int i = 0; i < 20; ++i) {
        const Cap cap = seeded_cap(static_cast<std::uint64_t>(i + 1), n_target_for(i));
        const CapMetrics m = validate_cap(cap);
        if (!(m.omega_total < pi * m.phi_max * m.phi_max)) continue;
        ++eligible;
        const PipelineResult r = run_pipeline(cap);
        bool ok = r.full_net.has_value() && r.net.simple && r.safe_edge_count() >= 1;
        if (ok) {
            const double area = cap_area(cap) + signed_area(base_polygon(cap));
            const double rel = std::abs(r.full_net->net_area - area) / area;
            worst_area = std::max(worst_area, rel);
            ok = rel <= 1e-9 && check_net_simple(r.full_net->cap_net).simple;
        }
        if (!ok) {
            ++failures;
            if (first.empty()) first = "; first failure at cap " + std::to_string(i + 1);
        }
    }
    return {eligible == 20 && failures == 0, std::to_string(eligible) + "/20 caps satisfy Omega < pi Phi^2, " +
                                                  std::to_string(failures) + " failures, max area error " +
                                                  fmt("%.3e", worst_area) + first};
}

// 9. Adversarial scene: no safe edge at n = 12, always one at n = 8.
Outcome counterexample() {
    AdversarialScene s12;
    const SweepResult sw12 = sweep_counterexample(s12, sweep_grid());
    int safe_at_threshold = -1;
    if (sw12.threshold) {
        s12.omega = *sw12.threshold;
        safe_at_threshold = evaluate_counterexample(generate_counterexample(s12)).safe_count;
    }
    AdversarialScene s8;
    s8.n_gon = 8;
    const SweepResult sw8 = sweep_counterexample(s8, sweep_grid());
    int max8 = 0;
    for (int c : sw8.overlapping_edges) max8 = std::max(max8, c);

    GenParams p;
    p.boundary_sides = 12;
    const PipelineResult quad = run_pipeline(generate_cap(p));

    const bool ok = sw12.threshold && safe_at_threshold == 0 && !sw8.threshold && quad.safe_edge_count() >= 1;
    return {ok, "n=12 threshold " + (sw12.threshold ? fmt("%.3e", *sw12.threshold) : std::string("none")) +
                    " with " + std::to_string(safe_at_threshold) + " safe edges; n=8 at most " + std::to_string(max8) +
                    "/8 unsafe; quadrant forest on a 12-gon cap has " + std::to_string(quad.safe_edge_count()) +
                    " safe edges"};
}

// 10. Two CLI runs give identical artifacts.
Outcome determinism(const std::string& cli, const fs::path& work) {
    fs::create_directories(work);
    const auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
    const fs::path off = work / "det.off";
    auto sh = [](const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); };
    if (sh(q(cli) + " gen --seed 42 --n-target 120 -o " + q(off)) != 0) return {false, "gen failed"};
    for (const char* run : {"a", "b"}) {
        const int rc = sh(q(cli) + " full " + q(off) + " --json " + q(work / (std::string(run) + ".json")) + " --svg " +
                          q(work / (std::string(run) + ".svg")));
        if (rc != 0) return {false, std::string("full run ") + run + " exited with " + std::to_string(rc)};
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    nlohmann::json a = nlohmann::json::parse(slurp(work / "a.json")), b = nlohmann::json::parse(slurp(work / "b.json"));
    a.erase("timing");
    b.erase("timing");
    const bool json_same = a.dump() == b.dump();
    const std::string sa = slurp(work / "a.svg"), sb = slurp(work / "b.svg");
    const bool svg_same = !sa.empty() && sa == sb;
    return {json_same && svg_same, std::string("JSON ") + (json_same ? "identical" : "differs") + ", SVG " +
                                       (svg_same ? "identical (" + std::to_string(sa.size()) + " bytes)" : "differs")};
}

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    fs::path work = fs::temp_directory_path() / "capunfold_acceptance";
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--cli") cli = argv[i + 1];
        else if (key == "--workdir") work = argv[i + 1];
        else {
            std::cerr << "unknown option " << key << "\n";
            return 1;
        }
    }

    const std::vector<Criterion> criteria{
        {1, "two-rotation closed form", 1.0, two_rotation_grid},
        {2, "error constant 1/8", 1.0, error_constant},
        {3, "k-rotation bound", 1.0, k_rotation_bound},
        {4, "hull membership", 0.0, hull_membership},
        {5, "forest invariants", 10.0, forest_invariants},
        {6, "flat-limit development", 0.0, flat_limit},
        {7, "gap closure", 0.0, gap_closure},
        {8, "safe edge with attached base", 30.0, base_safe},
        {9, "counterexample", 5.0, counterexample},
        {10, "determinism", 0.0,
         [&]() -> Outcome {
             if (cli.empty()) return {false, "no --cli given"};
             return determinism(cli, work);
         }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0.0 && secs > c.budget_seconds) {
            o.pass = false;
            o.detail += "; over the " + fmt("%.0f", c.budget_seconds) + " s budget";
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << fmt("%.3f", secs)
                  << " s): " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
