// capunfold: command line front end for the cap unfolding library.
//
// Exit codes: 0 success, 1 usage or internal error, 2 no safe edge,
// 3 invalid cap or unreadable mesh.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "capunfold/capunfold.hpp"

namespace {

using namespace capunfold;

constexpr int exit_no_safe_edge = 2;
constexpr int exit_invalid_cap = 3;

int exit_code_for(ErrorCode c) {
    switch (c) {
    case ErrorCode::no_safe_edge: return exit_no_safe_edge;
    case ErrorCode::bad_index:
    case ErrorCode::degenerate_triangle:
    case ErrorCode::non_manifold_edge:
    case ErrorCode::inconsistent_orientation:
    case ErrorCode::boundary_mismatch:
    case ErrorCode::non_planar_boundary:
    case ErrorCode::non_convex_boundary:
    case ErrorCode::below_base_plane:
    case ErrorCode::downward_face:
    case ErrorCode::obtuse_triangle:
    case ErrorCode::negative_curvature:
    case ErrorCode::crossing_edges:
    case ErrorCode::parse_error:
    case ErrorCode::non_disk_topology: return exit_invalid_cap;
    default: return 1;
    }
}

struct CapArgs {
    std::string input;
    double delta_theta_deg = 3.0;
    std::string edge = "auto";
    std::string svg;
    std::string json;
};

std::optional<int> parse_edge(const std::string& s) {
    if (s == "auto") return std::nullopt;
    std::size_t used = 0;
    int e = -1;
    try {
        e = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || e < 0) throw Error(ErrorCode::invalid_argument, "--edge expects a non-negative index or 'auto'");
    return e;
}

PipelineOptions pipeline_options(const CapArgs& a, const Cap& cap) {
    PipelineOptions opt;
    opt.delta_theta = a.delta_theta_deg * pi / 180.0;
    opt.rel_tol = tolerance_from_env();
    opt.edge = parse_edge(a.edge);
    if (opt.edge && static_cast<std::size_t>(*opt.edge) >= cap.boundary.size())
        throw Error(ErrorCode::invalid_argument, "--edge " + a.edge + " exceeds the boundary edge count " +
                                                     std::to_string(cap.boundary.size()));
    return opt;
}

void print_metrics(const CapMetrics& m, const Cap& cap) {
    std::printf("vertices %zu  faces %zu  internal %zu\n", cap.vertices.size(), cap.triangles.size(), m.omega.size());
    std::printf("phi %.6g  omega %.6g  max face angle %.6f deg  max projected angle %.6f deg\n", m.phi_max, m.omega_total,
                m.max_face_angle * 180.0 / pi, m.max_projected_angle * 180.0 / pi);
    std::printf("supported delta theta %.6f deg  projected acute %s\n", m.delta_theta * 180.0 / pi,
                m.projected_acute ? "yes" : "no");
}

void print_edges(const PipelineResult& r) {
    std::printf("edge      v      u  local  gap  overlap  safe  note\n");
    for (const auto& e : r.edges)
        std::printf("%4d %6d %6d  %5s %4s %8s %5s  %s\n", e.edge, e.v, e.u, e.locally_safe ? "yes" : "no",
                    e.criterion_gap ? "yes" : "no", e.criterion_overlap ? "yes" : "no", e.globally_safe ? "yes" : "no",
                    e.note.c_str());
    std::printf("%d of %zu edges globally safe\n", r.safe_edge_count(), r.edges.size());
}

void print_warnings(const PipelineResult& r) {
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int cmd_validate(const CapArgs& a) {
    const Cap cap = read_off(a.input);
    ValidationOptions opt;
    opt.rel_tol = tolerance_from_env();
    const CapMetrics m = validate_cap(cap, opt);
    const CurvatureReport b = curvature_bounds_check(m, a.delta_theta_deg * pi / 180.0);
    print_metrics(m, cap);
    std::printf("omega < pi phi^2: %s   phi within limit: %s\n", b.omega_below_pi_phi_sq ? "yes" : "no",
                b.phi_within_limit ? "yes" : "no");
    if (!a.json.empty()) {
        Json j;
        j["schema"] = report_schema;
        j["metrics"] = metrics_json(m, b, cap);
        write_report(j, a.json);
    }
    return 0;
}

int cmd_forest(const CapArgs& a) {
    const Cap cap = read_off(a.input);
    const PipelineResult r = run_pipeline(cap, pipeline_options(a, cap));
    print_warnings(r);
    std::printf("apex %d  gap edge %d  axis %.9f rad  theta %.6f deg\n", r.apex.apex, r.apex.gap_edge, r.frame.axis_angle,
                r.frame.theta * 180.0 / pi);
    std::printf("roots %zu  monotone %s  max covering arc %.6f deg\n", r.forest.roots.size(), r.monotone.ok ? "yes" : "no",
                r.monotone.max_arc * 180.0 / pi);
    if (!a.json.empty()) {
        Json j;
        j["schema"] = report_schema;
        j["forest"] = forest_json(r);
        write_report(j, a.json);
    }
    return r.monotone.ok ? 0 : 1;
}

int cmd_unfold(const CapArgs& a) {
    const Cap cap = read_off(a.input);
    const PipelineResult r = run_pipeline(cap, pipeline_options(a, cap));
    print_warnings(r);
    std::printf("faces %zu  roots %zu  closure error %.3g  net simple %s\n", r.development.faces.size(),
                r.forest.roots.size(), r.max_closure_error, r.net.simple ? "yes" : "no");
    if (!a.svg.empty()) write_svg(net_document(cap, r.development, nullptr, &r.centers), a.svg);
    if (!a.json.empty()) write_report(report_json(cap, r), a.json);
    return r.net.simple ? 0 : 1;
}

int cmd_safe_edges(const CapArgs& a) {
    const Cap cap = read_off(a.input);
    const PipelineResult r = run_pipeline(cap, pipeline_options(a, cap));
    print_warnings(r);
    print_edges(r);
    if (!a.json.empty()) write_report(report_json(cap, r), a.json);
    return r.safe_edge_count() > 0 ? 0 : exit_no_safe_edge;
}

int cmd_full(const CapArgs& a) {
    const Cap cap = read_off(a.input);
    const PipelineResult r = run_pipeline(cap, pipeline_options(a, cap));
    print_warnings(r);
    print_metrics(r.metrics, cap);
    print_edges(r);
    if (!a.json.empty()) write_report(report_json(cap, r), a.json);
    if (!r.full_net) {
        std::fprintf(stderr, "no safe edge: the base cannot be attached without overlap\n");
        if (!a.svg.empty()) write_svg(net_document(cap, r.development, nullptr, &r.centers), a.svg);
        return exit_no_safe_edge;
    }
    std::printf("attached base at edge %d  net area %.12g  surface area %.12g\n", *r.chosen_edge, r.full_net->net_area,
                r.full_net->surface_area);
    if (!a.svg.empty()) write_svg(net_document(cap, r.development, &r.full_net->base_polygon, &r.centers), a.svg);
    return 0;
}

void add_cap_options(CLI::App* sub, CapArgs& a, bool outputs, bool edge) {
    sub->add_option("input", a.input, "OFF mesh of the cap")->required()->check(CLI::ExistingFile);
    sub->add_option("--delta-theta", a.delta_theta_deg, "quadrant shrink in degrees")->capture_default_str();
    if (edge) sub->add_option("--edge", a.edge, "boundary edge index or 'auto'")->capture_default_str();
    if (outputs) sub->add_option("--svg", a.svg, "write the net as SVG");
    sub->add_option("--json", a.json, "write a JSON report");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-unfold nearly flat convex caps with their base attached"};
    app.require_subcommand(1);

    CapArgs args;
    auto* validate = app.add_subcommand("validate", "check cap invariants and print metrics");
    add_cap_options(validate, args, false, false);
    auto* forest = app.add_subcommand("forest", "grow the quadrant cut forest");
    add_cap_options(forest, args, false, false);
    auto* unfold = app.add_subcommand("unfold", "develop the cap along the cut forest");
    add_cap_options(unfold, args, true, false);
    auto* safe = app.add_subcommand("safe-edges", "classify every boundary edge");
    add_cap_options(safe, args, false, true);
    auto* full = app.add_subcommand("full", "unfold the cap and attach the base");
    add_cap_options(full, args, true, true);

    GenParams gen;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen", "generate a seeded test cap");
    gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
    gen_cmd->add_option("--n-target", gen.n_target, "approximate internal vertex count")->capture_default_str();
    gen_cmd->add_option("--phi-max", gen.phi_max, "largest face tilt in radians")->capture_default_str();
    gen_cmd->add_option("--sides", gen.boundary_sides, "boundary polygon sides")->capture_default_str();
    gen_cmd->add_option("--jitter", gen.jitter)->capture_default_str();
    gen_cmd->add_option("-o,--output", gen_out, "OFF file to write")->required();

    AdversarialScene scene;
    bool sweep = false;
    int cx_edge = 0;
    std::string cx_svg, cx_json;
    auto* cx = app.add_subcommand("counterexample", "planar adversarial forest with no safe edge");
    cx->add_option("--n", scene.n_gon, "polygon sides")->capture_default_str();
    cx->add_option("--omega", scene.omega, "curvature at each cut end")->capture_default_str();
    cx->add_option("--cut-angle", scene.cut_angle, "angle between cut and boundary, radians")->capture_default_str();
    cx->add_option("--cut-length", scene.cut_length_ratio, "cut length over edge length")->capture_default_str();
    cx->add_flag("--sweep", sweep, "sweep omega to find the all-unsafe threshold");
    cx->add_option("--edge", cx_edge, "edge laid out in the SVG")->capture_default_str();
    cx->add_option("--svg", cx_svg);
    cx->add_option("--json", cx_json);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(args);
        if (forest->parsed()) return cmd_forest(args);
        if (unfold->parsed()) return cmd_unfold(args);
        if (safe->parsed()) return cmd_safe_edges(args);
        if (full->parsed()) return cmd_full(args);
        if (gen_cmd->parsed()) {
            const Cap cap = generate_cap(gen);
            write_off(cap, gen_out);
            std::printf("wrote %s: %zu vertices, %zu faces\n", gen_out.c_str(), cap.vertices.size(), cap.triangles.size());
            return 0;
        }
        if (cx->parsed()) {
            const CounterexampleReport rep = evaluate_counterexample(generate_counterexample(scene));
            std::optional<SweepResult> sw;
            if (sweep) sw = sweep_counterexample(scene, sweep_grid());
            std::printf("n %d  omega %.6g  exterior angle %.3f deg\n", scene.n_gon, scene.omega,
                        reflected_base_exterior_angle(scene.n_gon) * 180.0 / pi);
            for (const auto& e : rep.edges)
                std::printf("edge %2d  local %-3s  overlap depth %.3e  safe %s\n", e.edge, e.locally_safe ? "yes" : "no",
                            e.depth, e.globally_safe ? "yes" : "no");
            std::printf("%d safe, %d overlapping\n", rep.safe_count, rep.unsafe_count);
            if (sw) {
                if (sw->threshold)
                    std::printf("all edges overlap from omega %.6g\n", *sw->threshold);
                else
                    std::printf("no omega in the sweep makes every edge overlap\n");
            }
            if (cx_edge < 0 || cx_edge >= scene.n_gon) throw Error(ErrorCode::invalid_argument, "--edge out of range");
            if (!cx_svg.empty()) write_svg(counterexample_document(rep, cx_edge), cx_svg);
            if (!cx_json.empty()) write_report(counterexample_json(rep, sw ? &*sw : nullptr), cx_json);
            return 0;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
