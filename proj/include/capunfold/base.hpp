#pragma once

// Safe-edge detection and base attachment.
//
// For a boundary edge e = (v, u) (v -> u along the CCW boundary) the edge
// frame puts e's midpoint at the origin with the x-axis pointing from u to v,
// so the developed cap lies below e and v sits on the right.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "capunfold/cap.hpp"
#include "capunfold/capgen.hpp"
#include "capunfold/error.hpp"
#include "capunfold/forest.hpp"
#include "capunfold/geom.hpp"
#include "capunfold/unfold.hpp"

namespace capunfold {

struct EdgeFrame {
    Point2 origin{};
    Point2 x_axis{1.0, 0.0};
    Point2 y_axis{0.0, 1.0};  // outward normal of e
    double half_length = 0.0;

    /// Frame for developed edge endpoints a -> b with the cap interior on the left.
    [[nodiscard]] static EdgeFrame of(Point2 a, Point2 b) {
        EdgeFrame f;
        f.origin = 0.5 * (a + b);
        f.x_axis = unit(a - b);
        f.y_axis = perp_ccw(f.x_axis);
        f.half_length = 0.5 * distance(a, b);
        return f;
    }
    [[nodiscard]] Point2 to_frame(Point2 p) const noexcept { return {dot(p - origin, x_axis), dot(p - origin, y_axis)}; }
};

struct SafeEdgeReport {
    int edge = -1;
    int v = -1;                      // boundary[edge]
    int u = -1;                      // boundary[edge + 1]
    bool locally_safe = false;
    bool criterion_gap = false;      // no gap segment rises above e
    bool criterion_overlap = false;  // reflected base overlaps no face
    bool globally_safe = false;
    std::optional<Point2> c_v;       // highest center at v, edge frame
    std::optional<Point2> c_u;       // highest center at u, edge frame
    std::vector<Point2> centers;     // all incident centers, edge frame
    double worst_gap_rise = 0.0;
    std::optional<int> witness_root; // gap segment that rises
    std::optional<int> witness_face; // face that B' overlaps
    double base_depth = 0.0;
    std::string note;
};

struct SafetyOptions {
    double rel_tol = 1e-9;
    double strict_tol = 1e-12;            // "strictly underneath", relative to the diameter
    std::optional<double> split_hint;     // frame x separating the two boundary sides
};

namespace detail {

inline std::pair<Point2, Point2> developed_edge(const Cap& cap, const Development& d, const MeshTopology& topo, int edge) {
    const std::size_t nb = cap.boundary.size();
    const int a = cap.boundary[static_cast<std::size_t>(edge)];
    const int b = cap.boundary[(static_cast<std::size_t>(edge) + 1) % nb];
    const int f = topo.face_with(a, b);
    return {d.position(f, a), d.position(f, b)};
}

inline double scale_of(const Cap& cap) {
    BoundingBox box;
    for (const auto& v : cap.vertices) box.add(xy(v));
    return std::max(box.diagonal(), 1e-300);
}

} // namespace detail

/// B reflected across the developed copy of boundary edge `edge`.
inline Polygon reflected_base(const Cap& cap, const Development& d, int edge) {
    const MeshTopology topo = build_topology(cap.vertex_count(), cap.triangles);
    const auto [a_dev, b_dev] = detail::developed_edge(cap, d, topo, edge);
    const std::size_t nb = cap.boundary.size();
    const Point2 a = xy(cap.vertices[static_cast<std::size_t>(cap.boundary[static_cast<std::size_t>(edge)])]);
    const Point2 b = xy(cap.vertices[static_cast<std::size_t>(cap.boundary[(static_cast<std::size_t>(edge) + 1) % nb])]);
    const Rigid2 m = Rigid2::from_segments(a, b, a_dev, b_dev);
    Polygon out;
    for (int v : cap.boundary) out.push_back(reflect_across_line(m.apply(xy(cap.vertices[static_cast<std::size_t>(v)])), a_dev, b_dev));
    std::reverse(out.begin(), out.end());
    return out;
}

/// Local and global safety of one boundary edge.
inline SafeEdgeReport evaluate_edge(const Cap& cap, const Development& d,
                                    const std::vector<CompositeCenterReport>& centers, int edge,
                                    const SafetyOptions& opt = {}) {
    const MeshTopology topo = build_topology(cap.vertex_count(), cap.triangles);
    const std::size_t nb = cap.boundary.size();
    const double scale = detail::scale_of(cap);
    SafeEdgeReport r;
    r.edge = edge;
    r.v = cap.boundary[static_cast<std::size_t>(edge)];
    r.u = cap.boundary[(static_cast<std::size_t>(edge) + 1) % nb];
    const auto [a_dev, b_dev] = detail::developed_edge(cap, d, topo, edge);
    const EdgeFrame frame = EdgeFrame::of(a_dev, b_dev);

    // Local: every incident composite center strictly below e, inside its slab.
    r.locally_safe = true;
    for (const auto& c : centers) {
        if (c.branch < 0 || c.degenerate || (c.root != r.v && c.root != r.u)) continue;
        const Point2 p = frame.to_frame(c.center);
        r.centers.push_back(p);
        auto& slot = c.root == r.v ? r.c_v : r.c_u;
        if (!slot || p.y > slot->y) slot = p;
        const bool below = p.y < -opt.strict_tol * scale;
        const bool in_slab = std::abs(p.x) <= frame.half_length * (1.0 + opt.strict_tol);
        if (!below || !in_slab) r.locally_safe = false;
    }

    // Criterion (a): no gap segment rises above e.
    const double tol = opt.rel_tol * scale;
    const double split = opt.split_hint.value_or(0.0);
    r.criterion_gap = true;
    for (const auto& [root, gap] : d.gap_segments) {
        const Point2 pv = frame.to_frame(gap.v), pw = frame.to_frame(gap.v_prime);
        const double side = 0.5 * (pv.x + pw.x);
        const Point2 g = side < split ? pw - pv : pv - pw;
        if (g.y > r.worst_gap_rise) r.worst_gap_rise = g.y;
        if (g.y > tol && r.criterion_gap) {
            r.criterion_gap = false;
            r.witness_root = root;
        }
    }

    // Criterion (b): the flipped base overlaps no developed face.
    const Polygon flipped = reflected_base(cap, d, edge);
    BoundingBox bb;
    for (const auto& p : flipped) bb.add(p);
    r.criterion_overlap = true;
    const double touch = default_touch_tolerance * std::max(scale, 1.0);
    for (std::size_t f = 0; f < d.faces.size(); ++f) {
        BoundingBox fb;
        for (const auto& p : d.faces[f]) fb.add(p);
        if (fb.lo.x > bb.hi.x || fb.hi.x < bb.lo.x || fb.lo.y > bb.hi.y || fb.hi.y < bb.lo.y) continue;
        const double depth = overlap_depth(flipped, d.faces[f]);
        if (depth > r.base_depth) r.base_depth = depth;
        if (depth > touch && r.criterion_overlap) {
            r.criterion_overlap = false;
            r.witness_face = static_cast<int>(f);
        }
    }
    r.globally_safe = r.locally_safe && r.criterion_gap && r.criterion_overlap;
    if (r.criterion_gap != r.criterion_overlap)
        r.note = r.criterion_gap ? "gap criterion passes but the flipped base overlaps the net"
                                 : "gap criterion fails but the flipped base does not overlap the net";
    return r;
}

struct FullNet {
    Development cap_net;
    Polygon base_polygon;  // B' in the plane of the development
    int attach_edge = -1;
    double net_area = 0.0;
    double surface_area = 0.0;  // 3D cap area + base area
};

/// Flips B across the developed edge and verifies the result.
inline FullNet attach_base(const Development& d, const Cap& cap, int edge, double rel_tol = 1e-9) {
    const std::size_t nb = cap.boundary.size();
    if (edge < 0 || static_cast<std::size_t>(edge) >= nb) throw Error(ErrorCode::bad_index, "attach edge out of range");
    FullNet net;
    net.cap_net = d;
    net.attach_edge = edge;
    net.base_polygon = reflected_base(cap, d, edge);
    const double scale = detail::scale_of(cap);

    const Polygon base = base_polygon(cap);
    for (std::size_t i = 0; i < nb; ++i) {
        // base_polygon is reversed by the reflection: side i of B maps to side nb-2-i of B'.
        const double lb = distance(base[i], base[(i + 1) % nb]);
        const std::size_t j = (2 * nb - 2 - i) % nb;
        const double lp = distance(net.base_polygon[j], net.base_polygon[(j + 1) % nb]);
        if (std::abs(lb - lp) > rel_tol * scale)
            throw Error(ErrorCode::unsafe_edge, "flipped base is not congruent to B");
    }
    const MeshTopology topo = build_topology(cap.vertex_count(), cap.triangles);
    const auto [a_dev, b_dev] = detail::developed_edge(cap, d, topo, edge);
    const Point2 pa = net.base_polygon[nb - 1 - static_cast<std::size_t>(edge)];
    const Point2 pb = net.base_polygon[(2 * nb - 2 - static_cast<std::size_t>(edge)) % nb];
    if (distance(pa, a_dev) > rel_tol * scale || distance(pb, b_dev) > rel_tol * scale)
        throw Error(ErrorCode::unsafe_edge, "flipped base does not share the attach edge");
    const double touch = default_touch_tolerance * std::max(scale, 1.0);
    for (std::size_t f = 0; f < d.faces.size(); ++f)
        if (polygons_overlap(net.base_polygon, d.faces[f], touch))
            throw Error(ErrorCode::unsafe_edge, "flipped base overlaps face " + std::to_string(f));

    for (const auto& f : d.faces) net.net_area += signed_area(f);
    net.net_area += std::abs(signed_area(net.base_polygon));
    net.surface_area = cap_area(cap) + signed_area(base);
    if (std::abs(net.net_area - net.surface_area) > rel_tol * net.surface_area)
        throw Error(ErrorCode::unsafe_edge, "net area does not match the surface area");
    return net;
}

struct PipelineOptions {
    double delta_theta = 3.0 * pi / 180.0;
    std::optional<int> edge;   // restrict the scan to one boundary edge
    double rel_tol = 1e-9;
};

struct PipelineResult {
    CapMetrics metrics;
    CurvatureReport bounds;
    ProjectionGraph graph;
    ApexChoice apex;
    QuadrantFrame frame;
    CutForest forest;
    MonotoneReport monotone;
    Development development;                 // anchored on the chosen edge, else the gap edge
    std::vector<CompositeCenterReport> centers;
    double max_closure_error = 0.0;
    NetCheck net;
    std::vector<int> scan_order;
    std::vector<SafeEdgeReport> edges;       // indexed by boundary edge
    std::optional<int> chosen_edge;
    std::optional<FullNet> full_net;
    std::vector<std::string> warnings;
    double seconds = 0.0;

    [[nodiscard]] int safe_edge_count() const {
        return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const auto& e) { return e.globally_safe; }));
    }
};

/// Gap edge first, then the other edges by decreasing orthogonality to the gap direction.
inline std::vector<int> safe_edge_scan_order(const Cap& cap, const ApexChoice& apex) {
    const std::size_t nb = cap.boundary.size();
    const Point2 g = direction(apex.gap_direction);
    std::vector<std::pair<double, int>> rest;
    for (std::size_t i = 0; i < nb; ++i) {
        if (static_cast<int>(i) == apex.gap_edge) continue;
        const Point2 a = xy(cap.vertices[static_cast<std::size_t>(cap.boundary[i])]);
        const Point2 b = xy(cap.vertices[static_cast<std::size_t>(cap.boundary[(i + 1) % nb])]);
        rest.push_back({-std::abs(cross(unit(b - a), g)), static_cast<int>(i)});
    }
    std::sort(rest.begin(), rest.end());
    std::vector<int> order{apex.gap_edge};
    for (const auto& [key, e] : rest) order.push_back(e);
    return order;
}

/// Full pipeline; never throws for a missing safe edge (see unfold_polyhedron).
inline PipelineResult run_pipeline(const Cap& cap, const PipelineOptions& opt = {}) {
    const auto start = std::chrono::steady_clock::now();
    PipelineResult r;
    ValidationOptions vopt;
    vopt.rel_tol = opt.rel_tol;
    r.metrics = validate_cap(cap, vopt);
    r.graph = project(cap);
    if (!r.metrics.projected_acute) r.warnings.push_back("projected triangulation is not acute");
    if (r.metrics.delta_theta < opt.delta_theta)
        r.warnings.push_back("projected face angles exceed the quadrant width; forest growth may stall");

    r.apex = select_apex(r.graph, opt.delta_theta);
    if (r.apex.nearest_is_vertex) r.warnings.push_back("nearest boundary point is a vertex; gap edge chosen by normal alignment");
    r.frame = orient_axes(r.graph, r.apex.apex, r.apex.gap_direction, opt.delta_theta);
    r.forest = grow_forest(r.graph, r.frame);
    r.monotone = verify_monotone(r.forest, r.graph, r.frame);

    double max_tree = 0.0;
    for (const auto& [root, sum] : tree_curvature(r.forest, r.metrics)) max_tree = std::max(max_tree, sum);
    r.bounds = curvature_bounds_check(r.metrics, opt.delta_theta, max_tree);
    if (!r.bounds.all_pass()) r.warnings.push_back("curvature exceeds the small-curvature bounds");

    DevelopOptions dopt;
    dopt.rel_tol = opt.rel_tol;
    dopt.root_edge = r.apex.gap_edge;
    const Development gap_dev = develop(cap, r.forest, dopt);
    r.centers = composite_centers(cap, r.forest, gap_dev, r.metrics);
    for (const auto& c : r.centers) r.max_closure_error = std::max(r.max_closure_error, c.closure_error);
    r.net = check_net_simple(gap_dev);
    if (!r.net.simple) r.warnings.push_back("developed cap overlaps itself");

    // Apex position in the gap edge's frame separates the two sides of the net.
    const MeshTopology topo = build_topology(cap.vertex_count(), cap.triangles);
    const auto [ga, gb] = detail::developed_edge(cap, gap_dev, topo, r.apex.gap_edge);
    const double apex_x = EdgeFrame::of(ga, gb).to_frame(gap_dev.copies[static_cast<std::size_t>(r.apex.apex)].front()).x;

    r.scan_order = opt.edge ? std::vector<int>{*opt.edge} : safe_edge_scan_order(cap, r.apex);
    r.edges.resize(cap.boundary.size());
    for (std::size_t e = 0; e < cap.boundary.size(); ++e) {
        SafetyOptions sopt;
        sopt.rel_tol = opt.rel_tol;
        if (static_cast<int>(e) == r.apex.gap_edge) sopt.split_hint = apex_x;
        r.edges[e] = evaluate_edge(cap, gap_dev, r.centers, static_cast<int>(e), sopt);
    }

    r.development = gap_dev;
    if (r.net.simple) {
        for (int e : r.scan_order) {
            if (!r.edges[static_cast<std::size_t>(e)].globally_safe) continue;
            DevelopOptions eopt = dopt;
            eopt.root_edge = e;
            Development dev = develop(cap, r.forest, eopt);
            try {
                r.full_net = attach_base(dev, cap, e, opt.rel_tol);
                r.chosen_edge = e;
                r.development = std::move(dev);
                break;
            } catch (const Error& err) {
                r.warnings.push_back("edge " + std::to_string(e) + ": " + err.what());
            }
        }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

/// Unfolds cap plus base; throws no_safe_edge when no edge works.
inline FullNet unfold_polyhedron(const Cap& cap, double delta_theta) {
    PipelineOptions opt;
    opt.delta_theta = delta_theta;
    PipelineResult r = run_pipeline(cap, opt);
    if (!r.full_net) {
        std::string msg = "none of " + std::to_string(r.edges.size()) + " boundary edges is safe:";
        for (const auto& e : r.edges)
            msg += " [" + std::to_string(e.edge) + (e.locally_safe ? " local" : "") + (e.criterion_gap ? " gap" : "") +
                   (e.criterion_overlap ? " overlap-free" : "") + "]";
        throw Error(ErrorCode::no_safe_edge, msg);
    }
    return std::move(*r.full_net);
}

// ---------------------------------------------------------------------------
// Planar adversarial scene
// ---------------------------------------------------------------------------

struct CounterexampleEdge {
    int edge = -1;
    bool locally_safe = false;
    bool overlaps = false;     // B' reflected across the edge overlaps a placed piece
    bool globally_safe = false;
    double depth = 0.0;
    int witness_piece = -1;    // 0 = main piece, 1 + i = sliver T_i
    std::vector<Polygon> placed;  // main piece, then slivers, in the edge's layout
    Polygon flipped;              // B reflected across the edge
};

struct CounterexampleReport {
    Counterexample scene;
    Polygon main_piece;                 // v_0, w_1, v_1, ..., v_n-1, w_0
    std::vector<Polygon> slivers;       // T_i = (v_i, v_i+1, w_i+1)
    std::vector<Point2> centers;        // composite center per root
    std::vector<double> gap_deviation;  // angle between gap chord and cut normal, per root
    std::vector<CounterexampleEdge> edges;
    int safe_count = 0;
    int unsafe_count = 0;               // edges whose flipped base overlaps
};

/// Develops the scene into the main piece's frame. Sliver T_i stays attached
/// to the main piece along its fold side v_i w_i+1; only its cut end v_i+1
/// takes the slit motion H_i+1 = inverse(compose(tree_i+1)), so the gap
/// v_i+1 -> H(v_i+1) opens at the cut. B is then hinged on each developed
/// boundary edge and flipped outward.
inline CounterexampleReport evaluate_counterexample(const Counterexample& cx) {
    const int n = cx.scene.n_gon;
    const auto at = [n](int i) { return static_cast<std::size_t>(((i % n) + n) % n); };
    CounterexampleReport r;
    r.scene = cx;
    for (int i = 0; i < n; ++i) {
        r.main_piece.push_back(cx.boundary[at(i)]);
        r.main_piece.push_back(cx.cut_end[at(i + 1)]);
    }

    std::vector<Point2> opened(static_cast<std::size_t>(n));  // cut-end copy of v_i on its sliver
    for (int i = 0; i < n; ++i) {
        const Rigid2 m = compose(cx.trees[at(i)]);
        r.centers.push_back(fixed_point(m));
        const Point2 v = cx.boundary[at(i)];
        const Point2 w = cx.cut_end[at(i)];
        opened[at(i)] = m.inverse().apply(v);
        const Point2 chord = opened[at(i)] - v;
        const double a = angle_between(chord, perp_ccw(v - w));
        r.gap_deviation.push_back(std::min(a, pi - a));
    }
    for (int i = 0; i < n; ++i) r.slivers.push_back({cx.boundary[at(i)], opened[at(i + 1)], cx.cut_end[at(i + 1)]});

    const Polygon base(cx.boundary.begin(), cx.boundary.end());
    for (int j = 0; j < n; ++j) {
        CounterexampleEdge e;
        e.edge = j;
        const Point2 a = cx.boundary[at(j)];
        const Point2 b = opened[at(j + 1)];
        const EdgeFrame frame = EdgeFrame::of(a, b);
        e.locally_safe = true;
        for (int root : {j, j + 1}) {
            const Point2 p = frame.to_frame(r.centers[at(root)]);
            if (!(p.y < -1e-12) || std::abs(p.x) > frame.half_length) e.locally_safe = false;
        }

        const Rigid2 hinge = Rigid2::from_segments(a, cx.boundary[at(j + 1)], a, b);
        Polygon flipped;
        for (const auto& p : base) flipped.push_back(reflect_across_line(hinge.apply(p), a, b));
        std::vector<Polygon> pieces{r.main_piece};
        pieces.insert(pieces.end(), r.slivers.begin(), r.slivers.end());
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            const double depth = overlap_depth(flipped, pieces[k]);
            if (depth > e.depth) {
                e.depth = depth;
                if (depth > default_touch_tolerance) e.witness_piece = static_cast<int>(k);
            }
        }
        e.overlaps = e.depth > default_touch_tolerance;
        e.placed = std::move(pieces);
        e.flipped = std::move(flipped);
        e.globally_safe = e.locally_safe && !e.overlaps;
        r.safe_count += e.globally_safe ? 1 : 0;
        r.unsafe_count += e.overlaps ? 1 : 0;
        r.edges.push_back(e);
    }
    return r;
}

struct SweepResult {
    std::vector<double> omegas;
    std::vector<int> overlapping_edges;  // per omega
    std::optional<double> threshold;     // first omega at which every edge overlaps
};

/// Log-spaced curvature grid for the sweep.
inline std::vector<double> sweep_grid(double lo = 1e-10, double hi = 0.05, int count = 60) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return out;
}

inline SweepResult sweep_counterexample(AdversarialScene scene, const std::vector<double>& omegas) {
    SweepResult s;
    for (double w : omegas) {
        scene.omega = w;
        const auto rep = evaluate_counterexample(generate_counterexample(scene));
        s.omegas.push_back(w);
        s.overlapping_edges.push_back(rep.unsafe_count);
        if (!s.threshold && rep.unsafe_count == scene.n_gon) s.threshold = w;
    }
    return s;
}

} // namespace capunfold
