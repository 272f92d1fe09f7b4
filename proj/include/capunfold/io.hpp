#pragma once

// OFF mesh input/output, SVG net rendering and the JSON run report.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "capunfold/base.hpp"
#include "capunfold/cap.hpp"
#include "capunfold/error.hpp"
#include "capunfold/geom.hpp"
#include "capunfold/topology.hpp"

namespace capunfold {

/// Relative tolerance from CAPUNFOLD_TOL, default 1e-9.
inline double tolerance_from_env(const char* name = "CAPUNFOLD_TOL") {
    const char* raw = std::getenv(name);
    if (raw == nullptr || *raw == '\0') return 1e-9;
    char* end = nullptr;
    const double v = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::invalid_argument, std::string(name) + " must be a positive number");
    return v;
}

// ---------------------------------------------------------------------------
// OFF
// ---------------------------------------------------------------------------

/// Reads an ASCII OFF triangle mesh. The boundary is recovered from the
/// single-face edges and oriented CCW seen from +z; if the faces wind
/// clockwise they are flipped to match.
inline Cap read_off(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::parse_error, name + ":" + std::to_string(line_no) + ": " + what);
    };
    auto next_tokens = [&](std::vector<std::string>& tokens) {
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ss(line);
            tokens.clear();
            for (std::string t; ss >> t;) tokens.push_back(t);
            if (!tokens.empty()) return true;
        }
        return false;
    };
    auto to_double = [&](const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) fail("expected a number, got '" + s + "'");
        return v;
    };
    auto to_int = [&](const std::string& s) {
        char* end = nullptr;
        const long v = std::strtol(s.c_str(), &end, 10);
        if (end == s.c_str() || *end != '\0' || v < 0 || v > 100'000'000) fail("expected an index, got '" + s + "'");
        return static_cast<int>(v);
    };

    std::vector<std::string> tok;
    if (!next_tokens(tok) || tok[0] != "OFF") fail("missing OFF header");
    tok.erase(tok.begin());
    if (tok.empty() && !next_tokens(tok)) fail("missing counts line");
    if (tok.size() < 2) fail("counts line needs vertex and face counts");
    const int nv = to_int(tok[0]);
    const int nf = to_int(tok[1]);

    Cap cap;
    for (int i = 0; i < nv; ++i) {
        if (!next_tokens(tok)) fail("unexpected end of file in vertex list");
        if (tok.size() < 3) fail("vertex line needs three coordinates");
        cap.vertices.push_back({to_double(tok[0]), to_double(tok[1]), to_double(tok[2])});
    }
    for (int i = 0; i < nf; ++i) {
        if (!next_tokens(tok)) fail("unexpected end of file in face list");
        if (tok[0] != "3") fail("only triangular faces are supported, got a " + tok[0] + "-gon");
        if (tok.size() < 4) fail("triangle line needs three indices");
        Triangle t{to_int(tok[1]), to_int(tok[2]), to_int(tok[3])};
        for (int v : t)
            if (v >= nv) fail("vertex index " + std::to_string(v) + " out of range");
        cap.triangles.push_back(t);
    }

    const MeshTopology topo = build_topology(nv, cap.triangles);
    cap.boundary = boundary_cycle(topo);
    Polygon poly;
    for (int v : cap.boundary) poly.push_back(xy(cap.vertices[static_cast<std::size_t>(v)]));
    if (signed_area(poly) < 0.0) {
        for (auto& t : cap.triangles) std::swap(t[1], t[2]);
        std::reverse(cap.boundary.begin(), cap.boundary.end());
    }
    // Start the cycle at its smallest index for a stable edge numbering.
    const auto first = std::min_element(cap.boundary.begin(), cap.boundary.end());
    std::rotate(cap.boundary.begin(), first, cap.boundary.end());
    return cap;
}

inline Cap read_off(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path);
    return read_off(in, path);
}

inline void write_off(const Cap& cap, std::ostream& out) {
    out << "OFF\n" << cap.vertices.size() << ' ' << cap.triangles.size() << " 0\n";
    out << std::setprecision(17);
    for (const auto& v : cap.vertices) out << v.x << ' ' << v.y << ' ' << v.z << '\n';
    for (const auto& t : cap.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

inline void write_off(const Cap& cap, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path);
    write_off(cap, out);
    if (!out) throw Error(ErrorCode::io_failure, "write failed for " + path);
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

struct Segment2 {
    Point2 a{};
    Point2 b{};
};

struct NetDocument {
    std::vector<Segment2> cut_edges;
    std::vector<Segment2> fold_edges;
    std::vector<Segment2> boundary;
    std::vector<Segment2> gap_segments;
    std::vector<Polygon> base_polygons;
    std::vector<Point2> centers;

    [[nodiscard]] BoundingBox bounds() const {
        BoundingBox box;
        for (const auto* layer : {&cut_edges, &fold_edges, &boundary, &gap_segments})
            for (const auto& s : *layer) {
                box.add(s.a);
                box.add(s.b);
            }
        for (const auto& poly : base_polygons)
            for (const auto& p : poly) box.add(p);
        for (const auto& p : centers) box.add(p);
        return box;
    }
};

/// Layers for a developed cap with optional flipped base and centers.
inline NetDocument net_document(const Cap& cap, const Development& d, const Polygon* base = nullptr,
                                const std::vector<CompositeCenterReport>* centers = nullptr) {
    NetDocument doc;
    const MeshTopology topo = build_topology(cap.vertex_count(), cap.triangles);
    for (const auto& [key, faces] : topo.edges) {
        const auto [a, b] = key;
        if (faces.size() == 1) {
            doc.boundary.push_back({d.position(faces[0], a), d.position(faces[0], b)});
        } else if (d.cut_edges.count(key)) {
            for (int f : faces) doc.cut_edges.push_back({d.position(f, a), d.position(f, b)});
        } else {
            doc.fold_edges.push_back({d.position(faces[0], a), d.position(faces[0], b)});
        }
    }
    const double closed = 1e-12 * detail::scale_of(cap);  // rounding-level gaps are not drawn
    for (const auto& [root, gap] : d.gap_segments)
        if (gap.length() > closed) doc.gap_segments.push_back({gap.v, gap.v_prime});
    if (base != nullptr) doc.base_polygons.push_back(*base);
    if (centers != nullptr)
        for (const auto& c : *centers)
            if (c.branch >= 0 && !c.degenerate) doc.centers.push_back(c.center);
    return doc;
}

/// The adversarial scene laid out for edge j: pieces in black, cuts red,
/// the original boundary blue and the flipped base green.
inline NetDocument counterexample_document(const CounterexampleReport& rep, int edge) {
    NetDocument doc;
    const auto& cx = rep.scene;
    const std::size_t n = cx.boundary.size();
    for (std::size_t i = 0; i < n; ++i) {
        doc.boundary.push_back({cx.boundary[i], cx.boundary[(i + 1) % n]});
        doc.cut_edges.push_back({cx.boundary[i], cx.cut_end[i]});
    }
    doc.cut_edges.push_back({cx.cut_end[0], cx.center});
    const auto& e = rep.edges[static_cast<std::size_t>(edge)];
    for (const auto& piece : e.placed)
        for (std::size_t i = 0; i < piece.size(); ++i) doc.fold_edges.push_back({piece[i], piece[(i + 1) % piece.size()]});
    doc.base_polygons.push_back(e.flipped);
    doc.centers = rep.centers;
    return doc;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    if (s == "-0.000000") s = "0.000000";
    return s;
}

} // namespace detail

/// Deterministic SVG 1.1; y grows upward in model space.
inline void write_svg(const NetDocument& doc, std::ostream& out) {
    BoundingBox box = doc.bounds();
    if (box.empty()) box = BoundingBox{{0.0, 0.0}, {1.0, 1.0}};
    const double w = std::max(box.hi.x - box.lo.x, 1e-9);
    const double h = std::max(box.hi.y - box.lo.y, 1e-9);
    const double margin = 0.05 * std::max(w, h);
    const double x0 = box.lo.x - margin, y0 = box.lo.y - margin;
    const double vw = w + 2 * margin, vh = h + 2 * margin;
    const double stroke = 0.002 * std::max(vw, vh);
    auto X = [&](double x) { return detail::fmt(x - x0); };
    auto Y = [&](double y) { return detail::fmt(vh - (y - y0)); };
    using detail::fmt;

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << fmt(vw) << ' ' << fmt(vh)
        << "\" width=\"800\" height=\"" << fmt(800.0 * vh / vw) << "\">\n";
    out << "<style>\n"
        << ".fold{stroke:#000000;fill:none}\n.cut{stroke:#d62728;fill:none}\n.boundary{stroke:#1f77b4;fill:none}\n"
        << ".gap{stroke:#ff7f0e;fill:none}\n.base{stroke:#2ca02c;fill:#2ca02c;fill-opacity:0.15}\n"
        << ".center{fill:#444444;stroke:none}\n</style>\n";
    auto segments = [&](const char* cls, const std::vector<Segment2>& segs) {
        out << "<g class=\"" << cls << "\" stroke-width=\"" << fmt(stroke) << "\">\n";
        for (const auto& s : segs)
            out << "<line x1=\"" << X(s.a.x) << "\" y1=\"" << Y(s.a.y) << "\" x2=\"" << X(s.b.x) << "\" y2=\"" << Y(s.b.y)
                << "\"/>\n";
        out << "</g>\n";
    };
    out << "<g class=\"base\" stroke-width=\"" << fmt(stroke) << "\">\n";
    for (const auto& poly : doc.base_polygons) {
        out << "<polygon points=\"";
        for (std::size_t i = 0; i < poly.size(); ++i) out << (i ? " " : "") << X(poly[i].x) << ',' << Y(poly[i].y);
        out << "\"/>\n";
    }
    out << "</g>\n";
    segments("fold", doc.fold_edges);
    segments("boundary", doc.boundary);
    segments("cut", doc.cut_edges);
    segments("gap", doc.gap_segments);
    out << "<g class=\"center\">\n";
    for (const auto& c : doc.centers)
        out << "<circle cx=\"" << X(c.x) << "\" cy=\"" << Y(c.y) << "\" r=\"" << fmt(2.0 * stroke) << "\"/>\n";
    out << "</g>\n</svg>\n";
}

inline void write_svg(const NetDocument& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path);
    write_svg(doc, out);
    if (!out) throw Error(ErrorCode::io_failure, "write failed for " + path);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

using Json = nlohmann::ordered_json;

inline constexpr int report_schema = 1;

inline Json to_json(Point2 p) { return Json::array({p.x, p.y}); }

inline Json metrics_json(const CapMetrics& m, const CurvatureReport& b, const Cap& cap) {
    Json j;
    j["vertices"] = cap.vertices.size();
    j["faces"] = cap.triangles.size();
    j["internal_vertices"] = m.omega.size();
    j["phi"] = m.phi_max;
    j["omega_total"] = m.omega_total;
    j["max_face_angle"] = m.max_face_angle;
    j["max_projected_angle"] = m.max_projected_angle;
    j["projected_acute"] = m.projected_acute;
    j["supported_delta_theta"] = m.delta_theta;
    j["delta_theta"] = b.delta_theta;
    j["bounds"] = {{"pi_phi_squared", b.pi_phi_sq},
                   {"omega_below_pi_phi_squared", b.omega_below_pi_phi_sq},
                   {"phi_limit", b.phi_limit},
                   {"phi_within_limit", b.phi_within_limit},
                   {"omega_threshold", b.omega_threshold},
                   {"max_tree_curvature", b.tree_sum},
                   {"tree_limit", b.tree_limit},
                   {"tree_within_limit", b.tree_within_limit},
                   {"all_pass", b.all_pass()}};
    return j;
}

inline Json forest_json(const PipelineResult& r) {
    Json j;
    j["apex"] = r.apex.apex;
    j["gap_direction"] = r.apex.gap_direction;
    j["gap_edge"] = r.apex.gap_edge;
    j["gap_edge_from_vertex"] = r.apex.nearest_is_vertex;
    j["axis_angle"] = r.frame.axis_angle;
    j["theta"] = r.frame.theta;
    j["roots"] = r.forest.roots;
    Json parent = Json::object();
    for (std::size_t v = 0; v < r.forest.parent.size(); ++v)
        if (r.forest.parent[v] >= 0)
            parent[std::to_string(v)] = {{"parent", r.forest.parent[v]}, {"quadrant", r.forest.quadrant[v]}};
    j["parent"] = parent;
    j["monotone"] = {{"ok", r.monotone.ok}, {"paths", r.monotone.paths_checked}, {"max_arc", r.monotone.max_arc},
                     {"violations", r.monotone.violations.size()}};
    return j;
}

inline Json edge_json(const SafeEdgeReport& e) {
    Json j;
    j["edge"] = e.edge;
    j["v"] = e.v;
    j["u"] = e.u;
    j["locally_safe"] = e.locally_safe;
    j["gap_criterion"] = e.criterion_gap;
    j["overlap_free"] = e.criterion_overlap;
    j["globally_safe"] = e.globally_safe;
    j["c_v"] = e.c_v ? to_json(*e.c_v) : Json(nullptr);
    j["c_u"] = e.c_u ? to_json(*e.c_u) : Json(nullptr);
    j["worst_gap_rise"] = e.worst_gap_rise;
    j["base_overlap_depth"] = e.base_depth;
    j["witness_root"] = e.witness_root ? Json(*e.witness_root) : Json(nullptr);
    j["witness_face"] = e.witness_face ? Json(*e.witness_face) : Json(nullptr);
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

/// Run report; everything except the "timing" object is deterministic.
inline Json report_json(const Cap& cap, const PipelineResult& r) {
    Json j;
    j["schema"] = report_schema;
    j["metrics"] = metrics_json(r.metrics, r.bounds, cap);
    j["forest"] = forest_json(r);
    Json gaps = Json::array();
    for (const auto& [root, g] : r.development.gap_segments)
        gaps.push_back({{"root", root}, {"v", to_json(g.v)}, {"v_prime", to_json(g.v_prime)}, {"length", g.length()}});
    j["gap_segments"] = gaps;
    Json centers = Json::array();
    for (const auto& c : r.centers) {
        Json cj = {{"root", c.root}, {"branch", c.branch}, {"degenerate", c.degenerate}, {"curvature", c.curvature}};
        if (!c.degenerate) {
            cj["center"] = to_json(c.center);
            cj["cg"] = to_json(c.cg);
            cj["error"] = distance(c.center, c.cg);
            cj["bound"] = c.bound;
        }
        cj["closure_error"] = c.closure_error;
        centers.push_back(cj);
    }
    j["composite_centers"] = centers;
    j["net"] = {{"simple", r.net.simple},
                {"offending", r.net.offending ? Json::array({r.net.offending->first, r.net.offending->second}) : Json(nullptr)}};
    Json edges = Json::array();
    for (const auto& e : r.edges) edges.push_back(edge_json(e));
    j["edges"] = edges;
    j["scan_order"] = r.scan_order;
    j["safe_edge_count"] = r.safe_edge_count();
    j["chosen_edge"] = r.chosen_edge ? Json(*r.chosen_edge) : Json(nullptr);
    if (r.full_net)
        j["full_net"] = {{"attach_edge", r.full_net->attach_edge},
                         {"net_area", r.full_net->net_area},
                         {"surface_area", r.full_net->surface_area}};
    else
        j["full_net"] = nullptr;
    j["warnings"] = r.warnings;
    j["timing"] = {{"seconds", r.seconds}};
    return j;
}

inline Json counterexample_json(const CounterexampleReport& rep, const SweepResult* sweep = nullptr) {
    Json j;
    j["schema"] = report_schema;
    j["n_gon"] = rep.scene.scene.n_gon;
    j["omega"] = rep.scene.scene.omega;
    j["cut_angle"] = rep.scene.scene.cut_angle;
    j["exterior_angle"] = reflected_base_exterior_angle(rep.scene.scene.n_gon);
    Json edges = Json::array();
    for (const auto& e : rep.edges)
        edges.push_back({{"edge", e.edge},
                         {"locally_safe", e.locally_safe},
                         {"overlaps", e.overlaps},
                         {"depth", e.depth},
                         {"witness_piece", e.witness_piece},
                         {"globally_safe", e.globally_safe}});
    j["edges"] = edges;
    j["safe_edge_count"] = rep.safe_count;
    j["overlapping_edge_count"] = rep.unsafe_count;
    if (sweep != nullptr) {
        Json s = Json::array();
        for (std::size_t i = 0; i < sweep->omegas.size(); ++i)
            s.push_back({{"omega", sweep->omegas[i]}, {"overlapping_edges", sweep->overlapping_edges[i]}});
        j["sweep"] = s;
        j["threshold"] = sweep->threshold ? Json(*sweep->threshold) : Json(nullptr);
    }
    return j;
}

inline void write_report(const Json& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path);
    out << report.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::io_failure, "write failed for " + path);
}

} // namespace capunfold
