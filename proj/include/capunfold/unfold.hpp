#pragma once

// Cutting the cap along the forest and developing it into the plane.
//
// Each face gets a local frame (first corner at the origin, second on +x);
// the development stores one rigid motion per face. Around a vertex the cut
// edges split the CCW face fan into wedges, and each wedge yields one
// developed copy of the vertex. For a root v with cut edges e_1..e_r in CCW
// order (starting after the boundary edge v -> next) the wedges are 0..r;
// the gap segment runs from the copy in wedge r to the copy in wedge 0.
//
// The copy of branch k's cut edge in wedge k is the image of its copy in
// wedge k-1 under a rigid motion J_k. Its inverse is the composition of the
// curvature rotations of the branch's vertices, visited in the order the cut
// disk's boundary walks around the branch starting from v's wedge-k copy.

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "capunfold/cap.hpp"
#include "capunfold/error.hpp"
#include "capunfold/forest.hpp"
#include "capunfold/geom.hpp"
#include "capunfold/topology.hpp"

namespace capunfold {

struct GapSegment {
    Point2 v{};        // copy in the last wedge (next to the incoming boundary edge)
    Point2 v_prime{};  // copy in wedge 0 (next to the outgoing boundary edge)
    [[nodiscard]] double length() const noexcept { return distance(v, v_prime); }
};

struct NetCorner {
    int vertex = -1;
    int face = -1;
    Point2 pos{};
};

struct Development {
    std::vector<Triangle> triangles;
    std::vector<std::array<Point2, 3>> local;   // per face, in triangle corner order
    std::vector<Rigid2> placement;              // per face, local -> plane
    std::vector<std::array<Point2, 3>> faces;   // developed corners
    std::vector<std::vector<int>> wedge_of;     // per face, per corner: wedge index at that vertex
    std::vector<std::vector<Point2>> copies;    // per vertex, one point per wedge
    std::vector<std::vector<int>> wedge_edges;  // per vertex: cut neighbor closing each wedge (CCW side)
    std::vector<NetCorner> boundary_polyline;   // CCW walk around the cut disk
    std::map<int, GapSegment> gap_segments;     // per root
    std::map<std::pair<int, int>, std::array<std::array<Point2, 2>, 2>> cut_edge_copies;
    std::set<std::pair<int, int>> cut_edges;
    int root_face = 0;
    int root_edge = -1;

    [[nodiscard]] Point2 position(int face, int vertex) const {
        const int c = corner_of(triangles[static_cast<std::size_t>(face)], vertex);
        return faces[static_cast<std::size_t>(face)][static_cast<std::size_t>(c)];
    }
};

struct DevelopOptions {
    std::optional<int> root_edge;  // boundary edge index to anchor on
    double rel_tol = 1e-9;
};

namespace detail {

inline std::array<Point2, 3> local_frame(Vec3 a, Vec3 b, Vec3 c) {
    const Vec3 ab = b - a, ac = c - a;
    const double lab = norm(ab);
    const double x = dot(ab, ac) / lab;
    const double y = norm(cross(ab, ac)) / lab;
    return {Point2{0.0, 0.0}, Point2{lab, 0.0}, Point2{x, y}};
}

inline Point2 local_of(const Development& d, int face, int vertex) {
    const int c = corner_of(d.triangles[static_cast<std::size_t>(face)], vertex);
    return d.local[static_cast<std::size_t>(face)][static_cast<std::size_t>(c)];
}

} // namespace detail

/// Cuts the forest edges and lays every face out in the plane.
inline Development develop(const Cap& cap, const CutForest& forest, const DevelopOptions& opt = {}) {
    const int n = cap.vertex_count();
    const MeshTopology topo = build_topology(n, cap.triangles);
    if (forest.parent.size() != static_cast<std::size_t>(n))
        throw Error(ErrorCode::invalid_argument, "forest does not match the cap");

    Development d;
    d.triangles = cap.triangles;
    const std::size_t nf = cap.triangles.size();
    for (int v = 0; v < n; ++v) {
        const int p = forest.parent[static_cast<std::size_t>(v)];
        if (p < 0) continue;
        if (!topo.edges.count(edge_key(v, p)))
            throw Error(ErrorCode::degenerate_tree, "forest edge " + std::to_string(v) + "-" + std::to_string(p) + " is not a mesh edge");
        d.cut_edges.insert(edge_key(v, p));
    }
    auto is_cut = [&](int a, int b) { return d.cut_edges.count(edge_key(a, b)) > 0; };

    d.local.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const auto& t = cap.triangles[f];
        d.local[f] = detail::local_frame(cap.vertices[static_cast<std::size_t>(t[0])], cap.vertices[static_cast<std::size_t>(t[1])],
                                         cap.vertices[static_cast<std::size_t>(t[2])]);
    }

    // Root face and its placement.
    const std::size_t nb = cap.boundary.size();
    std::vector<bool> placed(nf, false);
    d.placement.assign(nf, Rigid2::identity());
    if (opt.root_edge) {
        const int e = *opt.root_edge;
        if (e < 0 || static_cast<std::size_t>(e) >= nb) throw Error(ErrorCode::bad_index, "root edge out of range");
        const int a = cap.boundary[static_cast<std::size_t>(e)];
        const int b = cap.boundary[(static_cast<std::size_t>(e) + 1) % nb];
        d.root_face = topo.face_with(a, b);
        d.root_edge = e;
        d.placement[static_cast<std::size_t>(d.root_face)] =
            Rigid2::from_segments(detail::local_of(d, d.root_face, a), detail::local_of(d, d.root_face, b),
                                  xy(cap.vertices[static_cast<std::size_t>(a)]), xy(cap.vertices[static_cast<std::size_t>(b)]));
    } else {
        const auto& t = cap.triangles[0];
        d.root_face = 0;
        d.placement[0] = Rigid2::from_segments(d.local[0][0], d.local[0][1], xy(cap.vertices[static_cast<std::size_t>(t[0])]),
                                               xy(cap.vertices[static_cast<std::size_t>(t[1])]));
    }

    // Breadth-first placement across fold edges.
    std::deque<int> queue{d.root_face};
    placed[static_cast<std::size_t>(d.root_face)] = true;
    while (!queue.empty()) {
        const int f = queue.front();
        queue.pop_front();
        const auto& t = cap.triangles[static_cast<std::size_t>(f)];
        for (int i = 0; i < 3; ++i) {
            const int a = t[static_cast<std::size_t>(i)], b = t[static_cast<std::size_t>((i + 1) % 3)];
            if (is_cut(a, b)) continue;
            const int g = topo.face_with(b, a);
            if (g < 0 || placed[static_cast<std::size_t>(g)]) continue;
            const Rigid2& pf = d.placement[static_cast<std::size_t>(f)];
            d.placement[static_cast<std::size_t>(g)] =
                Rigid2::from_segments(detail::local_of(d, g, a), detail::local_of(d, g, b), pf.apply(detail::local_of(d, f, a)),
                                      pf.apply(detail::local_of(d, f, b)));
            placed[static_cast<std::size_t>(g)] = true;
            queue.push_back(g);
        }
    }
    for (std::size_t f = 0; f < nf; ++f)
        if (!placed[f]) throw Error(ErrorCode::disconnected_dual, "face " + std::to_string(f) + " is cut off from the root face");

    d.faces.resize(nf);
    for (std::size_t f = 0; f < nf; ++f)
        for (std::size_t c = 0; c < 3; ++c) d.faces[f][c] = d.placement[f].apply(d.local[f][c]);

    // Wedges and vertex copies.
    std::vector<int> next_on_boundary(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < nb; ++i) next_on_boundary[static_cast<std::size_t>(cap.boundary[i])] = cap.boundary[(i + 1) % nb];
    d.wedge_of.assign(nf, std::vector<int>(3, -1));
    d.copies.assign(static_cast<std::size_t>(n), {});
    d.wedge_edges.assign(static_cast<std::size_t>(n), {});
    for (int v = 0; v < n; ++v) {
        const int nxt = next_on_boundary[static_cast<std::size_t>(v)];
        std::vector<int> fan = vertex_fan(topo, cap.triangles, v, nxt >= 0 ? std::optional<int>(nxt) : std::nullopt);
        if (nxt < 0) {
            // Interior vertex: start right after a cut edge so wedges do not wrap.
            std::size_t start = 0;
            for (std::size_t k = 0; k < fan.size(); ++k) {
                const int before = rotate_to(cap.triangles[static_cast<std::size_t>(fan[(k + fan.size() - 1) % fan.size()])], v)[2];
                if (is_cut(v, before)) {
                    start = k;
                    break;
                }
            }
            std::rotate(fan.begin(), fan.begin() + static_cast<std::ptrdiff_t>(start), fan.end());
        }
        int wedge = 0;
        for (std::size_t k = 0; k < fan.size(); ++k) {
            const int f = fan[k];
            const int c = corner_of(cap.triangles[static_cast<std::size_t>(f)], v);
            d.wedge_of[static_cast<std::size_t>(f)][static_cast<std::size_t>(c)] = wedge;
            if (static_cast<int>(d.copies[static_cast<std::size_t>(v)].size()) == wedge)
                d.copies[static_cast<std::size_t>(v)].push_back(d.faces[static_cast<std::size_t>(f)][static_cast<std::size_t>(c)]);
            const int ccw_edge = rotate_to(cap.triangles[static_cast<std::size_t>(f)], v)[2];
            if (is_cut(v, ccw_edge) && k + 1 < fan.size()) {
                d.wedge_edges[static_cast<std::size_t>(v)].push_back(ccw_edge);
                ++wedge;
            }
        }
    }

    for (int r : forest.roots) {
        const auto& c = d.copies[static_cast<std::size_t>(r)];
        d.gap_segments[r] = GapSegment{c.back(), c.front()};
    }

    for (const auto& [a, b] : d.cut_edges) {
        const int f1 = topo.face_with(a, b), f2 = topo.face_with(b, a);
        d.cut_edge_copies[{a, b}] = {std::array<Point2, 2>{d.position(f1, a), d.position(f1, b)},
                                      std::array<Point2, 2>{d.position(f2, a), d.position(f2, b)}};
    }

    // Walk the boundary of the cut disk, interior on the left.
    auto opens = [&](int a, int b) { return topo.is_boundary_edge(a, b) || is_cut(a, b); };
    const int a0 = cap.boundary[static_cast<std::size_t>(d.root_edge >= 0 ? d.root_edge : 0)];
    const int b0 = next_on_boundary[static_cast<std::size_t>(a0)];
    int face = topo.face_with(a0, b0), from = a0, to = b0;
    const std::size_t expected = nb + 2 * d.cut_edges.size();
    for (std::size_t step = 0; step < expected; ++step) {
        d.boundary_polyline.push_back({from, face, d.position(face, from)});
        int g = face;
        for (std::size_t guard = 0; guard <= nf; ++guard) {
            const int x = rotate_to(cap.triangles[static_cast<std::size_t>(g)], to)[1];
            if (opens(to, x)) {
                from = to;
                to = x;
                face = g;
                break;
            }
            g = topo.face_with(x, to);
        }
    }
    return d;
}

struct DevelopmentResiduals {
    double congruence = 0.0;   // worst side-length error of a placed face
    double fold = 0.0;         // worst mismatch of a fold edge's two copies
    double cut_length = 0.0;   // worst length difference of a cut edge's two copies
    double area_relative = 0.0;
};

inline DevelopmentResiduals development_residuals(const Cap& cap, const Development& d) {
    DevelopmentResiduals r;
    const MeshTopology topo = build_topology(cap.vertex_count(), cap.triangles);
    double dev_area = 0.0;
    for (std::size_t f = 0; f < d.faces.size(); ++f) {
        const auto& t = cap.triangles[f];
        for (std::size_t i = 0; i < 3; ++i) {
            const double l3 = distance(cap.vertices[static_cast<std::size_t>(t[i])], cap.vertices[static_cast<std::size_t>(t[(i + 1) % 3])]);
            const double l2 = distance(d.faces[f][i], d.faces[f][(i + 1) % 3]);
            r.congruence = std::max(r.congruence, std::abs(l3 - l2));
        }
        dev_area += signed_area(d.faces[f]);
    }
    for (const auto& [key, faces] : topo.edges) {
        if (faces.size() != 2) continue;
        const auto [a, b] = key;
        const int f = faces[0], g = faces[1];
        if (d.cut_edges.count(key)) {
            r.cut_length = std::max(r.cut_length, std::abs(distance(d.position(f, a), d.position(f, b)) -
                                                           distance(d.position(g, a), d.position(g, b))));
        } else {
            r.fold = std::max({r.fold, distance(d.position(f, a), d.position(g, a)), distance(d.position(f, b), d.position(g, b))});
        }
    }
    const double area3 = cap_area(cap);
    r.area_relative = std::abs(dev_area - area3) / area3;
    return r;
}

/// Gap segment per root, as stored by develop.
inline std::map<int, GapSegment> gap_segments(const Development& d, const CutForest& forest) {
    std::map<int, GapSegment> out;
    for (int r : forest.roots) out[r] = d.gap_segments.at(r);
    return out;
}

struct CompositeCenterReport {
    int root = -1;
    int branch = -1;              // child vertex of the branch; -1 for all branches of the root
    bool degenerate = false;      // zero curvature: no rotation and no center
    Point2 center{};              // fixed point of the composed rotations
    Point2 cg{};                  // curvature-weighted average of the centers
    double gap_angle = 0.0;       // direction from v to v_prime
    double curvature = 0.0;       // total curvature of the rotations
    double bound = 0.0;           // cg_error_bound of the sequence
    double closure_error = 0.0;   // |compose(seq)(v) - v_prime|
    Point2 v{};                   // copy the composed motion starts from
    Point2 v_prime{};             // copy it must reach
    RotationSeq sequence;
};

namespace detail {

/// Rotation sequence of the branch hanging off `child` below `root`.
inline void branch_sequence(const Cap& cap, const MeshTopology& topo, const Development& d, const CutForest& forest,
                            const CapMetrics& m, int vertex, int parent, RotationSeq& out) {
    const int first_face = topo.face_with(parent, vertex);
    const auto it = m.omega.find(vertex);
    out.push_back({it == m.omega.end() ? 0.0 : it->second, d.position(first_face, vertex)});

    // Neighbors of `vertex` in CCW order, then walk clockwise from the parent.
    const auto fan = vertex_fan(topo, cap.triangles, vertex);
    std::vector<int> ring;
    for (int f : fan) ring.push_back(rotate_to(cap.triangles[static_cast<std::size_t>(f)], vertex)[1]);
    const auto pos = std::find(ring.begin(), ring.end(), parent);
    const std::size_t k0 = static_cast<std::size_t>(pos - ring.begin());
    for (std::size_t s = 1; s < ring.size(); ++s) {
        const int u = ring[(k0 + ring.size() - s) % ring.size()];
        if (forest.parent[static_cast<std::size_t>(u)] == vertex) branch_sequence(cap, topo, d, forest, m, u, vertex, out);
    }
}

inline CompositeCenterReport finish_report(int root, int branch, RotationSeq seq, Point2 v, Point2 v_prime) {
    CompositeCenterReport r;
    r.root = root;
    r.branch = branch;
    r.v = v;
    r.v_prime = v_prime;
    r.gap_angle = angle_of(v_prime - v);
    r.curvature = total_angle(seq);
    r.sequence = std::move(seq);
    if (r.curvature < 1e-12) {
        r.degenerate = true;
        r.closure_error = distance(v, v_prime);
        return r;
    }
    const Rigid2 motion = compose(r.sequence);
    r.closure_error = distance(motion.apply(v), v_prime);
    r.cg = cg_center(r.sequence);
    r.bound = cg_error_bound(r.sequence);
    if (std::abs(motion.angle) < default_translation_threshold) {
        r.degenerate = true;
        return r;
    }
    r.center = fixed_point(motion);
    return r;
}

} // namespace detail

/// One report per branch of every root, followed by one whole-root report
/// (branch = -1) whose sequence concatenates the branches from last to first.
inline std::vector<CompositeCenterReport> composite_centers(const Cap& cap, const CutForest& forest, const Development& d,
                                                            const CapMetrics& m) {
    const MeshTopology topo = build_topology(cap.vertex_count(), cap.triangles);
    std::vector<CompositeCenterReport> out;
    for (int root : forest.roots) {
        const auto& cuts = d.wedge_edges[static_cast<std::size_t>(root)];
        const auto& copies = d.copies[static_cast<std::size_t>(root)];
        RotationSeq all;
        std::vector<RotationSeq> branches(cuts.size());
        for (std::size_t k = 0; k < cuts.size(); ++k) {
            detail::branch_sequence(cap, topo, d, forest, m, cuts[k], root, branches[k]);
            out.push_back(detail::finish_report(root, cuts[k], branches[k], copies[k + 1], copies[k]));
        }
        for (std::size_t k = cuts.size(); k-- > 0;) all.insert(all.end(), branches[k].begin(), branches[k].end());
        out.push_back(detail::finish_report(root, -1, std::move(all), copies.back(), copies.front()));
    }
    return out;
}

/// Whole-root composite center report.
inline CompositeCenterReport composite_center(const Cap& cap, const CutForest& forest, const Development& d,
                                              const CapMetrics& m, int root) {
    if (std::find(forest.roots.begin(), forest.roots.end(), root) == forest.roots.end())
        throw Error(ErrorCode::invalid_argument, "vertex " + std::to_string(root) + " is not a forest root");
    for (auto& r : composite_centers(cap, forest, d, m))
        if (r.root == root && r.branch < 0) {
            if (r.degenerate && r.curvature < 1e-12)
                throw Error(ErrorCode::degenerate_tree, "trees at root " + std::to_string(root) + " carry no curvature");
            return r;
        }
    throw Error(ErrorCode::invalid_argument, "root has no report");
}

struct NetCheck {
    bool simple = true;
    std::optional<std::pair<int, int>> offending;  // first overlapping face pair
    double depth = 0.0;
};

/// Pairwise face overlap test with a uniform-grid broad phase.
inline NetCheck check_net_simple(const Development& d, double tol = default_touch_tolerance) {
    NetCheck r;
    const std::size_t nf = d.faces.size();
    if (nf < 2) return r;
    BoundingBox all;
    std::vector<BoundingBox> boxes(nf);
    double edge_sum = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
        for (const auto& p : d.faces[f]) {
            boxes[f].add(p);
            all.add(p);
        }
        edge_sum += distance(d.faces[f][0], d.faces[f][1]);
    }
    const double cell = std::max(edge_sum / static_cast<double>(nf), 1e-12);
    const auto cols = static_cast<long>(std::floor((all.hi.x - all.lo.x) / cell)) + 1;
    std::map<long, std::vector<std::size_t>> grid;
    for (std::size_t f = 0; f < nf; ++f) {
        const long x0 = static_cast<long>(std::floor((boxes[f].lo.x - all.lo.x) / cell));
        const long x1 = static_cast<long>(std::floor((boxes[f].hi.x - all.lo.x) / cell));
        const long y0 = static_cast<long>(std::floor((boxes[f].lo.y - all.lo.y) / cell));
        const long y1 = static_cast<long>(std::floor((boxes[f].hi.y - all.lo.y) / cell));
        for (long y = y0; y <= y1; ++y)
            for (long x = x0; x <= x1; ++x) grid[y * cols + x].push_back(f);
    }
    std::set<std::pair<std::size_t, std::size_t>> tested;
    for (const auto& [key, members] : grid) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                const auto pair = std::minmax(members[i], members[j]);
                if (!tested.insert(pair).second) continue;
                const double depth = convex_overlap_depth(d.faces[pair.first], d.faces[pair.second]);
                if (depth > tol && (!r.offending || depth > r.depth)) {
                    if (!r.offending) r.offending = std::pair{static_cast<int>(pair.first), static_cast<int>(pair.second)};
                    r.simple = false;
                    r.depth = std::max(r.depth, depth);
                }
            }
        }
    }
    return r;
}

} // namespace capunfold
