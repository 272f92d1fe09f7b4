#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace capunfold {

enum class ErrorCode {
    invalid_argument,
    pure_translation,
    degenerate_angles,
    zero_total_angle,
    non_simple_polygon,
    // cap validation
    bad_index,
    degenerate_triangle,
    non_manifold_edge,
    inconsistent_orientation,
    boundary_mismatch,
    non_planar_boundary,
    non_convex_boundary,
    below_base_plane,
    downward_face,
    obtuse_triangle,
    negative_curvature,
    crossing_edges,
    // generation
    generation_failure,
    // forest
    no_internal_vertices,
    non_empty_cone,
    cannot_orient,
    stuck_vertex,
    // unfolding
    disconnected_dual,
    degenerate_tree,
    unsafe_edge,
    no_safe_edge,
    // io
    parse_error,
    non_disk_topology,
    io_failure,
};

constexpr std::string_view to_string(ErrorCode c) noexcept {
    switch (c) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::pure_translation: return "pure_translation";
    case ErrorCode::degenerate_angles: return "degenerate_angles";
    case ErrorCode::zero_total_angle: return "zero_total_angle";
    case ErrorCode::non_simple_polygon: return "non_simple_polygon";
    case ErrorCode::bad_index: return "bad_index";
    case ErrorCode::degenerate_triangle: return "degenerate_triangle";
    case ErrorCode::non_manifold_edge: return "non_manifold_edge";
    case ErrorCode::inconsistent_orientation: return "inconsistent_orientation";
    case ErrorCode::boundary_mismatch: return "boundary_mismatch";
    case ErrorCode::non_planar_boundary: return "non_planar_boundary";
    case ErrorCode::non_convex_boundary: return "non_convex_boundary";
    case ErrorCode::below_base_plane: return "below_base_plane";
    case ErrorCode::downward_face: return "downward_face";
    case ErrorCode::obtuse_triangle: return "obtuse_triangle";
    case ErrorCode::negative_curvature: return "negative_curvature";
    case ErrorCode::crossing_edges: return "crossing_edges";
    case ErrorCode::generation_failure: return "generation_failure";
    case ErrorCode::no_internal_vertices: return "no_internal_vertices";
    case ErrorCode::non_empty_cone: return "non_empty_cone";
    case ErrorCode::cannot_orient: return "cannot_orient";
    case ErrorCode::stuck_vertex: return "stuck_vertex";
    case ErrorCode::disconnected_dual: return "disconnected_dual";
    case ErrorCode::degenerate_tree: return "degenerate_tree";
    case ErrorCode::unsafe_edge: return "unsafe_edge";
    case ErrorCode::no_safe_edge: return "no_safe_edge";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::non_disk_topology: return "non_disk_topology";
    case ErrorCode::io_failure: return "io_failure";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace capunfold
