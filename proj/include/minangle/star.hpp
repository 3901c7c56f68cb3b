#pragma once

#include <vector>

#include "minangle/halfedge_mesh.hpp"

namespace minangle {

/// A candidate local operation: the mesh is untouched until the operation is
/// applied. `target` is the position the operation's moving vertex ends at
/// (merged vertex, new split vertex, or relocated vertex).
struct StarOp {
    enum class Kind { Relocate, Collapse, Split } kind = Kind::Relocate;
    VertexHandle vertex;      // Relocate only
    HalfedgeHandle halfedge;  // Collapse / Split only
    Vec3 target;

    static StarOp relocate(VertexHandle v, const Vec3& p) { return {Kind::Relocate, v, {}, p}; }
    static StarOp collapse(HalfedgeHandle h, const Vec3& p) { return {Kind::Collapse, {}, h, p}; }
    static StarOp split(HalfedgeHandle h, const Vec3& p) { return {Kind::Split, {}, h, p}; }
};

/// One post-operation facet incident to the moving vertex, as the triangle
/// (center, r1, r2) in facet orientation. Ids are the ids the elements will
/// have after the operation is applied (new ids are predictable because the
/// mesh allocates append-only).
struct StarTriangle {
    VertexHandle r1, r2;
    Vec3 p1, p2;
    int facet_id = -1;
    int replaced_facet_id = -1;  // pre-op facet supplying the before-normal
    int spoke1_edge_id = -1;     // post-op edge (center, r1)
    int spoke2_edge_id = -1;     // post-op edge (center, r2)
    int ring_edge_id = -1;       // edge (r1, r2), unchanged by the operation
};

/// The full local picture of a candidate operation: the post-op one-ring of
/// the moving vertex plus the surrounding patch bookkeeping needed to update
/// fidelity state.
struct StarPreview {
    StarOp op;
    int center_vertex_id = -1;  // post-op id of the moving vertex
    std::vector<StarTriangle> triangles;

    std::vector<int> dying_facet_ids;
    std::vector<int> dying_edge_ids;
    int dying_vertex_id = -1;  // collapse only

    // Facets whose samples the operation invalidates (pre-op ids).
    std::vector<int> replaced_facet_ids;
    // Pre-op extended patch (L+): every facet sharing a vertex with the
    // facets incident to the operation's vertices.
    std::vector<int> patch_facet_ids;           // inner (pre-op)
    std::vector<int> extended_patch_facet_ids;  // L+ (pre-op)
};

StarPreview preview_star(const HalfedgeMesh& mesh, const StarOp& op);

/// True when applying `op` would flip a surviving facet's orientation
/// (before/after unit normals with negative dot product) or collapse one
/// below `eps_area`.
bool creates_foldover(const HalfedgeMesh& mesh, const StarOp& op, double eps_area);

// Same test against an already-built preview (avoids rebuilding it).
bool creates_foldover_preview(const HalfedgeMesh& mesh, const StarPreview& star, double eps_area);

/// Convenience overload; derives eps_area = 1e-12 * bbox_diagonal^2.
bool creates_foldover(const HalfedgeMesh& mesh, const StarOp& op);

/// Smallest interior angle over the post-op star triangles with the center
/// at `center`; returns -inf when a triangle degenerates.
double star_min_angle(const StarPreview& star, const Vec3& center);

/// Applies the operation for real. Returns the moving vertex's handle.
/// Asserts (in debug builds) that the ids the preview predicted match.
VertexHandle apply_star_op(HalfedgeMesh& mesh, const StarPreview& star);

}  // namespace minangle
