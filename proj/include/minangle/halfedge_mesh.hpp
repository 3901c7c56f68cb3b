#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "minangle/geometry.hpp"
#include "minangle/vec3.hpp"

namespace minangle {

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Input violates the 2-manifold triangle mesh contract; message names the
/// offending vertex / edge / facet.
struct NonManifoldError : MeshError {
    using MeshError::MeshError;
};
/// Operation precondition failed (e.g. link condition); the mesh is unchanged.
struct TopologyError : MeshError {
    using MeshError::MeshError;
};

struct VertexHandle {
    int i = -1;
    bool valid() const { return i >= 0; }
    friend bool operator==(VertexHandle a, VertexHandle b) { return a.i == b.i; }
    friend bool operator!=(VertexHandle a, VertexHandle b) { return a.i != b.i; }
    friend bool operator<(VertexHandle a, VertexHandle b) { return a.i < b.i; }
};
struct HalfedgeHandle {
    int i = -1;
    bool valid() const { return i >= 0; }
    friend bool operator==(HalfedgeHandle a, HalfedgeHandle b) { return a.i == b.i; }
    friend bool operator!=(HalfedgeHandle a, HalfedgeHandle b) { return a.i != b.i; }
    friend bool operator<(HalfedgeHandle a, HalfedgeHandle b) { return a.i < b.i; }
};
struct EdgeHandle {
    int i = -1;
    bool valid() const { return i >= 0; }
    friend bool operator==(EdgeHandle a, EdgeHandle b) { return a.i == b.i; }
    friend bool operator!=(EdgeHandle a, EdgeHandle b) { return a.i != b.i; }
    friend bool operator<(EdgeHandle a, EdgeHandle b) { return a.i < b.i; }
};
struct FacetHandle {
    int i = -1;
    bool valid() const { return i >= 0; }
    friend bool operator==(FacetHandle a, FacetHandle b) { return a.i == b.i; }
    friend bool operator!=(FacetHandle a, FacetHandle b) { return a.i != b.i; }
    friend bool operator<(FacetHandle a, FacetHandle b) { return a.i < b.i; }
};

/// Facets directly affected by an operation (L) plus everything sharing at
/// least one vertex with them (L_plus, a superset of L).
struct LocalPatch {
    std::vector<FacetHandle> inner;     // L
    std::vector<FacetHandle> extended;  // L+
};

/// 2-manifold triangle mesh with paired halfedges (edge e owns halfedges
/// 2e and 2e+1). Element ids are append-only: deleting tombstones a slot and
/// ids of surviving elements never change, so external tables keyed by id
/// stay valid across local operations.
class HalfedgeMesh {
public:
    HalfedgeMesh() = default;

    /// Builds connectivity from an indexed triangle list. Throws MeshError /
    /// NonManifoldError on non-triangular, non-manifold, inconsistently
    /// oriented, or degenerate-connectivity input.
    HalfedgeMesh(const std::vector<Vec3>& positions, const std::vector<std::array<int, 3>>& triangles);

    // raw table sizes (including tombstones); valid id ranges
    int vertex_capacity() const { return static_cast<int>(vertices_.size()); }
    int edge_capacity() const { return static_cast<int>(halfedges_.size() / 2); }
    int halfedge_capacity() const { return static_cast<int>(halfedges_.size()); }
    int facet_capacity() const { return static_cast<int>(facets_.size()); }

    // live element counts
    int n_vertices() const { return n_vertices_; }
    int n_edges() const { return n_edges_; }
    int n_facets() const { return n_facets_; }

    bool is_deleted(VertexHandle v) const { return vertices_[v.i].deleted; }
    bool is_deleted(EdgeHandle e) const { return edge_deleted_[e.i]; }
    bool is_deleted(HalfedgeHandle h) const { return edge_deleted_[h.i >> 1]; }
    bool is_deleted(FacetHandle f) const { return facets_[f.i].deleted; }

    const Vec3& position(VertexHandle v) const { return vertices_[v.i].position; }
    void set_position(VertexHandle v, const Vec3& p) { vertices_[v.i].position = p; }

    HalfedgeHandle halfedge(VertexHandle v) const { return vertices_[v.i].halfedge; }
    HalfedgeHandle halfedge(FacetHandle f) const { return facets_[f.i].halfedge; }
    HalfedgeHandle halfedge(EdgeHandle e, int side) const { return {2 * e.i + side}; }
    EdgeHandle edge(HalfedgeHandle h) const { return {h.i >> 1}; }
    HalfedgeHandle opposite(HalfedgeHandle h) const { return {h.i ^ 1}; }
    HalfedgeHandle next(HalfedgeHandle h) const { return halfedges_[h.i].next; }
    HalfedgeHandle prev(HalfedgeHandle h) const { return halfedges_[h.i].prev; }
    VertexHandle to_vertex(HalfedgeHandle h) const { return halfedges_[h.i].to; }
    VertexHandle from_vertex(HalfedgeHandle h) const { return halfedges_[h.i ^ 1].to; }
    FacetHandle facet(HalfedgeHandle h) const { return halfedges_[h.i].facet; }

    bool is_boundary(HalfedgeHandle h) const { return !halfedges_[h.i].facet.valid(); }
    bool is_boundary(EdgeHandle e) const { return is_boundary(halfedge(e, 0)) || is_boundary(halfedge(e, 1)); }
    /// O(1): vertices on the boundary always store an outgoing boundary halfedge.
    bool is_boundary(VertexHandle v) const {
        HalfedgeHandle h = vertices_[v.i].halfedge;
        return h.valid() && is_boundary(h);
    }

    /// Next outgoing halfedge around from_vertex(h), rotating across facet(h).
    HalfedgeHandle rotate(HalfedgeHandle h) const { return opposite(prev(h)); }

    std::array<VertexHandle, 3> facet_vertices(FacetHandle f) const;
    std::array<Vec3, 3> facet_points(FacetHandle f) const;
    Vec3 facet_normal(FacetHandle f) const;
    double facet_area(FacetHandle f) const;

    std::vector<VertexHandle> vertex_ring(VertexHandle v) const;  // ordered one-ring
    std::vector<FacetHandle> vertex_facets(VertexHandle v) const;
    int valence(VertexHandle v) const;

    double edge_length(EdgeHandle e) const {
        return distance(position(to_vertex(halfedge(e, 0))), position(to_vertex(halfedge(e, 1))));
    }

    /// find halfedge from a to b, invalid handle if absent
    HalfedgeHandle find_halfedge(VertexHandle a, VertexHandle b) const;

    /// Simplicial link condition for collapsing edge(h): the link of the edge
    /// must equal the intersection of the endpoint links (vertices and edges).
    bool link_condition(HalfedgeHandle h) const;

    /// True when collapsing edge(h) additionally preserves 2-manifoldness at
    /// the boundary: an interior edge with both endpoints on the boundary
    /// would pinch the surface and is rejected.
    bool collapse_preserves_boundary(HalfedgeHandle h) const;

    /// Collapses edge(h), merging from_vertex(h) into to_vertex(h), which is
    /// moved to new_position. Throws TopologyError (mesh untouched) when the
    /// link condition or the boundary rule fails. Returns the merged vertex.
    VertexHandle collapse_edge(HalfedgeHandle h, const Vec3& new_position);

    /// Splits edge(h) at `position`, subdividing each incident facet in two.
    /// Returns the new vertex. New element ids follow the fixed allocation
    /// order documented in split_allocation().
    VertexHandle split_edge(HalfedgeHandle h, const Vec3& position);

    void relocate_vertex(VertexHandle v, const Vec3& p) { set_position(v, p); }

    LocalPatch local_patch(const std::vector<VertexHandle>& seeds) const;

    Bbox bbox() const;
    double bbox_diagonal() const { return bbox().diagonal(); }

    /// Exports live geometry compactly; `vertex_map`/`facet_map` (optional)
    /// receive old-id -> compact-row mappings.
    void to_arrays(std::vector<Vec3>& positions, std::vector<std::array<int, 3>>& triangles,
                   std::vector<int>* vertex_map = nullptr, std::vector<int>* facet_map = nullptr) const;

    /// Checks structural invariants (pointer consistency, counts); test hook.
    void check_integrity() const;

    template <typename Fn>
    void for_each_vertex(Fn&& fn) const {
        for (int i = 0; i < vertex_capacity(); ++i)
            if (!vertices_[i].deleted) fn(VertexHandle{i});
    }
    template <typename Fn>
    void for_each_facet(Fn&& fn) const {
        for (int i = 0; i < facet_capacity(); ++i)
            if (!facets_[i].deleted) fn(FacetHandle{i});
    }
    template <typename Fn>
    void for_each_edge(Fn&& fn) const {
        for (int i = 0; i < edge_capacity(); ++i)
            if (!edge_deleted_[i]) fn(EdgeHandle{i});
    }

private:
    struct VertexRecord {
        Vec3 position;
        HalfedgeHandle halfedge;
        bool deleted = false;
    };
    struct HalfedgeRecord {
        VertexHandle to;
        HalfedgeHandle next;
        HalfedgeHandle prev;
        FacetHandle facet;
    };
    struct FacetRecord {
        HalfedgeHandle halfedge;
        bool deleted = false;
    };

    EdgeHandle new_edge(VertexHandle a, VertexHandle b);  // halfedges (a->b, b->a)
    FacetHandle new_facet();
    void delete_edge(EdgeHandle e);
    void delete_facet(FacetHandle f);
    void delete_vertex(VertexHandle v);
    void set_next(HalfedgeHandle h, HalfedgeHandle n) {
        halfedges_[h.i].next = n;
        halfedges_[n.i].prev = h;
    }
    /// Re-point v's halfedge at a boundary outgoing halfedge if one exists.
    void adjust_vertex_halfedge(VertexHandle v);
    void remove_degenerate_loop(HalfedgeHandle h);

    std::vector<VertexRecord> vertices_;
    std::vector<HalfedgeRecord> halfedges_;
    std::vector<FacetRecord> facets_;
    std::vector<bool> edge_deleted_;
    int n_vertices_ = 0;
    int n_edges_ = 0;
    int n_facets_ = 0;
};

}  // namespace minangle
