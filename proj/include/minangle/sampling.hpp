#pragma once

#include <cstdint>
#include <vector>

#include "minangle/halfedge_mesh.hpp"
#include "minangle/vec3.hpp"

namespace minangle {

enum class SampleKind { Vertex, Edge, Facet };

/// One surface sample. `host` is the id of the element the sample lives on
/// (vertex, edge, or facet id depending on kind). Barycentric coordinates are
/// relative to the host facet's vertex order (facet kind), the edge endpoints
/// as (1-t, t, 0) (edge kind), or trivially (1,0,0) (vertex kind), so samples
/// can be repositioned when vertices move without resampling.
struct SamplePoint {
    Vec3 position;
    SampleKind kind = SampleKind::Facet;
    int host = -1;
    Vec3 bary{1, 0, 0};
    double voronoi_area = 0.0;

    // Closest-point link onto the opposite mesh; maintained by the fidelity
    // layer, unset (link_facet = -1) until then.
    int link_facet = -1;
    Vec3 link_point;
    double link_dist = 0.0;

    // Input-mesh feature intensity at the sample, cached at initialization
    // (used as a relative weight during relocation).
    double feature = 0.0;
};

struct SampleSet {
    std::vector<SamplePoint> samples;
    double n_f = 0.0;
    std::uint64_t seed = 0;
};

/// Per-facet target count: n_f scaled by how much area-per-sample this facet
/// would otherwise get relative to its vertex-sharing neighbors; rounded,
/// clamped to at least one so every facet stays under fidelity control.
int facet_sample_count(double n_f, double area, const std::vector<double>& neighbor_areas);

/// n quasi-uniform samples in triangle (p0,p1,p2): random start, five Lloyd
/// iterations on the triangle-bounded Voronoi diagram. Each sample carries its
/// cell area; areas sum to the triangle area. The stream is seeded with
/// (seed, facet_id), so a facet's samples do not depend on sampling order.
std::vector<SamplePoint> sample_facet(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                                      int facet_id, int n, std::uint64_t seed);

/// A facet sample adjacent to an edge, as seen from one side.
struct EdgeSideSample {
    Vec3 position;
    double area = 0.0;
};

/// Samples for edge (p,q): one per incident Voronoi cell that touches the
/// edge (from both sides), evenly placed in the open edge. Each carries the
/// edge's length share times the mean width (cell area / contact length) of
/// the touching cells. Pass an empty side for boundary edges.
std::vector<SamplePoint> sample_edge(const Vec3& p, const Vec3& q, int edge_id,
                                     const std::vector<EdgeSideSample>& side_a,
                                     const std::vector<EdgeSideSample>& side_b);

/// Vertex sample with the lumped one-third share of incident facet areas.
SamplePoint vertex_sample(const HalfedgeMesh& mesh, VertexHandle v);

/// Full stratified set over the mesh: facet samples (per-facet counts from
/// facet_sample_count), then edge samples, then one sample per vertex —
/// ordered by element id, deterministic under `seed`.
SampleSet stratified_sample(const HalfedgeMesh& mesh, double n_f, std::uint64_t seed);

}  // namespace minangle
