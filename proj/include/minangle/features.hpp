#pragma once

#include <vector>

#include "minangle/halfedge_mesh.hpp"

namespace minangle {

/// Per-vertex descriptors of how "sharp" the surface is at each vertex.
///
/// curvature  — angle defect: 2*pi - angle_sum at interior vertices,
///              pi - angle_sum at boundary vertices (radians).
/// edge_sharp — max unsigned dihedral over adjacent edges (radians);
///              boundary edges count as pi so open boundaries read as
///              strong creases.
/// intensity  — combined scalar (tau(|curvature|)+1)*(tau(edge_sharp)+1)-1
///              with tau(x) = min(pi, 2x); ranges over [0, (pi+1)^2 - 1].
///
/// Arrays are indexed by vertex id up to mesh.vertex_capacity(); slots of
/// deleted vertices hold stale values and must not be read.
struct FeatureField {
    std::vector<double> curvature;
    std::vector<double> edge_sharp;
    std::vector<double> intensity;
};

double gaussian_curvature(const HalfedgeMesh& mesh, VertexHandle v);
double feature_edge_intensity(const HalfedgeMesh& mesh, VertexHandle v);
double feature_intensity(const HalfedgeMesh& mesh, VertexHandle v);

/// Builds the field for every live vertex.
FeatureField compute_feature_field(const HalfedgeMesh& mesh);

/// Recomputes the three descriptors for exactly the given vertices (callers
/// pass the vertices of an updated patch). Grows the arrays if the mesh has
/// allocated new vertices since the field was built.
void update_feature_field(const HalfedgeMesh& mesh, FeatureField& field,
                          const std::vector<VertexHandle>& vertices);

enum class VertexRole {
    Feature,  // isolated sharp point: corners, spikes
    Crease,   // lies on a curve of sharp edges; may slide along it
    Smooth,   // free to move within the surface
};

struct VertexClass {
    VertexRole role = VertexRole::Smooth;
    // For Crease: the two neighbors the vertex is allowed to slide between,
    // most intense first (vertex id breaks ties). Invalid handles otherwise.
    VertexHandle crease_neighbor[2];
};

/// Classifies v by counting neighbors of similar importance: neighbor v_i
/// counts when intensity(v_i) >= zeta * intensity(v) and the connecting edge
/// is important, |dihedral| + 1 >= zeta * (edge_sharp(v) + 1). Count 0 means
/// Feature, 2 Crease, full degree Smooth; anything else snaps to whichever of
/// {2, degree} is closer, ties toward Crease. A vertex whose intensity is 0
/// (up to a 1e-9 rounding floor) always classifies Smooth.
VertexClass classify_vertex(const HalfedgeMesh& mesh, const FeatureField& field,
                            VertexHandle v, double zeta);

}  // namespace minangle
