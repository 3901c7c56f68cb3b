#pragma once

#include <vector>

#include "minangle/features.hpp"
#include "minangle/fidelity.hpp"
#include "minangle/halfedge_mesh.hpp"

namespace minangle {

/// Feature-aware initial target for collapsing the edge (vi, vj): the more
/// intense endpoint, or the midpoint when the intensities are within
/// omega * max of each other (equal-at-zero counts as similar, so flat
/// regions collapse to midpoints).
Vec3 init_collapse_position(const HalfedgeMesh& mesh, const FeatureField& field,
                            VertexHandle vi, VertexHandle vj, double omega);

/// New-vertex seed for an edge split: the midpoint.
Vec3 init_split_position(const HalfedgeMesh& mesh, HalfedgeHandle h);

/// Classification-aware relocation seed: Feature vertices stay, Crease
/// vertices move to the midpoint of their two crease neighbors, Smooth
/// vertices to the area-weighted centroid of their incident triangles.
Vec3 init_relocation_position(const HalfedgeMesh& mesh, const FeatureField& field,
                              VertexHandle v, double zeta);

/// One sample constraint on the moving vertex, in normal form: the sample
/// position depends on the vertex as  alpha * v + (fixed part)  and wants to
/// reach a frozen target, so its energy term is  weight * |alpha*v - p|^2
/// with p = target - fixed part.
struct ClosestPointPair {
    Vec3 sample;   // sample position at build time
    Vec3 closest;  // its frozen closest point on the other surface
    double alpha = 0.0;
    Vec3 p;
    double weight = 1.0;
    double distance = 0.0;  // |sample - closest| at build time
    double voronoi = 0.0;   // sample's cell area (relative mass)
    double feature = 0.0;   // intensity at the sample
    bool in_direction = false;
};

/// Constraints for moving `v` to the trial position `pos`, both directions:
///  - out: working-mesh samples riding v (host facets, spoke edges, and the
///    vertex sample itself), each re-measured against the input tree;
///  - in: input samples currently linked into v's one-ring, measured against
///    the one-ring triangles with v placed at `pos`.
/// Samples that do not depend on v (alpha = 0 hosts) are skipped; they
/// cannot influence the minimizer. Weights are all 1.
std::vector<ClosestPointPair> build_pairs(const FidelityState& state,
                                          const HalfedgeMesh& mesh,
                                          const FeatureField& field, VertexHandle v,
                                          const Vec3& pos);

struct OptimalPosition {
    Vec3 position;
    bool constrained = true;  // false: degenerate system, position = fallback
};

/// Exact minimizer of the frozen-pair energy sum w_i |alpha_i v - p_i|^2.
OptimalPosition optimal_position(const std::vector<ClosestPointPair>& pairs,
                                 const Vec3& fallback);

enum class WeightScheme {
    Distance,          // w *= d                     (plain min-max reweighting)
    FeatureSensitive,  // w *= d * voronoi * (F + 1e-3)
};

/// Multiplies each weight by its reweighting factor. Factors are floored at
/// 1e-12 times the largest factor so weights stay positive; if every factor
/// is zero (perfect fit) weights are left unchanged.
void lawson_update(std::vector<ClosestPointPair>& pairs, WeightScheme scheme);

/// Iterative relocation of v: per iteration the pairs are rebuilt at the
/// current trial position (links refreshed), weights are carried across
/// rebuilds by sample identity and reweighted before every solve, the exact
/// minimizer is solved, and the position moves by lambda toward it. Returns
/// the final trial position; nothing is committed. The loop starts from
/// `start` (callers seed it with an operator-specific initial position);
/// the overload without `start` begins at the vertex's current position.
Vec3 minimize_vertex(const FidelityState& state, const HalfedgeMesh& mesh,
                     const FeatureField& field, VertexHandle v, int iterations,
                     double lambda, WeightScheme scheme, const Vec3& start);
Vec3 minimize_vertex(const FidelityState& state, const HalfedgeMesh& mesh,
                     const FeatureField& field, VertexHandle v, int iterations,
                     double lambda,
                     WeightScheme scheme = WeightScheme::FeatureSensitive);

}  // namespace minangle
