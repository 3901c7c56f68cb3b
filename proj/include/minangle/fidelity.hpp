#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "minangle/aabb_tree.hpp"
#include "minangle/halfedge_mesh.hpp"
#include "minangle/sampling.hpp"
#include "minangle/star.hpp"

namespace minangle {

/// Two-sided sampled Hausdorff bookkeeping between the immutable input
/// surface and the working mesh.
///
/// Directions:
///  - out: samples on the working mesh, measured against the input surface
///    through a static tree — these distances are always exact;
///  - in: static input-surface samples carrying links (closest points) into
///    the working mesh — links are refreshed only inside edited patches, so
///    a stored distance can only overestimate the true closest distance.
///
/// The working-mesh samples are keyed by their host element id so a committed
/// operation replaces exactly the samples of the patch it rewrote. Element
/// ids are never reused by the mesh, which keeps stale keys impossible.
struct FidelityState {
    AabbTree input_tree;     // over the input mesh, never changes
    double delta_abs = 0.0;  // absolute error budget (length units)
    double n_f = 10.0;
    std::uint64_t seed = 0;

    // Input-surface snapshot by input facet id: corner positions and corner
    // feature intensities, for interpolating at closest-point links.
    std::vector<std::array<Vec3, 3>> input_points;
    std::vector<std::array<double, 3>> input_feature;

    SampleSet input_samples;  // link_* fields point into the working mesh
    std::map<int, std::vector<SamplePoint>> facet_samples;
    std::map<int, std::vector<SamplePoint>> edge_samples;
    std::map<int, SamplePoint> vertex_samples;

    // Reverse index: working-mesh facet id -> input_samples indices linked
    // there; each list kept sorted.
    std::map<int, std::vector<int>> links_into;

    /// Feature intensity of the input surface at a point of input facet f.
    double feature_at(int input_facet, const Vec3& p) const;
};

/// Samples both surfaces and links them both ways: input-surface links are
/// computed against the full working mesh, working-mesh samples against the
/// input tree. The working mesh normally starts as a copy of the input, but
/// nothing here assumes it. Throws std::invalid_argument on a non-positive
/// sampling density or error budget.
FidelityState init_fidelity(const HalfedgeMesh& input, const HalfedgeMesh& working,
                            double n_f, std::uint64_t seed, double delta_abs);

/// Max over every maintained distance, both directions.
double approx_hausdorff(const FidelityState& state);

struct FidelityViolation {
    bool in_direction = false;  // false: patch sample too far from the input
    Vec3 position;              // offending sample
    double distance = 0.0;
};

struct LinkUpdate {
    int sample_index = -1;  // into state.input_samples.samples
    int facet = -1;         // post-op working-mesh facet id
    Vec3 point;
    double distance = 0.0;
};

struct FidelitySimulation {
    bool ok = false;
    FidelityViolation violation;  // the worst offender when !ok

    // Payload for commit_operation:
    std::vector<SamplePoint> patch_samples;  // new working-mesh samples, linked
    std::vector<LinkUpdate> relinks;         // input-sample link refreshes
};

/// Evaluates the error budget against the operation's predicted geometry
/// without touching mesh or state:
///  (a) the post-op inner patch is resampled (stratified, same per-facet
///      seeds) and measured against the input tree;
///  (b) every input sample linked into the extended patch is re-linked
///      against a transient tree over the post-op extended patch.
/// ok iff every distance from both checks stays within delta_abs; otherwise
/// `violation` reports the worst offender. The caller is expected to have
/// already ruled out topological and fold-over failures.
FidelitySimulation simulate_operation_fidelity(const FidelityState& state,
                                               const HalfedgeMesh& mesh,
                                               const StarPreview& star);

/// Applies the operation to the mesh and installs the simulation's samples
/// and link updates, restoring every invariant. Only call with the `ok`
/// result of a simulation of `star` against the current state.
VertexHandle commit_operation(FidelityState& state, HalfedgeMesh& mesh,
                              const StarPreview& star, const FidelitySimulation& sim);

struct OracleResult {
    double hausdorff = 0.0;      // max of the two one-sided values
    double rms = 0.0;            // over all sample distances, both directions pooled
    double hausdorff_ab = 0.0;   // sup over samples of a of the distance to b
    double hausdorff_ba = 0.0;
    double rms_ab = 0.0;
    double rms_ba = 0.0;
};

/// Brute-force reference: both surfaces sampled with a dense per-facet
/// barycentric lattice of about `density` points (corners and edges
/// included), each measured exactly against a tree over the other mesh.
/// Independent of the maintained state; used by tests and reports.
OracleResult oracle_hausdorff(const HalfedgeMesh& a, const HalfedgeMesh& b, int density);

}  // namespace minangle
