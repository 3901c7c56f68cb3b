#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "minangle/features.hpp"
#include "minangle/fidelity.hpp"
#include "minangle/halfedge_mesh.hpp"
#include "minangle/star.hpp"

namespace minangle {

struct RemeshConfig {
    double delta_fraction = 0.002;    // error budget as a fraction of the input bbox diagonal
    double theta_deg = 30.0;          // target minimal interior angle, in [0, 60)
    int max_vertices = 0;             // hard vertex cap; 0 means unlimited
    double samples_per_facet = 10.0;  // fidelity sampling density
    double omega = 0.15;              // collapse-seed feature-similarity band
    double zeta = 0.5;                // vertex-classification similarity band
    double lambda = 0.9;              // relocation damping, in (0, 1]
    double delta_theta_deg = 0.1;     // minimal gain accepted by the final pass
    int opt_iterations = 2;           // relocation solver iterations per attempt
    std::uint64_t seed = 0;
    bool initial_simplification_enabled = true;
    int max_stall_operations = 100;    // failed pops per corner before freezing it
    int max_vertex_acceptances = 1000; // final-pass acceptances per vertex
};

/// Throws std::invalid_argument when a parameter leaves its domain. theta_deg
/// must stay below 60: no triangle has all angles above the equilateral bound,
/// so the goal would be unsatisfiable by construction.
void validate(const RemeshConfig& cfg);

/// Min-first queue of triangle corners whose interior angle is below the
/// threshold. Every entry remembers the per-facet stamp it was pushed with;
/// push_facet bumps the stamp, so entries from before any geometry change
/// are discarded lazily at pop. Ties break by (angle, facet id, corner id)
/// to keep runs reproducible.
class AngleQueue {
public:
    explicit AngleQueue(double theta_rad) : theta_(theta_rad) {}

    struct Entry {
        double angle = 0.0;  // radians
        int facet = -1;
        int corner = -1;  // vertex id holding the angle
        int stamp = 0;
    };

    /// Bumps the facet's stamp and enqueues its below-threshold corners.
    /// Call once per facet to fill the queue and again after every commit
    /// that changed the facet. A fully degenerate facet enqueues all three
    /// corners at angle zero.
    void push_facet(const HalfedgeMesh& mesh, FacetHandle f);

    /// Re-enqueues a popped entry unchanged (same stamp) after a failed
    /// improvement attempt; it stays live until the facet changes.
    void push_again(const Entry& e) { heap_.push(e); }

    /// Pops the smallest live entry, discarding stale and dead ones.
    /// Returns false once the queue is exhausted.
    bool pop(const HalfedgeMesh& mesh, Entry& out);

    double threshold() const { return theta_; }

private:
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.angle != b.angle) return a.angle > b.angle;
            if (a.facet != b.facet) return a.facet > b.facet;
            return a.corner > b.corner;
        }
    };

    double theta_;
    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::vector<int> stamps_;
};

/// Smallest interior angle over the listed facets in the current geometry;
/// a degenerate facet counts as zero. Returns +infinity for an empty list.
double patch_min_angle(const HalfedgeMesh& mesh, const std::vector<int>& facet_ids);

/// patch_min_angle over the facets incident to v.
double vertex_patch_min_angle(const HalfedgeMesh& mesh, VertexHandle v);

enum class Rejection {
    None,
    LinkCondition,  // collapse would pinch the neighborhood non-manifold
    Boundary,       // collapse would weld across the boundary
    Foldover,       // a surviving facet flips or degenerates
    Angle,          // post-op patch minimum fails to exceed theta_ref
    Fidelity,       // a sampled distance leaves the error budget
};

struct ImprovementCheck {
    bool ok = false;
    Rejection rejection = Rejection::None;
    StarPreview star;       // filled by the StarOp overload only
    FidelitySimulation sim; // valid when ok; holds the commit payload
};

/// The gate every candidate operation must pass before it may commit, in
/// rejection order: topology (collapses only), fold-over, post-op patch
/// minimum angle strictly above theta_ref, sampled two-sided fidelity within
/// the budget. Passing theta_ref = -infinity reduces the angle stage to a
/// degeneracy rejection. The StarOp overload runs the topological checks
/// before building the preview and returns the preview in `star`; the
/// StarPreview overload assumes the caller already ruled topology out
/// (relocations and splits have nothing to rule out).
ImprovementCheck mesh_improvement_test(const FidelityState& state, const HalfedgeMesh& mesh,
                                       const StarOp& op, double theta_ref, double eps_area);
ImprovementCheck mesh_improvement_test(const FidelityState& state, const HalfedgeMesh& mesh,
                                       const StarPreview& star, double theta_ref,
                                       double eps_area);

/// Convenience overloads deriving eps_area = 1e-12 * bbox_diagonal^2.
ImprovementCheck mesh_improvement_test(const FidelityState& state, const HalfedgeMesh& mesh,
                                       const StarOp& op, double theta_ref);

struct RemeshStats {
    int simplification_collapses = 0;
    int greedy_collapses = 0;
    int greedy_relocations = 0;
    int greedy_splits = 0;
    int refinement_relocations = 0;  // relocations bundled into collapses/splits
    int final_relocations = 0;
    int frozen_corners = 0;   // corners that exhausted the stall budget
    int frozen_vertices = 0;  // vertices that exhausted the acceptance budget
};

/// Shared mutable state threaded through the phases. Build one with
/// make_pipeline_context after init_fidelity/compute_feature_field; the
/// fold-over area floor and the relocation noise floor derive from the
/// mesh's bounding box at that moment (the working mesh still matches the
/// input), and the vertex cap resolves the unlimited sentinel.
struct PipelineContext {
    FidelityState& state;
    HalfedgeMesh& mesh;
    FeatureField& field;
    const RemeshConfig& cfg;
    double eps_area = 0.0;
    double min_move = 0.0;  // solver moves at or below this are arithmetic dust
    int vertex_cap = 0;
    RemeshStats stats;
};

PipelineContext make_pipeline_context(FidelityState& state, HalfedgeMesh& mesh,
                                      FeatureField& field, const RemeshConfig& cfg);

struct CollapseRelocateResult {
    bool committed = false;
    VertexHandle vertex;              // the merged vertex when committed
    std::vector<int> touched_facets;  // post-op star facets, both commits pooled
    std::vector<int> touched_edges;   // post-op spoke and ring edges
};

/// Collapses h (merged vertex seeded between the endpoints by feature
/// intensity), then tries to relocate the merged vertex to its fidelity
/// minimizer; the relocation is kept only when it passes the gate against
/// the patch's own pre-move minimum angle. theta_ref gates the collapse.
/// When `queue` is given, every touched facet is re-pushed into it.
CollapseRelocateResult collapse_and_relocate(PipelineContext& ctx, HalfedgeHandle h,
                                             double theta_ref, AngleQueue* queue);

/// Error-driven decimation: every halfedge enters a queue keyed by edge
/// length times the mean of the angles opposite the edge (short edges with
/// sharp opposite angles first; a boundary halfedge has only one such
/// angle), and each popped halfedge is collapsed-and-relocated under the
/// gate theta_ref = pre-op patch minimum. Failed pops are dropped; commits
/// re-queue the surviving star's edges. Runs until the queue is empty.
void initial_simplification(PipelineContext& ctx);

/// Walks from h to the locally longest edge: repeatedly moves to the
/// strictly longest of the (up to four) edges sharing a facet with the
/// current one, visiting each edge once. Stops at a local maximum or on
/// reaching a boundary edge; equal lengths keep the current edge, and a
/// tie between longer candidates takes the smallest edge id. Returns the
/// canonical (side-0) halfedge of the stopping edge.
HalfedgeHandle longest_side_propagation(const HalfedgeMesh& mesh, HalfedgeHandle h);

struct GreedyOutcome {
    bool committed = false;
    std::vector<int> touched_facets;  // stall bookkeeping resets for these
};

/// One improvement attempt for a popped corner, trying in order and
/// stopping at the first commit:
///  1. collapse of the edge opposite the corner, gated by the popped angle;
///  2. relocation of the corner vertex, then of the opposite edge's source
///     and target, each seeded by its classification and gated by the
///     popped angle;
///  3. split of the propagated longest side at its midpoint — gated by
///     validity alone (fold-over, a strictly positive post-op star, fidelity,
///     the vertex cap) — with the new vertex immediately relocated under its
///     local gate.
/// Commits push the touched facets back into the queue.
GreedyOutcome greedy_improve_angle(PipelineContext& ctx, const AngleQueue::Entry& entry,
                                   AngleQueue& queue);

/// Breadth-first smoothing sweep: every vertex enters a FIFO once; a popped
/// vertex is relocated to its fidelity minimizer when that raises its patch
/// minimum angle by at least delta_theta_deg and passes the gate; an
/// acceptance re-enqueues the one-ring. A vertex accepted
/// max_vertex_acceptances times freezes.
void final_vertex_relocation(PipelineContext& ctx);

enum class TerminationReason {
    AngleGoalReached,  // no interior angle below theta remains
    VertexBudget,      // the vertex cap blocked further refinement
    Stalled,           // some corners exhausted the stall budget
};

struct PhaseTimings {
    double simplify_seconds = 0.0;
    double improve_seconds = 0.0;
    double relocate_seconds = 0.0;
    double total_seconds = 0.0;
};

struct RemeshResult {
    HalfedgeMesh mesh;
    TerminationReason termination = TerminationReason::AngleGoalReached;
    RemeshStats stats;
    PhaseTimings timings;
    double delta_abs = 0.0;            // resolved absolute error budget
    double maintained_hausdorff = 0.0; // tracked approximation at exit, <= delta_abs
    double min_angle_deg = 0.0;        // over the output mesh; 0 if degenerate
};

/// The full pass: simplify (unless disabled), improve angles until the queue
/// empties, the vertex cap bites, or a generous global operation ceiling
/// ends a run that keeps committing without converging, then smooth. The
/// sampled two-sided distance to the input stays within delta at every
/// commit, so the bound holds on the result no matter how the run
/// terminates.
RemeshResult remesh(const HalfedgeMesh& input, const RemeshConfig& cfg);

}  // namespace minangle
