#include "minangle/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "minangle/geometry.hpp"
#include "minangle/relocate.hpp"

namespace minangle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::array<double, 3> facet_angles_or_zero(const HalfedgeMesh& mesh, FacetHandle f) {
    const std::array<Vec3, 3> p = mesh.facet_points(f);
    try {
        return triangle_angles(p[0], p[1], p[2]);
    } catch (const GeometryError&) {
        return {0.0, 0.0, 0.0};  // degenerate: worst possible corners
    }
}

}  // namespace

void validate(const RemeshConfig& cfg) {
    const auto fail = [](const char* what) { throw std::invalid_argument(what); };
    if (!(cfg.delta_fraction > 0.0) || !std::isfinite(cfg.delta_fraction))
        fail("delta must be a positive fraction of the bounding-box diagonal");
    if (!(cfg.theta_deg >= 0.0) || !(cfg.theta_deg < 60.0))
        fail("theta must lie in [0, 60): the smallest angle of a triangle never exceeds 60 degrees");
    if (cfg.max_vertices < 0) fail("max-vertices must be non-negative (0 means unlimited)");
    if (!(cfg.samples_per_facet > 0.0)) fail("samples-per-facet must be positive");
    if (!(cfg.omega >= 0.0)) fail("omega must be non-negative");
    if (!(cfg.zeta >= 0.0)) fail("zeta must be non-negative");
    if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0)) fail("lambda must lie in (0, 1]");
    if (!(cfg.delta_theta_deg >= 0.0)) fail("delta-theta must be non-negative");
    if (cfg.opt_iterations < 1) fail("opt-iterations must be at least 1");
    if (cfg.max_stall_operations < 1) fail("max-stall must be at least 1");
    if (cfg.max_vertex_acceptances < 1) fail("the per-vertex relocation budget must be at least 1");
}

void AngleQueue::push_facet(const HalfedgeMesh& mesh, FacetHandle f) {
    if (mesh.is_deleted(f)) return;
    if (static_cast<int>(stamps_.size()) <= f.i) stamps_.resize(f.i + 1, 0);
    const int stamp = ++stamps_[f.i];
    const std::array<VertexHandle, 3> vs = mesh.facet_vertices(f);
    const std::array<double, 3> angles = facet_angles_or_zero(mesh, f);
    for (int k = 0; k < 3; ++k)
        if (angles[k] < theta_) heap_.push({angles[k], f.i, vs[k].i, stamp});
}

bool AngleQueue::pop(const HalfedgeMesh& mesh, Entry& out) {
    while (!heap_.empty()) {
        const Entry e = heap_.top();
        heap_.pop();
        if (mesh.is_deleted(FacetHandle{e.facet})) continue;
        if (stamps_[e.facet] != e.stamp) continue;
        out = e;
        return true;
    }
    return false;
}

double patch_min_angle(const HalfedgeMesh& mesh, const std::vector<int>& facet_ids) {
    double min_angle = kInf;
    for (const int fid : facet_ids) {
        const FacetHandle f{fid};
        if (mesh.is_deleted(f)) continue;
        const std::array<Vec3, 3> p = mesh.facet_points(f);
        try {
            min_angle = std::min(min_angle, triangle_min_angle(p[0], p[1], p[2]));
        } catch (const GeometryError&) {
            min_angle = 0.0;
        }
    }
    return min_angle;
}

double vertex_patch_min_angle(const HalfedgeMesh& mesh, VertexHandle v) {
    std::vector<int> ids;
    for (const FacetHandle f : mesh.vertex_facets(v)) ids.push_back(f.i);
    return patch_min_angle(mesh, ids);
}

ImprovementCheck mesh_improvement_test(const FidelityState& state, const HalfedgeMesh& mesh,
                                       const StarPreview& star, double theta_ref,
                                       double eps_area) {
    ImprovementCheck out;
    if (creates_foldover_preview(mesh, star, eps_area)) {
        out.rejection = Rejection::Foldover;
        return out;
    }
    if (!(star_min_angle(star, star.op.target) > theta_ref)) {
        out.rejection = Rejection::Angle;
        return out;
    }
    out.sim = simulate_operation_fidelity(state, mesh, star);
    if (!out.sim.ok) {
        out.rejection = Rejection::Fidelity;
        return out;
    }
    out.ok = true;
    return out;
}

ImprovementCheck mesh_improvement_test(const FidelityState& state, const HalfedgeMesh& mesh,
                                       const StarOp& op, double theta_ref, double eps_area) {
    if (op.kind == StarOp::Kind::Collapse) {
        if (!mesh.link_condition(op.halfedge)) {
            ImprovementCheck out;
            out.rejection = Rejection::LinkCondition;
            return out;
        }
        if (!mesh.collapse_preserves_boundary(op.halfedge)) {
            ImprovementCheck out;
            out.rejection = Rejection::Boundary;
            return out;
        }
    }
    StarPreview star = preview_star(mesh, op);
    ImprovementCheck out = mesh_improvement_test(state, mesh, star, theta_ref, eps_area);
    out.star = std::move(star);
    return out;
}

ImprovementCheck mesh_improvement_test(const FidelityState& state, const HalfedgeMesh& mesh,
                                       const StarOp& op, double theta_ref) {
    const double diag = mesh.bbox_diagonal();
    return mesh_improvement_test(state, mesh, op, theta_ref, 1e-12 * diag * diag);
}

PipelineContext make_pipeline_context(FidelityState& state, HalfedgeMesh& mesh,
                                      FeatureField& field, const RemeshConfig& cfg) {
    const double diag = mesh.bbox_diagonal();
    const int cap =
        cfg.max_vertices > 0 ? cfg.max_vertices : std::numeric_limits<int>::max();
    return {state, mesh, field, cfg, 1e-12 * diag * diag, 1e-12 * diag, cap, {}};
}

namespace {

/// Applies a checked operation: commit, refresh the feature field over the
/// moved vertex and its ring, and re-queue/record the post-op star facets.
VertexHandle commit_star(PipelineContext& ctx, const StarPreview& star,
                         const FidelitySimulation& sim, std::vector<int>* touched,
                         AngleQueue* queue) {
    const VertexHandle v = commit_operation(ctx.state, ctx.mesh, star, sim);
    std::vector<VertexHandle> dirty{v};
    for (const StarTriangle& t : star.triangles) {
        dirty.push_back(t.r1);
        dirty.push_back(t.r2);
    }
    std::sort(dirty.begin(), dirty.end(),
              [](VertexHandle a, VertexHandle b) { return a.i < b.i; });
    dirty.erase(std::unique(dirty.begin(), dirty.end(),
                            [](VertexHandle a, VertexHandle b) { return a.i == b.i; }),
                dirty.end());
    update_feature_field(ctx.mesh, ctx.field, dirty);
    for (const StarTriangle& t : star.triangles) {
        if (queue) queue->push_facet(ctx.mesh, FacetHandle{t.facet_id});
        if (touched) touched->push_back(t.facet_id);
    }
    return v;
}

/// Post-operation touch-up: move v to its fidelity minimizer if doing so
/// raises (strictly) the patch's own minimum angle and passes the gate.
bool refine_relocate(PipelineContext& ctx, VertexHandle v, std::vector<int>* touched,
                     AngleQueue* queue) {
    const double pre_min = vertex_patch_min_angle(ctx.mesh, v);
    const Vec3 p = minimize_vertex(ctx.state, ctx.mesh, ctx.field, v, ctx.cfg.opt_iterations,
                                   ctx.cfg.lambda);
    if (distance(p, ctx.mesh.position(v)) <= ctx.min_move) return false;
    const ImprovementCheck chk = mesh_improvement_test(
        ctx.state, ctx.mesh, StarOp::relocate(v, p), pre_min, ctx.eps_area);
    if (!chk.ok) return false;
    commit_star(ctx, chk.star, chk.sim, touched, queue);
    ++ctx.stats.refinement_relocations;
    return true;
}

}  // namespace

CollapseRelocateResult collapse_and_relocate(PipelineContext& ctx, HalfedgeHandle h,
                                             double theta_ref, AngleQueue* queue) {
    CollapseRelocateResult res;
    const VertexHandle vi = ctx.mesh.from_vertex(h);
    const VertexHandle vj = ctx.mesh.to_vertex(h);
    const Vec3 p0 = init_collapse_position(ctx.mesh, ctx.field, vi, vj, ctx.cfg.omega);
    const ImprovementCheck chk = mesh_improvement_test(
        ctx.state, ctx.mesh, StarOp::collapse(h, p0), theta_ref, ctx.eps_area);
    if (!chk.ok) return res;
    res.vertex = commit_star(ctx, chk.star, chk.sim, &res.touched_facets, queue);
    res.committed = true;
    for (const StarTriangle& t : chk.star.triangles) {
        res.touched_edges.push_back(t.spoke1_edge_id);
        res.touched_edges.push_back(t.spoke2_edge_id);
        res.touched_edges.push_back(t.ring_edge_id);
    }
    std::sort(res.touched_edges.begin(), res.touched_edges.end());
    res.touched_edges.erase(std::unique(res.touched_edges.begin(), res.touched_edges.end()),
                            res.touched_edges.end());
    // The touch-up relocation keeps every element id, so the edge list above
    // stays valid no matter whether it commits.
    refine_relocate(ctx, res.vertex, &res.touched_facets, queue);
    return res;
}

namespace {

/// Interior angle opposite `side` within facet(side); 0 when degenerate.
double opposite_angle_or_zero(const HalfedgeMesh& mesh, HalfedgeHandle side) {
    const FacetHandle f = mesh.facet(side);
    const VertexHandle apex = mesh.to_vertex(mesh.next(side));
    const std::array<VertexHandle, 3> vs = mesh.facet_vertices(f);
    const std::array<double, 3> angles = facet_angles_or_zero(mesh, f);
    for (int k = 0; k < 3; ++k)
        if (vs[k].i == apex.i) return angles[k];
    return 0.0;
}

/// Decimation priority: edge length times the mean opposite angle. Short
/// edges under sharp apexes collapse first; a boundary halfedge averages
/// over its single facet.
double collapse_priority(const HalfedgeMesh& mesh, HalfedgeHandle h) {
    double sum = 0.0;
    int sides = 0;
    for (const HalfedgeHandle side : {h, mesh.opposite(h)}) {
        if (mesh.is_boundary(side)) continue;
        sum += opposite_angle_or_zero(mesh, side);
        ++sides;
    }
    if (sides == 0) return 0.0;
    return mesh.edge_length(mesh.edge(h)) * (sum / sides);
}

struct EdgeEntry {
    double priority = 0.0;
    int halfedge = -1;
    int stamp = 0;
};

struct EdgeLater {
    bool operator()(const EdgeEntry& a, const EdgeEntry& b) const {
        if (a.priority != b.priority) return a.priority > b.priority;
        return a.halfedge > b.halfedge;
    }
};

}  // namespace

void initial_simplification(PipelineContext& ctx) {
    std::priority_queue<EdgeEntry, std::vector<EdgeEntry>, EdgeLater> heap;
    std::vector<int> stamps(ctx.mesh.edge_capacity(), 0);

    const auto push_edge = [&](EdgeHandle e) {
        if (ctx.mesh.is_deleted(e)) return;
        if (static_cast<int>(stamps.size()) <= e.i) stamps.resize(e.i + 1, 0);
        const int stamp = ++stamps[e.i];
        for (int side = 0; side < 2; ++side) {
            const HalfedgeHandle h = ctx.mesh.halfedge(e, side);
            heap.push({collapse_priority(ctx.mesh, h), h.i, stamp});
        }
    };

    ctx.mesh.for_each_edge(push_edge);

    while (!heap.empty()) {
        const EdgeEntry top = heap.top();
        heap.pop();
        const HalfedgeHandle h{top.halfedge};
        const EdgeHandle e = ctx.mesh.edge(h);
        if (ctx.mesh.is_deleted(e) || stamps[e.i] != top.stamp) continue;
        // Decimation is bounded by the error budget alone (-inf keeps only
        // the degeneracy rejection): an angle bar would deadlock on uniform
        // lattices where no coarser patch can match the incumbent angles.
        // Quality recovery is the later phases' job.
        const CollapseRelocateResult res = collapse_and_relocate(ctx, h, -kInf, nullptr);
        if (!res.committed) continue;  // dropped; only commits refill the queue
        ++ctx.stats.simplification_collapses;
        for (const int eid : res.touched_edges) push_edge(EdgeHandle{eid});
    }
}

HalfedgeHandle longest_side_propagation(const HalfedgeMesh& mesh, HalfedgeHandle h) {
    std::set<int> visited;
    EdgeHandle current = mesh.edge(h);
    while (true) {
        visited.insert(current.i);
        if (mesh.is_boundary(current)) break;
        EdgeHandle best = current;
        double best_len = mesh.edge_length(current);
        for (int side = 0; side < 2; ++side) {
            const HalfedgeHandle hs = mesh.halfedge(current, side);
            if (mesh.is_boundary(hs)) continue;
            for (HalfedgeHandle cand = mesh.next(hs); cand.i != hs.i; cand = mesh.next(cand)) {
                const EdgeHandle e = mesh.edge(cand);
                if (visited.count(e.i)) continue;
                const double l = mesh.edge_length(e);
                if (l > best_len || (best.i != current.i && l == best_len && e.i < best.i)) {
                    best = e;
                    best_len = l;
                }
            }
        }
        if (best.i == current.i) break;  // local maximum
        current = best;
    }
    return mesh.halfedge(current, 0);
}

namespace {

/// The halfedge of f spanning the two corners other than `corner_vertex`.
HalfedgeHandle opposite_halfedge(const HalfedgeMesh& mesh, FacetHandle f, int corner_vertex) {
    HalfedgeHandle h = mesh.halfedge(f);
    for (int k = 0; k < 3; ++k) {
        if (mesh.from_vertex(h).i != corner_vertex && mesh.to_vertex(h).i != corner_vertex)
            return h;
        h = mesh.next(h);
    }
    return HalfedgeHandle{};
}

bool try_primary_relocate(PipelineContext& ctx, VertexHandle v, double theta_min,
                          AngleQueue& queue, std::vector<int>* touched) {
    const Vec3 seed = init_relocation_position(ctx.mesh, ctx.field, v, ctx.cfg.zeta);
    const Vec3 p = minimize_vertex(ctx.state, ctx.mesh, ctx.field, v, ctx.cfg.opt_iterations,
                                   ctx.cfg.lambda, WeightScheme::FeatureSensitive, seed);
    // Moves at noise scale are arithmetic dust, not improvements: committing
    // them would let a stuck corner burn its stall budget on no-ops.
    if (distance(p, ctx.mesh.position(v)) <= ctx.min_move) return false;
    const ImprovementCheck chk = mesh_improvement_test(
        ctx.state, ctx.mesh, StarOp::relocate(v, p), theta_min, ctx.eps_area);
    if (!chk.ok) return false;
    commit_star(ctx, chk.star, chk.sim, touched, &queue);
    ++ctx.stats.greedy_relocations;
    return true;
}

bool try_split_and_relocate(PipelineContext& ctx, HalfedgeHandle h, AngleQueue& queue,
                            std::vector<int>* touched) {
    if (ctx.mesh.n_vertices() + 1 > ctx.vertex_cap) return false;
    const HalfedgeHandle target = longest_side_propagation(ctx.mesh, h);
    // Validity-only gate, floored at zero: children of an exactly degenerate
    // configuration can never be rescued by the follow-up relocation, and
    // accepting them would let a stuck sliver subdivide itself forever.
    const ImprovementCheck chk =
        mesh_improvement_test(ctx.state, ctx.mesh,
                              StarOp::split(target, init_split_position(ctx.mesh, target)),
                              0.0, ctx.eps_area);
    if (!chk.ok) return false;
    const VertexHandle v = commit_star(ctx, chk.star, chk.sim, touched, &queue);
    ++ctx.stats.greedy_splits;
    refine_relocate(ctx, v, touched, &queue);
    return true;
}

}  // namespace

GreedyOutcome greedy_improve_angle(PipelineContext& ctx, const AngleQueue::Entry& entry,
                                   AngleQueue& queue) {
    GreedyOutcome out;
    const FacetHandle f{entry.facet};
    if (ctx.mesh.is_deleted(f)) return out;
    const HalfedgeHandle h = opposite_halfedge(ctx.mesh, f, entry.corner);
    if (!h.valid()) return out;

    const CollapseRelocateResult collapsed =
        collapse_and_relocate(ctx, h, entry.angle, &queue);
    if (collapsed.committed) {
        ++ctx.stats.greedy_collapses;
        out.committed = true;
        out.touched_facets = collapsed.touched_facets;
        return out;
    }

    // from/to stay readable: a failed collapse leaves the mesh untouched.
    for (const VertexHandle v :
         {VertexHandle{entry.corner}, ctx.mesh.from_vertex(h), ctx.mesh.to_vertex(h)}) {
        if (try_primary_relocate(ctx, v, entry.angle, queue, &out.touched_facets)) {
            out.committed = true;
            return out;
        }
    }

    out.committed = try_split_and_relocate(ctx, h, queue, &out.touched_facets);
    return out;
}

void final_vertex_relocation(PipelineContext& ctx) {
    const double min_gain = deg_to_rad(ctx.cfg.delta_theta_deg);
    std::deque<int> fifo;
    std::vector<char> queued(ctx.mesh.vertex_capacity(), 0);
    std::vector<char> frozen(ctx.mesh.vertex_capacity(), 0);
    std::vector<int> accepted(ctx.mesh.vertex_capacity(), 0);
    ctx.mesh.for_each_vertex([&](VertexHandle v) {
        fifo.push_back(v.i);
        queued[v.i] = 1;
    });

    while (!fifo.empty()) {
        const int vid = fifo.front();
        fifo.pop_front();
        queued[vid] = 0;
        const VertexHandle v{vid};
        if (ctx.mesh.is_deleted(v)) continue;
        if (accepted[vid] >= ctx.cfg.max_vertex_acceptances) {
            if (!frozen[vid]) {
                frozen[vid] = 1;
                ++ctx.stats.frozen_vertices;
            }
            continue;
        }
        const double pre_min = vertex_patch_min_angle(ctx.mesh, v);
        const Vec3 seed = init_relocation_position(ctx.mesh, ctx.field, v, ctx.cfg.zeta);
        const Vec3 p = minimize_vertex(ctx.state, ctx.mesh, ctx.field, v, ctx.cfg.opt_iterations,
                                       ctx.cfg.lambda, WeightScheme::FeatureSensitive, seed);
        if (distance(p, ctx.mesh.position(v)) <= ctx.min_move) continue;
        const StarPreview star = preview_star(ctx.mesh, StarOp::relocate(v, p));
        if (star_min_angle(star, p) - pre_min < min_gain) continue;  // cheap check first
        const ImprovementCheck chk =
            mesh_improvement_test(ctx.state, ctx.mesh, star, pre_min, ctx.eps_area);
        if (!chk.ok) continue;
        commit_star(ctx, star, chk.sim, nullptr, nullptr);
        ++accepted[vid];
        ++ctx.stats.final_relocations;
        for (const VertexHandle u : ctx.mesh.vertex_ring(v)) {
            if (!queued[u.i]) {
                fifo.push_back(u.i);
                queued[u.i] = 1;
            }
        }
    }
}

namespace {

double mesh_min_angle(const HalfedgeMesh& mesh) {
    double min_angle = kInf;
    mesh.for_each_facet([&](FacetHandle f) {
        const std::array<Vec3, 3> p = mesh.facet_points(f);
        try {
            min_angle = std::min(min_angle, triangle_min_angle(p[0], p[1], p[2]));
        } catch (const GeometryError&) {
            min_angle = 0.0;
        }
    });
    return min_angle;
}

}  // namespace

RemeshResult remesh(const HalfedgeMesh& input, const RemeshConfig& cfg) {
    validate(cfg);
    using clock = std::chrono::steady_clock;
    const auto elapsed = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    };
    const auto t0 = clock::now();

    RemeshResult out;
    out.mesh = input;
    out.delta_abs = cfg.delta_fraction * input.bbox_diagonal();

    FidelityState state =
        init_fidelity(input, out.mesh, cfg.samples_per_facet, cfg.seed, out.delta_abs);
    FeatureField field = compute_feature_field(out.mesh);
    PipelineContext ctx = make_pipeline_context(state, out.mesh, field, cfg);

    const auto t1 = clock::now();
    if (cfg.initial_simplification_enabled) initial_simplification(ctx);
    out.mesh.check_integrity();
    const auto t2 = clock::now();
    out.timings.simplify_seconds = elapsed(t1, t2);

    AngleQueue queue(deg_to_rad(cfg.theta_deg));
    out.mesh.for_each_facet([&](FacetHandle f) { queue.push_facet(out.mesh, f); });

    // Stall bookkeeping, keyed by (facet id, corner vertex id): a corner that
    // fails max_stall_operations times in an unchanged facet freezes; any
    // commit touching the facet resets its corners' budgets.
    std::map<std::pair<int, int>, int> fail_counts;
    std::set<std::pair<int, int>> frozen;
    // A run that keeps committing without converging (splitting ever deeper
    // into a region no operation can fix) is cut off by a generous global
    // ceiling and reported as stalled by the classification below.
    long long commit_ceiling = 1000 + 100LL * input.n_facets();
    bool budget_blocked = false;
    AngleQueue::Entry entry;
    while (commit_ceiling > 0) {
        if (out.mesh.n_vertices() >= ctx.vertex_cap) {
            budget_blocked = queue.pop(out.mesh, entry);  // live work left behind?
            break;
        }
        if (!queue.pop(out.mesh, entry)) break;
        const std::pair<int, int> key{entry.facet, entry.corner};
        if (frozen.count(key)) continue;
        const GreedyOutcome outcome = greedy_improve_angle(ctx, entry, queue);
        if (outcome.committed) {
            --commit_ceiling;
            bool popped_touched = false;
            for (const int fid : outcome.touched_facets) {
                popped_touched = popped_touched || fid == entry.facet;
                const auto lo = std::make_pair(fid, std::numeric_limits<int>::min());
                const auto hi = std::make_pair(fid, std::numeric_limits<int>::max());
                fail_counts.erase(fail_counts.lower_bound(lo), fail_counts.upper_bound(hi));
                frozen.erase(frozen.lower_bound(lo), frozen.upper_bound(hi));
            }
            // A commit that landed elsewhere (a propagated split) leaves the
            // popped corner as it was: give its claim back to the queue.
            if (!popped_touched && !out.mesh.is_deleted(FacetHandle{entry.facet}))
                queue.push_again(entry);
        } else if (++fail_counts[key] >= cfg.max_stall_operations) {
            frozen.insert(key);
            ++ctx.stats.frozen_corners;
        } else {
            queue.push_again(entry);
        }
    }
    out.mesh.check_integrity();
    const auto t3 = clock::now();
    out.timings.improve_seconds = elapsed(t2, t3);

    final_vertex_relocation(ctx);
    out.mesh.check_integrity();
    const auto t4 = clock::now();
    out.timings.relocate_seconds = elapsed(t3, t4);
    out.timings.total_seconds = elapsed(t0, t4);

    out.stats = ctx.stats;
    out.maintained_hausdorff = approx_hausdorff(state);
    const double min_angle = mesh_min_angle(out.mesh);
    out.min_angle_deg = std::isfinite(min_angle) ? rad_to_deg(min_angle) : 0.0;
    if (min_angle >= deg_to_rad(cfg.theta_deg))
        out.termination = TerminationReason::AngleGoalReached;
    else if (budget_blocked)
        out.termination = TerminationReason::VertexBudget;
    else
        out.termination = TerminationReason::Stalled;
    return out;
}

}  // namespace minangle
