#include "minangle/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "minangle/features.hpp"
#include "minangle/geometry.hpp"

namespace minangle {

namespace {

std::vector<TreeTriangle> mesh_triangles(const HalfedgeMesh& mesh) {
    std::vector<TreeTriangle> tris;
    tris.reserve(static_cast<std::size_t>(mesh.n_facets()));
    mesh.for_each_facet([&](FacetHandle f) {
        auto pts = mesh.facet_points(f);
        tris.push_back({pts[0], pts[1], pts[2], f.i});
    });
    return tris;
}

// Measures `s` against the input tree and fills its link + feature fields.
void link_into_input(const FidelityState& state, SamplePoint& s) {
    TreeHit hit = state.input_tree.closest(s.position);
    s.link_facet = hit.id;
    s.link_point = hit.point;
    s.link_dist = std::sqrt(hit.dist2);
    s.feature = state.feature_at(hit.id, hit.point);
}

void insert_sorted(std::vector<int>& list, int value) {
    list.insert(std::lower_bound(list.begin(), list.end(), value), value);
}

// Facets around v that the operation leaves untouched.
template <typename Fn>
void for_outside_facets(const HalfedgeMesh& mesh, VertexHandle v,
                        const std::set<int>& changed, Fn&& fn) {
    for (FacetHandle f : mesh.vertex_facets(v))
        if (!changed.count(f.i)) fn(f);
}

}  // namespace

double FidelityState::feature_at(int input_facet, const Vec3& p) const {
    const auto& pts = input_points[static_cast<std::size_t>(input_facet)];
    const auto& val = input_feature[static_cast<std::size_t>(input_facet)];
    Vec3 b = barycentric_coordinates(p, pts[0], pts[1], pts[2]);
    return b.x * val[0] + b.y * val[1] + b.z * val[2];
}

FidelityState init_fidelity(const HalfedgeMesh& input, const HalfedgeMesh& working,
                            double n_f, std::uint64_t seed, double delta_abs) {
    if (n_f <= 0.0) throw std::invalid_argument("sampling density must be positive");
    if (delta_abs <= 0.0) throw std::invalid_argument("error budget must be positive");

    FidelityState state;
    state.n_f = n_f;
    state.seed = seed;
    state.delta_abs = delta_abs;

    // Snapshot the input surface: tree + per-facet corners and intensities.
    FeatureField field = compute_feature_field(input);
    state.input_points.resize(static_cast<std::size_t>(input.facet_capacity()));
    state.input_feature.resize(static_cast<std::size_t>(input.facet_capacity()));
    std::vector<TreeTriangle> tris;
    input.for_each_facet([&](FacetHandle f) {
        auto pts = input.facet_points(f);
        auto vs = input.facet_vertices(f);
        state.input_points[f.i] = pts;
        state.input_feature[f.i] = {field.intensity[vs[0].i], field.intensity[vs[1].i],
                                    field.intensity[vs[2].i]};
        tris.push_back({pts[0], pts[1], pts[2], f.i});
    });
    state.input_tree.build(std::move(tris));

    // Input samples, linked exactly against the full working mesh.
    state.input_samples = stratified_sample(input, n_f, seed);
    if (state.input_samples.samples.empty())
        throw std::invalid_argument("input mesh produced no samples");
    AabbTree working_tree(mesh_triangles(working));
    for (std::size_t i = 0; i < state.input_samples.samples.size(); ++i) {
        SamplePoint& s = state.input_samples.samples[i];
        // Intensity at the sample itself, interpolated on its host element.
        switch (s.kind) {
            case SampleKind::Facet: {
                auto vs = input.facet_vertices(FacetHandle{s.host});
                s.feature = s.bary.x * field.intensity[vs[0].i] +
                            s.bary.y * field.intensity[vs[1].i] +
                            s.bary.z * field.intensity[vs[2].i];
                break;
            }
            case SampleKind::Edge: {
                HalfedgeHandle h = input.halfedge(EdgeHandle{s.host}, 0);
                s.feature = s.bary.x * field.intensity[input.from_vertex(h).i] +
                            s.bary.y * field.intensity[input.to_vertex(h).i];
                break;
            }
            case SampleKind::Vertex:
                s.feature = field.intensity[s.host];
                break;
        }
        TreeHit hit = working_tree.closest(s.position);
        s.link_facet = hit.id;
        s.link_point = hit.point;
        s.link_dist = std::sqrt(hit.dist2);
        state.links_into[hit.id].push_back(static_cast<int>(i));  // i ascending: sorted
    }

    // Working-mesh samples, keyed by host, measured against the input tree.
    SampleSet working_samples = stratified_sample(working, n_f, seed);
    for (SamplePoint s : working_samples.samples) {
        link_into_input(state, s);
        switch (s.kind) {
            case SampleKind::Facet:
                state.facet_samples[s.host].push_back(s);
                break;
            case SampleKind::Edge:
                state.edge_samples[s.host].push_back(s);
                break;
            case SampleKind::Vertex:
                state.vertex_samples[s.host] = s;
                break;
        }
    }
    return state;
}

double approx_hausdorff(const FidelityState& state) {
    double worst = 0.0;
    for (const SamplePoint& s : state.input_samples.samples)
        worst = std::max(worst, s.link_dist);
    for (const auto& [id, group] : state.facet_samples)
        for (const SamplePoint& s : group) worst = std::max(worst, s.link_dist);
    for (const auto& [id, group] : state.edge_samples)
        for (const SamplePoint& s : group) worst = std::max(worst, s.link_dist);
    for (const auto& [id, s] : state.vertex_samples) worst = std::max(worst, s.link_dist);
    return worst;
}

FidelitySimulation simulate_operation_fidelity(const FidelityState& state,
                                               const HalfedgeMesh& mesh,
                                               const StarPreview& star) {
    FidelitySimulation sim;
    const Vec3 center = star.op.target;

    std::set<int> changed(star.replaced_facet_ids.begin(), star.replaced_facet_ids.end());
    changed.insert(star.dying_facet_ids.begin(), star.dying_facet_ids.end());

    double worst_dist = -1.0;
    auto note = [&](const SamplePoint& s, bool in_direction) {
        if (s.link_dist > worst_dist) {
            worst_dist = s.link_dist;
            sim.violation = {in_direction, s.position, s.link_dist};
        }
    };

    // --- out direction: resample the post-op inner patch -------------------
    const std::size_t n_tris = star.triangles.size();
    std::vector<double> star_area(n_tris);
    for (std::size_t t = 0; t < n_tris; ++t)
        star_area[t] = triangle_area(center, star.triangles[t].p1, star.triangles[t].p2);

    // Facet samples; every star triangle shares the center vertex, so all
    // other star triangles count as neighbors for the density rule.
    std::vector<std::vector<SamplePoint>> facet_points(n_tris);
    for (std::size_t t = 0; t < n_tris; ++t) {
        const StarTriangle& tri = star.triangles[t];
        std::vector<double> neighbor_areas;
        for (std::size_t u = 0; u < n_tris; ++u)
            if (u != t) neighbor_areas.push_back(star_area[u]);
        std::set<int> outside;
        for (VertexHandle r : {tri.r1, tri.r2})
            for_outside_facets(mesh, r, changed,
                               [&](FacetHandle f) { outside.insert(f.i); });
        for (int f : outside) neighbor_areas.push_back(mesh.facet_area(FacetHandle{f}));

        int n = facet_sample_count(state.n_f, star_area[t], neighbor_areas);
        facet_points[t] =
            sample_facet(center, tri.p1, tri.p2, tri.facet_id, n, state.seed);
        for (SamplePoint& s : facet_points[t]) {
            link_into_input(state, s);
            note(s, false);
            sim.patch_samples.push_back(s);
        }
    }

    // Edge samples for every post-op patch edge. Ring edges borrow the cell
    // layout of the unchanged facet on their far side from current state.
    struct EdgeRecord {
        Vec3 p, q;
        std::vector<EdgeSideSample> side[2];
        int n_sides = 0;
    };
    std::map<int, EdgeRecord> edges;
    auto add_side = [&](int edge_id, const Vec3& p, const Vec3& q,
                        const std::vector<EdgeSideSample>& side) {
        auto [it, fresh] = edges.try_emplace(edge_id);
        if (fresh) {
            it->second.p = p;
            it->second.q = q;
        }
        it->second.side[it->second.n_sides++ & 1] = side;
    };
    auto cells_of = [](const std::vector<SamplePoint>& group) {
        std::vector<EdgeSideSample> side;
        side.reserve(group.size());
        for (const SamplePoint& s : group) side.push_back({s.position, s.voronoi_area});
        return side;
    };
    for (std::size_t t = 0; t < n_tris; ++t) {
        const StarTriangle& tri = star.triangles[t];
        std::vector<EdgeSideSample> own = cells_of(facet_points[t]);
        add_side(tri.spoke1_edge_id, center, tri.p1, own);
        add_side(tri.spoke2_edge_id, center, tri.p2, own);
        add_side(tri.ring_edge_id, tri.p1, tri.p2, own);
        // Far side of the ring edge: the facet across it survives unchanged.
        HalfedgeHandle h = mesh.find_halfedge(tri.r1, tri.r2);
        for (HalfedgeHandle side : {h, mesh.opposite(h)}) {
            FacetHandle f = mesh.facet(side);
            if (!f.valid() || changed.count(f.i)) continue;
            auto it = state.facet_samples.find(f.i);
            if (it != state.facet_samples.end())
                add_side(tri.ring_edge_id, tri.p1, tri.p2, cells_of(it->second));
        }
    }
    for (auto& [edge_id, rec] : edges) {
        for (SamplePoint s :
             sample_edge(rec.p, rec.q, edge_id, rec.side[0], rec.side[1])) {
            link_into_input(state, s);
            note(s, false);
            sim.patch_samples.push_back(s);
        }
    }

    // Vertex samples: the center plus every ring vertex (their lumped areas
    // change even though ring positions do not).
    {
        SamplePoint s;
        s.kind = SampleKind::Vertex;
        s.host = star.center_vertex_id;
        s.position = center;
        double area = 0.0;
        for (double a : star_area) area += a;
        s.voronoi_area = area / 3.0;
        link_into_input(state, s);
        note(s, false);
        sim.patch_samples.push_back(s);
    }
    std::set<int> ring;
    for (const StarTriangle& tri : star.triangles) {
        ring.insert(tri.r1.i);
        ring.insert(tri.r2.i);
    }
    for (int r : ring) {
        SamplePoint s;
        s.kind = SampleKind::Vertex;
        s.host = r;
        s.position = mesh.position(VertexHandle{r});
        double area = 0.0;
        for_outside_facets(mesh, VertexHandle{r}, changed,
                           [&](FacetHandle f) { area += mesh.facet_area(f); });
        for (std::size_t t = 0; t < n_tris; ++t)
            if (star.triangles[t].r1.i == r || star.triangles[t].r2.i == r)
                area += star_area[t];
        s.voronoi_area = area / 3.0;
        link_into_input(state, s);
        note(s, false);
        sim.patch_samples.push_back(s);
    }

    // --- in direction: re-link input samples against the post-op patch -----
    std::vector<TreeTriangle> patch_tris;
    for (const StarTriangle& tri : star.triangles)
        patch_tris.push_back({center, tri.p1, tri.p2, tri.facet_id});
    for (int f : star.extended_patch_facet_ids) {
        if (changed.count(f)) continue;
        auto pts = mesh.facet_points(FacetHandle{f});
        patch_tris.push_back({pts[0], pts[1], pts[2], f});
    }
    AabbTree patch_tree(std::move(patch_tris));

    std::vector<int> affected;
    for (int f : star.extended_patch_facet_ids) {
        auto it = state.links_into.find(f);
        if (it != state.links_into.end())
            affected.insert(affected.end(), it->second.begin(), it->second.end());
    }
    std::sort(affected.begin(), affected.end());
    for (int idx : affected) {
        const SamplePoint& s = state.input_samples.samples[static_cast<std::size_t>(idx)];
        TreeHit hit = patch_tree.closest(s.position);
        LinkUpdate update{idx, hit.id, hit.point, std::sqrt(hit.dist2)};
        if (update.distance > worst_dist) {
            worst_dist = update.distance;
            sim.violation = {true, s.position, update.distance};
        }
        sim.relinks.push_back(update);
    }

    sim.ok = worst_dist <= state.delta_abs;
    return sim;
}

VertexHandle commit_operation(FidelityState& state, HalfedgeMesh& mesh,
                              const StarPreview& star, const FidelitySimulation& sim) {
    VertexHandle moved = apply_star_op(mesh, star);

    // Drop every sample hosted on an element the operation rewrote: facets
    // that died or changed shape, the patch's edges (ids may be reused), and
    // the collapsed vertex.
    for (int f : star.replaced_facet_ids) state.facet_samples.erase(f);
    for (int f : star.dying_facet_ids) state.facet_samples.erase(f);
    for (int e : star.dying_edge_ids) state.edge_samples.erase(e);
    for (const StarTriangle& tri : star.triangles) {
        state.edge_samples.erase(tri.spoke1_edge_id);
        state.edge_samples.erase(tri.spoke2_edge_id);
        state.edge_samples.erase(tri.ring_edge_id);
    }
    if (star.dying_vertex_id >= 0) state.vertex_samples.erase(star.dying_vertex_id);

    for (const SamplePoint& s : sim.patch_samples) {
        switch (s.kind) {
            case SampleKind::Facet:
                state.facet_samples[s.host].push_back(s);
                break;
            case SampleKind::Edge:
                state.edge_samples[s.host].push_back(s);
                break;
            case SampleKind::Vertex:
                state.vertex_samples[s.host] = s;
                break;
        }
    }

    for (const LinkUpdate& u : sim.relinks) {
        SamplePoint& s = state.input_samples.samples[static_cast<std::size_t>(u.sample_index)];
        auto it = state.links_into.find(s.link_facet);
        if (it != state.links_into.end()) {
            auto& list = it->second;
            auto pos = std::lower_bound(list.begin(), list.end(), u.sample_index);
            if (pos != list.end() && *pos == u.sample_index) list.erase(pos);
            if (list.empty()) state.links_into.erase(it);
        }
        s.link_facet = u.facet;
        s.link_point = u.point;
        s.link_dist = u.distance;
        insert_sorted(state.links_into[u.facet], u.sample_index);
    }
    return moved;
}

OracleResult oracle_hausdorff(const HalfedgeMesh& a, const HalfedgeMesh& b, int density) {
    int k = 1;
    while ((k + 1) * (k + 2) / 2 < density) ++k;

    AabbTree tree_a(mesh_triangles(a));
    AabbTree tree_b(mesh_triangles(b));

    struct Sweep {
        double worst = 0.0;
        double sum_sq = 0.0;
        std::size_t count = 0;
    };
    auto sweep = [&](const HalfedgeMesh& mesh, const AabbTree& other) {
        Sweep s;
        mesh.for_each_facet([&](FacetHandle f) {
            auto pts = mesh.facet_points(f);
            for (int i = 0; i <= k; ++i)
                for (int j = 0; j <= k - i; ++j) {
                    double u = double(i) / k, v = double(j) / k;
                    Vec3 p = pts[0] * (1.0 - u - v) + pts[1] * u + pts[2] * v;
                    double d = std::sqrt(other.closest(p).dist2);
                    s.worst = std::max(s.worst, d);
                    s.sum_sq += d * d;
                    ++s.count;
                }
        });
        return s;
    };
    const Sweep ab = sweep(a, tree_b);
    const Sweep ba = sweep(b, tree_a);
    OracleResult result;
    result.hausdorff_ab = ab.worst;
    result.hausdorff_ba = ba.worst;
    result.hausdorff = std::max(ab.worst, ba.worst);
    result.rms_ab = std::sqrt(ab.sum_sq / double(ab.count));
    result.rms_ba = std::sqrt(ba.sum_sq / double(ba.count));
    result.rms = std::sqrt((ab.sum_sq + ba.sum_sq) / double(ab.count + ba.count));
    return result;
}

}  // namespace minangle
