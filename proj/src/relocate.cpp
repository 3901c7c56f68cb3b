#include "minangle/relocate.hpp"

#include <algorithm>
#include <cmath>

#include "minangle/geometry.hpp"

namespace minangle {

namespace {

// Added to the feature intensity inside the reweighting factor so perfectly
// flat regions (intensity 0) do not annihilate their weights.
constexpr double kFlatGuard = 1e-3;

// Relative floor for reweighting factors; keeps every weight positive even
// when a sample sits exactly on the other surface.
constexpr double kFactorFloor = 1e-12;

// How a sample position depends on the moving vertex:
// position = alpha * v + fixed.
struct Decomposition {
    double alpha = 0.0;
    Vec3 fixed{0, 0, 0};
    double feature = 0.0;  // field interpolated over the host element
    bool rides = false;    // false: the sample does not involve v at all
};

Decomposition decompose_facet_sample(const HalfedgeMesh& mesh, const FeatureField& field,
                                     VertexHandle v, const SamplePoint& s) {
    const FacetHandle f{s.host};
    const auto vs = mesh.facet_vertices(f);
    const auto ps = mesh.facet_points(f);
    // Recovered from geometry: the stored coordinates are relative to the
    // corner order at sampling time, which surgery may have rotated since.
    const Vec3 b = barycentric_coordinates(s.position, ps[0], ps[1], ps[2]);
    Decomposition d;
    for (int k = 0; k < 3; ++k) {
        d.feature += b[k] * field.intensity[vs[k].i];
        if (vs[k] == v) {
            d.alpha = b[k];
            d.rides = true;
        } else {
            d.fixed += b[k] * ps[k];
        }
    }
    return d;
}

Decomposition decompose_edge_sample(const HalfedgeMesh& mesh, const FeatureField& field,
                                    VertexHandle v, const SamplePoint& s) {
    const HalfedgeHandle h = mesh.halfedge(EdgeHandle{s.host}, 0);
    const VertexHandle a = mesh.from_vertex(h);
    const VertexHandle b = mesh.to_vertex(h);
    const Vec3 pa = mesh.position(a);
    const Vec3 pb = mesh.position(b);
    const Vec3 ab = pb - pa;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(s.position - pa, ab) / len2 : 0.5;
    t = std::clamp(t, 0.0, 1.0);
    Decomposition d;
    d.feature = (1.0 - t) * field.intensity[a.i] + t * field.intensity[b.i];
    if (a == v) {
        d.alpha = 1.0 - t;
        d.fixed = t * pb;
        d.rides = true;
    } else if (b == v) {
        d.alpha = t;
        d.fixed = (1.0 - t) * pa;
        d.rides = true;
    }
    return d;
}

}  // namespace

Vec3 init_collapse_position(const HalfedgeMesh& mesh, const FeatureField& field,
                            VertexHandle vi, VertexHandle vj, double omega) {
    const double fi = field.intensity[vi.i];
    const double fj = field.intensity[vj.i];
    const double fmax = std::max(fi, fj);
    const Vec3 mid = 0.5 * (mesh.position(vi) + mesh.position(vj));
    if (fmax == 0.0 || std::abs(fi - fj) < omega * fmax) return mid;
    return fi > fj ? mesh.position(vi) : mesh.position(vj);
}

Vec3 init_split_position(const HalfedgeMesh& mesh, HalfedgeHandle h) {
    return 0.5 * (mesh.position(mesh.from_vertex(h)) + mesh.position(mesh.to_vertex(h)));
}

Vec3 init_relocation_position(const HalfedgeMesh& mesh, const FeatureField& field,
                              VertexHandle v, double zeta) {
    const VertexClass c = classify_vertex(mesh, field, v, zeta);
    if (c.role == VertexRole::Feature) return mesh.position(v);
    if (c.role == VertexRole::Crease)
        return 0.5 * (mesh.position(c.crease_neighbor[0]) + mesh.position(c.crease_neighbor[1]));

    double area_sum = 0.0;
    Vec3 acc{0, 0, 0};
    for (FacetHandle f : mesh.vertex_facets(v)) {
        const auto ps = mesh.facet_points(f);
        const double a = triangle_area(ps[0], ps[1], ps[2]);
        acc += a * triangle_centroid(ps[0], ps[1], ps[2]);
        area_sum += a;
    }
    if (area_sum <= 0.0) return mesh.position(v);
    return acc / area_sum;
}

std::vector<ClosestPointPair> build_pairs(const FidelityState& state,
                                          const HalfedgeMesh& mesh,
                                          const FeatureField& field, VertexHandle v,
                                          const Vec3& pos) {
    std::vector<ClosestPointPair> pairs;

    auto add_out = [&](const SamplePoint& s, const Decomposition& d) {
        if (!d.rides || d.alpha == 0.0) return;  // constant term, cannot steer v
        ClosestPointPair pr;
        pr.sample = d.alpha * pos + d.fixed;
        const TreeHit hit = state.input_tree.closest(pr.sample);
        pr.closest = hit.point;
        pr.alpha = d.alpha;
        pr.p = hit.point - d.fixed;
        pr.distance = std::sqrt(hit.dist2);
        pr.voronoi = s.voronoi_area;
        pr.feature = d.feature;
        pr.in_direction = false;
        pairs.push_back(pr);
    };

    const std::vector<FacetHandle> facets = mesh.vertex_facets(v);
    for (FacetHandle f : facets) {
        const auto it = state.facet_samples.find(f.i);
        if (it == state.facet_samples.end()) continue;
        for (const SamplePoint& s : it->second)
            add_out(s, decompose_facet_sample(mesh, field, v, s));
    }

    const HalfedgeHandle h0 = mesh.halfedge(v);
    if (h0.valid()) {
        HalfedgeHandle h = h0;
        do {
            const auto it = state.edge_samples.find(mesh.edge(h).i);
            if (it != state.edge_samples.end())
                for (const SamplePoint& s : it->second)
                    add_out(s, decompose_edge_sample(mesh, field, v, s));
            h = mesh.rotate(h);
        } while (h != h0);
    }

    {
        const auto it = state.vertex_samples.find(v.i);
        if (it != state.vertex_samples.end()) {
            Decomposition d;
            d.alpha = 1.0;
            d.rides = true;
            d.feature = field.intensity[v.i];
            add_out(it->second, d);
        }
    }

    // One-ring triangles with v placed at the trial position.
    std::vector<std::array<Vec3, 3>> tris;
    std::vector<int> v_corner;
    tris.reserve(facets.size());
    for (FacetHandle f : facets) {
        const auto vs = mesh.facet_vertices(f);
        auto ps = mesh.facet_points(f);
        int vi = 0;
        for (int k = 0; k < 3; ++k)
            if (vs[k] == v) vi = k;
        ps[vi] = pos;
        tris.push_back(ps);
        v_corner.push_back(vi);
    }

    for (FacetHandle f : facets) {
        const auto lit = state.links_into.find(f.i);
        if (lit == state.links_into.end()) continue;
        for (int idx : lit->second) {
            const SamplePoint& s = state.input_samples.samples[idx];
            double best = -1.0;
            Vec3 best_point;
            int best_tri = -1;
            for (std::size_t t = 0; t < tris.size(); ++t) {
                const ClosestPoint cp =
                    closest_point_triangle(s.position, tris[t][0], tris[t][1], tris[t][2]);
                if (best_tri < 0 || cp.dist2 < best) {
                    best = cp.dist2;
                    best_point = cp.point;
                    best_tri = static_cast<int>(t);
                }
            }
            if (best_tri < 0) continue;
            const auto& tri = tris[best_tri];
            const Vec3 b = barycentric_coordinates(best_point, tri[0], tri[1], tri[2]);
            const int vi = v_corner[best_tri];
            // alpha may be 0 (closest point on the ring boundary); kept anyway
            // so the pair set stays in bijection with the linked samples across
            // iterations — the solve ignores such pairs on its own.
            const double alpha = b[vi];
            Vec3 fixed{0, 0, 0};
            for (int k = 0; k < 3; ++k)
                if (k != vi) fixed += b[k] * tri[k];
            ClosestPointPair pr;
            pr.sample = s.position;
            pr.closest = best_point;
            pr.alpha = alpha;
            pr.p = s.position - fixed;
            pr.distance = std::sqrt(std::max(0.0, best));
            pr.voronoi = s.voronoi_area;
            pr.feature = s.feature;
            pr.in_direction = true;
            pairs.push_back(pr);
        }
    }

    return pairs;
}

OptimalPosition optimal_position(const std::vector<ClosestPointPair>& pairs,
                                 const Vec3& fallback) {
    double denom = 0.0;
    double weight_sum = 0.0;
    Vec3 num{0, 0, 0};
    for (const ClosestPointPair& pr : pairs) {
        num += (pr.weight * pr.alpha) * pr.p;
        denom += pr.weight * pr.alpha * pr.alpha;
        weight_sum += pr.weight;
    }
    OptimalPosition out;
    if (weight_sum <= 0.0 || !(denom > 1e-12 * weight_sum)) {
        out.position = fallback;
        out.constrained = false;
        return out;
    }
    out.position = num / denom;
    return out;
}

void lawson_update(std::vector<ClosestPointPair>& pairs, WeightScheme scheme) {
    if (pairs.empty()) return;
    std::vector<double> factor(pairs.size());
    double fmax = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        double f = pairs[i].distance;
        if (scheme == WeightScheme::FeatureSensitive)
            f *= pairs[i].voronoi * (pairs[i].feature + kFlatGuard);
        factor[i] = f;
        fmax = std::max(fmax, f);
    }
    if (fmax <= 0.0) return;  // perfect fit everywhere: leave weights alone
    for (std::size_t i = 0; i < pairs.size(); ++i)
        pairs[i].weight *= std::max(factor[i], kFactorFloor * fmax);
}

Vec3 minimize_vertex(const FidelityState& state, const HalfedgeMesh& mesh,
                     const FeatureField& field, VertexHandle v, int iterations,
                     double lambda, WeightScheme scheme) {
    return minimize_vertex(state, mesh, field, v, iterations, lambda, scheme,
                           mesh.position(v));
}

Vec3 minimize_vertex(const FidelityState& state, const HalfedgeMesh& mesh,
                     const FeatureField& field, VertexHandle v, int iterations,
                     double lambda, WeightScheme scheme, const Vec3& start) {
    Vec3 pos = start;
    std::vector<double> weights;
    for (int k = 0; k < iterations; ++k) {
        std::vector<ClosestPointPair> pairs = build_pairs(state, mesh, field, v, pos);
        if (pairs.empty()) break;
        // Weights persist across rebuilds by sample identity (the pair set is
        // stable while only v moves) and are reweighted with the residuals of
        // the freshly linked pairs before every solve, the first included —
        // pairs that already sit on the target surface stop steering v.
        if (k == 0 || weights.size() != pairs.size()) weights.assign(pairs.size(), 1.0);
        for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i].weight = weights[i];
        lawson_update(pairs, scheme);
        for (std::size_t i = 0; i < pairs.size(); ++i) weights[i] = pairs[i].weight;
        const OptimalPosition opt = optimal_position(pairs, pos);
        if (!opt.constrained) break;
        pos = pos + lambda * (opt.position - pos);
    }
    return pos;
}

}  // namespace minangle
