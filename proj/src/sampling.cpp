#include "minangle/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "minangle/geometry.hpp"
#include "minangle/rng.hpp"

namespace minangle {

namespace {

struct P2 {
    double x = 0.0, y = 0.0;
};

// Clip `poly` against half-plane a*x + b*y <= c (Sutherland-Hodgman).
std::vector<P2> clip_halfplane(const std::vector<P2>& poly, double a, double b, double c) {
    std::vector<P2> out;
    if (poly.empty()) return out;
    out.reserve(poly.size() + 2);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const P2& s = poly[i];
        const P2& e = poly[(i + 1) % poly.size()];
        double ds = a * s.x + b * s.y - c;
        double de = a * e.x + b * e.y - c;
        bool sin = ds <= 1e-12, ein = de <= 1e-12;
        if (sin) out.push_back(s);
        if (sin != ein) {
            double t = ds / (ds - de);
            out.push_back({s.x + t * (e.x - s.x), s.y + t * (e.y - s.y)});
        }
    }
    return out;
}

double polygon_area(const std::vector<P2>& poly) {
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const P2& s = poly[i];
        const P2& e = poly[(i + 1) % poly.size()];
        twice += s.x * e.y - e.x * s.y;
    }
    return 0.5 * twice;
}

P2 polygon_centroid(const std::vector<P2>& poly, double area) {
    P2 c;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const P2& s = poly[i];
        const P2& e = poly[(i + 1) % poly.size()];
        double w = s.x * e.y - e.x * s.y;
        c.x += (s.x + e.x) * w;
        c.y += (s.y + e.y) * w;
    }
    c.x /= 6.0 * area;
    c.y /= 6.0 * area;
    return c;
}

// Bounded Voronoi cell of site i within `bounds`: clip by the perpendicular
// bisector against every other site.
std::vector<P2> voronoi_cell(const std::vector<P2>& sites, std::size_t i,
                             const std::vector<P2>& bounds) {
    std::vector<P2> cell = bounds;
    const P2& si = sites[i];
    for (std::size_t j = 0; j < sites.size() && !cell.empty(); ++j) {
        if (j == i) continue;
        const P2& sj = sites[j];
        double a = 2.0 * (sj.x - si.x);
        double b = 2.0 * (sj.y - si.y);
        double c = sj.x * sj.x + sj.y * sj.y - si.x * si.x - si.y * si.y;
        cell = clip_halfplane(cell, a, b, c);
    }
    return cell;
}

}  // namespace

int facet_sample_count(double n_f, double area, const std::vector<double>& neighbor_areas) {
    double ratio_sum = 0.0;
    for (double a_j : neighbor_areas) ratio_sum += area > 0.0 ? a_j / area : 1.0;
    double n = n_f * (1.0 + double(neighbor_areas.size())) / (1.0 + ratio_sum);
    return std::max(1, int(std::lround(n)));
}

std::vector<SamplePoint> sample_facet(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                                      int facet_id, int n, std::uint64_t seed) {
    RngStream rng(seed, static_cast<std::uint64_t>(facet_id));

    // Orthonormal frame of the facet plane.
    Vec3 u3 = p1 - p0;
    double ulen = norm(u3);
    Vec3 u = ulen > 0.0 ? u3 / ulen : Vec3{1, 0, 0};
    Vec3 w = p2 - p0;
    Vec3 v3 = w - u * dot(w, u);
    double vlen = norm(v3);
    Vec3 v = vlen > 0.0 ? v3 / vlen : Vec3{0, 1, 0};

    const std::vector<P2> bounds = {{0.0, 0.0}, {ulen, 0.0}, {dot(w, u), dot(w, v)}};
    const P2 b1 = bounds[1], b2 = bounds[2];

    // Uniform random start (square-root warp), then Lloyd.
    std::vector<P2> sites(static_cast<std::size_t>(n));
    for (auto& s : sites) {
        double r1 = std::sqrt(rng.next_double());
        double r2 = rng.next_double();
        double wb = r1 * (1.0 - r2), wc = r1 * r2;
        s = {wb * b1.x + wc * b2.x, wb * b1.y + wc * b2.y};
    }
    for (int iteration = 0; iteration < 5; ++iteration) {
        for (std::size_t i = 0; i < sites.size(); ++i) {
            std::vector<P2> cell = voronoi_cell(sites, i, bounds);
            double area = polygon_area(cell);
            if (area > 1e-30) sites[i] = polygon_centroid(cell, area);
        }
    }

    // Barycentric inversion in the 2D frame (exact linear solve).
    double det = b1.x * b2.y - b2.x * b1.y;
    std::vector<SamplePoint> out;
    out.reserve(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        double area = polygon_area(voronoi_cell(sites, i, bounds));
        SamplePoint s;
        s.kind = SampleKind::Facet;
        s.host = facet_id;
        s.voronoi_area = std::max(0.0, area);
        double beta = det != 0.0 ? (sites[i].x * b2.y - b2.x * sites[i].y) / det : 0.0;
        double gamma = det != 0.0 ? (b1.x * sites[i].y - sites[i].x * b1.y) / det : 0.0;
        s.bary = {1.0 - beta - gamma, beta, gamma};
        s.position = p0 * s.bary.x + p1 * s.bary.y + p2 * s.bary.z;
        out.push_back(s);
    }
    return out;
}

std::vector<SamplePoint> sample_edge(const Vec3& p, const Vec3& q, int edge_id,
                                     const std::vector<EdgeSideSample>& side_a,
                                     const std::vector<EdgeSideSample>& side_b) {
    double length = distance(p, q);
    if (length <= 0.0) return {};
    Vec3 d = q - p;

    int count = 0;
    double width_sum = 0.0;
    auto accumulate_side = [&](const std::vector<EdgeSideSample>& side) {
        for (std::size_t i = 0; i < side.size(); ++i) {
            // 1D cell of site i on the edge: x(t) closer to side[i] than to
            // any sibling, t in [0,1]. Each constraint is linear in t.
            double lo = 0.0, hi = 1.0;
            const Vec3& si = side[i].position;
            for (std::size_t j = 0; j < side.size() && lo < hi; ++j) {
                if (j == i) continue;
                const Vec3& sj = side[j].position;
                double a = 2.0 * dot(d, sj - si);
                double b = norm2(sj) - norm2(si) - 2.0 * dot(p, sj - si);
                if (a > 0.0)
                    hi = std::min(hi, b / a);
                else if (a < 0.0)
                    lo = std::max(lo, b / a);
                else if (b < 0.0) {
                    lo = 1.0;
                    hi = 0.0;
                }
            }
            double contact = std::max(0.0, hi - lo) * length;
            if (contact > 1e-9 * length) {
                ++count;
                width_sum += side[i].area / contact;
            }
        }
    };
    accumulate_side(side_a);
    accumulate_side(side_b);
    if (count == 0) return {};

    double weight = (length / count) * (width_sum / count);
    std::vector<SamplePoint> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 1; k <= count; ++k) {
        double t = double(k) / (count + 1);
        SamplePoint s;
        s.kind = SampleKind::Edge;
        s.host = edge_id;
        s.bary = {1.0 - t, t, 0.0};
        s.position = p * (1.0 - t) + q * t;
        s.voronoi_area = weight;
        out.push_back(s);
    }
    return out;
}

SamplePoint vertex_sample(const HalfedgeMesh& mesh, VertexHandle v) {
    SamplePoint s;
    s.kind = SampleKind::Vertex;
    s.host = v.i;
    s.position = mesh.position(v);
    double area = 0.0;
    for (FacetHandle f : mesh.vertex_facets(v)) area += mesh.facet_area(f);
    s.voronoi_area = area / 3.0;
    return s;
}

SampleSet stratified_sample(const HalfedgeMesh& mesh, double n_f, std::uint64_t seed) {
    SampleSet set;
    set.n_f = n_f;
    set.seed = seed;

    // Facet samples, ordered by facet id.
    std::vector<std::vector<SamplePoint>> by_facet(static_cast<std::size_t>(mesh.facet_capacity()));
    mesh.for_each_facet([&](FacetHandle f) {
        std::vector<double> neighbor_areas;
        std::set<int> neighbors;
        for (VertexHandle v : mesh.facet_vertices(f))
            for (FacetHandle g : mesh.vertex_facets(v))
                if (g != f) neighbors.insert(g.i);
        for (int g : neighbors) neighbor_areas.push_back(mesh.facet_area(FacetHandle{g}));
        int n = facet_sample_count(n_f, mesh.facet_area(f), neighbor_areas);
        auto pts = mesh.facet_points(f);
        by_facet[static_cast<std::size_t>(f.i)] = sample_facet(pts[0], pts[1], pts[2], f.i, n, seed);
    });
    for (const auto& group : by_facet)
        set.samples.insert(set.samples.end(), group.begin(), group.end());

    // Edge samples.
    mesh.for_each_edge([&](EdgeHandle e) {
        HalfedgeHandle h = mesh.halfedge(e, 0);
        Vec3 p = mesh.position(mesh.from_vertex(h));
        Vec3 q = mesh.position(mesh.to_vertex(h));
        std::vector<EdgeSideSample> side_a, side_b;
        auto collect = [&](FacetHandle f, std::vector<EdgeSideSample>& side) {
            if (!f.valid()) return;
            for (const SamplePoint& s : by_facet[static_cast<std::size_t>(f.i)])
                side.push_back({s.position, s.voronoi_area});
        };
        collect(mesh.facet(h), side_a);
        collect(mesh.facet(mesh.opposite(h)), side_b);
        auto es = sample_edge(p, q, e.i, side_a, side_b);
        set.samples.insert(set.samples.end(), es.begin(), es.end());
    });

    // One sample per vertex.
    mesh.for_each_vertex([&](VertexHandle v) { set.samples.push_back(vertex_sample(mesh, v)); });
    return set;
}

}  // namespace minangle
