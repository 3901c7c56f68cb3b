#include "minangle/features.hpp"

#include <algorithm>
#include <cmath>

#include "minangle/geometry.hpp"

namespace minangle {

namespace {

// Rescale so that a right-angle defect / dihedral already saturates the
// [0, pi] range: tau(x) = min(pi, 2x).
double tau(double x) { return std::min(kPi, 2.0 * x); }

double combined_intensity(double curvature, double edge_sharp) {
    return (tau(std::abs(curvature)) + 1.0) * (tau(edge_sharp) + 1.0) - 1.0;
}

// Unsigned dihedral of the edge leaving v along h; boundary edges count as a
// full fold (pi) so open boundaries classify as creases and stay put.
double edge_dihedral(const HalfedgeMesh& mesh, HalfedgeHandle h) {
    if (mesh.is_boundary(mesh.edge(h))) return kPi;
    const Vec3& a = mesh.position(mesh.from_vertex(h));
    const Vec3& b = mesh.position(mesh.to_vertex(h));
    const Vec3& c = mesh.position(mesh.to_vertex(mesh.next(h)));
    const Vec3& d = mesh.position(mesh.to_vertex(mesh.next(mesh.opposite(h))));
    return dihedral_angle(a, b, c, d);
}

}  // namespace

double gaussian_curvature(const HalfedgeMesh& mesh, VertexHandle v) {
    double angle_sum = 0.0;
    const HalfedgeHandle h0 = mesh.halfedge(v);
    HalfedgeHandle h = h0;
    do {
        if (mesh.facet(h).valid()) {
            const Vec3& p = mesh.position(v);
            const Vec3& q = mesh.position(mesh.to_vertex(h));
            const Vec3& r = mesh.position(mesh.to_vertex(mesh.next(h)));
            // corner_angle instead of triangle_angles: a degenerate incident
            // facet contributes its honest flat corner rather than aborting
            // the field on the very inputs the pipeline exists to repair.
            angle_sum += corner_angle(p, q, r);
        }
        h = mesh.rotate(h);
    } while (h != h0);
    return (mesh.is_boundary(v) ? kPi : 2.0 * kPi) - angle_sum;
}

double feature_edge_intensity(const HalfedgeMesh& mesh, VertexHandle v) {
    double max_dihedral = 0.0;
    const HalfedgeHandle h0 = mesh.halfedge(v);
    HalfedgeHandle h = h0;
    do {
        max_dihedral = std::max(max_dihedral, edge_dihedral(mesh, h));
        h = mesh.rotate(h);
    } while (h != h0);
    return max_dihedral;
}

double feature_intensity(const HalfedgeMesh& mesh, VertexHandle v) {
    return combined_intensity(gaussian_curvature(mesh, v),
                              feature_edge_intensity(mesh, v));
}

FeatureField compute_feature_field(const HalfedgeMesh& mesh) {
    FeatureField field;
    field.curvature.assign(mesh.vertex_capacity(), 0.0);
    field.edge_sharp.assign(mesh.vertex_capacity(), 0.0);
    field.intensity.assign(mesh.vertex_capacity(), 0.0);
    mesh.for_each_vertex([&](VertexHandle v) {
        field.curvature[v.i] = gaussian_curvature(mesh, v);
        field.edge_sharp[v.i] = feature_edge_intensity(mesh, v);
        field.intensity[v.i] =
            combined_intensity(field.curvature[v.i], field.edge_sharp[v.i]);
    });
    return field;
}

void update_feature_field(const HalfedgeMesh& mesh, FeatureField& field,
                          const std::vector<VertexHandle>& vertices) {
    const size_t capacity = static_cast<size_t>(mesh.vertex_capacity());
    if (field.curvature.size() < capacity) {
        field.curvature.resize(capacity, 0.0);
        field.edge_sharp.resize(capacity, 0.0);
        field.intensity.resize(capacity, 0.0);
    }
    for (VertexHandle v : vertices) {
        if (mesh.is_deleted(v)) continue;
        field.curvature[v.i] = gaussian_curvature(mesh, v);
        field.edge_sharp[v.i] = feature_edge_intensity(mesh, v);
        field.intensity[v.i] =
            combined_intensity(field.curvature[v.i], field.edge_sharp[v.i]);
    }
}

VertexClass classify_vertex(const HalfedgeMesh& mesh, const FeatureField& field,
                            VertexHandle v, double zeta) {
    struct Neighbor {
        VertexHandle vertex;
        double intensity;
    };
    std::vector<Neighbor> similar;
    int degree = 0;

    // Angle sums on near-flat patches leave intensity dust of order 1e-15;
    // comparing neighbors against zeta times that dust would turn rounding
    // noise into phantom creases. Anything below the floor counts as flat.
    constexpr double kFlatFloor = 1e-9;
    if (field.intensity[v.i] <= kFlatFloor) return {};

    const double center_intensity = field.intensity[v.i];
    const double center_edge = field.edge_sharp[v.i];
    const HalfedgeHandle h0 = mesh.halfedge(v);
    HalfedgeHandle h = h0;
    do {
        ++degree;
        const VertexHandle u = mesh.to_vertex(h);
        const bool similar_intensity =
            field.intensity[u.i] >= zeta * center_intensity;
        const bool important_edge =
            edge_dihedral(mesh, h) + 1.0 >= zeta * (center_edge + 1.0);
        if (similar_intensity && important_edge)
            similar.push_back({u, field.intensity[u.i]});
        h = mesh.rotate(h);
    } while (h != h0);

    const int k = static_cast<int>(similar.size());
    VertexClass result;
    if (k == 0) {
        result.role = VertexRole::Feature;
        return result;
    }
    if (k == degree && k != 2) {
        result.role = VertexRole::Smooth;
        return result;
    }
    // Snap intermediate counts to whichever of {2, degree} is closer; ties
    // resolve to Crease since a crease vertex moves less.
    const bool crease = k == 2 || std::abs(k - 2) <= std::abs(k - degree);
    if (!crease) {
        result.role = VertexRole::Smooth;
        return result;
    }
    if (k < 2) {
        // Snapped to Crease but only one qualifying neighbor exists: there is
        // no direction to slide along, so pin the vertex instead.
        result.role = VertexRole::Feature;
        return result;
    }
    std::sort(similar.begin(), similar.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.intensity != b.intensity) return a.intensity > b.intensity;
        return a.vertex.i < b.vertex.i;
    });
    result.role = VertexRole::Crease;
    result.crease_neighbor[0] = similar[0].vertex;
    result.crease_neighbor[1] = similar[1].vertex;
    return result;
}

}  // namespace minangle
