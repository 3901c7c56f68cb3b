#pragma once

#include <array>
#include <stdexcept>

#include "minangle/vec3.hpp"

namespace minangle {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Vec3 triangle_normal_raw(const Vec3& a, const Vec3& b, const Vec3& c) {
    return cross(b - a, c - a);
}

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * norm(triangle_normal_raw(a, b, c));
}

inline Vec3 triangle_centroid(const Vec3& a, const Vec3& b, const Vec3& c) {
    return (a + b + c) / 3.0;
}

/// Angle at `at` between the rays toward p and q, in [0, pi]. Never throws:
/// a collapsed corner (coincident points) reports 0, a flat cap reports pi.
double corner_angle(const Vec3& at, const Vec3& p, const Vec3& q);

/// Interior angles in radians, ordered (at a, at b, at c).
/// Throws GeometryError on a degenerate (zero-area) triangle.
std::array<double, 3> triangle_angles(const Vec3& a, const Vec3& b, const Vec3& c);

/// Smallest interior angle in radians.
double triangle_min_angle(const Vec3& a, const Vec3& b, const Vec3& c);

/// Unsigned angle in [0, pi] between the oriented planes of triangles
/// (a, b, c) and (b, a, d) sharing edge (a, b): 0 when coplanar with equal
/// orientation, pi when folded flat onto each other.
double dihedral_angle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Quality 2*sqrt(3) * area / (half_perimeter * longest_edge); 1 for an
/// equilateral triangle, 0 for a degenerate one.
double triangle_quality(const Vec3& a, const Vec3& b, const Vec3& c);

/// Closest point of triangle (a, b, c) to p together with the squared distance.
struct ClosestPoint {
    Vec3 point;
    double dist2 = 0.0;
};
ClosestPoint closest_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Barycentric coordinates of p with respect to (a, b, c); p is assumed to
/// lie in the triangle's plane. Degenerate triangles yield (1, 0, 0).
Vec3 barycentric_coordinates(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct Bbox {
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};

    void expand(const Vec3& p) {
        for (int i = 0; i < 3; ++i) {
            if (p[i] < lo[i]) lo[i] = p[i];
            if (p[i] > hi[i]) hi[i] = p[i];
        }
    }
    void expand(const Bbox& b) { expand(b.lo); expand(b.hi); }
    bool empty() const { return lo.x > hi.x; }
    double diagonal() const { return empty() ? 0.0 : norm(hi - lo); }

    double dist2_to(const Vec3& p) const {
        double d2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            double d = 0.0;
            if (p[i] < lo[i]) d = lo[i] - p[i];
            else if (p[i] > hi[i]) d = p[i] - hi[i];
            d2 += d * d;
        }
        return d2;
    }
};

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * (kPi / 180.0); }
inline double rad_to_deg(double r) { return r * (180.0 / kPi); }

}  // namespace minangle
