#include "minangle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace minangle {

std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

double corner_angle(const Vec3& at, const Vec3& p, const Vec3& q) {
    Vec3 u = p - at, v = q - at;
    // atan2 formulation stays accurate for needle and cap corners where
    // acos of the clamped cosine loses digits.
    return std::atan2(norm(cross(u, v)), dot(u, v));
}

std::array<double, 3> triangle_angles(const Vec3& a, const Vec3& b, const Vec3& c) {
    if (a == b || b == c || c == a)
        throw GeometryError("degenerate triangle: coincident vertices");
    if (norm2(triangle_normal_raw(a, b, c)) == 0.0)
        throw GeometryError("degenerate triangle: zero area");
    return {corner_angle(a, b, c), corner_angle(b, c, a), corner_angle(c, a, b)};
}

double triangle_min_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    auto ang = triangle_angles(a, b, c);
    return std::min({ang[0], ang[1], ang[2]});
}

double dihedral_angle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    Vec3 n1 = normalized(triangle_normal_raw(a, b, c));
    Vec3 n2 = normalized(triangle_normal_raw(b, a, d));
    return std::atan2(norm(cross(n1, n2)), dot(n1, n2));
}

double triangle_quality(const Vec3& a, const Vec3& b, const Vec3& c) {
    double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
    double h = std::max({la, lb, lc});
    double p = 0.5 * (la + lb + lc);
    if (h <= 0.0 || p <= 0.0) return 0.0;
    return 2.0 * std::sqrt(3.0) * triangle_area(a, b, c) / (p * h);
}

// Ericson, Real-Time Collision Detection, 5.1.5.
ClosestPoint closest_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return {a, distance2(p, a)};

    Vec3 bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return {b, distance2(p, b)};

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        double t = d1 / (d1 - d3);
        Vec3 q = a + t * ab;
        return {q, distance2(p, q)};
    }

    Vec3 cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return {c, distance2(p, c)};

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        double t = d2 / (d2 - d6);
        Vec3 q = a + t * ac;
        return {q, distance2(p, q)};
    }

    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        Vec3 q = b + t * (c - b);
        return {q, distance2(p, q)};
    }

    double denom = 1.0 / (va + vb + vc);
    Vec3 q = a + ab * (vb * denom) + ac * (vc * denom);
    return {q, distance2(p, q)};
}

Vec3 barycentric_coordinates(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 v0 = b - a, v1 = c - a, v2 = p - a;
    double d00 = dot(v0, v0), d01 = dot(v0, v1), d11 = dot(v1, v1);
    double d20 = dot(v2, v0), d21 = dot(v2, v1);
    double denom = d00 * d11 - d01 * d01;
    if (denom <= 0.0) return {1.0, 0.0, 0.0};
    double v = (d11 * d20 - d01 * d21) / denom;
    double w = (d00 * d21 - d01 * d20) / denom;
    return {1.0 - v - w, v, w};
}

}  // namespace minangle
