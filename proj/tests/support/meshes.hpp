#pragma once

// Procedural meshes shared by the test suites. Everything returns plain
// buffers so tests can mangle them before building a halfedge mesh.

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "minangle/geometry.hpp"
#include "minangle/mesh_io.hpp"
#include "minangle/rng.hpp"
#include "minangle/vec3.hpp"

namespace testmesh {

using minangle::MeshBuffers;
using minangle::Vec3;

inline MeshBuffers tetrahedron() {
    MeshBuffers m;
    m.positions = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    m.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    return m;
}

inline MeshBuffers octahedron() {
    MeshBuffers m;
    m.positions = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    m.triangles = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                   {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    return m;
}

inline MeshBuffers icosahedron() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const double s = 1.0 / std::sqrt(1.0 + phi * phi);  // unit circumradius
    const double a = s, b = phi * s;
    MeshBuffers m;
    m.positions = {{-a, b, 0}, {a, b, 0},  {-a, -b, 0}, {a, -b, 0}, {0, -a, b}, {0, a, b},
                   {0, -a, -b}, {0, a, -b}, {b, 0, -a}, {b, 0, a},  {-b, 0, -a}, {-b, 0, a}};
    m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                   {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                   {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                   {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return m;
}

// Icosahedron subdivided `levels` times, vertices projected to the unit sphere.
inline MeshBuffers icosphere(int levels) {
    MeshBuffers m = icosahedron();
    for (int level = 0; level < levels; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int i, int j) {
            auto key = std::minmax(i, j);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 p = minangle::normalized(m.positions[size_t(i)] + m.positions[size_t(j)]);
            m.positions.push_back(p);
            int id = int(m.positions.size()) - 1;
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(m.triangles.size() * 4);
        for (auto [i, j, k] : m.triangles) {
            int ij = mid(i, j), jk = mid(j, k), ki = mid(k, i);
            next.push_back({i, ij, ki});
            next.push_back({j, jk, ij});
            next.push_back({k, ki, jk});
            next.push_back({ij, jk, ki});
        }
        m.triangles = std::move(next);
    }
    return m;
}

// Unit square in the z=0 plane, n x n vertices, diagonal split. Optional
// in-plane jitter keeps the boundary fixed.
inline MeshBuffers flat_grid(int n, double jitter = 0.0, uint64_t seed = 0) {
    MeshBuffers m;
    minangle::RngStream rng(seed, 1);
    double step = 1.0 / (n - 1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Vec3 p{i * step, j * step, 0.0};
            if (jitter > 0.0 && i > 0 && i < n - 1 && j > 0 && j < n - 1) {
                p.x += jitter * (2.0 * rng.next_double() - 1.0);
                p.y += jitter * (2.0 * rng.next_double() - 1.0);
            }
            m.positions.push_back(p);
        }
    auto at = [n](int i, int j) { return j * n + i; };
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            m.triangles.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
            m.triangles.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
        }
    return m;
}

// Axis-aligned unit cube with each face an n x n grid, shared edges welded.
inline MeshBuffers cube_grid(int n) {
    MeshBuffers m;
    std::map<std::array<long, 3>, int> dedup;
    auto vertex = [&](const Vec3& p) {
        // Grid coordinates are exact multiples of 1/(n-1); scale to integers.
        std::array<long, 3> key{std::lround(p.x * 2 * (n - 1)), std::lround(p.y * 2 * (n - 1)),
                                std::lround(p.z * 2 * (n - 1))};
        auto it = dedup.find(key);
        if (it != dedup.end()) return it->second;
        m.positions.push_back(p);
        int id = int(m.positions.size()) - 1;
        dedup.emplace(key, id);
        return id;
    };
    double step = 1.0 / (n - 1);
    // origin + two axes per face, oriented outward
    const Vec3 faces[6][3] = {
        {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}},  // z = 0, normal -z
        {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},  // z = 1, normal +z
        {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}},  // y = 0, normal -y
        {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}},  // y = 1, normal +y
        {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}},  // x = 0, normal -x
        {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},  // x = 1, normal +x
    };
    for (const auto& f : faces) {
        for (int j = 0; j + 1 < n; ++j)
            for (int i = 0; i + 1 < n; ++i) {
                auto corner = [&](int di, int dj) {
                    return vertex(f[0] + f[1] * ((i + di) * step) + f[2] * ((j + dj) * step));
                };
                int v00 = corner(0, 0), v10 = corner(1, 0), v01 = corner(0, 1), v11 = corner(1, 1);
                m.triangles.push_back({v00, v10, v11});
                m.triangles.push_back({v00, v11, v01});
            }
    }
    return m;
}

// Open cylinder (two boundary circles), radius 1, height `height`.
inline MeshBuffers cylinder(int nu, int nv, double height = 2.0) {
    MeshBuffers m;
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu; ++i) {
            double t = 2.0 * minangle::kPi * i / nu;
            m.positions.push_back({std::cos(t), std::sin(t), height * j / (nv - 1)});
        }
    auto at = [nu](int i, int j) { return j * nu + (i % nu); };
    for (int j = 0; j + 1 < nv; ++j)
        for (int i = 0; i < nu; ++i) {
            m.triangles.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
            m.triangles.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
        }
    return m;
}

inline MeshBuffers torus(int nu, int nv, double R = 1.0, double r = 0.35) {
    MeshBuffers m;
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu; ++i) {
            double u = 2.0 * minangle::kPi * i / nu;
            double v = 2.0 * minangle::kPi * j / nv;
            double w = R + r * std::cos(v);
            m.positions.push_back({w * std::cos(u), w * std::sin(u), r * std::sin(v)});
        }
    auto at = [nu, nv](int i, int j) { return (j % nv) * nu + (i % nu); };
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu; ++i) {
            m.triangles.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
            m.triangles.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
        }
    return m;
}

// Every vertex displaced by a uniform offset in [-amount, amount]^3.
inline MeshBuffers jitter_positions(MeshBuffers m, double amount, uint64_t seed) {
    for (size_t v = 0; v < m.positions.size(); ++v) {
        minangle::RngStream rng(seed, v);
        m.positions[v].x += amount * (2.0 * rng.next_double() - 1.0);
        m.positions[v].y += amount * (2.0 * rng.next_double() - 1.0);
        m.positions[v].z += amount * (2.0 * rng.next_double() - 1.0);
    }
    return m;
}

}  // namespace testmesh
