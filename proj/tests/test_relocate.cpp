#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "minangle/features.hpp"
#include "minangle/fidelity.hpp"
#include "minangle/geometry.hpp"
#include "minangle/halfedge_mesh.hpp"
#include "minangle/relocate.hpp"
#include "minangle/rng.hpp"
#include "support/meshes.hpp"

using namespace minangle;

namespace {

int find_vertex(const HalfedgeMesh& mesh, const Vec3& p) {
    int found = -1;
    mesh.for_each_vertex([&](VertexHandle v) {
        if (distance(mesh.position(v), p) < 1e-9) found = v.i;
    });
    REQUIRE(found >= 0);
    return found;
}

// Intensity field set by hand; curvature/sharpness slots unused by the code
// under test.
FeatureField synthetic_field(const HalfedgeMesh& mesh, const std::vector<double>& intensity) {
    FeatureField field;
    field.curvature.assign(mesh.vertex_capacity(), 0.0);
    field.edge_sharp.assign(mesh.vertex_capacity(), 0.0);
    field.intensity = intensity;
    field.intensity.resize(mesh.vertex_capacity(), 0.0);
    return field;
}

double pair_energy(const std::vector<ClosestPointPair>& pairs, const Vec3& v) {
    double e = 0.0;
    for (const auto& pr : pairs) {
        const Vec3 r = pr.alpha * v - pr.p;
        e += pr.weight * dot(r, r);
    }
    return e;
}

Vec3 fd_gradient(const std::vector<ClosestPointPair>& pairs, const Vec3& v, double h) {
    Vec3 g;
    for (int k = 0; k < 3; ++k) {
        Vec3 a = v, b = v;
        a[k] += h;
        b[k] -= h;
        g[k] = (pair_energy(pairs, a) - pair_energy(pairs, b)) / (2.0 * h);
    }
    return g;
}

// One finite-difference Newton step per coordinate; exact for the quadratic
// (and separable) pair energy, so it lands on the true minimizer.
Vec3 fd_newton_minimizer(const std::vector<ClosestPointPair>& pairs, Vec3 v, double h) {
    for (int k = 0; k < 3; ++k) {
        Vec3 a = v, b = v;
        a[k] += h;
        b[k] -= h;
        const double e0 = pair_energy(pairs, v);
        const double g = (pair_energy(pairs, a) - pair_energy(pairs, b)) / (2.0 * h);
        const double hess = (pair_energy(pairs, a) - 2.0 * e0 + pair_energy(pairs, b)) / (h * h);
        REQUIRE(hess > 0.0);
        v[k] -= g / hess;
    }
    return v;
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
    return distance(p, a + t * ab);
}

// Distance to the sharp-edge skeleton of the unit cube (its 12 edges).
double cube_crease_distance(const Vec3& p) {
    double best = 1e300;
    for (int axis = 0; axis < 3; ++axis)
        for (int s = 0; s < 4; ++s) {
            Vec3 a{double(s & 1), double(s >> 1), 0.0};
            std::swap(a[axis], a[2]);  // free coordinate moved to `axis`
            Vec3 b = a;
            a[axis] = 0.0;
            b[axis] = 1.0;
            best = std::min(best, segment_distance(p, a, b));
        }
    return best;
}

}  // namespace

TEST_CASE("collapse seed: feature-similarity test") {
    auto t = testmesh::tetrahedron();
    HalfedgeMesh mesh(t.positions, t.triangles);

    SUBCASE("clear feature wins") {
        auto field = synthetic_field(mesh, {10.0, 1.0, 0.0, 0.0});
        CHECK(init_collapse_position(mesh, field, {0}, {1}, 0.15) == mesh.position(VertexHandle{0}));
        CHECK(init_collapse_position(mesh, field, {1}, {0}, 0.15) == mesh.position(VertexHandle{0}));
    }
    SUBCASE("equal intensities give the midpoint") {
        auto field = synthetic_field(mesh, {4.0, 4.0, 0.0, 0.0});
        const Vec3 mid = 0.5 * (mesh.position(VertexHandle{0}) + mesh.position(VertexHandle{1}));
        CHECK(init_collapse_position(mesh, field, {0}, {1}, 0.15) == mid);
    }
    SUBCASE("flat region (both zero) gives the midpoint") {
        auto field = synthetic_field(mesh, {0.0, 0.0, 0.0, 0.0});
        const Vec3 mid = 0.5 * (mesh.position(VertexHandle{2}) + mesh.position(VertexHandle{3}));
        CHECK(init_collapse_position(mesh, field, {2}, {3}, 0.15) == mid);
    }
    SUBCASE("similar intensities give the midpoint") {
        auto field = synthetic_field(mesh, {10.0, 9.5, 0.0, 0.0});
        const Vec3 mid = 0.5 * (mesh.position(VertexHandle{0}) + mesh.position(VertexHandle{1}));
        CHECK(init_collapse_position(mesh, field, {0}, {1}, 0.15) == mid);
    }
}

TEST_CASE("split seed: always the midpoint") {
    SUBCASE("unit-scale edge") {
        auto t = testmesh::tetrahedron();
        HalfedgeMesh mesh(t.positions, t.triangles);
        HalfedgeHandle h = mesh.find_halfedge({0}, {1});
        CHECK(init_split_position(mesh, h) == Vec3{1, 0, 0});
    }
    SUBCASE("boundary edge") {
        auto g = testmesh::flat_grid(3);
        HalfedgeMesh mesh(g.positions, g.triangles);
        HalfedgeHandle h = mesh.find_halfedge({0}, {1});  // (0,0,0) -> (0.5,0,0)
        CHECK(init_split_position(mesh, h) == Vec3{0.25, 0, 0});
    }
    SUBCASE("degenerately short edge") {
        std::vector<Vec3> pos{{0, 0, 0}, {1e-12, 0, 0}, {0, 1, 0}};
        std::vector<std::array<int, 3>> tris{{0, 1, 2}};
        HalfedgeMesh mesh(pos, tris);
        HalfedgeHandle h = mesh.find_halfedge({0}, {1});
        CHECK(init_split_position(mesh, h) == Vec3{5e-13, 0, 0});
    }
}

TEST_CASE("relocation seed follows the vertex classification") {
    SUBCASE("Feature vertex stays put") {
        auto c = testmesh::cube_grid(5);
        HalfedgeMesh mesh(c.positions, c.triangles);
        auto field = compute_feature_field(mesh);
        VertexHandle corner{find_vertex(mesh, {0, 0, 0})};
        CHECK(init_relocation_position(mesh, field, corner, 0.5) == mesh.position(corner));
    }
    SUBCASE("Crease vertex moves to the midpoint of its crease neighbors") {
        auto c = testmesh::cube_grid(5);
        HalfedgeMesh mesh(c.positions, c.triangles);
        VertexHandle v{find_vertex(mesh, {0.5, 0, 0})};
        mesh.set_position(v, {0.55, 0, 0});  // slid along the crease
        auto field = compute_feature_field(mesh);
        const Vec3 got = init_relocation_position(mesh, field, v, 0.5);
        CHECK(distance(got, {0.5, 0, 0}) < 1e-12);  // midpoint of 0.25 / 0.75 neighbors
    }
    SUBCASE("Smooth vertex at its cell centroid is a fixed point") {
        auto g = testmesh::flat_grid(5);
        HalfedgeMesh mesh(g.positions, g.triangles);
        auto field = compute_feature_field(mesh);
        VertexHandle v{find_vertex(mesh, {0.5, 0.5, 0})};
        CHECK(distance(init_relocation_position(mesh, field, v, 0.5), mesh.position(v)) < 1e-12);
    }
    SUBCASE("Smooth vertex equals the area-weighted incident centroid") {
        auto g = testmesh::flat_grid(5, 0.04, 2);
        HalfedgeMesh mesh(g.positions, g.triangles);
        auto field = compute_feature_field(mesh);
        VertexHandle v{find_vertex(mesh, g.positions[2 * 5 + 2])};
        REQUIRE(classify_vertex(mesh, field, v, 0.5).role == VertexRole::Smooth);
        double area = 0.0;
        Vec3 acc{0, 0, 0};
        for (FacetHandle f : mesh.vertex_facets(v)) {
            auto ps = mesh.facet_points(f);
            double a = triangle_area(ps[0], ps[1], ps[2]);
            acc += a * triangle_centroid(ps[0], ps[1], ps[2]);
            area += a;
        }
        CHECK(distance(init_relocation_position(mesh, field, v, 0.5), acc / area) < 1e-15);
    }
}

TEST_CASE("optimal position: closed form minimizes the pair energy") {
    SUBCASE("single pair lands on its target") {
        ClosestPointPair pr;
        pr.alpha = 1.0;
        pr.p = {0.3, -0.7, 2.0};
        pr.weight = 3.0;
        auto out = optimal_position({pr}, {9, 9, 9});
        CHECK(out.constrained);
        CHECK(distance(out.position, pr.p) < 1e-15);
    }
    SUBCASE("two equal pairs land on the midpoint") {
        ClosestPointPair a, b;
        a.alpha = b.alpha = 1.0;
        a.p = {1, 0, 0};
        b.p = {0, 1, 0};
        auto out = optimal_position({a, b}, {9, 9, 9});
        CHECK(out.constrained);
        CHECK(distance(out.position, {0.5, 0.5, 0}) < 1e-15);
    }
    SUBCASE("degenerate system keeps the fallback and flags it") {
        ClosestPointPair pr;  // alpha = 0: sample does not involve the vertex
        pr.p = {1, 2, 3};
        auto out = optimal_position({pr}, {4, 5, 6});
        CHECK_FALSE(out.constrained);
        CHECK(out.position == Vec3{4, 5, 6});
        auto empty = optimal_position({}, {7, 8, 9});
        CHECK_FALSE(empty.constrained);
        CHECK(empty.position == Vec3{7, 8, 9});
    }
    SUBCASE("random 20-pair instance: gradient vanishes, matches a numeric minimizer") {
        RngStream rng(31, 0);
        auto random_pairs = [&rng]() {
            std::vector<ClosestPointPair> pairs(20);
            for (auto& pr : pairs) {
                pr.alpha = 0.2 + 0.8 * rng.next_double();
                pr.p = {2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0,
                        2.0 * rng.next_double() - 1.0};
                pr.weight = 0.1 + 1.4 * rng.next_double();
            }
            return pairs;
        };
        {
            auto pairs = random_pairs();
            auto out = optimal_position(pairs, {0, 0, 0});
            REQUIRE(out.constrained);
            CHECK(norm(fd_gradient(pairs, out.position, 1e-6)) < 1e-8);
            const Vec3 numeric = fd_newton_minimizer(pairs, {0.5, -0.5, 0.5}, 1e-4);
            CHECK(distance(out.position, numeric) < 1e-6);
        }
        for (int inst = 0; inst < 200; ++inst) {
            auto pairs = random_pairs();
            auto out = optimal_position(pairs, {0, 0, 0});
            REQUIRE(out.constrained);
            // Relative check: gradient small against the size of its terms.
            double scale = 0.0;
            for (const auto& pr : pairs)
                scale += 2.0 * pr.weight * pr.alpha * (pr.alpha * norm(out.position) + norm(pr.p));
            CHECK(norm(fd_gradient(pairs, out.position, 1e-6)) < 1e-5 * scale);
            CHECK(distance(out.position, fd_newton_minimizer(pairs, {0, 0, 0}, 1e-4)) < 1e-6);
        }
    }
}

TEST_CASE("lawson reweighting") {
    auto make_pair = [](double dist, double voronoi, double feature) {
        ClosestPointPair pr;
        pr.distance = dist;
        pr.voronoi = voronoi;
        pr.feature = feature;
        return pr;
    };

    SUBCASE("equal distances in a flat region keep relative weights") {
        std::vector<ClosestPointPair> pairs{make_pair(0.5, 1.0, 0.0), make_pair(0.5, 1.0, 0.0)};
        lawson_update(pairs, WeightScheme::FeatureSensitive);
        CHECK(pairs[0].weight == pairs[1].weight);
        CHECK(pairs[0].weight > 0.0);
    }
    SUBCASE("doubling a distance doubles the relative weight") {
        std::vector<ClosestPointPair> pairs{make_pair(1.0, 1.0, 1.0), make_pair(2.0, 1.0, 1.0)};
        lawson_update(pairs, WeightScheme::Distance);
        CHECK(pairs[1].weight == doctest::Approx(2.0 * pairs[0].weight).epsilon(1e-15));
        pairs = {make_pair(1.0, 0.7, 2.0), make_pair(2.0, 0.7, 2.0)};
        lawson_update(pairs, WeightScheme::FeatureSensitive);
        CHECK(pairs[1].weight == doctest::Approx(2.0 * pairs[0].weight).epsilon(1e-15));
    }
    SUBCASE("feature intensity scales the factor") {
        std::vector<ClosestPointPair> pairs{make_pair(1.0, 1.0, 0.0), make_pair(1.0, 1.0, kPi)};
        lawson_update(pairs, WeightScheme::FeatureSensitive);
        CHECK(pairs[1].weight / pairs[0].weight ==
              doctest::Approx((kPi + 1e-3) / 1e-3).epsilon(1e-12));
    }
    SUBCASE("zero-distance pairs keep a positive weight") {
        std::vector<ClosestPointPair> pairs{make_pair(0.0, 1.0, 1.0), make_pair(1.0, 1.0, 1.0)};
        lawson_update(pairs, WeightScheme::Distance);
        CHECK(pairs[0].weight > 0.0);
        CHECK(pairs[1].weight == doctest::Approx(1.0));
    }
    SUBCASE("all-zero distances leave weights unchanged") {
        std::vector<ClosestPointPair> pairs{make_pair(0.0, 1.0, 1.0), make_pair(0.0, 2.0, 0.5)};
        pairs[0].weight = 0.25;
        pairs[1].weight = 4.0;
        lawson_update(pairs, WeightScheme::FeatureSensitive);
        CHECK(pairs[0].weight == 0.25);
        CHECK(pairs[1].weight == 4.0);
    }
}

TEST_CASE("pair building interpolates the feature field over the host element") {
    std::vector<Vec3> pos{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    std::vector<std::array<int, 3>> tris{{0, 1, 2}};
    HalfedgeMesh mesh(pos, tris);
    auto field = synthetic_field(mesh, {3.0, 6.0, 9.0});

    FidelityState state;
    state.input_tree.build({{pos[0], pos[1], pos[2], 0}});

    SUBCASE("facet sample at the barycenter gets the mean intensity") {
        SamplePoint s;
        s.kind = SampleKind::Facet;
        s.host = 0;
        s.position = triangle_centroid(pos[0], pos[1], pos[2]);
        s.voronoi_area = triangle_area(pos[0], pos[1], pos[2]);
        state.facet_samples[0] = {s};
        auto pairs = build_pairs(state, mesh, field, {0}, mesh.position(VertexHandle{0}));
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].feature == doctest::Approx(6.0).epsilon(1e-12));
        CHECK(pairs[0].alpha == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(pairs[0].distance < 1e-12);  // sample already on the input surface
        CHECK_FALSE(pairs[0].in_direction);
    }
    SUBCASE("edge sample gets the lerped intensity and share") {
        HalfedgeHandle h = mesh.find_halfedge({0}, {1});
        SamplePoint s;
        s.kind = SampleKind::Edge;
        s.host = mesh.edge(h).i;
        s.position = {0.25, 0, 0};  // t = 0.25 along (v0, v1)
        s.voronoi_area = 0.125;
        state.edge_samples[s.host] = {s};
        auto pairs = build_pairs(state, mesh, field, {0}, mesh.position(VertexHandle{0}));
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].alpha == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(pairs[0].feature == doctest::Approx(0.75 * 3.0 + 0.25 * 6.0).epsilon(1e-12));
    }
}

TEST_CASE("minimize vertex") {
    SUBCASE("flat grid is a fixed point") {
        auto g = testmesh::flat_grid(5);
        HalfedgeMesh input(g.positions, g.triangles);
        HalfedgeMesh working(g.positions, g.triangles);
        auto state = init_fidelity(input, working, 10.0, 3, 1.0);
        auto field = compute_feature_field(working);
        VertexHandle v{find_vertex(working, {0.5, 0.5, 0})};
        const Vec3 got = minimize_vertex(state, working, field, v, 2, 0.9);
        CHECK(distance(got, working.position(v)) < 1e-9);
    }
    SUBCASE("one iteration at full step equals the closed-form solve") {
        auto g = testmesh::flat_grid(5);
        HalfedgeMesh input(g.positions, g.triangles);
        auto lifted = g;
        const int vid = 2 * 5 + 2;  // (0.5, 0.5, 0)
        lifted.positions[vid].z += 0.03;
        HalfedgeMesh working(lifted.positions, lifted.triangles);
        auto state = init_fidelity(input, working, 10.0, 3, 1.0);
        auto field = compute_feature_field(working);
        const VertexHandle v{vid};

        auto pairs = build_pairs(state, working, field, v, working.position(v));
        lawson_update(pairs, WeightScheme::FeatureSensitive);
        auto expected = optimal_position(pairs, working.position(v));
        REQUIRE(expected.constrained);
        const Vec3 got = minimize_vertex(state, working, field, v, 1, 1.0);
        CHECK(got == expected.position);  // same single solve, bit for bit

        // The flat input pulls the lifted vertex back into the plane; the
        // tangential position barely moves.
        CHECK(std::abs(got.z) < 1e-9);
        CHECK(std::abs(got.x - 0.5) < 0.01);
        CHECK(std::abs(got.y - 0.5) < 0.01);
    }
    SUBCASE("perturbed cube corner is recovered") {
        auto c = testmesh::cube_grid(5);
        HalfedgeMesh input(c.positions, c.triangles);
        auto dented = c;
        int corner = -1;
        for (size_t i = 0; i < dented.positions.size(); ++i)
            if (norm(dented.positions[i]) < 1e-12) corner = int(i);
        REQUIRE(corner >= 0);
        const double s = 0.05 / std::sqrt(3.0);  // inward by 0.05 along the diagonal
        dented.positions[corner] = {s, s, s};
        HalfedgeMesh working(dented.positions, dented.triangles);
        auto state = init_fidelity(input, working, 10.0, 7, 1.0);
        auto field = compute_feature_field(working);
        const Vec3 got = minimize_vertex(state, working, field, {corner}, 2, 0.9);
        CHECK(distance(got, {0, 0, 0}) < 0.005);
    }
    SUBCASE("feature-sensitive weights recover creases better than plain Lawson") {
        auto clean = testmesh::cube_grid(5);
        auto jittered = testmesh::jitter_positions(clean, 0.02, 17);
        HalfedgeMesh input(clean.positions, clean.triangles);
        HalfedgeMesh working(jittered.positions, jittered.triangles);
        auto state = init_fidelity(input, working, 10.0, 5, 1.0);
        auto field = compute_feature_field(working);

        // Vertices that sit on a cube edge (not corner) in the clean mesh.
        std::vector<int> crease_ids;
        for (size_t i = 0; i < clean.positions.size(); ++i) {
            int extreme = 0;
            for (int k = 0; k < 3; ++k) {
                double x = clean.positions[i][k];
                if (x == 0.0 || x == 1.0) ++extreme;
            }
            if (extreme == 2) crease_ids.push_back(int(i));
        }
        REQUIRE(crease_ids.size() == 36);

        auto mean_crease_dist = [&](WeightScheme scheme) {
            double sum = 0.0;
            for (int vi : crease_ids)
                sum += cube_crease_distance(
                    minimize_vertex(state, working, field, {vi}, 2, 0.9, scheme));
            return sum / double(crease_ids.size());
        };
        const double with_features = mean_crease_dist(WeightScheme::FeatureSensitive);
        const double plain = mean_crease_dist(WeightScheme::Distance);
        CHECK(with_features < plain);
        // Both should still have improved on the jittered state.
        double before = 0.0;
        for (int vi : crease_ids)
            before += cube_crease_distance(working.position(VertexHandle{vi}));
        before /= double(crease_ids.size());
        CHECK(with_features < before);
    }
    SUBCASE("built pairs satisfy the documented invariants") {
        auto g = testmesh::flat_grid(5, 0.03, 4);
        HalfedgeMesh input(g.positions, g.triangles);
        HalfedgeMesh working(g.positions, g.triangles);
        auto state = init_fidelity(input, working, 10.0, 9, 1.0);
        auto field = compute_feature_field(working);
        VertexHandle v{find_vertex(working, g.positions[2 * 5 + 2])};
        auto pairs = build_pairs(state, working, field, v, working.position(v));
        REQUIRE(pairs.size() > 10);
        bool saw_in = false, saw_out = false;
        for (const auto& pr : pairs) {
            CHECK(pr.weight == 1.0);
            CHECK(pr.alpha >= -1e-12);
            CHECK(pr.alpha <= 1.0 + 1e-12);
            CHECK(pr.distance >= 0.0);
            CHECK(pr.voronoi > 0.0);
            CHECK(std::isfinite(pr.feature));
            (pr.in_direction ? saw_in : saw_out) = true;
        }
        CHECK(saw_in);
        CHECK(saw_out);
    }
}
