#include <doctest.h>

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "minangle/fidelity.hpp"
#include "minangle/report.hpp"
#include "support/meshes.hpp"

using namespace minangle;

namespace {

long long histogram_total(const QualityReport& rep) {
    return std::accumulate(rep.angle_histogram.begin(), rep.angle_histogram.end(), 0LL);
}

// Quality of a right isoceles triangle (legs 1, hypotenuse sqrt(2)):
// 2*sqrt(3)*0.5 / ((1 + sqrt(2)/2) * sqrt(2)).
constexpr double kRightIsocelesQuality = 0.7174389352143114;

}  // namespace

TEST_CASE("a mesh reported against itself is the perfect report") {
    const auto ico = testmesh::icosahedron();
    const HalfedgeMesh mesh(ico.positions, ico.triangles);
    const QualityReport rep = compute_report(mesh, mesh, RemeshConfig{});

    CHECK(rep.n_vertices == 12);
    CHECK(rep.n_facets == 20);
    CHECK(rep.min_angle_deg == doctest::Approx(60.0).epsilon(1e-9));
    CHECK(rep.max_angle_deg == doctest::Approx(60.0).epsilon(1e-9));
    CHECK(rep.avg_min_angle_deg == doctest::Approx(60.0).epsilon(1e-9));
    CHECK(rep.below_30_percent == 0.0);
    CHECK(rep.q_min == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.q_avg == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.q_min <= rep.q_avg);
    CHECK(rep.valence_567_percent == 100.0);  // every icosahedron vertex has valence 5

    // Corners compute to 60 degrees give or take one ulp, so they may fall on
    // either side of the bin edge at 60.
    CHECK(rep.angle_histogram[19] + rep.angle_histogram[20] == 60);
    CHECK(histogram_total(rep) == 3 * rep.n_facets);

    // Lattice samples reconstruct their own facet through different
    // arithmetic, so self-distance is roundoff, not exactly zero.
    CHECK(rep.hausdorff_percent < 1e-12);
    CHECK(rep.hausdorff_out_percent < 1e-12);
    CHECK(rep.hausdorff_in_percent < 1e-12);
    CHECK(rep.rms_percent < 1e-12);
}

TEST_CASE("flat grid metrics pin the right-isoceles values") {
    const auto grid = testmesh::flat_grid(4);
    const HalfedgeMesh mesh(grid.positions, grid.triangles);
    const QualityReport rep = compute_report(mesh, mesh, RemeshConfig{});

    CHECK(rep.n_vertices == 16);
    CHECK(rep.n_facets == 18);
    CHECK(rep.min_angle_deg == doctest::Approx(45.0).epsilon(1e-12));
    CHECK(rep.max_angle_deg == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(rep.avg_min_angle_deg == doctest::Approx(45.0).epsilon(1e-12));
    CHECK(rep.below_30_percent == 0.0);
    CHECK(rep.q_min == doctest::Approx(kRightIsocelesQuality).epsilon(1e-12));
    CHECK(rep.q_avg == doctest::Approx(kRightIsocelesQuality).epsilon(1e-12));
    // Only the four interior vertices reach valence 6; the boundary stays
    // at 2, 3, or 4.
    CHECK(rep.valence_567_percent == doctest::Approx(25.0).epsilon(1e-12));

    CHECK(rep.angle_histogram[15] == 36);  // two 45-degree corners per facet
    CHECK(rep.angle_histogram[30] == 18);  // one 90-degree corner per facet
    CHECK(histogram_total(rep) == 54);
}

TEST_CASE("degenerate facets land in the histogram instead of aborting") {
    // Vertex 2 sits on the segment 0-1, so facet {0, 2, 1} has zero area.
    const std::vector<Vec3> positions{{0, 0, 0}, {1, 0, 0}, {0.5, 0, 0}, {0, 1, 0}};
    const std::vector<std::array<int, 3>> triangles{{0, 1, 3}, {0, 2, 1}};
    const HalfedgeMesh mesh(positions, triangles);
    const QualityReport rep = compute_report(mesh, mesh, RemeshConfig{});

    CHECK(rep.min_angle_deg == 0.0);
    CHECK(rep.max_angle_deg == doctest::Approx(180.0).epsilon(1e-12));
    CHECK(rep.q_min == 0.0);
    CHECK(histogram_total(rep) == 6);
    CHECK(rep.angle_histogram[0] == 2);   // the two collapsed corners
    CHECK(rep.angle_histogram[59] == 1);  // the flat cap clamps into the top bin
    CHECK(rep.min_angle_deg / 3.0 < 1.0);  // min sits in a populated bin
    CHECK(rep.angle_histogram[static_cast<int>(rep.min_angle_deg / 3.0)] > 0);
}

TEST_CASE("oracle distances keep their directions") {
    // B is half of A: every point of the triangle lies on the square, while
    // the square's far corner is sqrt(1/2) away from the hypotenuse.
    const auto grid = testmesh::flat_grid(2);
    const HalfedgeMesh square(grid.positions, grid.triangles);
    const HalfedgeMesh triangle({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}},
                                {std::array<int, 3>{0, 1, 2}});

    const OracleResult oracle = oracle_hausdorff(square, triangle, 100);
    CHECK(oracle.hausdorff_ab == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(oracle.hausdorff_ba < 1e-12);
    CHECK(oracle.hausdorff == oracle.hausdorff_ab);
    CHECK(oracle.rms_ba < 1e-12);
    CHECK(oracle.rms_ab > 0.1);
    CHECK(oracle.rms > 0.0);
    CHECK(oracle.rms < oracle.rms_ab);  // pooling dilutes with the zero direction
}

TEST_CASE("the report echoes the run it measures") {
    RemeshConfig cfg;
    cfg.theta_deg = 0.0;  // no surgery: the queue never fills
    cfg.initial_simplification_enabled = false;
    const auto grid = testmesh::flat_grid(3);
    const HalfedgeMesh input(grid.positions, grid.triangles);
    const RemeshResult run = remesh(input, cfg);
    const QualityReport rep = compute_report(input, run, cfg);

    CHECK(rep.n_vertices == 9);
    CHECK(rep.termination == TerminationReason::AngleGoalReached);
    CHECK(rep.delta_abs == run.delta_abs);
    CHECK(rep.stats.final_relocations == run.stats.final_relocations);
    CHECK(rep.timings.total_seconds >= 0.0);
    CHECK(rep.hausdorff_percent <= 100.0 * cfg.delta_fraction * 1.05);

    SUBCASE("as a json document") {
        const auto j = nlohmann::json::parse(report_to_json(rep));
        CHECK(j["schema_version"] == 1);
        CHECK(j["mesh"]["vertices"] == 9);
        CHECK(j["mesh"]["facets"] == 8);
        CHECK(j["angles_deg"]["histogram"].size() == 60);
        CHECK(j["angles_deg"]["min"].get<double>() ==
              doctest::Approx(rep.min_angle_deg).epsilon(1e-12));
        CHECK(j["budget"]["delta_abs"].get<double>() == rep.delta_abs);
        CHECK(j["operations"]["greedy_splits"] == 0);
        CHECK(j["termination"] == "angle_goal_reached");
        CHECK(j["timings_seconds"].contains("total"));
    }
    SUBCASE("as a histogram csv") {
        const std::string csv = histogram_to_csv(rep);
        CHECK(csv.rfind("bin_start_deg,bin_end_deg,count\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);
        // 45-degree corners of the eight right-isoceles facets: bin [45, 48).
        CHECK(csv.find("\n45,48,16\n") != std::string::npos);
    }
}
