#include "minangle/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "minangle/fidelity.hpp"
#include "minangle/geometry.hpp"

namespace minangle {

namespace {

void fill_mesh_metrics(QualityReport& rep, const HalfedgeMesh& mesh) {
    rep.n_vertices = mesh.n_vertices();
    rep.n_facets = mesh.n_facets();
    if (rep.n_facets == 0) return;

    double min_angle = kPi, max_angle = 0.0;
    double sum_min = 0.0;
    long long below_30 = 0;
    double q_min = 1.0, q_sum = 0.0;
    const double thirty = deg_to_rad(30.0);
    mesh.for_each_facet([&](FacetHandle f) {
        const auto p = mesh.facet_points(f);
        const std::array<double, 3> angles{corner_angle(p[0], p[1], p[2]),
                                           corner_angle(p[1], p[2], p[0]),
                                           corner_angle(p[2], p[0], p[1])};
        double facet_min = kPi;
        for (const double a : angles) {
            facet_min = std::min(facet_min, a);
            min_angle = std::min(min_angle, a);
            max_angle = std::max(max_angle, a);
            if (a < thirty) ++below_30;
            const int bin = std::min(59, static_cast<int>(rad_to_deg(a) / 3.0));
            ++rep.angle_histogram[static_cast<std::size_t>(std::max(0, bin))];
        }
        sum_min += facet_min;
        const double q = triangle_quality(p[0], p[1], p[2]);
        q_min = std::min(q_min, q);
        q_sum += q;
    });
    rep.min_angle_deg = rad_to_deg(min_angle);
    rep.max_angle_deg = rad_to_deg(max_angle);
    rep.avg_min_angle_deg = rad_to_deg(sum_min / rep.n_facets);
    rep.below_30_percent = 100.0 * double(below_30) / (3.0 * rep.n_facets);
    rep.q_min = q_min;
    rep.q_avg = q_sum / rep.n_facets;

    int valence_567 = 0;
    mesh.for_each_vertex([&](VertexHandle v) {
        const std::size_t valence = mesh.vertex_ring(v).size();
        if (valence >= 5 && valence <= 7) ++valence_567;
    });
    if (rep.n_vertices > 0)
        rep.valence_567_percent = 100.0 * valence_567 / double(rep.n_vertices);
}

void fill_distances(QualityReport& rep, const HalfedgeMesh& input, const HalfedgeMesh& result,
                    const RemeshConfig& cfg) {
    if (input.n_facets() == 0 || result.n_facets() == 0) return;
    const OracleResult oracle = oracle_hausdorff(result, input, 10 * cfg.samples_per_facet);
    const double scale = 100.0 / input.bbox_diagonal();
    rep.hausdorff_percent = scale * oracle.hausdorff;
    rep.hausdorff_out_percent = scale * oracle.hausdorff_ab;
    rep.hausdorff_in_percent = scale * oracle.hausdorff_ba;
    rep.rms_percent = scale * oracle.rms;
    rep.rms_out_percent = scale * oracle.rms_ab;
    rep.rms_in_percent = scale * oracle.rms_ba;
}

}  // namespace

QualityReport compute_report(const HalfedgeMesh& input, const HalfedgeMesh& result,
                             const RemeshConfig& cfg) {
    QualityReport rep;
    rep.theta_deg = cfg.theta_deg;
    rep.delta_abs = cfg.delta_fraction * input.bbox_diagonal();
    fill_mesh_metrics(rep, result);
    fill_distances(rep, input, result, cfg);
    return rep;
}

QualityReport compute_report(const HalfedgeMesh& input, const RemeshResult& run,
                             const RemeshConfig& cfg) {
    QualityReport rep = compute_report(input, run.mesh, cfg);
    rep.delta_abs = run.delta_abs;
    rep.stats = run.stats;
    rep.timings = run.timings;
    rep.termination = run.termination;
    return rep;
}

const char* termination_name(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::AngleGoalReached: return "angle_goal_reached";
        case TerminationReason::VertexBudget: return "vertex_budget";
        case TerminationReason::Stalled: return "stalled";
    }
    return "unknown";
}

std::string report_to_json(const QualityReport& rep) {
    nlohmann::ordered_json j;
    j["schema_version"] = rep.schema_version;
    j["mesh"] = {{"vertices", rep.n_vertices}, {"facets", rep.n_facets}};
    j["angles_deg"] = {{"min", rep.min_angle_deg},
                       {"max", rep.max_angle_deg},
                       {"average_min", rep.avg_min_angle_deg},
                       {"below_30_percent", rep.below_30_percent},
                       {"histogram_bin_deg", 3},
                       {"histogram", rep.angle_histogram}};
    j["quality"] = {{"min", rep.q_min}, {"avg", rep.q_avg}};
    j["valence_567_percent"] = rep.valence_567_percent;
    j["distance_percent_bbox"] = {{"hausdorff", rep.hausdorff_percent},
                                  {"hausdorff_out", rep.hausdorff_out_percent},
                                  {"hausdorff_in", rep.hausdorff_in_percent},
                                  {"rms", rep.rms_percent},
                                  {"rms_out", rep.rms_out_percent},
                                  {"rms_in", rep.rms_in_percent}};
    j["budget"] = {{"theta_deg", rep.theta_deg}, {"delta_abs", rep.delta_abs}};
    j["operations"] = {{"simplification_collapses", rep.stats.simplification_collapses},
                       {"greedy_collapses", rep.stats.greedy_collapses},
                       {"greedy_relocations", rep.stats.greedy_relocations},
                       {"greedy_splits", rep.stats.greedy_splits},
                       {"refinement_relocations", rep.stats.refinement_relocations},
                       {"final_relocations", rep.stats.final_relocations},
                       {"frozen_corners", rep.stats.frozen_corners},
                       {"frozen_vertices", rep.stats.frozen_vertices}};
    j["timings_seconds"] = {{"simplify", rep.timings.simplify_seconds},
                            {"improve", rep.timings.improve_seconds},
                            {"relocate", rep.timings.relocate_seconds},
                            {"total", rep.timings.total_seconds}};
    j["termination"] = termination_name(rep.termination);
    return j.dump(2) + "\n";
}

std::string histogram_to_csv(const QualityReport& rep) {
    std::ostringstream out;
    out << "bin_start_deg,bin_end_deg,count\n";
    for (std::size_t i = 0; i < rep.angle_histogram.size(); ++i)
        out << 3 * i << "," << 3 * (i + 1) << "," << rep.angle_histogram[i] << "\n";
    return out.str();
}

}  // namespace minangle
