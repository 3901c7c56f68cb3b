#pragma once

#include <array>
#include <string>

#include "minangle/halfedge_mesh.hpp"
#include "minangle/pipeline.hpp"

namespace minangle {

/// Quality metrics of a remeshed surface measured against the input it
/// approximates, plus the statistics of the run that produced it. Angles are
/// taken per facet corner with the non-throwing corner angle, so degenerate
/// facets contribute honest 0 and 180 degree entries instead of aborting.
struct QualityReport {
    int schema_version = 1;

    int n_vertices = 0;
    int n_facets = 0;

    // Interior angles in degrees over all 3F corners.
    double min_angle_deg = 0.0;
    double max_angle_deg = 0.0;
    double avg_min_angle_deg = 0.0;  // mean over facets of each facet's smallest angle
    double below_30_percent = 0.0;   // share of corners under 30 degrees, in percent
    std::array<long long, 60> angle_histogram{};  // 3-degree bins covering [0, 180]

    // Triangle quality 2*sqrt(3)*area/(half_perimeter*longest_edge): 1 for
    // an equilateral triangle, 0 for a degenerate one.
    double q_min = 0.0;
    double q_avg = 0.0;

    // Share of vertices with valence 5, 6, or 7, in percent.
    double valence_567_percent = 0.0;

    // Surface error against the input from the brute-force oracle at ten
    // times the maintained sampling density, as a percentage of the input
    // bounding-box diagonal. "out" measures result -> input, "in" the
    // reverse; the headline values take the max (Hausdorff) and the pooled
    // sample set (RMS).
    double hausdorff_percent = 0.0;
    double hausdorff_out_percent = 0.0;
    double hausdorff_in_percent = 0.0;
    double rms_percent = 0.0;
    double rms_out_percent = 0.0;
    double rms_in_percent = 0.0;

    // Echo of the run: budgets, operation counts, phase timings, and how the
    // pass ended. Zero/default when the report is computed without a run.
    double theta_deg = 0.0;
    double delta_abs = 0.0;
    RemeshStats stats;
    PhaseTimings timings;
    TerminationReason termination = TerminationReason::AngleGoalReached;
};

/// Measures `result` against `input`. Only the mesh metrics and oracle
/// distances are filled; run echo fields keep their defaults apart from
/// theta/delta taken from `cfg`.
QualityReport compute_report(const HalfedgeMesh& input, const HalfedgeMesh& result,
                             const RemeshConfig& cfg);

/// As above, measuring `run.mesh`, and copies the run's statistics, phase
/// timings, termination reason, and resolved error budget into the report.
QualityReport compute_report(const HalfedgeMesh& input, const RemeshResult& run,
                             const RemeshConfig& cfg);

/// Serializes the report as a versioned JSON document (stable field order).
std::string report_to_json(const QualityReport& report);

/// Angle histogram as CSV with header bin_start_deg,bin_end_deg,count.
std::string histogram_to_csv(const QualityReport& report);

const char* termination_name(TerminationReason reason);

}  // namespace minangle
