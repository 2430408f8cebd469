#pragma once

#include <charconv>
#include <cstddef>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "jackson/analytics.hpp"
#include "jackson/reduce.hpp"
#include "jackson/sim.hpp"

// Serialization shared by the CLI and the tests. All numeric text is
// locale-independent; CSV values carry 17 significant digits so they
// round-trip exactly.

namespace jackson {

/// Full round-trip decimal formatting via std::to_chars.
inline std::string format_full(double value) {
    char buffer[64];
    const auto result =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

/// Compact fixed formatting for SVG coordinates.
inline std::string format_coord(double value) {
    char buffer[64];
    const auto result =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::fixed, 2);
    return std::string(buffer, result.ptr);
}

inline nlohmann::json steady_state_to_json(const SteadyState& s) {
    return {{"arrival_rates", s.arrival_rates}, {"queue_lengths", s.queue_lengths},
            {"sojourn_times", s.sojourn_times}, {"delays", s.delays},
            {"stay_times", s.stay_times},       {"utilizations", s.utilizations}};
}

inline nlohmann::json sim_metrics_to_json(const SimMetrics& v) {
    return {{"mean_queue_lengths", v.queue_lengths},
            {"mean_system_counts", v.system_counts},
            {"mean_sojourns", v.sojourns},
            {"mean_delays", v.delays},
            {"mean_stays", v.stays},
            {"throughputs", v.throughputs},
            {"arrival_rates", v.arrival_rates}};
}

inline nlohmann::json sim_stats_to_json(const SimStats& stats) {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& rep : stats.replications)
        reps.push_back({{"entries", rep.entries},
                        {"exits", rep.exits},
                        {"in_system_at_horizon", rep.in_system_at_horizon}});
    return {{"mean", sim_metrics_to_json(stats.mean)},
            {"half_width", sim_metrics_to_json(stats.half_width)},
            {"replications", std::move(reps)}};
}

inline nlohmann::json equivalence_to_json(const EquivalenceReport& report) {
    return {{"max_alpha_diff", report.max_alpha_diff},
            {"arrival_rate_diffs", report.arrival_rate_diffs},
            {"queue_length_diffs", report.queue_length_diffs},
            {"sojourn_diffs", report.sojourn_diffs},
            {"delay_diffs", report.delay_diffs},
            {"stay_time_diffs", report.stay_time_diffs}};
}

/// M x M contribution matrix as CSV with 1-based row and column labels.
/// Roundoff negatives within -1e-12 are clamped to zero here, at the
/// presentation layer only.
inline std::string alpha_to_csv(const Matrix& alpha) {
    std::string csv = "alpha";
    for (std::size_t j = 0; j < alpha.cols(); ++j) csv += "," + std::to_string(j + 1);
    csv += "\n";
    for (std::size_t i = 0; i < alpha.rows(); ++i) {
        csv += std::to_string(i + 1);
        for (std::size_t j = 0; j < alpha.cols(); ++j)
            csv += "," + format_full(clamp_contribution(alpha(i, j)));
        csv += "\n";
    }
    return csv;
}

}  // namespace jackson
