#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "jackson/analytics.hpp"
#include "jackson/errors.hpp"
#include "jackson/model.hpp"
#include "jackson/partition.hpp"

// Impact analysis for exogenous-arrival and service-rate increments.
// Arrival increments act linearly through the contribution matrix, so a
// receiver sweep shares one factorization of I - R' and never re-factors.

namespace jackson {

struct IncrementScenario {
    QueueId receiver;
    double delta = 0.0;  // increment in jobs per unit time; zero is a legal no-op probe
};

struct ImpactReport {
    SteadyState baseline;
    SteadyState perturbed;
    std::vector<double> arrival_rate_deltas;
    std::vector<double> queue_length_deltas;
    std::vector<double> sojourn_deltas;
    std::vector<double> delay_deltas;
    /// Largest gap between the re-solved lambda and the analytic shortcut
    /// lambda + delta * alpha column. The identity is exact, not first
    /// order, so this stays at roundoff scale.
    double shortcut_max_error = 0.0;
};

namespace detail {

inline void require_nonnegative_delta(double delta) {
    if (delta < 0.0)
        throw ValidationError({{IssueKind::negative_rate, "increment must be nonnegative", 0, delta}});
}

}  // namespace detail

/// Re-solves the traffic equations with rho[receiver] += delta and reports
/// per-queue changes. Requires both the baseline and the perturbed system to
/// be stable.
inline ImpactReport arrival_increment_impact(const NetworkModel& model,
                                             const IncrementScenario& scenario) {
    detail::require_nonnegative_delta(scenario.delta);
    const std::size_t m = model.size();
    const LuSolver lu(detail::traffic_system(model));
    std::vector<double> lambda = lu.solve(model.exo_rates);
    if (auto bad = detail::unstable_queues(model, lambda); !bad.empty())
        throw UnstableModel(std::move(bad));

    std::vector<double> rho = model.exo_rates;
    rho[scenario.receiver.index] += scenario.delta;
    std::vector<double> perturbed = lu.solve(rho);

    // alpha column of the receiver, from the same factorization.
    std::vector<double> unit(m, 0.0);
    unit[scenario.receiver.index] = 1.0;
    const std::vector<double> column = lu.solve(unit);

    std::vector<std::size_t> destabilized;
    for (std::size_t q = 0; q < m; ++q)
        if (!(perturbed[q] < model.service_rates[q])) destabilized.push_back(q);
    if (!destabilized.empty()) throw PerturbationDestabilizes(std::move(destabilized));

    ImpactReport report;
    report.shortcut_max_error = 0.0;
    for (std::size_t q = 0; q < m; ++q) {
        const double shortcut = lambda[q] + scenario.delta * column[q];
        report.shortcut_max_error =
            std::max(report.shortcut_max_error, std::abs(shortcut - perturbed[q]));
    }
    report.baseline = detail::metrics_from_rates(model, std::move(lambda));
    report.perturbed = detail::metrics_from_rates(model, std::move(perturbed));
    report.arrival_rate_deltas.resize(m);
    report.queue_length_deltas.resize(m);
    report.sojourn_deltas.resize(m);
    report.delay_deltas.resize(m);
    for (std::size_t q = 0; q < m; ++q) {
        report.arrival_rate_deltas[q] =
            report.perturbed.arrival_rates[q] - report.baseline.arrival_rates[q];
        report.queue_length_deltas[q] =
            report.perturbed.queue_lengths[q] - report.baseline.queue_lengths[q];
        report.sojourn_deltas[q] =
            report.perturbed.sojourn_times[q] - report.baseline.sojourn_times[q];
        report.delay_deltas[q] = report.perturbed.delays[q] - report.baseline.delays[q];
    }
    return report;
}

/// Target-queue outcome of incrementing one receiver's exogenous rate.
/// Destabilizing receivers are flagged rather than dropped so sweeps can
/// report them.
struct ReceiverImpact {
    std::size_t receiver = 0;
    bool destabilizes = false;
    std::vector<std::size_t> destabilized_queues;
    double arrival_delta = 0.0;   // alpha(target, receiver) * delta, exact
    double arrival_rate = 0.0;    // lambda_target(delta_r)
    double queue_length = 0.0;    // L_target(delta_r)
    double sojourn = 0.0;         // W_target(delta_r)
    double delay = 0.0;           // D_target(delta_r)
};

/// One pass over the receivers sharing the baseline factorization. The
/// baseline must be stable; per-receiver instability is flagged in the rows.
inline std::vector<ReceiverImpact> receiver_sweep(const NetworkModel& model, QueueId target,
                                                  const std::vector<std::size_t>& receivers,
                                                  double delta) {
    detail::require_nonnegative_delta(delta);
    const std::size_t m = model.size();
    const LuSolver lu(detail::traffic_system(model));
    const std::vector<double> lambda = lu.solve(model.exo_rates);
    if (auto bad = detail::unstable_queues(model, lambda); !bad.empty())
        throw UnstableModel(std::move(bad));

    std::vector<ReceiverImpact> sweep;
    sweep.reserve(receivers.size());
    std::vector<double> unit(m, 0.0);
    for (std::size_t r : receivers) {
        unit[r] = 1.0;
        const std::vector<double> column = lu.solve(unit);
        unit[r] = 0.0;

        ReceiverImpact row;
        row.receiver = r;
        for (std::size_t q = 0; q < m; ++q)
            if (!(lambda[q] + delta * column[q] < model.service_rates[q]))
                row.destabilized_queues.push_back(q);
        row.destabilizes = !row.destabilized_queues.empty();
        row.arrival_delta = delta * column[target.index];
        row.arrival_rate = lambda[target.index] + row.arrival_delta;
        if (!row.destabilizes) {
            const double mu = model.service_rates[target.index];
            const double lt = row.arrival_rate;
            row.queue_length = lt * lt / (mu * mu - mu * lt);
            row.sojourn = 1.0 / (mu - lt);
            row.delay = row.sojourn - 1.0 / mu;
        }
        sweep.push_back(std::move(row));
    }
    return sweep;
}

/// Max-over-cutset versus tail comparison of the target's perturbed metrics,
/// one report per metric, plus the underlying sweep rows.
struct MetricMajorization {
    MajorizationReport sojourn;
    MajorizationReport delay;
    MajorizationReport queue_length;
    std::vector<ReceiverImpact> sweep;
};

namespace detail {

inline MajorizationReport majorize_rows(const std::vector<ReceiverImpact>& sweep,
                                        const Partition& partition, std::size_t target,
                                        double ReceiverImpact::* metric) {
    MajorizationReport report;
    report.target = target;
    report.cutset_max = -std::numeric_limits<double>::infinity();
    double tail_max = 0.0;
    for (const auto& row : sweep) {
        const bool in_cutset =
            std::binary_search(partition.cutset.begin(), partition.cutset.end(), row.receiver);
        const double value = row.*metric;
        if (in_cutset) {
            if (value > report.cutset_max) {
                report.cutset_max = value;
                report.cutset_argmax = row.receiver;
            }
        } else {
            report.tail_values.emplace(row.receiver, value);
            tail_max = std::max(tail_max, value);
        }
    }
    report.slack = report.cutset_max - tail_max;
    report.holds = report.slack >= -kMajorizationSlackTol;
    return report;
}

}  // namespace detail

/// Sweeps every cutset and tail receiver with the same increment and checks
/// the three target-metric majorizations. Throws PerturbationDestabilizes
/// listing every receiver whose increment breaks stability.
inline MetricMajorization metric_increment_majorization(const NetworkModel& model, QueueId target,
                                                        const Partition& partition, double delta) {
    if (!std::binary_search(partition.head.begin(), partition.head.end(), target.index))
        throw TargetNotInHead(target.index);
    std::vector<std::size_t> receivers = partition.cutset;
    receivers.insert(receivers.end(), partition.tail.begin(), partition.tail.end());

    MetricMajorization out;
    out.sweep = receiver_sweep(model, target, receivers, delta);

    std::vector<std::size_t> destabilizing;
    for (const auto& row : out.sweep)
        if (row.destabilizes) destabilizing.push_back(row.receiver);
    if (!destabilizing.empty()) throw PerturbationDestabilizes(std::move(destabilizing));

    out.sojourn = detail::majorize_rows(out.sweep, partition, target.index, &ReceiverImpact::sojourn);
    out.delay = detail::majorize_rows(out.sweep, partition, target.index, &ReceiverImpact::delay);
    out.queue_length =
        detail::majorize_rows(out.sweep, partition, target.index, &ReceiverImpact::queue_length);
    return out;
}

/// Stay-time decrease per entry queue when the target's service rate grows
/// by delta_mu. Arrival rates do not change (service rates never enter the
/// traffic equations), only W_target does, so
/// delta_T = (W_before - W_after) * alpha(target, entry) >= 0 componentwise.
/// Returned as before minus after: a decrease in stay time is positive.
inline std::vector<double> service_increment_stay_impact(const NetworkModel& model, QueueId target,
                                                         double delta_mu) {
    detail::require_nonnegative_delta(delta_mu);
    const SteadyState before = steady_state(model);

    NetworkModel faster = model;
    faster.service_rates[target.index] += delta_mu;
    const SteadyState after = detail::metrics_from_rates(faster, before.arrival_rates);

    std::vector<double> decrease(model.size());
    for (std::size_t i = 0; i < model.size(); ++i)
        decrease[i] = before.stay_times[i] - after.stay_times[i];
    return decrease;
}

}  // namespace jackson
