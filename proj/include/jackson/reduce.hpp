#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "jackson/analytics.hpp"
#include "jackson/errors.hpp"
#include "jackson/matrix.hpp"
#include "jackson/model.hpp"

// Structure-preserving reduction: the tail is eliminated and its routing
// mass folded into the cutset self-block, leaving the contribution matrix
// over the preserved queues exactly unchanged.

namespace jackson {

inline constexpr double kEquivalenceTol = 1e-9;

struct ReducedModel {
    NetworkModel model;                  // over the D = |head| + |cutset| preserved queues
    std::vector<std::size_t> index_map;  // preserved index -> original index
    std::optional<Matrix> loop_correction;  // L_C added to the cutset block; absent if tail empty
    bool tail_arrivals_dropped = false;  // original tail had exogenous traffic and it was dropped
    std::optional<std::vector<double>> folded_arrivals;  // cutset rates after folding, if applied
};

namespace detail {

inline Matrix block(const Matrix& r, const std::vector<std::size_t>& rows,
                    const std::vector<std::size_t>& cols) {
    return submatrix(r, rows, cols);
}

}  // namespace detail

/// Eliminates the tail: R* keeps the head and cutset blocks bit-identical
/// and adds L_C = R_CT (I - R_TT)^{-1} R_TC to the cutset self-block. The
/// preserved queues keep their service and exogenous rates; tail exogenous
/// arrivals are dropped (flagged) unless fold_tail_arrivals is applied.
/// The contribution-equivalence invariant is checked before returning.
inline ReducedModel reduce(const NetworkModel& model, const Partition& partition) {
    ReducedModel out;
    out.index_map = partition.head;
    out.index_map.insert(out.index_map.end(), partition.cutset.begin(), partition.cutset.end());

    if (partition.tail.empty()) {
        out.model = model;
        return out;
    }

    const Matrix& r = model.routing.entries();
    const Matrix r_tt = detail::block(r, partition.tail, partition.tail);
    const Matrix r_tc = detail::block(r, partition.tail, partition.cutset);
    const Matrix r_ct = detail::block(r, partition.cutset, partition.tail);

    // (I - R_TT)^{-1} R_TC by LU solve against the R_TC columns; the
    // explicit inverse is never formed.
    Matrix tail_system = Matrix::identity(partition.tail.size());
    for (std::size_t i = 0; i < partition.tail.size(); ++i)
        for (std::size_t j = 0; j < partition.tail.size(); ++j) tail_system(i, j) -= r_tt(i, j);
    Matrix absorbed(0, 0);
    try {
        absorbed = LuSolver(tail_system).solve(r_tc);
    } catch (const SingularSystem&) {
        throw SingularTailBlock();
    }
    const Matrix loop = r_ct * absorbed;

    const std::size_t d = out.index_map.size();
    const std::size_t h = partition.head.size();
    Matrix reduced(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) reduced(i, j) = r(out.index_map[i], out.index_map[j]);
    for (std::size_t i = 0; i < partition.cutset.size(); ++i)
        for (std::size_t j = 0; j < partition.cutset.size(); ++j)
            reduced(h + i, h + j) += loop(i, j);

    out.loop_correction = loop;
    out.model.routing = RoutingMatrix(std::move(reduced));
    out.model.exo_rates.reserve(d);
    out.model.service_rates.reserve(d);
    for (std::size_t q : out.index_map) {
        out.model.exo_rates.push_back(model.exo_rates[q]);
        out.model.service_rates.push_back(model.service_rates[q]);
        if (!model.names.empty()) out.model.names.push_back(model.names[q]);
    }
    for (std::size_t t : partition.tail)
        if (model.exo_rates[t] > 0.0) out.tail_arrivals_dropped = true;

    const Matrix alpha = contribution_matrix(model).alpha;
    const Matrix alpha_reduced = contribution_matrix(out.model).alpha;
    const Matrix preserved = detail::block(alpha, out.index_map, out.index_map);
    if (max_abs_diff(alpha_reduced, preserved) > kEquivalenceTol)
        throw Error("reduction failed the contribution-equivalence check");
    return out;
}

/// Replaces the cutset exogenous rates with
/// rho*_C = rho_C + R_TC' (I - R_TT')^{-1} rho_T, which is exactly the tail
/// elimination applied to the traffic equations. Preserved-queue arrival
/// rates then match the original model; head rates are untouched.
inline ReducedModel fold_tail_arrivals(const NetworkModel& model, const Partition& partition,
                                       ReducedModel reduced) {
    if (partition.tail.empty()) {
        reduced.folded_arrivals.emplace(std::vector<double>{});
        return reduced;
    }
    const Matrix& r = model.routing.entries();
    const Matrix r_tt = detail::block(r, partition.tail, partition.tail);
    const Matrix r_tc = detail::block(r, partition.tail, partition.cutset);

    Matrix tail_system = Matrix::identity(partition.tail.size());
    for (std::size_t i = 0; i < partition.tail.size(); ++i)
        for (std::size_t j = 0; j < partition.tail.size(); ++j)
            tail_system(i, j) -= r_tt(j, i);  // I - R_TT'
    std::vector<double> rho_tail;
    rho_tail.reserve(partition.tail.size());
    for (std::size_t t : partition.tail) rho_tail.push_back(model.exo_rates[t]);

    std::vector<double> pushed;
    try {
        pushed = LuSolver(std::move(tail_system)).solve(rho_tail);
    } catch (const SingularSystem&) {
        throw SingularTailBlock();
    }

    const std::size_t h = partition.head.size();
    std::vector<double> folded;
    folded.reserve(partition.cutset.size());
    for (std::size_t j = 0; j < partition.cutset.size(); ++j) {
        double extra = 0.0;
        for (std::size_t i = 0; i < partition.tail.size(); ++i) extra += r_tc(i, j) * pushed[i];
        folded.push_back(model.exo_rates[partition.cutset[j]] + extra);
        reduced.model.exo_rates[h + j] = folded.back();
    }
    reduced.folded_arrivals = std::move(folded);
    reduced.tail_arrivals_dropped = false;
    return reduced;
}

/// Deviations between the original and reduced models over the preserved
/// queues. Contribution weights match by construction; arrival rates match
/// only after folding; stay times are not preserved by the reduction and
/// their gap is reported rather than hidden.
struct EquivalenceReport {
    double max_alpha_diff = 0.0;
    std::vector<double> arrival_rate_diffs;
    std::vector<double> queue_length_diffs;
    std::vector<double> sojourn_diffs;
    std::vector<double> delay_diffs;
    std::vector<double> stay_time_diffs;
};

inline EquivalenceReport equivalence_report(const NetworkModel& original,
                                            const ReducedModel& reduced) {
    const Matrix alpha = contribution_matrix(original).alpha;
    const Matrix alpha_reduced = contribution_matrix(reduced.model).alpha;
    const Matrix preserved = detail::block(alpha, reduced.index_map, reduced.index_map);

    EquivalenceReport report;
    report.max_alpha_diff = max_abs_diff(alpha_reduced, preserved);

    const SteadyState full = steady_state(original);
    const SteadyState small = steady_state(reduced.model);
    const std::size_t d = reduced.index_map.size();
    report.arrival_rate_diffs.resize(d);
    report.queue_length_diffs.resize(d);
    report.sojourn_diffs.resize(d);
    report.delay_diffs.resize(d);
    report.stay_time_diffs.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t q = reduced.index_map[i];
        report.arrival_rate_diffs[i] = small.arrival_rates[i] - full.arrival_rates[q];
        report.queue_length_diffs[i] = small.queue_lengths[i] - full.queue_lengths[q];
        report.sojourn_diffs[i] = small.sojourn_times[i] - full.sojourn_times[q];
        report.delay_diffs[i] = small.delays[i] - full.delays[q];
        report.stay_time_diffs[i] = small.stay_times[i] - full.stay_times[q];
    }
    return report;
}

}  // namespace jackson
