#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "jackson/errors.hpp"
#include "jackson/matrix.hpp"
#include "jackson/model.hpp"

// Steady-state solution of the traffic equations and the mean performance
// metrics derived from it. All operations are pure functions of validated
// models; callers may invoke them concurrently.

namespace jackson {

/// alpha = (I - R')^{-1}. Entry alpha(i, j) scales exogenous arrivals at
/// queue j into total arrival rate at queue i. Nonnegative up to roundoff,
/// with diagonal entries >= 1. `residual` is max|(I - R') alpha - I|.
struct ContributionMatrix {
    Matrix alpha;
    double residual = 0.0;
};

struct StabilityReport {
    bool stable = false;
    std::vector<double> margins;  // mu_i - lambda_i
};

struct SteadyState {
    std::vector<double> arrival_rates;  // lambda
    std::vector<double> queue_lengths;  // mean number waiting, excludes the job in service
    std::vector<double> sojourn_times;  // W: waiting plus service at the queue
    std::vector<double> delays;         // D = W - 1/mu
    std::vector<double> stay_times;     // total network time by entry queue
    std::vector<double> utilizations;   // lambda / mu
};

namespace detail {

inline Matrix traffic_system(const NetworkModel& model) {
    const std::size_t m = model.size();
    Matrix a = Matrix::identity(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) -= model.routing(j, i);  // I - R'
    return a;
}

}  // namespace detail

/// Dense LU with partial pivoting is the production path; the truncated
/// Neumann series exists only as a test oracle. Throws SingularSystem when
/// a pivot falls below 1e-12 (a closed recurrent class).
inline ContributionMatrix contribution_matrix(const NetworkModel& model) {
    const Matrix system = detail::traffic_system(model);
    const LuSolver lu(system);
    ContributionMatrix out{lu.inverse(), 0.0};
    out.residual = max_abs_diff(system * out.alpha, Matrix::identity(model.size()));
    return out;
}

/// Solves lambda = R' lambda + rho.
inline std::vector<double> solve_traffic(const NetworkModel& model) {
    return LuSolver(detail::traffic_system(model)).solve(model.exo_rates);
}

/// Stable iff lambda_i < mu_i strictly for every queue; a zero margin counts
/// as unstable. Instability is a value here, not an error.
inline StabilityReport check_stability(const NetworkModel& model, std::span<const double> lambda) {
    StabilityReport report;
    report.margins.reserve(model.size());
    report.stable = true;
    for (std::size_t i = 0; i < model.size(); ++i) {
        report.margins.push_back(model.service_rates[i] - lambda[i]);
        if (!(report.margins.back() > 0.0)) report.stable = false;
    }
    return report;
}

namespace detail {

inline std::vector<std::size_t> unstable_queues(const NetworkModel& model,
                                                std::span<const double> lambda) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < model.size(); ++i)
        if (!(lambda[i] < model.service_rates[i])) out.push_back(i);
    return out;
}

/// Metric formulas given lambda; shared by the baseline and perturbed paths.
/// Callers must have rejected lambda >= mu already, otherwise the closed
/// forms silently produce garbage.
inline SteadyState metrics_from_rates(const NetworkModel& model, std::vector<double> lambda) {
    const std::size_t m = model.size();
    SteadyState s;
    s.arrival_rates = std::move(lambda);
    s.queue_lengths.resize(m);
    s.sojourn_times.resize(m);
    s.delays.resize(m);
    s.utilizations.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double mu = model.service_rates[i];
        const double li = s.arrival_rates[i];
        s.queue_lengths[i] = li * li / (mu * mu - mu * li);
        s.sojourn_times[i] = 1.0 / (mu - li);
        s.delays[i] = s.sojourn_times[i] - 1.0 / mu;
        s.utilizations[i] = li / mu;
    }
    // Stay times solve (I - R) T = W: a job entering at i accumulates the
    // sojourn of every queue it visits.
    Matrix system = Matrix::identity(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) system(i, j) -= model.routing(i, j);
    s.stay_times = LuSolver(system).solve(s.sojourn_times);
    return s;
}

}  // namespace detail

/// All five mean metric vectors. Throws UnstableModel listing the offending
/// queues instead of returning infinities.
inline SteadyState steady_state(const NetworkModel& model) {
    std::vector<double> lambda = solve_traffic(model);
    if (auto bad = detail::unstable_queues(model, lambda); !bad.empty())
        throw UnstableModel(std::move(bad));
    return detail::metrics_from_rates(model, std::move(lambda));
}

/// Presentation-layer clamp for the nonnegativity invariant. Computations
/// keep raw values so residual checks stay honest.
inline double clamp_contribution(double value) {
    return (value < 0.0 && value >= -1e-12) ? 0.0 : value;
}

}  // namespace jackson
