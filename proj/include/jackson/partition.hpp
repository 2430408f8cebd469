#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <queue>
#include <vector>

#include "jackson/analytics.hpp"
#include "jackson/errors.hpp"
#include "jackson/model.hpp"

// Graph-theoretic analysis of contribution weights: the cutset majorization
// check, the closed-form line-network weights, and the per-distance profile.

namespace jackson {

inline constexpr double kMajorizationSlackTol = 1e-12;

/// Outcome of comparing the target's contribution weights across a cutset
/// against every tail receiver. `holds` iff slack >= -1e-12.
struct MajorizationReport {
    std::size_t target = 0;
    double cutset_max = 0.0;
    std::size_t cutset_argmax = 0;
    std::map<std::size_t, double> tail_values;
    bool holds = false;
    double slack = 0.0;  // cutset_max minus the largest tail weight (0 for an empty tail)
};

/// Reads row `target` of alpha and reports max-over-cutset versus every tail
/// column. Requires target in head.
inline MajorizationReport majorization_check(const ContributionMatrix& contribution,
                                             QueueId target, const Partition& partition) {
    if (!std::binary_search(partition.head.begin(), partition.head.end(), target.index))
        throw TargetNotInHead(target.index);

    MajorizationReport report;
    report.target = target.index;
    report.cutset_max = -std::numeric_limits<double>::infinity();
    for (std::size_t c : partition.cutset) {
        const double w = contribution.alpha(target.index, c);
        if (w > report.cutset_max) {
            report.cutset_max = w;
            report.cutset_argmax = c;
        }
    }
    double tail_max = 0.0;
    for (std::size_t t : partition.tail) {
        const double w = contribution.alpha(target.index, t);
        report.tail_values.emplace(t, w);
        tail_max = std::max(tail_max, w);
    }
    report.slack = report.cutset_max - tail_max;
    report.holds = report.slack >= -kMajorizationSlackTol;
    return report;
}

// ---------------------------------------------------------------------------
// Line network
// ---------------------------------------------------------------------------

/// Bidirectional line of `queue_count` queues: each queue routes forward to
/// its right neighbor, backward to its left neighbor, and to itself.
struct LineNetworkParams {
    std::size_t queue_count = 0;
    double forward = 0.0;    // i -> i+1
    double backward = 0.0;   // i -> i-1
    double self_loop = 0.0;  // i -> i
};

inline void validate_line_params(const LineNetworkParams& p) {
    std::vector<Issue> issues;
    if (p.queue_count < 2)
        issues.push_back({IssueKind::dimension_mismatch, "line network needs at least 2 queues",
                          0, static_cast<double>(p.queue_count)});
    auto prob = [&](const char* name, double v) {
        if (v < 0.0)
            issues.push_back({IssueKind::negative_rate, std::string(name) + " is negative", 0, v});
    };
    prob("forward probability", p.forward);
    prob("backward probability", p.backward);
    prob("self-loop probability", p.self_loop);
    const double sum = p.forward + p.backward + p.self_loop;
    if (sum > 1.0 + kRowSumTol)
        issues.push_back({IssueKind::row_sum_exceeds_one,
                          "forward + backward + self-loop exceeds 1", 0, sum - 1.0});
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

inline double line_discriminant(const LineNetworkParams& p) {
    const double d = 1.0 - p.self_loop;
    return d * d - 4.0 * p.backward * p.forward;
}

/// Tridiagonal-Toeplitz routing matrix of the line network. The interior
/// rows sum to forward + backward + self_loop; the end rows lose the
/// out-of-range term to the exit probability.
inline RoutingMatrix line_routing(const LineNetworkParams& p) {
    Matrix r(p.queue_count, p.queue_count);
    for (std::size_t i = 0; i < p.queue_count; ++i) {
        r(i, i) = p.self_loop;
        if (i + 1 < p.queue_count) r(i, i + 1) = p.forward;
        if (i > 0) r(i, i - 1) = p.backward;
    }
    return RoutingMatrix(std::move(r));
}

/// Row 1 of the contribution matrix by direct inversion of I - R for the
/// assembled line. Production fallback for the degenerate closed form and
/// the reference the closed form is checked against.
inline std::vector<double> line_contribution_by_inversion(const LineNetworkParams& p) {
    validate_line_params(p);
    const RoutingMatrix routing = line_routing(p);
    const std::size_t m = p.queue_count;
    Matrix system = Matrix::identity(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) system(i, j) -= routing(i, j);
    std::vector<double> e1(m, 0.0);
    e1[0] = 1.0;
    // Row 1 of (I - R')^{-1} equals column 1 of (I - R)^{-1}.
    return LuSolver(system).solve(e1);
}

/// Closed-form contribution weight alpha_{1,receiver} of the line network
/// (receiver is 1-based here, matching the formula's indexing). Requires a
/// strictly positive discriminant and forward probability; otherwise the
/// two characteristic roots collide or blow up and the caller must fall
/// back to line_contribution_by_inversion.
inline double line_contribution(const LineNetworkParams& p, std::size_t receiver) {
    validate_line_params(p);
    if (receiver < 1 || receiver > p.queue_count)
        throw DimensionMismatch(p.queue_count, receiver);
    const double disc = line_discriminant(p);
    if (disc <= 1e-10) throw DegenerateDiscriminant(disc);
    if (p.forward < 1e-12) throw DegenerateDiscriminant(disc);

    const double m = static_cast<double>(p.queue_count);
    const double i = static_cast<double>(receiver);
    const double root = std::sqrt(disc);
    const double gamma1 = ((1.0 - p.self_loop) + root) / (2.0 * p.forward);
    const double gamma2 = ((1.0 - p.self_loop) - root) / (2.0 * p.forward);
    const double numerator =
        std::pow(p.backward, i - 1.0) *
        (std::pow(gamma2, m - i + 1.0) - std::pow(gamma1, m - i + 1.0));
    const double denominator =
        std::pow(p.forward, i) * (std::pow(gamma2, m + 1.0) - std::pow(gamma1, m + 1.0));
    return numerator / denominator;
}

// ---------------------------------------------------------------------------
// Distance profile
// ---------------------------------------------------------------------------

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// BFS distance from every queue to the target along routing direction.
/// Contribution flows j -> ... -> target over routing edges, so the search
/// runs over reversed edges from the target. kUnreachable marks queues with
/// no directed path to the target.
inline std::vector<std::size_t> distances_to_target(const RoutingMatrix& routing,
                                                    std::size_t target) {
    const std::size_t m = routing.size();
    std::vector<std::size_t> dist(m, kUnreachable);
    dist[target] = 0;
    std::queue<std::size_t> frontier;
    frontier.push(target);
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop();
        for (std::size_t u = 0; u < m; ++u) {
            if (routing(u, v) > 0.0 && dist[u] == kUnreachable) {
                dist[u] = dist[v] + 1;
                frontier.push(u);
            }
        }
    }
    return dist;
}

/// Max contribution weight per graph distance from the target. Keys are
/// distances; unreachable receivers land on kUnreachable with weight 0.
struct DistanceProfile {
    std::map<std::size_t, double> max_weight;

    bool non_increasing(double tol = kMajorizationSlackTol) const {
        double previous = std::numeric_limits<double>::infinity();
        for (const auto& [distance, weight] : max_weight) {
            if (weight > previous + tol) return false;
            previous = weight;
        }
        return true;
    }
};

inline DistanceProfile distance_profile(const ContributionMatrix& contribution,
                                        const NetworkModel& model, QueueId target) {
    const std::vector<std::size_t> dist = distances_to_target(model.routing, target.index);
    DistanceProfile profile;
    for (std::size_t j = 0; j < model.size(); ++j) {
        const double weight = contribution.alpha(target.index, j);
        auto [it, inserted] = profile.max_weight.emplace(dist[j], weight);
        if (!inserted) it->second = std::max(it->second, weight);
    }
    return profile;
}

}  // namespace jackson
