#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include "jackson/analytics.hpp"
#include "jackson/model.hpp"
#include "jackson/partition.hpp"

// Randomized instances for property tests, plus the truncated Neumann-series
// oracle. The oracle is independent of the LU production path it checks.

namespace testsupport {

using Rng = std::mt19937_64;

/// Random substochastic routing row over the allowed destination columns:
/// a small sparsity pattern with positive weights, normalized and scaled so
/// the exit probability is uniform in [0.1, 0.5]. The margin keeps every
/// generated matrix comfortably solvable.
inline void fill_row(Rng& rng, jackson::Matrix& r, std::size_t i,
                     const std::vector<std::size_t>& allowed) {
    std::uniform_real_distribution<double> exit_fraction(0.1, 0.5);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    if (allowed.empty()) return;
    std::vector<std::size_t> targets = allowed;
    std::shuffle(targets.begin(), targets.end(), rng);
    const std::size_t max_degree = std::min<std::size_t>(4, targets.size());
    const std::size_t degree = std::uniform_int_distribution<std::size_t>(1, max_degree)(rng);
    targets.resize(degree);
    std::vector<double> weights(degree);
    double total = 0.0;
    for (double& w : weights) {
        w = weight(rng);
        total += w;
    }
    const double mass = 1.0 - exit_fraction(rng);
    for (std::size_t k = 0; k < degree; ++k) r(i, targets[k]) = weights[k] / total * mass;
}

/// Service rates derived from the solved arrival rates so that utilization
/// is uniform in [0.2, 0.8]: every generated model is stable by construction.
inline void assign_rates(Rng& rng, jackson::NetworkModel& model) {
    const std::size_t m = model.size();
    std::uniform_real_distribution<double> exo(0.0, 5.0);
    std::uniform_real_distribution<double> utilization(0.2, 0.8);
    model.exo_rates.resize(m);
    for (double& rho : model.exo_rates) rho = exo(rng);
    model.service_rates.assign(m, 1.0);
    const std::vector<double> lambda = jackson::solve_traffic(model);
    for (std::size_t i = 0; i < m; ++i)
        model.service_rates[i] = std::max(lambda[i], 0.1) / utilization(rng);
}

inline jackson::NetworkModel random_model(Rng& rng, std::size_t m) {
    jackson::Matrix r(m, m);
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < m; ++i) fill_row(rng, r, i, all);
    jackson::NetworkModel model;
    model.routing = jackson::RoutingMatrix(std::move(r));
    assign_rates(rng, model);
    return jackson::validate_model(std::move(model));
}

struct PartitionedModel {
    jackson::NetworkModel model;
    jackson::Partition partition;
};

/// Random model built around a random head/cutset/tail split: rows honor the
/// zero blocks, so the partition is valid by construction. Blocks are drawn
/// from a shuffled index set and need not be contiguous.
inline PartitionedModel random_partitioned_model(Rng& rng, std::size_t m) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t head_size = std::uniform_int_distribution<std::size_t>(1, m - 2)(rng);
    const std::size_t cutset_size =
        std::uniform_int_distribution<std::size_t>(1, m - 1 - head_size)(rng);

    PartitionedModel out;
    out.partition.head.assign(order.begin(), order.begin() + head_size);
    out.partition.cutset.assign(order.begin() + head_size,
                                order.begin() + head_size + cutset_size);
    out.partition.tail.assign(order.begin() + head_size + cutset_size, order.end());
    std::sort(out.partition.head.begin(), out.partition.head.end());
    std::sort(out.partition.cutset.begin(), out.partition.cutset.end());
    std::sort(out.partition.tail.begin(), out.partition.tail.end());

    std::vector<char> in_head(m, 0), in_tail(m, 0);
    for (std::size_t q : out.partition.head) in_head[q] = 1;
    for (std::size_t q : out.partition.tail) in_tail[q] = 1;

    jackson::Matrix r(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::size_t> allowed;
        for (std::size_t j = 0; j < m; ++j) {
            if (in_head[i] && in_tail[j]) continue;
            if (in_tail[i] && in_head[j]) continue;
            allowed.push_back(j);
        }
        fill_row(rng, r, i, allowed);
    }
    out.model.routing = jackson::RoutingMatrix(std::move(r));
    assign_rates(rng, out.model);
    out.model = jackson::validate_model(std::move(out.model));
    out.partition = jackson::validate_partition(out.model, std::move(out.partition));
    return out;
}

inline std::size_t random_member(Rng& rng, const std::vector<std::size_t>& set) {
    return set[std::uniform_int_distribution<std::size_t>(0, set.size() - 1)(rng)];
}

/// Truncated Neumann series sum_{n=0}^{N} (R')^n with N picked from the
/// entrywise tail bound q^{N+1} / (1 - q) < 1e-10, q = max row sum of R.
inline jackson::Matrix neumann_alpha(const jackson::RoutingMatrix& routing) {
    const std::size_t m = routing.size();
    double q = 0.0;
    for (std::size_t i = 0; i < m; ++i) q = std::max(q, routing.row_sum(i));
    std::size_t terms = 0;
    if (q > 0.0) {
        double tail = q / (1.0 - q);
        while (tail >= 1e-10) {
            tail *= q;
            ++terms;
        }
    }
    const jackson::Matrix transposed = routing.entries().transposed();
    jackson::Matrix acc = jackson::Matrix::identity(m);
    jackson::Matrix power = jackson::Matrix::identity(m);
    for (std::size_t n = 0; n < terms; ++n) {
        power = transposed * power;
        acc = acc + power;
    }
    return acc;
}

/// Line parameters with a discriminant bounded away from zero; rejection
/// sampled so the closed form is always in its strict regime.
inline jackson::LineNetworkParams random_line_params(Rng& rng, std::size_t min_m,
                                                     std::size_t max_m) {
    std::uniform_int_distribution<std::size_t> queues(min_m, max_m);
    std::uniform_real_distribution<double> fwd(0.05, 0.6);
    std::uniform_real_distribution<double> bwd(0.05, 0.6);
    std::uniform_real_distribution<double> self(0.0, 0.5);
    for (;;) {
        jackson::LineNetworkParams p;
        p.queue_count = queues(rng);
        p.forward = fwd(rng);
        p.backward = bwd(rng);
        p.self_loop = self(rng);
        if (p.forward + p.backward + p.self_loop > 1.0) continue;
        if (jackson::line_discriminant(p) <= 1e-6) continue;
        return p;
    }
}

}  // namespace testsupport
