#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "jackson/analytics.hpp"
#include "jackson/errors.hpp"
#include "jackson/model.hpp"
#include "jackson/rng.hpp"

// Event-driven simulator of the open Jackson network: exogenous Poisson
// arrivals, exponential single-server FCFS queues with infinite buffers,
// probabilistic routing on service completion. Identical (model, config)
// inputs yield bit-identical statistics; every queue's arrival, service and
// routing decisions come from independently derived substreams.

namespace jackson {

struct SimConfig {
    double horizon = 0.0;       // simulated time units
    double warmup = -1.0;       // discarded prefix; negative means horizon / 10
    std::uint64_t seed = 0;
    unsigned replications = 1;
};

/// One value per queue; `stays` is indexed by the entry queue of the job.
struct SimMetrics {
    std::vector<double> queue_lengths;  // time-average number waiting (excludes job in service)
    std::vector<double> system_counts;  // time-average number in system
    std::vector<double> sojourns;       // per departed job
    std::vector<double> delays;
    std::vector<double> stays;          // network time of exited jobs, by entry queue
    std::vector<double> throughputs;    // departures per unit time
    std::vector<double> arrival_rates;  // total (exogenous + internal) arrivals per unit time
};

/// Exact event accounting for one replication, counted over the whole run
/// (warmup included): entries == exits + in_system_at_horizon always.
struct ReplicationCounts {
    std::uint64_t entries = 0;
    std::uint64_t exits = 0;
    std::uint64_t in_system_at_horizon = 0;
    std::vector<std::uint64_t> queue_arrivals;
    std::vector<std::uint64_t> queue_departures;
    std::vector<std::uint64_t> queue_population_at_horizon;
};

struct SimStats {
    SimMetrics mean;        // across replications
    SimMetrics half_width;  // 95% normal-approximation half-widths; zero for one replication
    std::vector<ReplicationCounts> replications;
};

inline constexpr std::size_t kUnreachableQueue = std::numeric_limits<std::size_t>::max();

namespace detail {

struct Job {
    double network_entry_time = 0.0;
    double queue_entry_time = 0.0;
    double service_start = 0.0;
    std::uint32_t entry_queue = 0;
};

struct Event {
    double time;
    std::uint64_t seq;  // monotone tie-breaker for full determinism
    enum class Type : std::uint8_t { exogenous_arrival, service_completion } type;
    std::uint32_t queue;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

struct RepResult {
    SimMetrics values;
    ReplicationCounts counts;
    std::vector<double> trace;
};

inline RepResult run_replication(const NetworkModel& model, double horizon, double warmup,
                                 std::uint64_t seed, unsigned replication,
                                 std::size_t trace_queue = kUnreachableQueue,
                                 double sample_dt = 0.0) {
    const std::size_t m = model.size();
    std::vector<SplitMix64> arrival_rng, service_rng, routing_rng;
    arrival_rng.reserve(m);
    service_rng.reserve(m);
    routing_rng.reserve(m);
    for (std::size_t q = 0; q < m; ++q) {
        arrival_rng.push_back(substream(seed, replication, StreamKind::arrival, q));
        service_rng.push_back(substream(seed, replication, StreamKind::service, q));
        routing_rng.push_back(substream(seed, replication, StreamKind::routing, q));
    }

    std::priority_queue<Event, std::vector<Event>, EventAfter> heap;
    std::uint64_t seq = 0;
    std::vector<std::deque<Job>> queues(m);

    RepResult out;
    out.counts.queue_arrivals.assign(m, 0);
    out.counts.queue_departures.assign(m, 0);
    out.counts.queue_population_at_horizon.assign(m, 0);

    std::vector<double> last_change(m, 0.0), area_wait(m, 0.0), area_system(m, 0.0);
    std::vector<double> sojourn_sum(m, 0.0), delay_sum(m, 0.0), stay_sum(m, 0.0);
    std::vector<std::uint64_t> departed(m, 0), arrived(m, 0), stays_n(m, 0);

    auto integrate_to = [&](std::size_t q, double t) {
        const double from = std::max(last_change[q], warmup);
        if (t > from) {
            const double dt = t - from;
            const double n = static_cast<double>(queues[q].size());
            area_system[q] += n * dt;
            area_wait[q] += std::max(n - 1.0, 0.0) * dt;
        }
        last_change[q] = t;
    };

    auto start_service = [&](std::size_t q, double t) {
        Job& job = queues[q].front();
        job.service_start = t;
        const double completion = t + service_rng[q].next_exponential(model.service_rates[q]);
        heap.push({completion, seq++, Event::Type::service_completion,
                   static_cast<std::uint32_t>(q)});
    };

    auto handle_arrival = [&](std::size_t q, double t, Job job) {
        integrate_to(q, t);
        job.queue_entry_time = t;
        queues[q].push_back(job);
        ++out.counts.queue_arrivals[q];
        if (t > warmup) ++arrived[q];
        if (queues[q].size() == 1) start_service(q, t);
    };

    for (std::size_t q = 0; q < m; ++q) {
        if (model.exo_rates[q] <= 0.0) continue;
        const double first = arrival_rng[q].next_exponential(model.exo_rates[q]);
        if (first <= horizon)
            heap.push({first, seq++, Event::Type::exogenous_arrival,
                       static_cast<std::uint32_t>(q)});
    }

    const bool tracing = trace_queue != kUnreachableQueue;
    const std::size_t sample_count =
        tracing ? static_cast<std::size_t>(std::floor(horizon / sample_dt)) + 1 : 0;
    std::size_t next_sample = 0;
    auto flush_samples_before = [&](double t) {
        while (next_sample < sample_count &&
               static_cast<double>(next_sample) * sample_dt < t) {
            out.trace.push_back(static_cast<double>(queues[trace_queue].size()));
            ++next_sample;
        }
    };

    while (!heap.empty()) {
        const Event event = heap.top();
        if (event.time > horizon) break;
        heap.pop();
        if (tracing) flush_samples_before(event.time);
        const std::size_t q = event.queue;

        if (event.type == Event::Type::exogenous_arrival) {
            ++out.counts.entries;
            Job job;
            job.network_entry_time = event.time;
            job.entry_queue = static_cast<std::uint32_t>(q);
            handle_arrival(q, event.time, job);
            const double next =
                event.time + arrival_rng[q].next_exponential(model.exo_rates[q]);
            if (next <= horizon)
                heap.push({next, seq++, Event::Type::exogenous_arrival,
                           static_cast<std::uint32_t>(q)});
            continue;
        }

        // Service completion.
        integrate_to(q, event.time);
        Job job = queues[q].front();
        queues[q].pop_front();
        ++out.counts.queue_departures[q];
        if (event.time > warmup) {
            ++departed[q];
            sojourn_sum[q] += event.time - job.queue_entry_time;
            delay_sum[q] += job.service_start - job.queue_entry_time;
        }
        // The next waiting job enters service before the departing job is
        // routed, so a self-loop arrival lands behind it.
        if (!queues[q].empty()) start_service(q, event.time);

        const double u = routing_rng[q].next_double();
        double cumulative = 0.0;
        std::size_t destination = m;  // m means exit
        for (std::size_t j = 0; j < m; ++j) {
            cumulative += model.routing(q, j);
            if (u < cumulative) {
                destination = j;
                break;
            }
        }
        if (destination == m) {
            ++out.counts.exits;
            if (event.time > warmup) {
                stay_sum[job.entry_queue] += event.time - job.network_entry_time;
                ++stays_n[job.entry_queue];
            }
        } else {
            handle_arrival(destination, event.time, job);
        }
    }

    if (tracing) {
        while (next_sample < sample_count) {
            out.trace.push_back(static_cast<double>(queues[trace_queue].size()));
            ++next_sample;
        }
    }

    const double window = horizon - warmup;
    auto& v = out.values;
    v.queue_lengths.resize(m);
    v.system_counts.resize(m);
    v.sojourns.resize(m);
    v.delays.resize(m);
    v.stays.resize(m);
    v.throughputs.resize(m);
    v.arrival_rates.resize(m);
    for (std::size_t q = 0; q < m; ++q) {
        integrate_to(q, horizon);
        out.counts.queue_population_at_horizon[q] = queues[q].size();
        out.counts.in_system_at_horizon += queues[q].size();
        v.queue_lengths[q] = area_wait[q] / window;
        v.system_counts[q] = area_system[q] / window;
        v.sojourns[q] = departed[q] ? sojourn_sum[q] / static_cast<double>(departed[q]) : 0.0;
        v.delays[q] = departed[q] ? delay_sum[q] / static_cast<double>(departed[q]) : 0.0;
        v.stays[q] = stays_n[q] ? stay_sum[q] / static_cast<double>(stays_n[q]) : 0.0;
        v.throughputs[q] = static_cast<double>(departed[q]) / window;
        v.arrival_rates[q] = static_cast<double>(arrived[q]) / window;
    }
    return out;
}

inline void check_config(const SimConfig& config) {
    std::vector<Issue> issues;
    if (!(config.horizon > 0.0))
        issues.push_back({IssueKind::negative_rate, "horizon must be positive", 0, config.horizon});
    if (config.warmup >= config.horizon)
        issues.push_back(
            {IssueKind::negative_rate, "warmup must be smaller than horizon", 0, config.warmup});
    if (config.replications < 1)
        issues.push_back({IssueKind::dimension_mismatch, "replications must be >= 1", 0,
                          static_cast<double>(config.replications)});
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

inline double effective_warmup(const SimConfig& config) {
    return config.warmup < 0.0 ? config.horizon / 10.0 : config.warmup;
}

}  // namespace detail

/// Runs the configured replications and aggregates their statistics in
/// replication-index order (parallel execution cannot change the result).
/// Stability is not required; unstable runs legally show growth.
inline SimStats simulate(const NetworkModel& model, const SimConfig& config,
                         unsigned max_threads = 1) {
    detail::check_config(config);
    const double warmup = detail::effective_warmup(config);
    const unsigned reps = config.replications;

    std::vector<detail::RepResult> results(reps);
    if (max_threads <= 1 || reps == 1) {
        for (unsigned r = 0; r < reps; ++r)
            results[r] = detail::run_replication(model, config.horizon, warmup, config.seed, r);
    } else {
        std::atomic<unsigned> cursor{0};
        const unsigned workers = std::min(max_threads, reps);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (unsigned r = cursor.fetch_add(1); r < reps; r = cursor.fetch_add(1))
                    results[r] =
                        detail::run_replication(model, config.horizon, warmup, config.seed, r);
            });
        }
        for (auto& t : pool) t.join();
    }

    const std::size_t m = model.size();
    SimStats stats;
    auto resize_all = [&](SimMetrics& v) {
        v.queue_lengths.assign(m, 0.0);
        v.system_counts.assign(m, 0.0);
        v.sojourns.assign(m, 0.0);
        v.delays.assign(m, 0.0);
        v.stays.assign(m, 0.0);
        v.throughputs.assign(m, 0.0);
        v.arrival_rates.assign(m, 0.0);
    };
    resize_all(stats.mean);
    resize_all(stats.half_width);

    auto for_each_field = [](auto&& fn) {
        fn(&SimMetrics::queue_lengths);
        fn(&SimMetrics::system_counts);
        fn(&SimMetrics::sojourns);
        fn(&SimMetrics::delays);
        fn(&SimMetrics::stays);
        fn(&SimMetrics::throughputs);
        fn(&SimMetrics::arrival_rates);
    };

    const double n = static_cast<double>(reps);
    for_each_field([&](auto field) {
        for (std::size_t q = 0; q < m; ++q) {
            double sum = 0.0;
            for (unsigned r = 0; r < reps; ++r) sum += (results[r].values.*field)[q];
            const double mean = sum / n;
            (stats.mean.*field)[q] = mean;
            if (reps > 1) {
                double ss = 0.0;
                for (unsigned r = 0; r < reps; ++r) {
                    const double d = (results[r].values.*field)[q] - mean;
                    ss += d * d;
                }
                (stats.half_width.*field)[q] = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
            }
        }
    });
    stats.replications.reserve(reps);
    for (unsigned r = 0; r < reps; ++r) stats.replications.push_back(std::move(results[r].counts));
    return stats;
}

/// Number-in-system time series for one queue, sampled at multiples of
/// sample_dt over [0, horizon]; the sample at k * sample_dt is the state
/// just before any event scheduled exactly there. Uses replication 0 of the
/// configured seed, so it is consistent with simulate().
inline std::vector<double> trace(const NetworkModel& model, const SimConfig& config, QueueId queue,
                                 double sample_dt) {
    detail::check_config(config);
    if (!(sample_dt > 0.0))
        throw ValidationError(
            {{IssueKind::negative_rate, "sample_dt must be positive", 0, sample_dt}});
    return detail::run_replication(model, config.horizon, detail::effective_warmup(config),
                                   config.seed, 0, queue.index, sample_dt)
        .trace;
}

struct CompareRow {
    std::string metric;
    std::size_t queue = 0;
    double analytic = 0.0;
    double simulated = 0.0;
    double rel_error = 0.0;
    bool within = false;
};

/// Relative errors |sim - analytic| / max(analytic, 1e-9), flagged against
/// the caller's tolerance.
inline std::vector<CompareRow> compare(const SteadyState& analytic, const SimStats& empirical,
                                       double tolerance) {
    const std::size_t m = analytic.arrival_rates.size();
    if (empirical.mean.arrival_rates.size() != m)
        throw DimensionMismatch(m, empirical.mean.arrival_rates.size());

    std::vector<CompareRow> rows;
    auto emit = [&](const char* metric, const std::vector<double>& a,
                    const std::vector<double>& s) {
        for (std::size_t q = 0; q < m; ++q) {
            CompareRow row;
            row.metric = metric;
            row.queue = q;
            row.analytic = a[q];
            row.simulated = s[q];
            row.rel_error = std::abs(s[q] - a[q]) / std::max(a[q], 1e-9);
            row.within = row.rel_error <= tolerance;
            rows.push_back(std::move(row));
        }
    };
    emit("arrival_rate", analytic.arrival_rates, empirical.mean.arrival_rates);
    emit("queue_length", analytic.queue_lengths, empirical.mean.queue_lengths);
    emit("sojourn", analytic.sojourn_times, empirical.mean.sojourns);
    emit("delay", analytic.delays, empirical.mean.delays);
    emit("stay", analytic.stay_times, empirical.mean.stays);
    return rows;
}

}  // namespace jackson
