#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "jackson/errors.hpp"
#include "jackson/matrix.hpp"

// Core domain types and the model file format. Everything here is immutable
// after validation and safe to share across threads.
//
// Indexing convention: internal indices are 0-based; model files, partition
// files, CSV headers and error messages use the 1-based labels people write.

namespace jackson {

/// Queue index in [0, M). 0-based; human-facing formats add 1.
struct QueueId {
    std::size_t index = 0;
    constexpr auto operator<=>(const QueueId&) const = default;
};

/// Finite-precision decimals in model files make exact row-sum equality
/// unusable; 1e-9 absorbs print roundoff without hiding real violations.
inline constexpr double kRowSumTol = 1e-9;

/// M x M matrix of routing probabilities r_ij (from queue i to queue j).
/// The exit probability r_i0 = 1 - sum_j r_ij is implicit, never stored.
class RoutingMatrix {
public:
    RoutingMatrix() = default;
    explicit RoutingMatrix(Matrix entries) : entries_(std::move(entries)) {}

    std::size_t size() const { return entries_.rows(); }
    double operator()(std::size_t from, std::size_t to) const { return entries_(from, to); }
    const Matrix& entries() const { return entries_; }

    double row_sum(std::size_t from) const { return entries_.row_sum(from); }
    double exit_probability(std::size_t from) const {
        return std::max(0.0, 1.0 - row_sum(from));
    }

    bool operator==(const RoutingMatrix&) const = default;

private:
    Matrix entries_;
};

struct NetworkModel {
    RoutingMatrix routing;
    std::vector<double> exo_rates;       // exogenous Poisson arrival rate per queue
    std::vector<double> service_rates;   // mu_i, strictly positive
    std::vector<std::string> names;      // optional display labels; empty if unset

    std::size_t size() const { return routing.size(); }
};

/// Head / cutset / tail split of the queue indices. Sorted, 0-based.
/// Valid when the three sets partition {0..M-1}, head and cutset are
/// nonempty, and deleting the cutset disconnects head from tail.
struct Partition {
    std::vector<std::size_t> head;
    std::vector<std::size_t> cutset;
    std::vector<std::size_t> tail;
};

namespace detail {

inline std::string queue_label(std::size_t index) { return std::to_string(index + 1); }

inline void sort_unique(std::vector<std::size_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

/// Checks every construction invariant and reports all violations at once.
inline NetworkModel validate_model(NetworkModel candidate) {
    std::vector<Issue> issues;
    const Matrix& r = candidate.routing.entries();
    const std::size_t m = r.rows();

    if (r.cols() != m) {
        issues.push_back({IssueKind::dimension_mismatch,
                          "routing matrix is " + std::to_string(m) + "x" +
                              std::to_string(r.cols()) + ", expected square",
                          0, 0.0});
    }
    auto check_length = [&](const char* field, std::size_t got) {
        if (got != m)
            issues.push_back({IssueKind::dimension_mismatch,
                              std::string(field) + " has length " + std::to_string(got) +
                                  ", expected " + std::to_string(m),
                              0, 0.0});
    };
    check_length("exo_rates", candidate.exo_rates.size());
    check_length("service_rates", candidate.service_rates.size());
    if (!candidate.names.empty()) check_length("names", candidate.names.size());

    if (r.cols() == m) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (r(i, j) < 0.0)
                    issues.push_back({IssueKind::negative_rate,
                                      "routing probability r(" + detail::queue_label(i) + "," +
                                          detail::queue_label(j) + ") is negative",
                                      i, r(i, j)});
            }
            const double sum = r.row_sum(i);
            if (sum > 1.0 + kRowSumTol)
                issues.push_back({IssueKind::row_sum_exceeds_one,
                                  "routing row " + detail::queue_label(i) + " sums to " +
                                      std::to_string(sum) + " (excess " +
                                      std::to_string(sum - 1.0) + ")",
                                  i, sum - 1.0});
        }
    }
    for (std::size_t i = 0; i < candidate.exo_rates.size(); ++i)
        if (candidate.exo_rates[i] < 0.0)
            issues.push_back({IssueKind::negative_rate,
                              "exogenous rate at queue " + detail::queue_label(i) + " is negative",
                              i, candidate.exo_rates[i]});
    for (std::size_t i = 0; i < candidate.service_rates.size(); ++i)
        if (!(candidate.service_rates[i] > 0.0))
            issues.push_back({IssueKind::zero_service_rate,
                              "service rate at queue " + detail::queue_label(i) +
                                  " must be strictly positive",
                              i, candidate.service_rates[i]});

    if (!issues.empty()) throw ValidationError(std::move(issues));
    return candidate;
}

/// First head-tail routing edge (either direction) that bypasses the cutset,
/// or nullopt if none. Pure entry test on the routing matrix.
inline std::optional<std::pair<std::size_t, std::size_t>> separation_violation_by_edges(
    const RoutingMatrix& routing, const Partition& p) {
    for (std::size_t h : p.head)
        for (std::size_t t : p.tail) {
            if (routing(h, t) > 0.0) return std::make_pair(h, t);
            if (routing(t, h) > 0.0) return std::make_pair(t, h);
        }
    return std::nullopt;
}

/// Same separation property via reachability: delete the cutset vertices and
/// search the directed graph from the head; then from the tail.
inline bool separation_holds_by_reachability(const RoutingMatrix& routing, const Partition& p) {
    const std::size_t m = routing.size();
    std::vector<char> in_cutset(m, 0), in_target(m, 0);
    for (std::size_t c : p.cutset) in_cutset[c] = 1;

    auto reaches = [&](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
        std::fill(in_target.begin(), in_target.end(), 0);
        for (std::size_t t : to) in_target[t] = 1;
        std::vector<char> seen(m, 0);
        std::vector<std::size_t> frontier;
        for (std::size_t f : from) {
            seen[f] = 1;
            frontier.push_back(f);
        }
        while (!frontier.empty()) {
            const std::size_t v = frontier.back();
            frontier.pop_back();
            for (std::size_t w = 0; w < m; ++w) {
                if (routing(v, w) <= 0.0 || seen[w] || in_cutset[w]) continue;
                if (in_target[w]) return true;
                seen[w] = 1;
                frontier.push_back(w);
            }
        }
        return false;
    };
    return !reaches(p.head, p.tail) && !reaches(p.tail, p.head);
}

/// Confirms disjoint cover plus the separating-cutset property. Runs both the
/// edge-based and the reachability-based separation checks and insists they
/// agree; a disagreement would mean a bug in one of them.
inline Partition validate_partition(const NetworkModel& model, Partition candidate) {
    const std::size_t m = model.size();
    std::vector<Issue> issues;

    detail::sort_unique(candidate.head);
    detail::sort_unique(candidate.cutset);
    detail::sort_unique(candidate.tail);

    if (candidate.head.empty())
        issues.push_back({IssueKind::empty_block, "head must be nonempty", 0, 0.0});
    if (candidate.cutset.empty())
        issues.push_back({IssueKind::empty_block, "cutset must be nonempty", 0, 0.0});

    std::vector<int> owners(m, 0);
    bool out_of_range = false;
    auto claim = [&](const std::vector<std::size_t>& block) {
        for (std::size_t q : block) {
            if (q >= m)
                out_of_range = true;
            else
                ++owners[q];
        }
    };
    claim(candidate.head);
    claim(candidate.cutset);
    claim(candidate.tail);
    if (out_of_range)
        issues.push_back({IssueKind::not_covering,
                          "partition names a queue outside 1.." + std::to_string(m), 0, 0.0});
    for (std::size_t q = 0; q < m; ++q) {
        if (owners[q] > 1)
            issues.push_back({IssueKind::not_disjoint,
                              "queue " + detail::queue_label(q) + " appears in more than one set",
                              q, 0.0});
        if (owners[q] == 0)
            issues.push_back({IssueKind::not_covering,
                              "queue " + detail::queue_label(q) + " is missing from the partition",
                              q, 0.0});
    }

    if (issues.empty()) {
        const auto edge = separation_violation_by_edges(model.routing, candidate);
        const bool reachable_ok = separation_holds_by_reachability(model.routing, candidate);
        if (edge.has_value() != !reachable_ok)
            throw Error("separation checks disagree; edge and reachability tests are inconsistent");
        if (edge) {
            issues.push_back({IssueKind::separation_violated,
                              "routing edge " + detail::queue_label(edge->first) + "->" +
                                  detail::queue_label(edge->second) + " bypasses the cutset",
                              edge->first, static_cast<double>(edge->second)});
        }
    }

    if (!issues.empty()) throw ValidationError(std::move(issues));
    return candidate;
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Provenance block written alongside reduced models. The file still loads
/// as an ordinary model; loaders ignore the extra key.
struct Provenance {
    std::string reduced_from;
    nlohmann::json partition;
    bool folded = false;
};

inline nlohmann::json model_to_json(const NetworkModel& model,
                                    const Provenance* provenance = nullptr) {
    const std::size_t m = model.size();
    nlohmann::json routing = nlohmann::json::array();
    for (std::size_t i = 0; i < m; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m; ++j) row.push_back(model.routing(i, j));
        routing.push_back(std::move(row));
    }
    nlohmann::json doc{{"num_queues", m},
                       {"routing", std::move(routing)},
                       {"exo_rates", model.exo_rates},
                       {"service_rates", model.service_rates}};
    if (!model.names.empty()) doc["names"] = model.names;
    if (provenance) {
        doc["provenance"] = {{"reduced_from", provenance->reduced_from},
                             {"partition", provenance->partition},
                             {"folded", provenance->folded}};
    }
    return doc;
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& doc, const char* field) {
    const auto it = doc.find(field);
    if (it == doc.end()) throw ParseError(field, "required field is missing");
    return *it;
}

inline std::vector<double> number_array(const nlohmann::json& node, const char* field,
                                        std::size_t expected) {
    if (!node.is_array()) throw ParseError(field, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(node.size());
    for (const auto& v : node) {
        if (!v.is_number()) throw ParseError(field, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    if (out.size() != expected)
        throw ParseError(field, "expected " + std::to_string(expected) + " entries, got " +
                                    std::to_string(out.size()));
    return out;
}

}  // namespace detail

/// Parses the model document and applies validate_model.
inline NetworkModel model_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("document", "expected a JSON object");
    const auto& nq = detail::require_field(doc, "num_queues");
    if (!nq.is_number_unsigned() || nq.get<std::size_t>() == 0)
        throw ParseError("num_queues", "expected a positive integer");
    const std::size_t m = nq.get<std::size_t>();

    const auto& routing_node = detail::require_field(doc, "routing");
    if (!routing_node.is_array() || routing_node.size() != m)
        throw ParseError("routing", "expected " + std::to_string(m) + " rows");
    Matrix entries(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = detail::number_array(routing_node[i],
                                              ("routing[" + std::to_string(i + 1) + "]").c_str(), m);
        for (std::size_t j = 0; j < m; ++j) entries(i, j) = row[j];
    }

    NetworkModel model;
    model.routing = RoutingMatrix(std::move(entries));
    model.exo_rates = detail::number_array(detail::require_field(doc, "exo_rates"), "exo_rates", m);
    model.service_rates =
        detail::number_array(detail::require_field(doc, "service_rates"), "service_rates", m);
    if (const auto it = doc.find("names"); it != doc.end()) {
        if (!it->is_array() || it->size() != m)
            throw ParseError("names", "expected " + std::to_string(m) + " strings");
        for (const auto& v : *it) {
            if (!v.is_string()) throw ParseError("names", "expected strings");
            model.names.push_back(v.get<std::string>());
        }
    }
    return validate_model(std::move(model));
}

inline NetworkModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), "cannot open file");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), e.what());
    }
    return model_from_json(doc);
}

inline void save_model(const NetworkModel& model, const std::filesystem::path& path,
                       const Provenance* provenance = nullptr) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << model_to_json(model, provenance).dump(2) << '\n';
}

/// Partition document uses the external 1-based labels.
inline nlohmann::json partition_to_json(const Partition& p) {
    auto bump = [](const std::vector<std::size_t>& v) {
        std::vector<std::size_t> out;
        out.reserve(v.size());
        for (std::size_t q : v) out.push_back(q + 1);
        return out;
    };
    return {{"head", bump(p.head)}, {"cutset", bump(p.cutset)}, {"tail", bump(p.tail)}};
}

inline Partition partition_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("partition", "expected a JSON object");
    auto block = [&](const char* field, bool required) {
        std::vector<std::size_t> out;
        const auto it = doc.find(field);
        if (it == doc.end()) {
            if (required) throw ParseError(field, "required field is missing");
            return out;
        }
        if (!it->is_array()) throw ParseError(field, "expected an array of 1-based queue labels");
        for (const auto& v : *it) {
            if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
                throw ParseError(field, "queue labels are positive integers");
            out.push_back(v.get<std::size_t>() - 1);
        }
        return out;
    };
    Partition p;
    p.head = block("head", true);
    p.cutset = block("cutset", true);
    p.tail = block("tail", false);  // omitted tail means the identity reduction
    return p;
}

}  // namespace jackson
