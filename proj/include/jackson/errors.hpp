#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Error taxonomy for the whole library. Carried indices are 0-based;
// message text uses the 1-based queue labels that appear in model files.

namespace jackson {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class IssueKind {
    dimension_mismatch,
    negative_rate,
    row_sum_exceeds_one,
    zero_service_rate,
    not_disjoint,
    not_covering,
    empty_block,
    separation_violated,
};

/// One violated invariant. `index` and `value` are kind-specific
/// (row index and excess for row_sum_exceeds_one, queue index and the
/// offending rate for negative_rate / zero_service_rate, ...).
struct Issue {
    IssueKind kind;
    std::string message;
    std::size_t index = std::numeric_limits<std::size_t>::max();
    double value = 0.0;
};

/// Validation failure carrying every violated invariant, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Issue> issues)
        : Error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<Issue>& issues() const { return issues_; }

    bool has(IssueKind kind) const {
        for (const auto& issue : issues_)
            if (issue.kind == kind) return true;
        return false;
    }

private:
    static std::string join(const std::vector<Issue>& issues) {
        std::string text = "model validation failed:";
        for (const auto& issue : issues) {
            text += "\n  - ";
            text += issue.message;
        }
        return text;
    }

    std::vector<Issue> issues_;
};

class ParseError : public Error {
public:
    ParseError(std::string field, const std::string& detail)
        : Error("parse error at '" + field + "': " + detail), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Pivot below threshold while factoring I - R'. For a routing matrix this
/// means a closed recurrent class: jobs that can never leave the system.
class SingularSystem : public Error {
public:
    SingularSystem(std::size_t pivot_index, double pivot)
        : Error("singular system: pivot " + std::to_string(pivot) + " at elimination step " +
                std::to_string(pivot_index + 1)),
          pivot_index_(pivot_index),
          pivot_(pivot) {}

    std::size_t pivot_index() const { return pivot_index_; }
    double pivot() const { return pivot_; }

private:
    std::size_t pivot_index_;
    double pivot_;
};

/// I - R_TT is numerically singular: the tail contains a closed recurrent class.
class SingularTailBlock : public Error {
public:
    SingularTailBlock() : Error("singular tail block: I - R_TT is not invertible") {}
};

class UnstableModel : public Error {
public:
    explicit UnstableModel(std::vector<std::size_t> queues)
        : Error(describe(queues)), queues_(std::move(queues)) {}

    /// 0-based indices of queues with arrival rate >= service rate.
    const std::vector<std::size_t>& queues() const { return queues_; }

private:
    static std::string describe(const std::vector<std::size_t>& queues) {
        std::string text = "model unstable at queue(s)";
        for (std::size_t q : queues) text += " " + std::to_string(q + 1);
        return text;
    }

    std::vector<std::size_t> queues_;
};

class PerturbationDestabilizes : public Error {
public:
    explicit PerturbationDestabilizes(std::vector<std::size_t> receivers)
        : Error(describe(receivers)), receivers_(std::move(receivers)) {}

    /// 0-based receiver indices whose increment pushes some queue to lambda >= mu.
    const std::vector<std::size_t>& receivers() const { return receivers_; }

private:
    static std::string describe(const std::vector<std::size_t>& receivers) {
        std::string text = "increment destabilizes the network for receiver(s)";
        for (std::size_t r : receivers) text += " " + std::to_string(r + 1);
        return text;
    }

    std::vector<std::size_t> receivers_;
};

class TargetNotInHead : public Error {
public:
    explicit TargetNotInHead(std::size_t target)
        : Error("target queue " + std::to_string(target + 1) + " is not in the head") {}
};

class DegenerateDiscriminant : public Error {
public:
    explicit DegenerateDiscriminant(double discriminant)
        : Error("line-network closed form is degenerate (discriminant " +
                std::to_string(discriminant) + "); use direct inversion"),
          discriminant_(discriminant) {}

    double discriminant() const { return discriminant_; }

private:
    double discriminant_ = 0.0;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(got)) {}
};

}  // namespace jackson
