#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace codectx::eval {

/// Binary metrics with class 1 as the positive class. Zero denominators give
/// 0: no predicted positives means precision 0, no actual positives means
/// recall 0, and f1 is 0 whenever precision + recall is 0.
struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);
Metrics binary_metrics(std::span<const int> predicted, std::span<const int> actual);
/// One-vs-rest metrics for `positive`; accuracy is the overall multiclass accuracy.
Metrics class_metrics(std::span<const int> predicted, std::span<const int> actual, int positive);
double accuracy(std::span<const int> predicted, std::span<const int> actual);

/// Disjoint covering folds with every class dealt round-robin across them.
struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::vector<std::size_t>> folds;  // sample indices, ascending
    /// Set when a class has fewer than k members (some folds miss it) or when
    /// k had to shrink to the sample count.
    std::optional<std::string> warning;
};

/// Each class's members are shuffled and dealt to folds in turn; the dealing
/// position carries over from one class to the next, so per-fold counts stay
/// within one of proportional for every class. k < 2 throws ConfigError.
FoldPlan stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);

}  // namespace codectx::eval
