#include "codectx/metrics.hpp"

#include <algorithm>
#include <map>

#include "codectx/errors.hpp"
#include "codectx/rng.hpp"

namespace codectx::eval {

namespace {
void check_sizes(std::span<const int> predicted, std::span<const int> actual) {
    if (predicted.size() != actual.size())
        throw ShapeError("metrics: " + std::to_string(predicted.size()) + " predictions for " +
                         std::to_string(actual.size()) + " labels");
}
double ratio(std::size_t num, std::size_t den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
}  // namespace

Metrics from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
    Metrics m;
    m.tp = tp;
    m.fp = fp;
    m.tn = tn;
    m.fn = fn;
    m.accuracy = ratio(tp + tn, m.total());
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    const double s = m.precision + m.recall;
    m.f1 = s > 0.0 ? 2.0 * m.precision * m.recall / s : 0.0;
    return m;
}

Metrics binary_metrics(std::span<const int> predicted, std::span<const int> actual) {
    check_sizes(predicted, actual);
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] == 1, a = actual[i] == 1;
        if (p && a) ++tp;
        else if (p) ++fp;
        else if (a) ++fn;
        else ++tn;
    }
    return from_counts(tp, fp, tn, fn);
}

Metrics class_metrics(std::span<const int> predicted, std::span<const int> actual, int positive) {
    check_sizes(predicted, actual);
    std::vector<int> p(predicted.size()), a(actual.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = predicted[i] == positive;
        a[i] = actual[i] == positive;
    }
    Metrics m = binary_metrics(p, a);
    m.accuracy = accuracy(predicted, actual);
    return m;
}

double accuracy(std::span<const int> predicted, std::span<const int> actual) {
    check_sizes(predicted, actual);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == actual[i];
    return ratio(hits, predicted.size());
}

FoldPlan stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("k-fold cross-validation needs k >= 2, got " + std::to_string(k));
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    FoldPlan plan;
    plan.k = k;
    if (!by_class.empty()) {
        std::size_t smallest = labels.size();
        for (const auto& [_, members] : by_class) smallest = std::min(smallest, members.size());
        if (labels.size() < k) {
            plan.k = std::max<std::size_t>(2, labels.size());
            plan.warning = "only " + std::to_string(labels.size()) + " samples; k reduced from " + std::to_string(k) +
                           " to " + std::to_string(plan.k);
        } else if (smallest < k) {
            plan.warning = "smallest class has " + std::to_string(smallest) + " members, fewer than k = " +
                           std::to_string(k) + "; some folds will lack that class";
        }
    }
    plan.folds.assign(plan.k, {});
    Rng rng(seed);
    std::size_t slot = 0;
    for (auto& [_, members] : by_class) {
        rng.shuffle(std::span<std::size_t>(members));
        for (std::size_t idx : members) plan.folds[slot++ % plan.k].push_back(idx);
    }
    for (auto& f : plan.folds) std::sort(f.begin(), f.end());
    return plan;
}

}  // namespace codectx::eval
