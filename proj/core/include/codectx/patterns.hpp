#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codectx/ast.hpp"
#include "codectx/encoder.hpp"
#include "codectx/metrics.hpp"

namespace codectx::patterns {

inline constexpr std::size_t kFeatureCount = 16;
using PatternFeatures = std::array<double, kFeatureCount>;

const std::array<std::string_view, kFeatureCount>& feature_names();

/// Default label inventory; NONE must come last so that the remaining labels
/// line up with the pattern projection columns.
const std::vector<std::string>& default_labels();
inline constexpr std::string_view kNoPattern = "NONE";

/// Class-level and method-level metrics of one class. The root must be a
/// ClassDef or a CompilationUnit holding exactly one ClassDef (interfaces may
/// sit beside it); anything else throws NotAClassError.
PatternFeatures extract_pattern_features(const ingest::AstNode& root);

/// Depth-1 tree: samples with x[feature] <= threshold vote `left`, others `right`.
struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0, right = 0;  // class positions

    std::size_t predict(const PatternFeatures& x) const { return x[feature] <= threshold ? left : right; }
    bool operator==(const Stump&) const = default;
};

struct AdaBoostModel {
    std::vector<std::string> classes;
    std::vector<Stump> stumps;
    std::vector<double> alphas;
    int n_estimators = 100;
    double learning_rate = 1.0;

    bool operator==(const AdaBoostModel&) const = default;
};

struct BoostOptions {
    int n_estimators = 100;
    double learning_rate = 1.0;
};

/// Per-round diagnostics of one boosting run.
struct BoostTrace {
    std::vector<double> weighted_error;  // of each examined stump
    std::vector<double> weight_sum;      // after renormalization, accepted rounds only
    std::vector<double> training_error;  // of the ensemble after each accepted round
    bool stopped_early = false;
};

struct LabeledFeatures {
    PatternFeatures x{};
    std::string label;
};

/// SAMME boosting over exhaustively searched stumps. `classes` fixes the
/// label order (labels absent from the samples are dropped); labels outside
/// it throw UnknownLabelError; fewer than two present classes throw
/// DegenerateLabelsError. Rounds stop early when a stump's weighted error
/// reaches 1 - 1/K, or after a stump with zero error (accepted with alpha 1).
AdaBoostModel train_pattern_model(const std::vector<LabeledFeatures>& samples,
                                  const std::vector<std::string>& classes = default_labels(),
                                  const BoostOptions& options = {}, BoostTrace* trace = nullptr);

struct PatternPrediction {
    std::string label;
    std::vector<double> scores;  // per model class
};

/// Argmax of alpha-weighted stump votes, ties to the earlier class. A model
/// without stages predicts its first class.
PatternPrediction predict_pattern(const PatternFeatures& x, const AdaBoostModel& model);

struct FoldResult {
    std::size_t test_size = 0;
    double accuracy = 0.0;
    std::map<std::string, eval::Metrics> per_class;
};

struct CvReport {
    eval::FoldPlan plan;
    std::vector<FoldResult> folds;
    double mean_accuracy = 0.0;
    /// Per class: mean precision, recall and f1 over folds (accuracy = mean accuracy).
    std::map<std::string, eval::Metrics> mean_per_class;
};

CvReport stratified_kfold(const std::vector<LabeledFeatures>& samples, std::size_t k, std::uint64_t seed,
                          const std::vector<std::string>& classes = default_labels(),
                          const BoostOptions& options = {});

/// One-hot over the non-NONE labels of `labels` (NONE is the zero vector),
/// projected through `projection` (d x (|labels| - 1), no bias).
encode::ContextVector pattern_context(const std::string& label, const nn::Tensor& projection,
                                      const std::vector<std::string>& labels = default_labels());
/// The one-hot before projection.
nn::Tensor pattern_feature(const std::string& label, const std::vector<std::string>& labels = default_labels());

nlohmann::json to_json(const AdaBoostModel& m);
AdaBoostModel pattern_model_from_json(const nlohmann::json& j);

}  // namespace codectx::patterns
