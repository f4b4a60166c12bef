#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codectx/bugs.hpp"
#include "codectx/corpus.hpp"
#include "codectx/encoder.hpp"
#include "codectx/metrics.hpp"
#include "codectx/patterns.hpp"

namespace codectx::tasks {

enum class Variant { None, RawBugs, FilteredBugs, Patterns, BugsAndPatterns };

/// Report column order.
inline constexpr std::array<Variant, 5> kVariants = {Variant::None, Variant::RawBugs, Variant::FilteredBugs,
                                                     Variant::Patterns, Variant::BugsAndPatterns};

std::string_view to_string(Variant v);     // NONE, RAW_BUGS, ...
std::string_view column_title(Variant v);  // "Original dataset", ...
std::optional<Variant> parse_variant(std::string_view s);
bool uses_bugs(Variant v);
bool uses_filter(Variant v);
bool uses_patterns(Variant v);

enum class TaskKind { Classify, Clone };
std::string_view to_string(TaskKind t);

struct TrainConfig {
    std::size_t dim = 128;
    std::size_t hidden = 100;
    int rounds = 1;
    encode::FusionLevel fusion = encode::FusionLevel::Node;
    int epochs = 15;
    std::size_t batch = 8;
    double lr = 1e-3;
    std::uint64_t seed = 1;
    int min_count = 1;
    /// Skip-gram pretraining epochs for the embedding table (0 keeps the seeded init).
    int embedding_epochs = 0;
    double clone_threshold = 0.5;
    /// Stop once training accuracy reaches this value; 0 disables.
    double target_accuracy = 0.0;
    std::vector<std::string> pattern_labels = patterns::default_labels();
};

/// Side inputs a variant may need.
struct Channels {
    const bugs::BugFilterModel* filter = nullptr;
    const patterns::AdaBoostModel* pattern_model = nullptr;
    /// Report texts by id, for warnings that link one.
    std::map<std::string, std::string> reports;
};

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;
    double train_accuracy = 0.0;
};

inline constexpr int kBundleVersion = 1;

/// Everything needed to evaluate a trained model.
struct ModelBundle {
    int format_version = kBundleVersion;
    /// Effective configuration echo (key=value).
    std::map<std::string, std::string> config;
    TaskKind task = TaskKind::Classify;
    Variant variant = Variant::None;
    int classes = 0;
    encode::Vocabulary vocab;
    encode::EncoderConfig encoder;
    nn::ParamSet params;
    double clone_threshold = 0.5;
    std::vector<std::string> pattern_labels = patterns::default_labels();
    std::optional<bugs::BugFilterModel> filter;
    std::optional<patterns::AdaBoostModel> pattern_model;
    std::vector<EpochLog> log;
};

// Head parameter names.
inline constexpr const char* kClsW = "head.cls.W";
inline constexpr const char* kClsB = "head.cls.b";
inline constexpr const char* kCloneW = "head.clone.w";
inline constexpr const char* kCloneB = "head.clone.b";

struct ClassifierHead {
    nn::Tensor W;  // C x 2h
    nn::Tensor b;  // C
    static ClassifierHead bind(const nn::ParamSet& params);
};

struct CloneHead {
    nn::Tensor w;  // 2h
    double b = 0.0;
    double threshold = 0.5;
    static CloneHead bind(const nn::ParamSet& params, double threshold);
};

struct Classification {
    int label = 0;
    nn::Tensor probs;
};

/// Softmax over W code + b; ties go to the lower label. Throws ShapeError.
Classification classify(const nn::Tensor& code, const ClassifierHead& head);
/// sigmoid(w . |a - b| + b). Throws ShapeError.
double clone_score(const nn::Tensor& a, const nn::Tensor& b, const CloneHead& head);

/// A program turned into encoder inputs for one variant.
struct PreparedUnit {
    std::vector<encode::IndexedStatement> stmts;
    /// Per statement: raw bug feature (10 wide) when bug warnings attach to it.
    std::vector<std::optional<nn::Tensor>> bug_raw;
    /// Pattern one-hot, unit-scoped, when the variant uses patterns.
    std::optional<nn::Tensor> pattern_onehot;
};

/// Throws MissingChannelError when the variant needs a side input that is
/// absent (pattern label with no model to predict one, filter model).
PreparedUnit prepare_unit(const ingest::AstNode& ast, const std::vector<ingest::BugWarning>& warnings,
                          const std::optional<std::string>& pattern, const ModelBundle& bundle,
                          const std::map<std::string, std::string>& reports = {});

struct UnitCache {
    std::vector<encode::StatementCache> stmt;
    encode::SequenceCache seq;
    std::vector<std::vector<encode::ContextVector>> contexts;
    /// Per statement, per context: raw input it was projected from and whether it is a bug context.
    std::vector<std::vector<std::pair<const nn::Tensor*, bool>>> sources;
};

nn::Tensor code_vector(const PreparedUnit& unit, const ModelBundle& bundle, UnitCache* cache = nullptr);
/// Accumulates gradients of every encoder parameter, projections included.
void code_vector_backward(UnitCache& cache, const nn::Tensor& dcode, ModelBundle& bundle);

/// Trains encoder and head end to end. Deterministic given config.seed.
/// Throws MissingChannelError when the variant's inputs are unavailable.
ModelBundle train_task(const ingest::ClassificationCorpus& data, Variant variant, const TrainConfig& config,
                       const Channels& channels = {});
ModelBundle train_task(const ingest::CloneCorpus& data, Variant variant, const TrainConfig& config,
                       const Channels& channels = {});

std::vector<int> predict_labels(const ModelBundle& bundle, const ingest::ClassificationCorpus& data,
                                const std::map<std::string, std::string>& reports = {});
/// Accuracy plus macro-averaged one-vs-rest precision, recall and f1.
eval::Metrics eval_classification(const ModelBundle& bundle, const ingest::ClassificationCorpus& data,
                                  const std::map<std::string, std::string>& reports = {});

std::vector<double> clone_scores(const ModelBundle& bundle, const ingest::CloneCorpus& data,
                                 const std::map<std::string, std::string>& reports = {});
/// Keys T1, T2, ST3, MT3, T4 and ALL. A type's group holds its positive
/// pairs plus the negatives whose stratum names it; ALL holds every pair.
/// Without grouping only ALL is returned.
std::map<std::string, eval::Metrics> eval_clone(const ModelBundle& bundle, const ingest::CloneCorpus& data,
                                                bool group_by_type = true,
                                                const std::map<std::string, std::string>& reports = {});

std::string save_bundle(const ModelBundle& bundle);
/// Throws VersionError for a newer format_version, FormatError for malformed input.
ModelBundle load_bundle(std::string_view text);

}  // namespace codectx::tasks
