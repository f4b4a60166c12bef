#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codectx/corpus.hpp"
#include "codectx/encoder.hpp"
#include "codectx/metrics.hpp"

namespace codectx::bugs {

using Tokens = std::vector<std::string>;

/// Words dropped by preprocess().
const std::vector<std::string>& stopwords();

/// Lowercase, split on anything that is not [a-z0-9], drop empties and stopwords.
Tokens preprocess(std::string_view text);

/// Contiguous grams of length 1..n_max, shorter grams first, each length in
/// text order. Grams are the tokens joined by single spaces.
std::vector<std::string> extract_ngrams(const Tokens& tokens, int n_max);

/// Valid grams (document frequency >= min_df), indexed lexicographically.
struct NGramVocabulary {
    int n_max = 3;
    std::size_t min_df = 2;
    std::size_t n_docs = 0;
    std::vector<std::string> grams;
    std::vector<std::size_t> df;

    std::size_t size() const noexcept { return grams.size(); }
    std::optional<std::size_t> index_of(const std::string& gram) const;
    double idf(std::size_t i) const;
    bool operator==(const NGramVocabulary&) const = default;
};

/// Keeps grams with df >= min_df. When more than `cap` survive, the `cap`
/// grams with the largest total-frequency x idf product are kept (ties by
/// gram text). Throws EmptyCorpusError on an empty corpus.
NGramVocabulary build_ngram_vocab(const std::vector<Tokens>& docs, int n_max = 3, std::size_t min_df = 2,
                                  std::size_t cap = 5000);

/// Gram index -> raw count in one document.
using MembershipVector = std::map<std::size_t, double>;

MembershipVector featurize(const Tokens& doc, const NGramVocabulary& vocab);
std::vector<double> densify(const MembershipVector& m, std::size_t width);

// ---------------------------------------------------------------------------
// Classifiers. Label 1 means a genuine bug.

enum class FilterKind { LogReg, RandomForest };
std::string_view to_string(FilterKind k);

struct LogRegOptions {
    double l2 = 1e-3;
    int epochs = 2000;
};

struct LogRegModel {
    std::vector<double> w;
    double b = 0.0;
    /// Regularized mean log-loss before each epoch, plus the final value.
    std::vector<double> loss_history;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;  // x[feature] <= threshold goes left
    double value = 0.0;         // leaf: fraction of positive training samples
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    double predict(std::span<const double> x) const;
};

struct ForestOptions {
    int n_trees = 50;
    int max_depth = 8;
    bool bootstrap = true;
};

struct BugFilterModel {
    FilterKind kind = FilterKind::LogReg;
    NGramVocabulary vocab;
    double threshold = 0.5;
    LogRegModel logreg;
    std::vector<DecisionTree> forest;

    /// Probability that the text describes a genuine bug.
    double score(const MembershipVector& x) const;
    double score_text(std::string_view text) const;
};

struct FilterOptions {
    LogRegOptions logreg;
    ForestOptions forest;
    double threshold = 0.5;
};

/// Throws DegenerateLabelsError unless both classes occur.
BugFilterModel train_filter(const std::vector<MembershipVector>& features, const std::vector<int>& labels,
                            const NGramVocabulary& vocab, FilterKind kind, std::uint64_t seed,
                            const FilterOptions& options = {});

struct FilterTrainConfig {
    int n_max = 3;
    std::size_t min_df = 2;
    std::size_t cap = 5000;
    std::size_t k_folds = 5;
    FilterOptions options;
};

struct FilterSelection {
    BugFilterModel model;  // winner retrained on every document
    double logreg_cv_f1 = 0.0;
    double forest_cv_f1 = 0.0;
    std::optional<std::string> fold_warning;
};

/// Builds the gram vocabulary, cross-validates both classifier kinds and
/// keeps the one with the higher mean fold F1 (logistic regression on ties).
FilterSelection select_filter(const std::vector<ingest::BugReportDoc>& docs, const FilterTrainConfig& config,
                              std::uint64_t seed);

/// Mean F1 over stratified folds for one classifier kind on prepared features.
double cross_validate_f1(const std::vector<MembershipVector>& features, const std::vector<int>& labels,
                         const NGramVocabulary& vocab, FilterKind kind, std::size_t k, std::uint64_t seed,
                         const FilterOptions& options, std::optional<std::string>* warning = nullptr);

struct FilterReport {
    std::vector<ingest::BugWarning> kept;
    std::size_t removed = 0;
    double removal_ratio = 0.0;
};

/// A warning is scored by its linked report text when `reports` has its
/// report_id, otherwise by its own message.
FilterReport filter_warnings(const std::vector<ingest::BugWarning>& warnings,
                             const std::map<std::string, std::string>& reports, const BugFilterModel& model);

nlohmann::json to_json(const NGramVocabulary& v);
NGramVocabulary ngram_vocab_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BugFilterModel& m);
BugFilterModel filter_model_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Context vectors

inline constexpr std::size_t kBugFeatureWidth = 10;

/// One-hot category scaled by (4 - priority), max-pooled over the warnings.
/// Throws EmptyInputError on an empty list.
nn::Tensor bug_feature(std::span<const ingest::BugWarning> warnings);
/// bug_feature projected through `projection` (d x 10).
encode::ContextVector bug_context(std::span<const ingest::BugWarning> warnings, const nn::Tensor& projection);

/// Per statement, the warnings whose line range overlaps the statement's.
/// END_BLOCK markers and statements without line information get none.
std::vector<std::vector<ingest::BugWarning>> warnings_by_statement(const std::vector<encode::StatementTree>& stmts,
                                                                   const std::vector<ingest::BugWarning>& warnings);

}  // namespace codectx::bugs
