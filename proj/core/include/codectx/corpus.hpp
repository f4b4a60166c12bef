#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codectx/ast.hpp"

namespace codectx::ingest {

// ---------------------------------------------------------------------------
// AST records: {"kind": string, "token": string|null, "children": [...]}, with
// an optional positive "line". Keys serialize in sorted order, so the dump of
// a loaded record is canonical.

nlohmann::json ast_to_json(const AstNode& node);
AstNode ast_from_json(const nlohmann::json& record);

std::string serialize_ast(const AstNode& node);
/// Throws FormatError naming the first offending field.
AstNode load_ast_record(std::string_view bytes);

// ---------------------------------------------------------------------------
// Bug-detector warnings

inline constexpr std::array<std::string_view, 10> kWarningCategories = {
    "CORRECTNESS", "BAD_PRACTICE", "STYLE",        "PERFORMANCE", "MALICIOUS_CODE",
    "MT_CORRECTNESS", "I18N",      "SECURITY",     "EXPERIMENTAL", "UNKNOWN",
};

/// Slot of `category` in kWarningCategories; unknown strings map to UNKNOWN.
std::size_t category_slot(std::string_view category);

struct BugWarning {
    std::string warning_type;
    std::string category = "UNKNOWN";
    int priority = 3;  // 1 (high) .. 3 (low)
    std::string class_name;
    std::optional<std::string> method_name;
    int line_start = 0;
    int line_end = 0;
    std::string message;
    /// Optional link to a bug-report document scored in place of `message`.
    std::optional<std::string> report_id;

    bool operator==(const BugWarning&) const = default;
};

/// Parses a BugCollection XML document; one warning per BugInstance, in
/// document order. Throws FormatError on malformed input.
std::vector<BugWarning> load_warnings(std::string_view xml);
std::string warnings_to_xml(const std::vector<BugWarning>& warnings);

nlohmann::json warning_to_json(const BugWarning& w);
BugWarning warning_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Bug-report documents

enum class ReportLabel { Bug, NonBug };

struct BugReportDoc {
    std::string id;
    std::string text;
    ReportLabel label = ReportLabel::Bug;
};

std::vector<BugReportDoc> parse_report_docs(std::string_view jsonl);
std::vector<BugReportDoc> load_report_docs(const std::filesystem::path& path);
std::string report_docs_to_jsonl(const std::vector<BugReportDoc>& docs);

// ---------------------------------------------------------------------------
// Task corpora

/// A program with its static-analysis side information.
struct CodeUnit {
    std::string id;
    AstNode ast;
    std::vector<BugWarning> warnings;
    std::optional<std::string> pattern;
    /// Task label when known (-1 otherwise); clone stores use it for T4 pairs.
    int label = -1;
};

struct ClassificationSample {
    std::string id;
    AstNode ast;
    int label = 0;
    std::vector<BugWarning> warnings;
    std::optional<std::string> pattern;
};

struct ClassificationCorpus {
    int classes = 0;
    std::vector<ClassificationSample> samples;
};

ClassificationCorpus parse_classification_corpus(std::string_view jsonl);
ClassificationCorpus load_classification_corpus(const std::filesystem::path& path);
std::string classification_corpus_to_jsonl(const ClassificationCorpus& corpus);

enum class CloneType { T1, T2, ST3, MT3, T4, None };

inline constexpr std::array<CloneType, 5> kPositiveCloneTypes = {CloneType::T1, CloneType::T2, CloneType::ST3,
                                                                  CloneType::MT3, CloneType::T4};

std::string_view to_string(CloneType t);
/// Accepts "T1".."T4", "ST3", "MT3", "NONE" (and "BCB-" prefixed forms).
std::optional<CloneType> parse_clone_type(std::string_view s);

struct ClonePair {
    std::string id_a;
    std::string id_b;
    int label = 0;
    CloneType clone_type = CloneType::None;
    /// For negatives: the stratum they were drawn to balance, if any.
    std::optional<CloneType> stratum;

    bool operator==(const ClonePair&) const = default;
};

struct CloneCorpus {
    std::map<std::string, CodeUnit> store;
    std::vector<ClonePair> pairs;

    /// Pairs grouped by clone type; negatives land under None.
    std::map<CloneType, std::vector<ClonePair>> by_type() const;
};

std::map<std::string, CodeUnit> parse_code_store(std::string_view jsonl);
std::vector<ClonePair> parse_clone_pairs(std::string_view jsonl);
/// Throws DanglingIdError listing every unresolved id.
CloneCorpus make_clone_corpus(std::map<std::string, CodeUnit> store, std::vector<ClonePair> pairs);
CloneCorpus load_clone_corpus(const std::filesystem::path& code_path, const std::filesystem::path& pair_path);

std::string code_store_to_jsonl(const std::map<std::string, CodeUnit>& store);
std::string clone_pairs_to_jsonl(const std::vector<ClonePair>& pairs);

/// Labeled pattern corpus: lines {"id", "ast"|"code", "pattern"}.
struct PatternSample {
    std::string id;
    AstNode ast;
    std::string pattern;
};
std::vector<PatternSample> parse_pattern_corpus(std::string_view jsonl);
std::vector<PatternSample> load_pattern_corpus(const std::filesystem::path& path);

/// Attaches warnings whose class_name equals a unit's id or the name of a
/// class declared in its AST. Returns the number of warnings attached.
std::size_t attach_warnings(std::vector<ClassificationSample>& samples, const std::vector<BugWarning>& warnings);

std::string read_file(const std::filesystem::path& path);

}  // namespace codectx::ingest
