#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "codectx/corpus.hpp"
#include "codectx/rng.hpp"

namespace codectx::synth {

/// Labeled bug-report documents, alternating bug / non-bug. Each document
/// mixes phrases typical of its class with shared filler words and random
/// identifiers, so the classes overlap lexically but remain learnable.
std::vector<ingest::BugReportDoc> report_corpus(std::size_t n, std::uint64_t seed);

/// `n` detector warnings of which `planted` (spread through the list) carry a
/// non-bug description. genuine[i] tells which is which.
struct PlantedWarnings {
    std::vector<ingest::BugWarning> warnings;
    std::vector<bool> genuine;
};
PlantedWarnings planted_warnings(std::size_t n, std::size_t planted, std::uint64_t seed);

/// A warning description in the style of a genuine bug or of noise.
std::string warning_message(bool genuine, Rng& rng);

// ---------------------------------------------------------------------------
// Programs

/// Number of distinct statement skeletons random_program can draw from.
inline constexpr int kSkeletonCount = 4;

/// Source of one function whose core statements follow the skeleton for
/// `label` (names, constants and filler statements vary). At least
/// `min_statements` statement nodes.
std::string random_program_source(int label, Rng& rng, std::size_t min_statements = 10);
ingest::AstNode random_program(int label, Rng& rng, std::size_t min_statements = 10);

/// `per_class` programs for each of `classes` skeleton labels, ids p<label><k>.
ingest::ClassificationCorpus program_corpus(std::size_t per_class, int classes, std::uint64_t seed);

/// Number of statement nodes in a tree.
std::size_t statement_count(const ingest::AstNode& ast);

// ---------------------------------------------------------------------------
// Clone pairs

/// Canonical alpha-renaming: identifiers become id0, id1, ... in order of
/// first appearance.
ingest::AstNode alpha_normalize(const ingest::AstNode& ast);

struct CloneGenResult {
    std::vector<ingest::ClonePair> pairs;
    std::map<std::string, ingest::CodeUnit> store;  // seeds and generated variants
    /// Statement edits applied per pair (0 for T1, T2 and T4).
    std::vector<std::size_t> edits;
};

/// `count` pairs of one type drawn from `seeds` (which need labels for T4 and
/// negatives). T1 re-renders the seed in a random layout and re-parses it; T2
/// renames every identifier consistently from a fixed pool; ST3 applies
/// 1..max(1, n/10) statement insertions or deletions, MT3 up to 30 percent;
/// T4 pairs two different seeds with the same label; None pairs seeds with
/// different labels. Throws UnsupportedTypeError when a type cannot be drawn.
CloneGenResult gen_synthetic_clones(const std::vector<ingest::CodeUnit>& seeds, ingest::CloneType type,
                                    std::size_t count, std::uint64_t rng_seed);

/// `n_seeds` random programs (labels dealt round-robin) with `per_type`
/// positives of each clone type and, per type, as many cross-label negatives
/// whose stratum names that type. Ids are prefixed with `prefix`.
ingest::CloneCorpus clone_benchmark(std::size_t n_seeds, std::size_t per_type, std::uint64_t seed,
                                    const std::string& prefix = "");

/// Up to `max_count` warnings on random lines of `ast`, about 70 percent with
/// genuine-bug descriptions and the rest with noise.
std::vector<ingest::BugWarning> random_warnings(const ingest::AstNode& ast, const std::string& class_name,
                                                std::size_t max_count, Rng& rng);
/// Replaces every unit's warnings with random_warnings (class name = unit id).
void plant_warnings(std::map<std::string, ingest::CodeUnit>& store, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pattern classes

/// One class (plus any interface it needs) planted with the structure of
/// `pattern` (one of patterns::default_labels()), padded with random members.
std::string pattern_class_source(const std::string& pattern, Rng& rng);

std::vector<ingest::PatternSample> pattern_corpus(std::size_t per_label, std::uint64_t seed);

/// Classification corpus of classes whose task label is the index of the
/// planted pattern in `labels`; every sample carries its pattern label and a
/// few warnings (some with noise descriptions) on lines of its class.
ingest::ClassificationCorpus pattern_task_corpus(std::size_t per_class, std::uint64_t seed,
                                                 const std::vector<std::string>& labels = {
                                                     "SINGLETON", "ADAPTER", "DECORATOR", "OBSERVER"});

}  // namespace codectx::synth
