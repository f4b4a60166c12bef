#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codectx/tasks.hpp"

namespace codectx::cli {

/// Effective configuration of one command: file values overridden by flags.
struct RunConfig {
    // paths
    std::filesystem::path corpus;          // classification corpus, or clone code store
    std::filesystem::path pairs;           // clone pairs
    std::filesystem::path test_corpus;     // held-out set; split from corpus when empty
    std::filesystem::path test_pairs;
    std::filesystem::path warnings;        // BugCollection XML attached by class name
    std::filesystem::path reports;         // labeled report documents (filter training, linked texts)
    std::filesystem::path pattern_corpus;  // labeled classes for the pattern model
    std::filesystem::path bundle;
    std::filesystem::path out = ".";

    tasks::TaskKind task = tasks::TaskKind::Classify;
    tasks::Variant variant = tasks::Variant::None;
    tasks::TrainConfig train;
    double test_fraction = 0.3;

    // channel settings
    int n_max = 3;
    std::size_t min_df = 2;
    int n_estimators = 100;
    double learning_rate = 1.0;
    std::size_t k_folds = 5;

    // gen-clones
    std::size_t n_seeds = 30;
    std::size_t per_type = 10;

    bool seed_given = false;
    /// Every key that was set, echoed into bundles and reports.
    std::map<std::string, std::string> echo;
};

/// Keys accepted in config files and as --<key> flags.
const std::vector<std::string>& config_keys();

/// Parses key=value lines; '#' starts a comment. Throws ConfigError.
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// Builds a validated RunConfig. Throws ConfigError (unknown key, bad value,
/// missing seed when `require_seed`).
RunConfig make_run_config(const std::map<std::string, std::string>& values, bool require_seed);

/// Entry point shared by the executable and in-process tests. Returns the
/// process exit code: 0 ok, 2 usage, 3 data or version, 4 internal check failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Report tables (TSV).

std::string classify_table(const std::map<tasks::Variant, eval::Metrics>& results, const RunConfig& cfg);
std::string clone_table(const std::map<tasks::Variant, std::map<std::string, eval::Metrics>>& results,
                        const RunConfig& cfg);

}  // namespace codectx::cli
