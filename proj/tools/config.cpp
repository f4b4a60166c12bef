#include <algorithm>
#include <charconv>

#include "cli.hpp"
#include "codectx/errors.hpp"

namespace codectx::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T number(const std::string& key, const std::string& v) {
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("bad value for " + key + ": '" + v + "'");
    return out;
}

template <typename T>
T positive(const std::string& key, const std::string& v) {
    const T x = number<T>(key, v);
    if (!(x > 0)) throw ConfigError(key + " must be > 0, got " + v);
    return x;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "corpus",       "pairs",          "test_corpus",   "test_pairs", "warnings",         "reports",
        "pattern_corpus", "bundle",       "out",           "task",       "variant",          "dim",
        "hidden",       "rounds",         "fusion",        "epochs",     "batch",            "lr",
        "seed",         "min_count",      "embedding_epochs", "clone_threshold", "target_accuracy", "test_fraction",
        "n_max",        "min_df",         "n_estimators",  "learning_rate", "k_folds",       "n_seeds",
        "per_type",
    };
    return keys;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
    std::map<std::string, std::string> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::replace(key.begin(), key.end(), '-', '_');
        if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        out[key] = trim(std::string_view(t).substr(eq + 1));
    }
    return out;
}

RunConfig make_run_config(const std::map<std::string, std::string>& values, bool require_seed) {
    RunConfig c;
    for (const auto& [k, v] : values) {
        if (std::find(config_keys().begin(), config_keys().end(), k) == config_keys().end())
            throw ConfigError("unknown key '" + k + "'");
        if (k == "corpus") c.corpus = v;
        else if (k == "pairs") c.pairs = v;
        else if (k == "test_corpus") c.test_corpus = v;
        else if (k == "test_pairs") c.test_pairs = v;
        else if (k == "warnings") c.warnings = v;
        else if (k == "reports") c.reports = v;
        else if (k == "pattern_corpus") c.pattern_corpus = v;
        else if (k == "bundle") c.bundle = v;
        else if (k == "out") c.out = v;
        else if (k == "task") {
            if (v == "classify") c.task = tasks::TaskKind::Classify;
            else if (v == "clone") c.task = tasks::TaskKind::Clone;
            else throw ConfigError("invalid task '" + v + "'; expected classify or clone");
        } else if (k == "variant") {
            const auto parsed = tasks::parse_variant(v);
            if (!parsed) {
                std::string names;
                for (const auto var : tasks::kVariants) names += (names.empty() ? "" : ", ") + std::string(tasks::to_string(var));
                throw ConfigError("invalid variant '" + v + "'; expected one of " + names);
            }
            c.variant = *parsed;
        } else if (k == "dim") c.train.dim = positive<std::size_t>(k, v);
        else if (k == "hidden") c.train.hidden = positive<std::size_t>(k, v);
        else if (k == "rounds") c.train.rounds = positive<int>(k, v);
        else if (k == "fusion") {
            if (v == "node") c.train.fusion = encode::FusionLevel::Node;
            else if (v == "statement") c.train.fusion = encode::FusionLevel::Statement;
            else throw ConfigError("invalid fusion '" + v + "'; expected node or statement");
        } else if (k == "epochs") {
            c.train.epochs = number<int>(k, v);
            if (c.train.epochs < 0) throw ConfigError("epochs must be >= 0");
        } else if (k == "batch") c.train.batch = positive<std::size_t>(k, v);
        else if (k == "lr") c.train.lr = positive<double>(k, v);
        else if (k == "seed") {
            c.train.seed = number<std::uint64_t>(k, v);
            c.seed_given = true;
        } else if (k == "min_count") c.train.min_count = positive<int>(k, v);
        else if (k == "embedding_epochs") c.train.embedding_epochs = number<int>(k, v);
        else if (k == "clone_threshold") c.train.clone_threshold = number<double>(k, v);
        else if (k == "target_accuracy") c.train.target_accuracy = number<double>(k, v);
        else if (k == "test_fraction") {
            c.test_fraction = number<double>(k, v);
            if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0,1)");
        } else if (k == "n_max") c.n_max = positive<int>(k, v);
        else if (k == "min_df") c.min_df = positive<std::size_t>(k, v);
        else if (k == "n_estimators") c.n_estimators = positive<int>(k, v);
        else if (k == "learning_rate") c.learning_rate = positive<double>(k, v);
        else if (k == "k_folds") {
            c.k_folds = number<std::size_t>(k, v);
            if (c.k_folds < 2) throw ConfigError("k_folds must be >= 2");
        } else if (k == "n_seeds") c.n_seeds = positive<std::size_t>(k, v);
        else if (k == "per_type") c.per_type = positive<std::size_t>(k, v);
    }
    if (!(c.train.clone_threshold > 0.0 && c.train.clone_threshold < 1.0))
        throw ConfigError("clone_threshold must lie in (0,1)");
    if (require_seed && !c.seed_given) throw ConfigError("seed is required (config file or --seed)");
    c.echo = values;
    return c;
}

}  // namespace codectx::cli
