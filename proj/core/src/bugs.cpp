#include "codectx/bugs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "codectx/errors.hpp"
#include "codectx/rng.hpp"

namespace codectx::bugs {

const std::vector<std::string>& stopwords() {
    static const std::vector<std::string> words = {"a",  "an", "the",  "and",  "or", "of",   "to",   "in",
                                                   "on", "for", "is",  "are",  "was", "were", "be",  "it",
                                                   "this", "that", "with", "as", "at", "by", "from"};
    return words;
}

Tokens preprocess(std::string_view text) {
    static const std::set<std::string, std::less<>> stop(stopwords().begin(), stopwords().end());
    Tokens out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !stop.contains(cur)) out.push_back(cur);
        cur.clear();
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) && c < 0x80) cur.push_back(static_cast<char>(std::tolower(c)));
        else flush();
    }
    flush();
    return out;
}

std::vector<std::string> extract_ngrams(const Tokens& tokens, int n_max) {
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    std::vector<std::string> grams;
    const std::size_t L = tokens.size();
    for (std::size_t n = 1; n <= static_cast<std::size_t>(n_max) && n <= L; ++n) {
        for (std::size_t i = 0; i + n <= L; ++i) {
            std::string g = tokens[i];
            for (std::size_t j = i + 1; j < i + n; ++j) g += ' ' + tokens[j];
            grams.push_back(std::move(g));
        }
    }
    return grams;
}

std::optional<std::size_t> NGramVocabulary::index_of(const std::string& gram) const {
    const auto it = std::lower_bound(grams.begin(), grams.end(), gram);
    if (it == grams.end() || *it != gram) return std::nullopt;
    return static_cast<std::size_t>(it - grams.begin());
}

double NGramVocabulary::idf(std::size_t i) const {
    return std::log(static_cast<double>(n_docs) / static_cast<double>(df.at(i)));
}

NGramVocabulary build_ngram_vocab(const std::vector<Tokens>& docs, int n_max, std::size_t min_df, std::size_t cap) {
    if (docs.empty()) throw EmptyCorpusError();
    if (min_df < 1) throw ConfigError("min_df must be >= 1");
    std::map<std::string, std::pair<std::size_t, std::size_t>> stats;  // gram -> (df, total count)
    for (const auto& doc : docs) {
        std::set<std::string> seen;
        for (auto& g : extract_ngrams(doc, n_max)) {
            auto& s = stats[g];
            ++s.second;
            if (seen.insert(std::move(g)).second) ++s.first;
        }
    }
    struct Candidate {
        std::string gram;
        std::size_t df;
        double rank;
    };
    std::vector<Candidate> kept;
    const double n = static_cast<double>(docs.size());
    for (auto& [g, s] : stats) {
        if (s.first >= min_df)
            kept.push_back({g, s.first, static_cast<double>(s.second) * std::log(n / static_cast<double>(s.first))});
    }
    if (kept.size() > cap) {
        std::stable_sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) { return a.rank > b.rank; });
        kept.resize(cap);
        std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) { return a.gram < b.gram; });
    }
    NGramVocabulary v;
    v.n_max = n_max;
    v.min_df = min_df;
    v.n_docs = docs.size();
    for (auto& c : kept) {
        v.grams.push_back(std::move(c.gram));
        v.df.push_back(c.df);
    }
    return v;
}

MembershipVector featurize(const Tokens& doc, const NGramVocabulary& vocab) {
    MembershipVector m;
    for (const auto& g : extract_ngrams(doc, vocab.n_max)) {
        if (const auto i = vocab.index_of(g)) m[*i] += 1.0;
    }
    return m;
}

std::vector<double> densify(const MembershipVector& m, std::size_t width) {
    std::vector<double> x(width, 0.0);
    for (const auto& [i, c] : m) {
        if (i >= width) throw ShapeError("membership index " + std::to_string(i) + " beyond width " + std::to_string(width));
        x[i] = c;
    }
    return x;
}

std::string_view to_string(FilterKind k) { return k == FilterKind::LogReg ? "LOGREG" : "RANDOM_FOREST"; }

// ---------------------------------------------------------------------------
// Logistic regression

namespace {

double log1pexp(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double logreg_loss(const std::vector<std::vector<double>>& X, const std::vector<int>& y, const LogRegModel& m,
                   double l2) {
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double z = dot(m.w, X[i]) + m.b;
        loss += y[i] == 1 ? log1pexp(-z) : log1pexp(z);
    }
    return loss / static_cast<double>(X.size()) + 0.5 * l2 * dot(m.w, m.w);
}

LogRegModel fit_logreg(const std::vector<std::vector<double>>& X, const std::vector<int>& y, std::size_t width,
                       const LogRegOptions& opt) {
    LogRegModel m;
    m.w.assign(width, 0.0);
    // Step 1/L with L bounding the loss Hessian keeps every step a descent step.
    double max_sq = 0.0;
    for (const auto& x : X) max_sq = std::max(max_sq, dot(x, x) + 1.0);
    const double lr = 1.0 / (0.25 * max_sq + opt.l2);
    const double inv_n = 1.0 / static_cast<double>(X.size());
    std::vector<double> gw(width);
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        m.loss_history.push_back(logreg_loss(X, y, m, opt.l2));
        std::fill(gw.begin(), gw.end(), 0.0);
        double gb = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            const double r = (nn::sigmoid(dot(m.w, X[i]) + m.b) - y[i]) * inv_n;
            for (std::size_t j = 0; j < width; ++j) gw[j] += r * X[i][j];
            gb += r;
        }
        for (std::size_t j = 0; j < width; ++j) m.w[j] -= lr * (gw[j] + opt.l2 * m.w[j]);
        m.b -= lr * gb;
    }
    m.loss_history.push_back(logreg_loss(X, y, m, opt.l2));
    return m;
}

// ---------------------------------------------------------------------------
// Decision trees

double gini(std::size_t pos, std::size_t n) {
    if (n == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(n);
    return 2.0 * p * (1.0 - p);
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;  // weighted child impurity
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& X, const std::vector<int>& y, int max_depth, Rng& rng)
        : X_(X), y_(y), max_depth_(max_depth), rng_(rng), width_(X.empty() ? 0 : X[0].size()) {
        mtry_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(width_)))));
    }

    DecisionTree build(std::vector<std::size_t> rows) {
        tree_.nodes.clear();
        grow(rows, 0);
        return std::move(tree_);
    }

private:
    int grow(const std::vector<std::size_t>& rows, int depth) {
        std::size_t pos = 0;
        for (std::size_t r : rows) pos += y_[r] == 1;
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back({});
        tree_.nodes[id].value = rows.empty() ? 0.0 : static_cast<double>(pos) / static_cast<double>(rows.size());
        if (depth >= max_depth_ || pos == 0 || pos == rows.size()) return id;

        const Split s = best_split(rows, gini(pos, rows.size()));
        if (s.feature < 0) return id;
        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) (X_[r][s.feature] <= s.threshold ? left : right).push_back(r);
        const int l = grow(left, depth + 1);
        const int rt = grow(right, depth + 1);
        tree_.nodes[id].feature = s.feature;
        tree_.nodes[id].threshold = s.threshold;
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = rt;
        return id;
    }

    // Examines mtry random features; keeps drawing past mtry until some feature
    // yields a split that lowers impurity.
    Split best_split(const std::vector<std::size_t>& rows, double parent) {
        std::vector<std::size_t> order(width_);
        std::iota(order.begin(), order.end(), 0);
        rng_.shuffle(std::span<std::size_t>(order));
        Split best;
        best.impurity = parent;
        std::vector<std::pair<double, int>> col(rows.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            if (k >= mtry_ && best.feature >= 0) break;
            const std::size_t f = order[k];
            for (std::size_t i = 0; i < rows.size(); ++i) col[i] = {X_[rows[i]][f], y_[rows[i]]};
            std::sort(col.begin(), col.end());
            std::size_t total_pos = 0;
            for (const auto& c : col) total_pos += c.second == 1;
            std::size_t left_pos = 0;
            const std::size_t n = col.size();
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_pos += col[i].second == 1;
                if (col[i].first == col[i + 1].first) continue;
                const std::size_t nl = i + 1, nr = n - nl;
                const double imp = (static_cast<double>(nl) * gini(left_pos, nl) +
                                    static_cast<double>(nr) * gini(total_pos - left_pos, nr)) /
                                   static_cast<double>(n);
                if (imp < best.impurity - 1e-12) {
                    best.feature = static_cast<int>(f);
                    best.threshold = 0.5 * (col[i].first + col[i + 1].first);
                    best.impurity = imp;
                }
            }
        }
        return best;
    }

    const std::vector<std::vector<double>>& X_;
    const std::vector<int>& y_;
    int max_depth_;
    Rng& rng_;
    std::size_t width_;
    std::size_t mtry_ = 1;
    DecisionTree tree_;
};

}  // namespace

double DecisionTree::predict(std::span<const double> x) const {
    if (nodes.empty()) return 0.0;
    std::size_t i = 0;
    while (nodes[i].feature >= 0) i = static_cast<std::size_t>(x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right);
    return nodes[i].value;
}

double BugFilterModel::score(const MembershipVector& m) const {
    const std::vector<double> x = densify(m, vocab.size());
    if (kind == FilterKind::LogReg) return nn::sigmoid(dot(logreg.w, x) + logreg.b);
    if (forest.empty()) return 0.0;
    double s = 0.0;
    for (const auto& t : forest) s += t.predict(x);
    return s / static_cast<double>(forest.size());
}

double BugFilterModel::score_text(std::string_view text) const { return score(featurize(preprocess(text), vocab)); }

BugFilterModel train_filter(const std::vector<MembershipVector>& features, const std::vector<int>& labels,
                            const NGramVocabulary& vocab, FilterKind kind, std::uint64_t seed,
                            const FilterOptions& options) {
    if (features.size() != labels.size())
        throw ShapeError("train_filter: " + std::to_string(features.size()) + " rows, " + std::to_string(labels.size()) +
                         " labels");
    bool has_pos = false, has_neg = false;
    for (int y : labels) (y == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw DegenerateLabelsError();
    if (!(options.threshold > 0.0 && options.threshold < 1.0)) throw ConfigError("filter threshold must lie in (0,1)");

    std::vector<std::vector<double>> X;
    X.reserve(features.size());
    for (const auto& f : features) X.push_back(densify(f, vocab.size()));

    BugFilterModel model;
    model.kind = kind;
    model.vocab = vocab;
    model.threshold = options.threshold;
    if (kind == FilterKind::LogReg) {
        model.logreg = fit_logreg(X, labels, vocab.size(), options.logreg);
        return model;
    }
    Rng rng(seed);
    for (int t = 0; t < options.forest.n_trees; ++t) {
        Rng tree_rng = rng.fork(static_cast<std::uint64_t>(t));
        std::vector<std::size_t> rows(X.size());
        if (options.forest.bootstrap) {
            for (auto& r : rows) r = tree_rng.below(X.size());
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        TreeBuilder builder(X, labels, options.forest.max_depth, tree_rng);
        model.forest.push_back(builder.build(std::move(rows)));
    }
    return model;
}

double cross_validate_f1(const std::vector<MembershipVector>& features, const std::vector<int>& labels,
                         const NGramVocabulary& vocab, FilterKind kind, std::size_t k, std::uint64_t seed,
                         const FilterOptions& options, std::optional<std::string>* warning) {
    const eval::FoldPlan plan = eval::stratified_folds(labels, k, seed);
    if (warning) *warning = plan.warning;
    double total = 0.0;
    for (std::size_t f = 0; f < plan.k; ++f) {
        std::vector<char> held(labels.size(), 0);
        for (std::size_t i : plan.folds[f]) held[i] = 1;
        std::vector<MembershipVector> xs;
        std::vector<int> ys;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (held[i]) continue;
            xs.push_back(features[i]);
            ys.push_back(labels[i]);
        }
        const BugFilterModel m = train_filter(xs, ys, vocab, kind, seed + f, options);
        std::vector<int> pred, truth;
        for (std::size_t i : plan.folds[f]) {
            pred.push_back(m.score(features[i]) >= m.threshold ? 1 : 0);
            truth.push_back(labels[i]);
        }
        total += eval::binary_metrics(pred, truth).f1;
    }
    return total / static_cast<double>(plan.k);
}

FilterSelection select_filter(const std::vector<ingest::BugReportDoc>& docs, const FilterTrainConfig& config,
                              std::uint64_t seed) {
    std::vector<Tokens> tokens;
    std::vector<int> labels;
    for (const auto& d : docs) {
        tokens.push_back(preprocess(d.text));
        labels.push_back(d.label == ingest::ReportLabel::Bug ? 1 : 0);
    }
    const NGramVocabulary vocab = build_ngram_vocab(tokens, config.n_max, config.min_df, config.cap);
    std::vector<MembershipVector> features;
    for (const auto& t : tokens) features.push_back(featurize(t, vocab));

    FilterSelection sel;
    sel.logreg_cv_f1 = cross_validate_f1(features, labels, vocab, FilterKind::LogReg, config.k_folds, seed,
                                         config.options, &sel.fold_warning);
    sel.forest_cv_f1 = cross_validate_f1(features, labels, vocab, FilterKind::RandomForest, config.k_folds, seed,
                                         config.options);
    const FilterKind winner = sel.forest_cv_f1 > sel.logreg_cv_f1 ? FilterKind::RandomForest : FilterKind::LogReg;
    sel.model = train_filter(features, labels, vocab, winner, seed, config.options);
    return sel;
}

FilterReport filter_warnings(const std::vector<ingest::BugWarning>& warnings,
                             const std::map<std::string, std::string>& reports, const BugFilterModel& model) {
    FilterReport r;
    for (const auto& w : warnings) {
        std::string_view text = w.message;
        if (w.report_id) {
            if (const auto it = reports.find(*w.report_id); it != reports.end()) text = it->second;
        }
        if (model.score_text(text) >= model.threshold) r.kept.push_back(w);
        else ++r.removed;
    }
    r.removal_ratio = warnings.empty() ? 0.0 : static_cast<double>(r.removed) / static_cast<double>(warnings.size());
    return r;
}

// ---------------------------------------------------------------------------
// Persistence

nlohmann::json to_json(const NGramVocabulary& v) {
    return {{"n_max", v.n_max}, {"min_df", v.min_df}, {"n_docs", v.n_docs}, {"grams", v.grams}, {"df", v.df}};
}

NGramVocabulary ngram_vocab_from_json(const nlohmann::json& j) {
    NGramVocabulary v;
    v.n_max = j.at("n_max").get<int>();
    v.min_df = j.at("min_df").get<std::size_t>();
    v.n_docs = j.at("n_docs").get<std::size_t>();
    v.grams = j.at("grams").get<std::vector<std::string>>();
    v.df = j.at("df").get<std::vector<std::size_t>>();
    if (v.df.size() != v.grams.size()) throw FormatError("df", "length differs from grams");
    if (!std::is_sorted(v.grams.begin(), v.grams.end())) throw FormatError("grams", "not sorted");
    return v;
}

nlohmann::json to_json(const BugFilterModel& m) {
    nlohmann::json j = {{"kind", to_string(m.kind)}, {"threshold", m.threshold}, {"vocab", to_json(m.vocab)}};
    if (m.kind == FilterKind::LogReg) {
        j["w"] = m.logreg.w;
        j["b"] = m.logreg.b;
    } else {
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& t : m.forest) {
            nlohmann::json nodes = nlohmann::json::array();
            for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
            trees.push_back(std::move(nodes));
        }
        j["trees"] = std::move(trees);
    }
    return j;
}

BugFilterModel filter_model_from_json(const nlohmann::json& j) {
    BugFilterModel m;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "LOGREG") m.kind = FilterKind::LogReg;
    else if (kind == "RANDOM_FOREST") m.kind = FilterKind::RandomForest;
    else throw FormatError("kind", kind);
    m.threshold = j.at("threshold").get<double>();
    m.vocab = ngram_vocab_from_json(j.at("vocab"));
    if (m.kind == FilterKind::LogReg) {
        m.logreg.w = j.at("w").get<std::vector<double>>();
        m.logreg.b = j.at("b").get<double>();
        if (m.logreg.w.size() != m.vocab.size()) throw FormatError("w", "width differs from vocabulary");
    } else {
        for (const auto& t : j.at("trees")) {
            DecisionTree tree;
            for (const auto& n : t) {
                TreeNode node{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                              n.at(4).get<double>()};
                const int count = static_cast<int>(t.size());
                if (node.feature >= static_cast<int>(m.vocab.size()) ||
                    (node.feature >= 0 && (node.left < 0 || node.left >= count || node.right < 0 || node.right >= count)))
                    throw FormatError("trees", "node out of range");
                tree.nodes.push_back(node);
            }
            m.forest.push_back(std::move(tree));
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Context vectors

nn::Tensor bug_feature(std::span<const ingest::BugWarning> warnings) {
    if (warnings.empty()) throw EmptyInputError("bug context needs at least one warning");
    nn::Tensor raw({kBugFeatureWidth});
    for (const auto& w : warnings) {
        const std::size_t slot = ingest::category_slot(w.category);
        raw[slot] = std::max(raw[slot], static_cast<double>(4 - w.priority));
    }
    return raw;
}

encode::ContextVector bug_context(std::span<const ingest::BugWarning> warnings, const nn::Tensor& projection) {
    if (projection.rank() != 2 || projection.cols() != kBugFeatureWidth)
        throw ShapeError("bug projection must be d x " + std::to_string(kBugFeatureWidth) + ", got " +
                         projection.shape_string());
    const nn::Tensor raw = bug_feature(warnings);
    nn::Tensor out({projection.rows()});
    nn::matvec_acc(projection, raw.values(), out.values());
    return {encode::Channel::Bug, std::nullopt, std::move(out)};
}

std::vector<std::vector<ingest::BugWarning>> warnings_by_statement(const std::vector<encode::StatementTree>& stmts,
                                                                   const std::vector<ingest::BugWarning>& warnings) {
    std::vector<std::vector<ingest::BugWarning>> out(stmts.size());
    for (std::size_t i = 0; i < stmts.size(); ++i) {
        const auto& s = stmts[i];
        if (s.is_end_block() || s.line_start <= 0) continue;
        for (const auto& w : warnings) {
            if (w.line_start <= s.line_end && w.line_end >= s.line_start) out[i].push_back(w);
        }
    }
    return out;
}

}  // namespace codectx::bugs
