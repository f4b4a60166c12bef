#include "codectx/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "codectx/errors.hpp"

namespace codectx::patterns {

using ingest::AstNode;
namespace kind = ingest::kind;

const std::array<std::string_view, kFeatureCount>& feature_names() {
    static const std::array<std::string_view, kFeatureCount> names = {
        "method_count",
        "field_count",
        "constructor_count",
        "private_constructor_flag",
        "static_self_field_flag",
        "implemented_interface_count",
        "superclass_flag",
        "abstract_flag",
        "static_factory_method_count",
        "interface_typed_field_count",
        "collection_field_count",
        "override_count",
        "delegating_method_count",
        "self_returning_method_count",
        "iteration_notify_call_count",
        "parameter_count_mean",
    };
    return names;
}

const std::vector<std::string>& default_labels() {
    static const std::vector<std::string> labels = {"SINGLETON", "FACTORY_METHOD", "ADAPTER",
                                                    "DECORATOR", "OBSERVER",       "NONE"};
    return labels;
}

// ---------------------------------------------------------------------------
// Feature extraction

namespace {

const std::set<std::string, std::less<>> kPrimitive = {"void",  "int",  "long",   "short",  "byte",
                                                       "char",  "float", "double", "boolean"};
const std::set<std::string, std::less<>> kCollections = {"List",  "ArrayList",  "Set",    "HashSet",
                                                         "Map",   "HashMap",    "Collection", "Vector",
                                                         "LinkedList", "Queue", "Deque"};

bool has_modifier(const AstNode& n, std::string_view mod) {
    for (const auto& c : n.children) {
        if (c.is(kind::kModifier) && c.token == mod) return true;
    }
    return false;
}

const AstNode* child_of_kind(const AstNode& n, std::string_view k) {
    for (const auto& c : n.children) {
        if (c.is(k)) return &c;
    }
    return nullptr;
}

std::string type_name(const AstNode& member) {
    const AstNode* t = child_of_kind(member, kind::kType);
    return t && t->token ? *t->token : std::string();
}

std::string member_name(const AstNode& member) {
    const AstNode* id = child_of_kind(member, kind::kIdentifier);
    return id && id->token ? *id->token : std::string();
}

// Leading identifier tokens of a call target (Call children before Args).
std::vector<std::string> call_path(const AstNode& call) {
    std::vector<std::string> path;
    for (const auto& c : call.children) {
        if (c.is(kind::kIdentifier) && c.token) path.push_back(*c.token);
        else if (c.is(kind::kCall)) path.push_back("()");
    }
    return path;
}

bool calls_on_field(const AstNode& body, const std::set<std::string>& fields) {
    bool found = false;
    ingest::preorder(body, [&](const AstNode& n) {
        if (found || !n.is(kind::kCall)) return;
        const auto path = call_path(n);
        if (path.size() >= 2 && fields.contains(path[0])) found = true;
        if (path.size() >= 3 && path[0] == "this" && fields.contains(path[1])) found = true;
    });
    return found;
}

bool returns_this(const AstNode& body) {
    bool found = false;
    ingest::preorder(body, [&](const AstNode& n) {
        if (n.is(kind::kReturn) && n.children.size() == 1 && n.children[0].is(kind::kIdentifier) &&
            n.children[0].token == "this")
            found = true;
    });
    return found;
}

// Calls with an identifier receiver lexically inside a loop.
std::size_t loop_receiver_calls(const AstNode& n, bool in_loop) {
    std::size_t count = 0;
    if (in_loop && n.is(kind::kCall)) {
        const auto path = call_path(n);
        if (path.size() >= 2 && path[0] != "()") ++count;
    }
    const bool loop = in_loop || n.is(kind::kWhile) || n.is(kind::kFor) || n.is(kind::kForEach);
    for (const auto& c : n.children) count += loop_receiver_calls(c, loop);
    return count;
}

}  // namespace

PatternFeatures extract_pattern_features(const AstNode& root) {
    const AstNode* cls = nullptr;
    std::set<std::string> interfaces;
    if (root.is(kind::kClassDef)) {
        cls = &root;
    } else if (root.is(kind::kCompilationUnit)) {
        std::size_t classes = 0;
        for (const auto& c : root.children) {
            if (c.is(kind::kClassDef)) {
                cls = &c;
                ++classes;
            } else if (c.is(kind::kInterfaceDef)) {
                interfaces.insert(member_name(c));
            }
        }
        if (classes != 1)
            throw NotAClassError("compilation unit declares " + std::to_string(classes) + " classes, expected 1");
    } else {
        throw NotAClassError("root kind " + root.kind);
    }

    const std::string class_name = member_name(*cls);
    PatternFeatures f{};
    if (const AstNode* impl = child_of_kind(*cls, kind::kImplements)) {
        f[5] = static_cast<double>(impl->children.size());
        for (const auto& t : impl->children) {
            if (t.token) interfaces.insert(*t.token);
        }
    }
    f[6] = child_of_kind(*cls, kind::kExtends) ? 1.0 : 0.0;
    f[7] = has_modifier(*cls, "abstract") ? 1.0 : 0.0;

    std::set<std::string> field_names;
    for (const auto& m : cls->children) {
        if (!m.is(kind::kFieldDecl)) continue;
        ++f[1];
        const std::string t = type_name(m);
        field_names.insert(member_name(m));
        if (has_modifier(m, "static") && t == class_name) f[4] = 1.0;
        if (interfaces.contains(t)) ++f[9];
        if (kCollections.contains(t)) ++f[10];
    }

    double params = 0.0;
    for (const auto& m : cls->children) {
        if (has_modifier(m, "@Override")) ++f[11];
        if (m.is(kind::kCtorDef)) {
            ++f[2];
            if (has_modifier(m, "private")) f[3] = 1.0;
            continue;
        }
        if (!m.is(kind::kMethodDef) && !m.is(kind::kMethodDecl)) continue;
        ++f[0];
        if (const AstNode* ps = child_of_kind(m, kind::kParams)) params += static_cast<double>(ps->children.size());
        if (!m.is(kind::kMethodDef)) continue;
        if (has_modifier(m, "static") && !kPrimitive.contains(type_name(m))) ++f[8];
        if (calls_on_field(m, field_names)) ++f[12];
        if (returns_this(m)) ++f[13];
        f[14] += static_cast<double>(loop_receiver_calls(m, false));
    }
    f[15] = f[0] > 0 ? params / f[0] : 0.0;
    return f;
}

// ---------------------------------------------------------------------------
// Boosting

namespace {

std::size_t argmax_first(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

struct Candidate {
    Stump stump;
    double error = 0.0;
};

// Exhaustive weighted search; the first candidate is the constant stump.
Candidate best_stump(const std::vector<PatternFeatures>& X, const std::vector<std::size_t>& y,
                     const std::vector<double>& w, std::size_t K) {
    std::vector<double> total(K, 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) total[y[i]] += w[i];
    const double sum = std::accumulate(total.begin(), total.end(), 0.0);
    Candidate best;
    const std::size_t major = argmax_first(total);
    double max0 = X[0][0];
    for (const auto& x : X) max0 = std::max(max0, x[0]);
    best.stump = Stump{0, max0, major, major};
    best.error = sum - total[major];

    std::vector<std::size_t> order(X.size());
    std::vector<double> left(K), right(K);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return X[a][f] < X[b][f]; });
        std::fill(left.begin(), left.end(), 0.0);
        for (std::size_t p = 0; p + 1 < order.size(); ++p) {
            left[y[order[p]]] += w[order[p]];
            const double lo = X[order[p]][f], hi = X[order[p + 1]][f];
            if (lo == hi) continue;
            for (std::size_t k = 0; k < K; ++k) right[k] = total[k] - left[k];
            const std::size_t lb = argmax_first(left), rb = argmax_first(right);
            const double err = sum - left[lb] - right[rb];
            if (err < best.error - 1e-15) {
                best.stump = Stump{f, 0.5 * (lo + hi), lb, rb};
                best.error = err;
            }
        }
    }
    return best;
}

std::vector<double> vote(const PatternFeatures& x, const AdaBoostModel& m) {
    std::vector<double> scores(m.classes.size(), 0.0);
    for (std::size_t t = 0; t < m.stumps.size(); ++t) scores[m.stumps[t].predict(x)] += m.alphas[t];
    return scores;
}

}  // namespace

AdaBoostModel train_pattern_model(const std::vector<LabeledFeatures>& samples, const std::vector<std::string>& classes,
                                  const BoostOptions& options, BoostTrace* trace) {
    if (options.n_estimators < 0) throw ConfigError("n_estimators must be >= 0");
    if (!(options.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    std::set<std::string> present;
    for (const auto& s : samples) {
        if (std::find(classes.begin(), classes.end(), s.label) == classes.end()) throw UnknownLabelError(s.label);
        present.insert(s.label);
    }
    AdaBoostModel model;
    model.n_estimators = options.n_estimators;
    model.learning_rate = options.learning_rate;
    for (const auto& c : classes) {
        if (present.contains(c)) model.classes.push_back(c);
    }
    const std::size_t K = model.classes.size();
    if (K < 2) throw DegenerateLabelsError();

    std::vector<PatternFeatures> X;
    std::vector<std::size_t> y;
    for (const auto& s : samples) {
        X.push_back(s.x);
        y.push_back(static_cast<std::size_t>(
            std::find(model.classes.begin(), model.classes.end(), s.label) - model.classes.begin()));
    }
    const std::size_t n = X.size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    const double limit = 1.0 - 1.0 / static_cast<double>(K);
    BoostTrace local;
    BoostTrace& tr = trace ? *trace : local;
    tr = {};

    for (int round = 0; round < options.n_estimators; ++round) {
        const Candidate c = best_stump(X, y, w, K);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (c.stump.predict(X[i]) != y[i]) err += w[i];
        }
        tr.weighted_error.push_back(err);
        if (err >= limit) {
            tr.stopped_early = true;
            break;
        }
        const bool perfect = err <= 0.0;
        const double alpha =
            perfect ? 1.0 : options.learning_rate * (std::log((1.0 - err) / err) + std::log(static_cast<double>(K - 1)));
        model.stumps.push_back(c.stump);
        model.alphas.push_back(alpha);
        if (!perfect) {
            for (std::size_t i = 0; i < n; ++i) {
                if (c.stump.predict(X[i]) != y[i]) w[i] *= std::exp(alpha);
            }
        }
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& v : w) v /= sum;
        tr.weight_sum.push_back(std::accumulate(w.begin(), w.end(), 0.0));
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < n; ++i) wrong += argmax_first(vote(X[i], model)) != y[i];
        tr.training_error.push_back(static_cast<double>(wrong) / static_cast<double>(n));
        if (perfect) {
            tr.stopped_early = round + 1 < options.n_estimators;
            break;
        }
    }
    return model;
}

PatternPrediction predict_pattern(const PatternFeatures& x, const AdaBoostModel& model) {
    if (model.classes.empty()) throw DegenerateLabelsError();
    PatternPrediction p;
    p.scores = vote(x, model);
    p.label = model.classes[argmax_first(p.scores)];
    return p;
}

CvReport stratified_kfold(const std::vector<LabeledFeatures>& samples, std::size_t k, std::uint64_t seed,
                          const std::vector<std::string>& classes, const BoostOptions& options) {
    std::vector<int> labels;
    for (const auto& s : samples) {
        const auto it = std::find(classes.begin(), classes.end(), s.label);
        if (it == classes.end()) throw UnknownLabelError(s.label);
        labels.push_back(static_cast<int>(it - classes.begin()));
    }
    CvReport report;
    report.plan = eval::stratified_folds(labels, k, seed);
    std::set<int> seen(labels.begin(), labels.end());
    for (const auto& fold : report.plan.folds) {
        std::vector<char> held(samples.size(), 0);
        for (std::size_t i : fold) held[i] = 1;
        std::vector<LabeledFeatures> train;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!held[i]) train.push_back(samples[i]);
        }
        const AdaBoostModel m = train_pattern_model(train, classes, options);
        std::vector<int> pred, truth;
        for (std::size_t i : fold) {
            const auto label = predict_pattern(samples[i].x, m).label;
            pred.push_back(static_cast<int>(std::find(classes.begin(), classes.end(), label) - classes.begin()));
            truth.push_back(labels[i]);
        }
        FoldResult r;
        r.test_size = fold.size();
        r.accuracy = eval::accuracy(pred, truth);
        for (int c : seen) r.per_class[classes[static_cast<std::size_t>(c)]] = eval::class_metrics(pred, truth, c);
        report.folds.push_back(std::move(r));
    }
    const double folds = static_cast<double>(report.folds.size());
    for (const auto& r : report.folds) report.mean_accuracy += r.accuracy / folds;
    for (int c : seen) {
        const auto& name = classes[static_cast<std::size_t>(c)];
        eval::Metrics mean;
        mean.accuracy = report.mean_accuracy;
        for (const auto& r : report.folds) {
            const auto& m = r.per_class.at(name);
            mean.precision += m.precision / folds;
            mean.recall += m.recall / folds;
            mean.f1 += m.f1 / folds;
            mean.tp += m.tp;
            mean.fp += m.fp;
            mean.tn += m.tn;
            mean.fn += m.fn;
        }
        report.mean_per_class[name] = mean;
    }
    return report;
}

nn::Tensor pattern_feature(const std::string& label, const std::vector<std::string>& labels) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw UnknownLabelError(label);
    nn::Tensor onehot({labels.size() - 1});
    if (label != kNoPattern) {
        std::size_t slot = 0;
        for (auto j = labels.begin(); j != it; ++j) slot += *j != kNoPattern;
        onehot[slot] = 1.0;
    }
    return onehot;
}

encode::ContextVector pattern_context(const std::string& label, const nn::Tensor& projection,
                                      const std::vector<std::string>& labels) {
    const nn::Tensor onehot = pattern_feature(label, labels);
    if (projection.rank() != 2 || projection.cols() != onehot.size())
        throw ShapeError("pattern projection must be d x " + std::to_string(onehot.size()) + ", got " +
                         projection.shape_string());
    nn::Tensor out({projection.rows()});
    nn::matvec_acc(projection, onehot.values(), out.values());
    return {encode::Channel::Pattern, std::nullopt, std::move(out)};
}

nlohmann::json to_json(const AdaBoostModel& m) {
    nlohmann::json stumps = nlohmann::json::array();
    for (std::size_t t = 0; t < m.stumps.size(); ++t) {
        const auto& s = m.stumps[t];
        stumps.push_back({s.feature, s.threshold, s.left, s.right, m.alphas[t]});
    }
    return {{"classes", m.classes},
            {"n_estimators", m.n_estimators},
            {"learning_rate", m.learning_rate},
            {"stumps", std::move(stumps)}};
}

AdaBoostModel pattern_model_from_json(const nlohmann::json& j) {
    AdaBoostModel m;
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.n_estimators = j.at("n_estimators").get<int>();
    m.learning_rate = j.at("learning_rate").get<double>();
    for (const auto& s : j.at("stumps")) {
        Stump st{s.at(0).get<std::size_t>(), s.at(1).get<double>(), s.at(2).get<std::size_t>(),
                 s.at(3).get<std::size_t>()};
        if (st.feature >= kFeatureCount || st.left >= m.classes.size() || st.right >= m.classes.size())
            throw FormatError("stumps", "index out of range");
        m.stumps.push_back(st);
        m.alphas.push_back(s.at(4).get<double>());
    }
    return m;
}

}  // namespace codectx::patterns
