#include "codectx/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "codectx/embeddings.hpp"
#include "codectx/errors.hpp"
#include "codectx/kernels.hpp"
#include "codectx/optim.hpp"

namespace codectx::tasks {

namespace {

struct VariantInfo {
    Variant v;
    std::string_view name;
    std::string_view title;
};

constexpr std::array<VariantInfo, 5> kVariantInfo = {{
    {Variant::None, "NONE", "Original dataset"},
    {Variant::RawBugs, "RAW_BUGS", "FindBugs tool"},
    {Variant::FilteredBugs, "FILTERED_BUGS", "Bug filter"},
    {Variant::Patterns, "PATTERNS", "Design pattern"},
    {Variant::BugsAndPatterns, "BUGS_AND_PATTERNS", "Bugs filter + Design pattern"},
}};

double log1pexp(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

std::string_view to_string(Variant v) { return kVariantInfo[static_cast<std::size_t>(v)].name; }
std::string_view column_title(Variant v) { return kVariantInfo[static_cast<std::size_t>(v)].title; }

std::optional<Variant> parse_variant(std::string_view s) {
    for (const auto& info : kVariantInfo) {
        if (info.name == s) return info.v;
    }
    return std::nullopt;
}

bool uses_bugs(Variant v) { return v == Variant::RawBugs || v == Variant::FilteredBugs || v == Variant::BugsAndPatterns; }
bool uses_filter(Variant v) { return v == Variant::FilteredBugs || v == Variant::BugsAndPatterns; }
bool uses_patterns(Variant v) { return v == Variant::Patterns || v == Variant::BugsAndPatterns; }

std::string_view to_string(TaskKind t) { return t == TaskKind::Classify ? "classify" : "clone"; }

// ---------------------------------------------------------------------------
// Heads

ClassifierHead ClassifierHead::bind(const nn::ParamSet& params) {
    return {params.value(kClsW), params.value(kClsB)};
}

CloneHead CloneHead::bind(const nn::ParamSet& params, double threshold) {
    return {params.value(kCloneW), params.value(kCloneB)[0], threshold};
}

Classification classify(const nn::Tensor& code, const ClassifierHead& head) {
    Classification c;
    c.probs = nn::softmax(nn::affine(code, head.W, head.b));
    c.label = static_cast<int>(std::max_element(c.probs.values().begin(), c.probs.values().end()) -
                               c.probs.values().begin());
    return c;
}

double clone_score(const nn::Tensor& a, const nn::Tensor& b, const CloneHead& head) {
    if (a.rank() != 1 || a.shape() != b.shape() || head.w.shape() != a.shape())
        throw ShapeError("clone_score: " + a.shape_string() + " vs " + b.shape_string() + ", w " +
                         head.w.shape_string());
    double z = head.b;
    for (std::size_t i = 0; i < a.size(); ++i) z += head.w[i] * std::abs(a[i] - b[i]);
    return nn::sigmoid(z);
}

// ---------------------------------------------------------------------------
// Unit preparation and encoding

PreparedUnit prepare_unit(const ingest::AstNode& ast, const std::vector<ingest::BugWarning>& warnings,
                          const std::optional<std::string>& pattern, const ModelBundle& bundle,
                          const std::map<std::string, std::string>& reports) {
    PreparedUnit u;
    const auto trees = encode::split_statements(ast);
    for (const auto& t : trees) u.stmts.push_back(encode::index_statement(t, bundle.vocab));
    u.bug_raw.assign(trees.size(), std::nullopt);

    if (uses_bugs(bundle.variant)) {
        std::vector<ingest::BugWarning> active = warnings;
        if (uses_filter(bundle.variant)) {
            if (!bundle.filter) throw MissingChannelError("bug filter model");
            active = bugs::filter_warnings(warnings, reports, *bundle.filter).kept;
        }
        const auto per = bugs::warnings_by_statement(trees, active);
        for (std::size_t i = 0; i < trees.size(); ++i) {
            if (!per[i].empty()) u.bug_raw[i] = bugs::bug_feature(per[i]);
        }
    }
    if (uses_patterns(bundle.variant)) {
        std::string label;
        if (pattern) {
            label = *pattern;
        } else if (bundle.pattern_model) {
            try {
                label = patterns::predict_pattern(patterns::extract_pattern_features(ast), *bundle.pattern_model).label;
            } catch (const NotAClassError&) {
                label = std::string(patterns::kNoPattern);
            }
        } else {
            throw MissingChannelError("pattern labels");
        }
        u.pattern_onehot = patterns::pattern_feature(label, bundle.pattern_labels);
    }
    return u;
}

nn::Tensor code_vector(const PreparedUnit& unit, const ModelBundle& bundle, UnitCache* cache) {
    const std::size_t n = unit.stmts.size();
    if (n == 0) throw EmptyInputError("program has no statements");
    const nn::ParamSet& params = bundle.params;
    const nn::Tensor& P_bug = params.value(encode::kProjBug);
    const nn::Tensor& P_pat = params.value(encode::kProjPattern);
    UnitCache local;
    UnitCache& c = cache ? *cache : local;
    c.stmt.assign(n, {});
    c.contexts.assign(n, {});
    c.sources.assign(n, {});

    std::optional<nn::Tensor> pattern_vec;
    if (unit.pattern_onehot) {
        nn::require_shape(*unit.pattern_onehot, {P_pat.cols()}, "pattern one-hot");
        pattern_vec = nn::Tensor({P_pat.rows()});
        nn::matvec_acc(P_pat, unit.pattern_onehot->values(), pattern_vec->values());
    }
    std::vector<nn::Tensor> vecs;
    vecs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (const auto& raw = unit.bug_raw[i]) {
            nn::Tensor v({P_bug.rows()});
            nn::matvec_acc(P_bug, raw->values(), v.values());
            c.contexts[i].push_back({encode::Channel::Bug, i, std::move(v)});
            c.sources[i].emplace_back(&*raw, true);
        }
        if (pattern_vec) {
            c.contexts[i].push_back({encode::Channel::Pattern, std::nullopt, *pattern_vec});
            c.sources[i].emplace_back(&*unit.pattern_onehot, false);
        }
        vecs.push_back(encode::encode_statement(unit.stmts[i], c.contexts[i], params, bundle.encoder, &c.stmt[i]));
    }
    return encode::encode_code(vecs, params, &c.seq);
}

void code_vector_backward(UnitCache& cache, const nn::Tensor& dcode, ModelBundle& bundle) {
    nn::ParamSet& params = bundle.params;
    const auto dvecs = encode::encode_code_backward(cache.seq, dcode, params);
    for (std::size_t i = 0; i < dvecs.size(); ++i) {
        const auto dctx = encode::encode_statement_backward(cache.stmt[i], dvecs[i], params, bundle.encoder);
        for (std::size_t k = 0; k < dctx.size(); ++k) {
            const auto [raw, is_bug] = cache.sources[i][k];
            nn::outer_acc(params.grad(is_bug ? encode::kProjBug : encode::kProjPattern), dctx[k].values(),
                          raw->values());
        }
    }
}

// ---------------------------------------------------------------------------
// Training

namespace {

void check_config(const TrainConfig& c) {
    if (c.dim == 0 || c.hidden == 0) throw ConfigError("dims must be positive");
    if (c.epochs < 0) throw ConfigError("epochs must be >= 0");
    if (c.batch == 0) throw ConfigError("batch must be positive");
    if (!(c.lr > 0.0)) throw ConfigError("lr must be positive");
    if (!(c.clone_threshold > 0.0 && c.clone_threshold < 1.0)) throw ConfigError("clone threshold must lie in (0,1)");
    if (c.pattern_labels.size() < 2 || c.pattern_labels.back() != patterns::kNoPattern)
        throw ConfigError("pattern labels must end with NONE");
}

ModelBundle init_bundle(TaskKind task, Variant variant, int classes, const TrainConfig& cfg, const Channels& channels,
                        const std::vector<const ingest::AstNode*>& asts) {
    check_config(cfg);
    ModelBundle b;
    b.task = task;
    b.variant = variant;
    b.classes = classes;
    b.clone_threshold = cfg.clone_threshold;
    b.pattern_labels = cfg.pattern_labels;
    if (uses_filter(variant)) {
        if (!channels.filter) throw MissingChannelError("bug filter model");
        b.filter = *channels.filter;
    }
    if (uses_patterns(variant) && channels.pattern_model) b.pattern_model = *channels.pattern_model;

    b.vocab = encode::Vocabulary::build(asts, cfg.min_count);
    b.encoder.vocab_size = b.vocab.size();
    b.encoder.dim = cfg.dim;
    b.encoder.hidden = cfg.hidden;
    b.encoder.rounds = cfg.rounds;
    b.encoder.fusion = cfg.fusion;
    b.encoder.bug_width = bugs::kBugFeatureWidth;
    b.encoder.pattern_width = cfg.pattern_labels.size() - 1;

    b.config = {
        {"dim", std::to_string(cfg.dim)},
        {"hidden", std::to_string(cfg.hidden)},
        {"rounds", std::to_string(cfg.rounds)},
        {"fusion", cfg.fusion == encode::FusionLevel::Node ? "node" : "statement"},
        {"epochs", std::to_string(cfg.epochs)},
        {"batch", std::to_string(cfg.batch)},
        {"lr", nlohmann::json(cfg.lr).dump()},
        {"seed", std::to_string(cfg.seed)},
        {"min_count", std::to_string(cfg.min_count)},
        {"embedding_epochs", std::to_string(cfg.embedding_epochs)},
        {"clone_threshold", nlohmann::json(cfg.clone_threshold).dump()},
        {"target_accuracy", nlohmann::json(cfg.target_accuracy).dump()},
        {"variant", std::string(to_string(variant))},
        {"task", std::string(to_string(task))},
    };

    Rng rng(cfg.seed);
    std::optional<nn::Tensor> pretrained;
    if (cfg.embedding_epochs > 0) {
        encode::EmbeddingConfig ec;
        ec.dim = cfg.dim;
        ec.epochs = cfg.embedding_epochs;
        ec.seed = cfg.seed;
        pretrained = encode::train_embeddings(asts, b.vocab, ec);
    }
    encode::init_encoder_params(b.params, b.encoder, rng, pretrained ? &*pretrained : nullptr);
    const std::size_t width = 2 * cfg.hidden;
    const double scale = 1.0 / std::sqrt(static_cast<double>(width));
    if (task == TaskKind::Classify) {
        const auto c = static_cast<std::size_t>(classes);
        b.params.add(kClsW, nn::uniform_init({c, width}, scale, rng));
        b.params.add(kClsB, nn::Tensor({c}));
    } else {
        b.params.add(kCloneW, nn::uniform_init({width}, scale, rng));
        b.params.add(kCloneB, nn::Tensor({1}));
    }
    return b;
}

void require_warnings(Variant variant, bool any_warnings) {
    if (uses_bugs(variant) && !any_warnings) throw MissingChannelError("bug warnings");
}

// Runs epochs of shuffled minibatches. `step(i, scale)` accumulates the
// gradient of example i's loss times `scale` and returns the loss;
// `accuracy()` scores the whole training set.
template <typename Step, typename Accuracy>
void run_epochs(ModelBundle& b, std::size_t examples, const TrainConfig& cfg, Step step, Accuracy accuracy) {
    Rng order_rng(cfg.seed ^ 0xA5A5A5A5ULL);
    nn::AdamState state;
    const nn::AdamConfig adam{cfg.lr};
    std::vector<std::size_t> order(examples);
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        order_rng.shuffle(std::span<std::size_t>(order));
        double total = 0.0;
        for (std::size_t start = 0; start < examples; start += cfg.batch) {
            const std::size_t end = std::min(examples, start + cfg.batch);
            b.params.zero_grad();
            const double scale = 1.0 / static_cast<double>(end - start);
            for (std::size_t k = start; k < end; ++k) total += step(order[k], scale);
            nn::optimizer_step(b.params, state, adam);
        }
        const double acc = accuracy();
        b.log.push_back({epoch, total / static_cast<double>(std::max<std::size_t>(examples, 1)), acc});
        if (cfg.target_accuracy > 0.0 && acc >= cfg.target_accuracy) break;
    }
    b.params.zero_grad();
}

}  // namespace

ModelBundle train_task(const ingest::ClassificationCorpus& data, Variant variant, const TrainConfig& config,
                       const Channels& channels) {
    if (data.samples.empty()) throw EmptyCorpusError();
    if (data.classes < 1) throw ConfigError("corpus declares no classes");
    std::vector<const ingest::AstNode*> asts;
    bool any_warnings = false;
    for (const auto& s : data.samples) {
        asts.push_back(&s.ast);
        any_warnings = any_warnings || !s.warnings.empty();
    }
    require_warnings(variant, any_warnings);
    ModelBundle b = init_bundle(TaskKind::Classify, variant, data.classes, config, channels, asts);

    // Units must not move once prepared: caches point into them.
    std::vector<PreparedUnit> units;
    units.reserve(data.samples.size());
    for (const auto& s : data.samples) units.push_back(prepare_unit(s.ast, s.warnings, s.pattern, b, channels.reports));

    auto step = [&](std::size_t i, double scale) {
        UnitCache cache;
        const nn::Tensor code = code_vector(units[i], b, &cache);
        auto x = nn::softmax_xent(nn::affine(code, b.params.value(kClsW), b.params.value(kClsB)), data.samples[i].label);
        for (double& g : x.grad.values()) g *= scale;
        const auto ag = nn::affine_backward(code, b.params.value(kClsW), x.grad);
        nn::add_to(b.params.grad(kClsW).values(), ag.dW.values());
        nn::add_to(b.params.grad(kClsB).values(), ag.db.values());
        code_vector_backward(cache, ag.dx, b);
        return x.loss;
    };
    auto accuracy = [&] {
        const auto head = ClassifierHead::bind(b.params);
        std::size_t hit = 0;
        for (std::size_t i = 0; i < units.size(); ++i)
            hit += classify(code_vector(units[i], b), head).label == data.samples[i].label;
        return static_cast<double>(hit) / static_cast<double>(units.size());
    };
    run_epochs(b, units.size(), config, step, accuracy);
    return b;
}

ModelBundle train_task(const ingest::CloneCorpus& data, Variant variant, const TrainConfig& config,
                       const Channels& channels) {
    if (data.pairs.empty()) throw EmptyCorpusError();
    // Only units referenced by a pair feed the vocabulary.
    std::vector<std::string> ids;
    for (const auto& p : data.pairs) {
        ids.push_back(p.id_a);
        ids.push_back(p.id_b);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<std::string> missing;
    for (const auto& id : ids)
        if (!data.store.contains(id)) missing.push_back(id);
    if (!missing.empty()) throw DanglingIdError(missing);

    std::vector<const ingest::AstNode*> asts;
    bool any_warnings = false;
    for (const auto& id : ids) {
        const auto& u = data.store.at(id);
        asts.push_back(&u.ast);
        any_warnings = any_warnings || !u.warnings.empty();
    }
    require_warnings(variant, any_warnings);
    ModelBundle b = init_bundle(TaskKind::Clone, variant, 2, config, channels, asts);

    std::vector<PreparedUnit> units;
    units.reserve(ids.size());
    std::map<std::string, std::size_t> slot;
    for (const auto& id : ids) {
        const auto& u = data.store.at(id);
        slot[id] = units.size();
        units.push_back(prepare_unit(u.ast, u.warnings, u.pattern, b, channels.reports));
    }

    auto step = [&](std::size_t i, double scale) {
        const auto& pair = data.pairs[i];
        UnitCache ca, cb;
        const nn::Tensor a = code_vector(units[slot.at(pair.id_a)], b, &ca);
        const nn::Tensor c = code_vector(units[slot.at(pair.id_b)], b, &cb);
        const nn::Tensor& w = b.params.value(kCloneW);
        double z = b.params.value(kCloneB)[0];
        for (std::size_t k = 0; k < a.size(); ++k) z += w[k] * std::abs(a[k] - c[k]);
        const double y = pair.label ? 1.0 : 0.0;
        const double loss = log1pexp(z) - y * z;
        const double dz = (nn::sigmoid(z) - y) * scale;
        nn::Tensor da({a.size()}), dc({a.size()});
        auto& gw = b.params.grad(kCloneW);
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double diff = a[k] - c[k];
            gw[k] += dz * std::abs(diff);
            const double sgn = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
            da[k] = dz * w[k] * sgn;
            dc[k] = -da[k];
        }
        b.params.grad(kCloneB)[0] += dz;
        code_vector_backward(ca, da, b);
        code_vector_backward(cb, dc, b);
        return loss;
    };
    auto accuracy = [&] {
        const auto head = CloneHead::bind(b.params, b.clone_threshold);
        std::vector<nn::Tensor> codes;
        codes.reserve(units.size());
        for (const auto& u : units) codes.push_back(code_vector(u, b));
        std::size_t hit = 0;
        for (const auto& p : data.pairs) {
            const bool pred = clone_score(codes[slot.at(p.id_a)], codes[slot.at(p.id_b)], head) >= head.threshold;
            hit += pred == (p.label != 0);
        }
        return static_cast<double>(hit) / static_cast<double>(data.pairs.size());
    };
    run_epochs(b, data.pairs.size(), config, step, accuracy);
    return b;
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<int> predict_labels(const ModelBundle& bundle, const ingest::ClassificationCorpus& data,
                                const std::map<std::string, std::string>& reports) {
    if (bundle.task != TaskKind::Classify) throw ConfigError("bundle was trained for the clone task");
    const auto head = ClassifierHead::bind(bundle.params);
    std::vector<int> out;
    out.reserve(data.samples.size());
    for (const auto& s : data.samples)
        out.push_back(classify(code_vector(prepare_unit(s.ast, s.warnings, s.pattern, bundle, reports), bundle), head).label);
    return out;
}

eval::Metrics eval_classification(const ModelBundle& bundle, const ingest::ClassificationCorpus& data,
                                  const std::map<std::string, std::string>& reports) {
    if (data.samples.empty()) throw EmptyCorpusError();
    const auto pred = predict_labels(bundle, data, reports);
    std::vector<int> actual;
    for (const auto& s : data.samples) actual.push_back(s.label);
    eval::Metrics m;
    m.accuracy = eval::accuracy(pred, actual);
    const int classes = std::max(bundle.classes, data.classes);
    for (int c = 0; c < classes; ++c) {
        const auto cm = eval::class_metrics(pred, actual, c);
        m.precision += cm.precision / classes;
        m.recall += cm.recall / classes;
        m.f1 += cm.f1 / classes;
    }
    if (classes == 2) {
        const auto pos = eval::class_metrics(pred, actual, 1);
        m.tp = pos.tp, m.fp = pos.fp, m.tn = pos.tn, m.fn = pos.fn;
    }
    return m;
}

std::vector<double> clone_scores(const ModelBundle& bundle, const ingest::CloneCorpus& data,
                                 const std::map<std::string, std::string>& reports) {
    if (bundle.task != TaskKind::Clone) throw ConfigError("bundle was trained for the classification task");
    const auto head = CloneHead::bind(bundle.params, bundle.clone_threshold);
    std::map<std::string, nn::Tensor> codes;
    auto code_of = [&](const std::string& id) -> const nn::Tensor& {
        auto it = codes.find(id);
        if (it != codes.end()) return it->second;
        const auto st = data.store.find(id);
        if (st == data.store.end()) throw DanglingIdError({id});
        const auto& u = st->second;
        return codes.emplace(id, code_vector(prepare_unit(u.ast, u.warnings, u.pattern, bundle, reports), bundle))
            .first->second;
    };
    std::vector<double> out;
    out.reserve(data.pairs.size());
    for (const auto& p : data.pairs) out.push_back(clone_score(code_of(p.id_a), code_of(p.id_b), head));
    return out;
}

std::map<std::string, eval::Metrics> eval_clone(const ModelBundle& bundle, const ingest::CloneCorpus& data,
                                                bool group_by_type, const std::map<std::string, std::string>& reports) {
    if (data.pairs.empty()) throw EmptyCorpusError();
    const auto scores = clone_scores(bundle, data, reports);
    std::vector<int> pred, actual;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        pred.push_back(scores[i] >= bundle.clone_threshold ? 1 : 0);
        actual.push_back(data.pairs[i].label != 0 ? 1 : 0);
    }
    std::map<std::string, eval::Metrics> out;
    out["ALL"] = eval::binary_metrics(pred, actual);
    if (!group_by_type) return out;
    for (const auto type : ingest::kPositiveCloneTypes) {
        std::vector<int> p, a;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const auto& pair = data.pairs[i];
            const bool in = pair.label ? pair.clone_type == type : pair.stratum == type;
            if (!in) continue;
            p.push_back(pred[i]);
            a.push_back(actual[i]);
        }
        if (!a.empty()) out[std::string(ingest::to_string(type))] = eval::binary_metrics(p, a);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Persistence

std::string save_bundle(const ModelBundle& b) {
    using nlohmann::json;
    json params = json::object();
    for (const auto& [name, p] : b.params) params[name] = {{"shape", p.value.shape()}, {"values", p.value.data()}};
    json log = json::array();
    for (const auto& e : b.log) log.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"train_accuracy", e.train_accuracy}});
    const json j = {
        {"format_version", b.format_version},
        {"config", b.config},
        {"task", std::string(to_string(b.task))},
        {"variant", std::string(to_string(b.variant))},
        {"classes", b.classes},
        {"vocab", b.vocab.symbols()},
        {"encoder",
         {{"vocab_size", b.encoder.vocab_size},
          {"dim", b.encoder.dim},
          {"hidden", b.encoder.hidden},
          {"bug_width", b.encoder.bug_width},
          {"pattern_width", b.encoder.pattern_width},
          {"rounds", b.encoder.rounds},
          {"fusion", b.encoder.fusion == encode::FusionLevel::Node ? "node" : "statement"}}},
        {"clone_threshold", b.clone_threshold},
        {"pattern_labels", b.pattern_labels},
        {"filter", b.filter ? bugs::to_json(*b.filter) : json(nullptr)},
        {"pattern_model", b.pattern_model ? patterns::to_json(*b.pattern_model) : json(nullptr)},
        {"log", log},
        {"params", params},
    };
    return j.dump();
}

ModelBundle load_bundle(std::string_view text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError("bundle", e.what());
    }
    if (!j.is_object() || !j.contains("format_version") || !j["format_version"].is_number_integer())
        throw FormatError("format_version");
    const int version = j["format_version"].get<int>();
    if (version > kBundleVersion) throw VersionError(version, kBundleVersion);
    if (version < 1) throw FormatError("format_version", "must be positive");

    std::string field = "bundle";
    try {
        ModelBundle b;
        b.format_version = version;
        field = "config";
        b.config = j.at("config").get<std::map<std::string, std::string>>();
        field = "task";
        const auto task = j.at("task").get<std::string>();
        if (task == "classify") b.task = TaskKind::Classify;
        else if (task == "clone") b.task = TaskKind::Clone;
        else throw FormatError("task", task);
        field = "variant";
        const auto v = parse_variant(j.at("variant").get<std::string>());
        if (!v) throw FormatError("variant", j.at("variant").get<std::string>());
        b.variant = *v;
        field = "classes";
        b.classes = j.at("classes").get<int>();
        field = "vocab";
        b.vocab = encode::Vocabulary::from_symbols(j.at("vocab").get<std::vector<std::string>>());
        field = "encoder";
        const auto& e = j.at("encoder");
        b.encoder.vocab_size = e.at("vocab_size").get<std::size_t>();
        b.encoder.dim = e.at("dim").get<std::size_t>();
        b.encoder.hidden = e.at("hidden").get<std::size_t>();
        b.encoder.bug_width = e.at("bug_width").get<std::size_t>();
        b.encoder.pattern_width = e.at("pattern_width").get<std::size_t>();
        b.encoder.rounds = e.at("rounds").get<int>();
        const auto fusion = e.at("fusion").get<std::string>();
        if (fusion == "node") b.encoder.fusion = encode::FusionLevel::Node;
        else if (fusion == "statement") b.encoder.fusion = encode::FusionLevel::Statement;
        else throw FormatError("encoder.fusion", fusion);
        if (b.encoder.vocab_size != b.vocab.size()) throw FormatError("encoder.vocab_size", "does not match vocab");
        field = "clone_threshold";
        b.clone_threshold = j.at("clone_threshold").get<double>();
        field = "pattern_labels";
        b.pattern_labels = j.at("pattern_labels").get<std::vector<std::string>>();
        field = "filter";
        if (!j.at("filter").is_null()) b.filter = bugs::filter_model_from_json(j.at("filter"));
        field = "pattern_model";
        if (!j.at("pattern_model").is_null()) b.pattern_model = patterns::pattern_model_from_json(j.at("pattern_model"));
        field = "log";
        for (const auto& l : j.at("log"))
            b.log.push_back({l.at("epoch").get<int>(), l.at("loss").get<double>(), l.at("train_accuracy").get<double>()});
        field = "params";
        for (const auto& [name, p] : j.at("params").items()) {
            field = "params." + name;
            b.params.add(name, nn::Tensor(p.at("shape").get<std::vector<std::size_t>>(),
                                          p.at("values").get<std::vector<double>>()));
        }
        return b;
    } catch (const json::exception& e) {
        throw FormatError(field, e.what());
    } catch (const ShapeError& e) {
        throw FormatError(field, e.what());
    }
}

}  // namespace codectx::tasks
