#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "cli.hpp"
#include "codectx/errors.hpp"
#include "codectx/kernels.hpp"
#include "codectx/selfcheck.hpp"
#include "codectx/synth.hpp"

namespace codectx::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Small helpers

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("out", "cannot write " + path.string());
    f << text;
}

void require_path(const fs::path& p, const char* key) {
    if (p.empty()) throw ConfigError(std::string(key) + " is required");
}

std::string fixed(double x, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

ingest::ClassificationCorpus load_classification(const fs::path& corpus, const RunConfig& cfg) {
    require_path(corpus, "corpus");
    auto data = ingest::load_classification_corpus(corpus);
    if (!cfg.warnings.empty()) ingest::attach_warnings(data.samples, ingest::load_warnings(ingest::read_file(cfg.warnings)));
    return data;
}

ingest::CloneCorpus load_clones(const fs::path& code, const fs::path& pairs) {
    require_path(code, "corpus");
    require_path(pairs, "pairs");
    return ingest::load_clone_corpus(code, pairs);
}

std::vector<ingest::BugReportDoc> report_docs(const RunConfig& cfg) {
    return cfg.reports.empty() ? std::vector<ingest::BugReportDoc>{} : ingest::load_report_docs(cfg.reports);
}

std::map<std::string, std::string> report_texts(const std::vector<ingest::BugReportDoc>& docs) {
    std::map<std::string, std::string> out;
    for (const auto& d : docs) out[d.id] = d.text;
    return out;
}

bugs::FilterSelection train_filter_from(const std::vector<ingest::BugReportDoc>& docs, const RunConfig& cfg) {
    bugs::FilterTrainConfig fc;
    fc.n_max = cfg.n_max;
    fc.min_df = cfg.min_df;
    fc.k_folds = cfg.k_folds;
    return bugs::select_filter(docs, fc, cfg.train.seed);
}

patterns::AdaBoostModel train_patterns_from(const fs::path& path, const RunConfig& cfg) {
    std::vector<patterns::LabeledFeatures> samples;
    for (const auto& s : ingest::load_pattern_corpus(path))
        samples.push_back({patterns::extract_pattern_features(s.ast), s.pattern});
    return patterns::train_pattern_model(samples, cfg.train.pattern_labels, {cfg.n_estimators, cfg.learning_rate});
}

/// Side inputs for a set of variants. `channels` points into the holder, so it never moves.
struct ChannelHolder {
    std::optional<bugs::BugFilterModel> filter;
    std::optional<patterns::AdaBoostModel> pattern_model;
    tasks::Channels channels;

    ChannelHolder() = default;
    ChannelHolder(const ChannelHolder&) = delete;
    ChannelHolder& operator=(const ChannelHolder&) = delete;
};

void build_channels(ChannelHolder& h, const std::vector<tasks::Variant>& variants, const RunConfig& cfg,
                    std::ostream& out) {
    const auto docs = report_docs(cfg);
    h.channels.reports = report_texts(docs);
    const bool need_filter = std::any_of(variants.begin(), variants.end(), tasks::uses_filter);
    const bool need_patterns = std::any_of(variants.begin(), variants.end(), tasks::uses_patterns);
    if (need_filter) {
        if (docs.empty()) throw MissingChannelError("reports (labeled report documents to train the bug filter)");
        auto sel = train_filter_from(docs, cfg);
        out << "bug filter: " << bugs::to_string(sel.model.kind) << " (cv f1 logreg " << fixed(sel.logreg_cv_f1)
            << ", forest " << fixed(sel.forest_cv_f1) << ")\n";
        h.filter = std::move(sel.model);
    }
    if (need_patterns && !cfg.pattern_corpus.empty()) h.pattern_model = train_patterns_from(cfg.pattern_corpus, cfg);
    h.channels.filter = h.filter ? &*h.filter : nullptr;
    h.channels.pattern_model = h.pattern_model ? &*h.pattern_model : nullptr;
}

// Output locations stay out so reruns into another directory stay byte-identical.
void echo_into(tasks::ModelBundle& b, const RunConfig& cfg) {
    for (const auto& [k, v] : cfg.echo)
        if (k != "out" && k != "bundle") b.config[k] = v;
}

std::size_t holdout_k(double fraction) {
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(1.0 / fraction)));
}

template <typename T>
std::vector<T> pick(const std::vector<T>& all, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    for (auto i : idx) out.push_back(all[i]);
    return out;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> out;
    std::set<std::size_t> s(idx.begin(), idx.end());
    for (std::size_t i = 0; i < n; ++i)
        if (!s.contains(i)) out.push_back(i);
    return out;
}

/// Stratified hold-out: the first fold of a seeded stratified split.
std::pair<ingest::ClassificationCorpus, ingest::ClassificationCorpus> split(const ingest::ClassificationCorpus& data,
                                                                              const RunConfig& cfg) {
    std::vector<int> labels;
    for (const auto& s : data.samples) labels.push_back(s.label);
    const auto plan = eval::stratified_folds(labels, holdout_k(cfg.test_fraction), cfg.train.seed);
    const auto& test = plan.folds.front();
    return {{data.classes, pick(data.samples, complement(labels.size(), test))}, {data.classes, pick(data.samples, test)}};
}

std::pair<ingest::CloneCorpus, ingest::CloneCorpus> split(const ingest::CloneCorpus& data, const RunConfig& cfg) {
    // strata: positive type, or the type a negative balances
    std::vector<int> strata;
    for (const auto& p : data.pairs) {
        const int t = static_cast<int>(p.label ? p.clone_type : p.stratum.value_or(ingest::CloneType::None));
        strata.push_back(p.label ? t : 10 + t);
    }
    const auto plan = eval::stratified_folds(strata, holdout_k(cfg.test_fraction), cfg.train.seed);
    const auto& test = plan.folds.front();
    return {{data.store, pick(data.pairs, complement(strata.size(), test))}, {data.store, pick(data.pairs, test)}};
}

// ---------------------------------------------------------------------------
// Commands

int cmd_train(const RunConfig& cfg, std::ostream& out) {
    ChannelHolder holder;
    build_channels(holder, {cfg.variant}, cfg, out);
    tasks::ModelBundle b = cfg.task == tasks::TaskKind::Classify
                               ? tasks::train_task(load_classification(cfg.corpus, cfg), cfg.variant, cfg.train,
                                                   holder.channels)
                               : tasks::train_task(load_clones(cfg.corpus, cfg.pairs), cfg.variant, cfg.train,
                                                   holder.channels);
    echo_into(b, cfg);
    const fs::path bundle = cfg.bundle.empty() ? cfg.out / "bundle.json" : cfg.bundle;
    write_file(bundle, tasks::save_bundle(b));

    std::ostringstream log;
    log << "# variant=" << tasks::to_string(cfg.variant) << " seed=" << cfg.train.seed << "\nepoch\tloss\ttrain_accuracy\n";
    for (const auto& e : b.log) log << e.epoch << '\t' << fixed(e.loss, 6) << '\t' << fixed(e.train_accuracy) << '\n';
    write_file(cfg.out / "train_log.tsv", log.str());

    out << "bundle: " << bundle.string() << '\n';
    if (!b.log.empty()) {
        const auto& e = b.log.back();
        out << "final epoch " << e.epoch << " loss " << fixed(e.loss, 6) << " train_accuracy " << fixed(e.train_accuracy)
            << '\n';
    }
    return 0;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
    require_path(cfg.bundle, "bundle");
    const auto b = tasks::load_bundle(ingest::read_file(cfg.bundle));
    if (cfg.echo.contains("task") && cfg.task != b.task)
        throw ConfigError("bundle was trained for task " + std::string(tasks::to_string(b.task)));
    const auto texts = report_texts(report_docs(cfg));
    RunConfig report_cfg = cfg;
    report_cfg.train.seed = std::stoull(b.config.count("seed") ? b.config.at("seed") : "0");
    report_cfg.echo = b.config;
    for (const auto& [k, v] : cfg.echo) report_cfg.echo[k] = v;
    std::string table;
    if (b.task == tasks::TaskKind::Classify) {
        const auto m = tasks::eval_classification(b, load_classification(cfg.corpus, cfg), texts);
        table = classify_table({{b.variant, m}}, report_cfg);
        out << "accuracy " << fixed(m.accuracy) << '\n';
    } else {
        const auto m = tasks::eval_clone(b, load_clones(cfg.corpus, cfg.pairs), true, texts);
        table = clone_table({{b.variant, m}}, report_cfg);
        out << "ALL f1 " << fixed(m.at("ALL").f1) << " accuracy " << fixed(m.at("ALL").accuracy) << '\n';
    }
    const fs::path report = cfg.out / ("eval_" + std::string(tasks::to_string(b.task)) + ".tsv");
    write_file(report, table);
    out << "report: " << report.string() << '\n';
    return 0;
}

int cmd_ablate(const RunConfig& cfg, std::ostream& out) {
    const std::vector<tasks::Variant> all(tasks::kVariants.begin(), tasks::kVariants.end());
    ChannelHolder holder;
    build_channels(holder, all, cfg, out);
    std::string table;
    if (cfg.task == tasks::TaskKind::Classify) {
        const auto data = load_classification(cfg.corpus, cfg);
        const auto [train, test] = cfg.test_corpus.empty() ? split(data, cfg)
                                                           : std::pair{data, load_classification(cfg.test_corpus, cfg)};
        std::map<tasks::Variant, eval::Metrics> results;
        for (const auto v : all) {
            const auto b = tasks::train_task(train, v, cfg.train, holder.channels);
            results[v] = tasks::eval_classification(b, test, holder.channels.reports);
            out << tasks::to_string(v) << " accuracy " << fixed(results[v].accuracy) << '\n';
        }
        table = classify_table(results, cfg);
    } else {
        const auto data = load_clones(cfg.corpus, cfg.pairs);
        const auto [train, test] =
            cfg.test_pairs.empty() ? split(data, cfg) : std::pair{data, load_clones(cfg.corpus, cfg.test_pairs)};
        std::map<tasks::Variant, std::map<std::string, eval::Metrics>> results;
        for (const auto v : all) {
            const auto b = tasks::train_task(train, v, cfg.train, holder.channels);
            results[v] = tasks::eval_clone(b, test, true, holder.channels.reports);
            out << tasks::to_string(v) << " ALL f1 " << fixed(results[v].at("ALL").f1) << '\n';
        }
        table = clone_table(results, cfg);
    }
    const fs::path report = cfg.out / ("ablation_" + std::string(tasks::to_string(cfg.task)) + ".tsv");
    write_file(report, table);
    out << table << "report: " << report.string() << '\n';
    return 0;
}

int cmd_filter_bugs(const RunConfig& cfg, std::ostream& out) {
    require_path(cfg.reports, "reports");
    require_path(cfg.warnings, "warnings");
    const auto docs = ingest::load_report_docs(cfg.reports);
    const auto warnings = ingest::load_warnings(ingest::read_file(cfg.warnings));
    const auto sel = train_filter_from(docs, cfg);
    const auto rep = bugs::filter_warnings(warnings, report_texts(docs), sel.model);

    write_file(cfg.out / "filtered_warnings.xml", ingest::warnings_to_xml(rep.kept));
    write_file(cfg.out / "filter_model.json", bugs::to_json(sel.model).dump());
    std::ostringstream t;
    t << "# variant=FILTERED_BUGS seed=" << cfg.train.seed << "\nkey\tvalue\n"
      << "selected\t" << bugs::to_string(sel.model.kind) << "\nlogreg_cv_f1\t" << fixed(sel.logreg_cv_f1)
      << "\nforest_cv_f1\t" << fixed(sel.forest_cv_f1) << "\nwarnings\t" << warnings.size() << "\nremoved\t"
      << rep.removed << "\nremoval_ratio\t" << fixed(rep.removal_ratio) << '\n';
    if (sel.fold_warning) t << "# " << *sel.fold_warning << '\n';
    write_file(cfg.out / "filter_report.tsv", t.str());
    out << "selected " << bugs::to_string(sel.model.kind) << "; removed " << rep.removed << " of " << warnings.size()
        << " warnings (ratio " << fixed(rep.removal_ratio) << ")\n";
    return 0;
}

int cmd_detect_patterns(const RunConfig& cfg, std::ostream& out) {
    require_path(cfg.pattern_corpus, "pattern_corpus");
    std::vector<patterns::LabeledFeatures> samples;
    for (const auto& s : ingest::load_pattern_corpus(cfg.pattern_corpus))
        samples.push_back({patterns::extract_pattern_features(s.ast), s.pattern});
    const patterns::BoostOptions opts{cfg.n_estimators, cfg.learning_rate};
    const auto cv = patterns::stratified_kfold(samples, cfg.k_folds, cfg.train.seed, cfg.train.pattern_labels, opts);
    const auto model = patterns::train_pattern_model(samples, cfg.train.pattern_labels, opts);
    write_file(cfg.out / "pattern_model.json", patterns::to_json(model).dump());

    std::ostringstream t;
    t << "# variant=PATTERNS seed=" << cfg.train.seed << " k_folds=" << cv.plan.k << "\nclass\tprecision\trecall\tf1\n";
    for (const auto& label : cfg.train.pattern_labels) {
        const auto it = cv.mean_per_class.find(label);
        if (it == cv.mean_per_class.end()) continue;
        t << label << '\t' << fixed(it->second.precision) << '\t' << fixed(it->second.recall) << '\t'
          << fixed(it->second.f1) << '\n';
    }
    t << "mean_accuracy\t" << fixed(cv.mean_accuracy) << "\t\t\n";
    if (cv.plan.warning) t << "# " << *cv.plan.warning << '\n';
    write_file(cfg.out / "pattern_report.tsv", t.str());
    out << "pattern cv accuracy " << fixed(cv.mean_accuracy) << " over " << cv.plan.k << " folds\n";

    if (!cfg.corpus.empty()) {
        std::ostringstream p;
        p << "id\tpattern\n";
        for (const auto& s : load_classification(cfg.corpus, cfg).samples) {
            std::string label(patterns::kNoPattern);
            try {
                label = patterns::predict_pattern(patterns::extract_pattern_features(s.ast), model).label;
            } catch (const NotAClassError&) {
            }
            p << s.id << '\t' << label << '\n';
        }
        write_file(cfg.out / "pattern_predictions.tsv", p.str());
    }
    return 0;
}

int cmd_gen_clones(const RunConfig& cfg, std::ostream& out) {
    auto data = synth::clone_benchmark(cfg.n_seeds, cfg.per_type, cfg.train.seed);
    // Side inputs so every variant can run: warnings, the labeled reports that
    // train their filter, and NONE for units that declare no class.
    synth::plant_warnings(data.store, cfg.train.seed + 1);
    for (auto& [_, u] : data.store) u.pattern = std::string(patterns::kNoPattern);
    write_file(cfg.out / "clone_code.jsonl", ingest::code_store_to_jsonl(data.store));
    write_file(cfg.out / "clone_pairs.jsonl", ingest::clone_pairs_to_jsonl(data.pairs));
    write_file(cfg.out / "reports.jsonl", ingest::report_docs_to_jsonl(synth::report_corpus(60, cfg.train.seed + 2)));
    out << data.pairs.size() << " pairs over " << data.store.size() << " units written to " << cfg.out.string() << '\n';
    return 0;
}

int cmd_selfcheck(const std::vector<std::string>& faults, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    for (const auto& f : faults) nn::fault::inject(f);
    const auto results = selfcheck::run_all();
    nn::fault::clear();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto failed = std::find_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; });
    for (const auto& r : results) out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    out << "selfcheck finished in " << fixed(secs, 2) << "s\n";
    if (failed != results.end()) {
        err << "selfcheck failed: " << failed->name << '\n';
        return 4;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Argument wiring

struct Flags {
    std::string config;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
};

void add_config_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "key=value config file");
    for (const auto& key : config_keys()) {
        std::string flag = key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        f.options[key] = sub->add_option("--" + flag, f.values[key]);
    }
}

RunConfig resolve(const Flags& f, bool require_seed) {
    std::map<std::string, std::string> values;
    if (!f.config.empty()) values = parse_config_text(ingest::read_file(f.config));
    for (const auto& [key, opt] : f.options)
        if (opt->count() > 0) values[key] = f.values.at(key);
    return make_run_config(values, require_seed);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"codectx: code models with static-analysis context channels"};
    app.require_subcommand(1);
    struct Sub {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&, std::ostream&);
        bool needs_seed;
    };
    const Sub subs[] = {
        {"train", "train a model bundle for one variant", cmd_train, true},
        {"eval", "evaluate a bundle and write a TSV report", cmd_eval, false},
        {"ablate", "train and evaluate all five variants", cmd_ablate, true},
        {"filter-bugs", "train the report filter and drop non-bug warnings", cmd_filter_bugs, true},
        {"detect-patterns", "cross-validate and train the pattern detector", cmd_detect_patterns, true},
        {"gen-clones", "write a synthetic clone benchmark", cmd_gen_clones, true},
    };
    std::vector<Flags> flags(std::size(subs));
    std::vector<CLI::App*> apps;
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        apps.push_back(app.add_subcommand(subs[i].name, subs[i].help));
        add_config_flags(apps.back(), flags[i]);
    }
    auto* self = app.add_subcommand("selfcheck", "gradient checks and oracle suites");
    std::vector<std::string> faults;
    self->add_option("--inject-fault", faults)->group("");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (self->parsed()) return cmd_selfcheck(faults, out, err);
        for (std::size_t i = 0; i < std::size(subs); ++i) {
            if (!apps[i]->parsed()) continue;
            return subs[i].fn(resolve(flags[i], subs[i].needs_seed), out);
        }
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 4;
    }
}

}  // namespace codectx::cli
