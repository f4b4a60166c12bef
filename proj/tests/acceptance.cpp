// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "codectx/bugs.hpp"
#include "codectx/mini_lang.hpp"
#include "codectx/patterns.hpp"
#include "codectx/selfcheck.hpp"
#include "codectx/synth.hpp"
#include "codectx/tasks.hpp"

using namespace codectx;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

// ---------------------------------------------------------------------------
// 1. gradient integrity

Outcome gradients() {
    const auto start = std::chrono::steady_clock::now();
    const std::pair<const char*, nn::GradCheckResult> checks[] = {
        {"affine", selfcheck::grad_affine(101)},
        {"gru_step", selfcheck::grad_gru_step(102)},
        {"softmax_xent", selfcheck::grad_softmax_xent(103)},
        {"statement->code", selfcheck::grad_encoder_path(104)},
    };
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double worst = 0.0;
    std::string where;
    for (const auto& [name, r] : checks) {
        if (r.max_rel_error >= worst) {
            worst = r.max_rel_error;
            where = std::string(name) + ":" + r.worst_param;
        }
    }
    return {worst < 1e-4 && secs < 60.0, "max rel error " + fmt(worst) + " (" + where + "), " + fmt(secs, 2) + "s"};
}

// ---------------------------------------------------------------------------
// 2. splitting oracle

void walk(const ingest::AstNode& n, bool inside, std::vector<std::string>& tokens, std::size_t& bodies) {
    inside = inside || encode::is_statement_kind(n.kind);
    if (encode::is_compound_kind(n.kind)) ++bodies;
    if (inside && n.token) tokens.push_back(*n.token);
    for (const auto& c : n.children) walk(c, inside, tokens, bodies);
}

Outcome splitting() {
    Rng rng(2024);
    std::size_t bad = 0;
    for (int i = 0; i < 50; ++i) {
        const auto ast = synth::random_program(static_cast<int>(rng.below(synth::kSkeletonCount)), rng);
        std::vector<std::string> got, want;
        std::size_t markers = 0, bodies = 0;
        for (const auto& t : encode::split_statements(ast)) {
            if (t.is_end_block()) {
                ++markers;
                continue;
            }
            ingest::preorder(t.root, [&](const ingest::AstNode& n) {
                if (n.token) got.push_back(*n.token);
            });
        }
        walk(ast, false, want, bodies);
        bad += got != want || markers != bodies;
    }
    return {bad == 0, std::to_string(50 - bad) + "/50 programs match"};
}

// ---------------------------------------------------------------------------
// 3. overfit

fs::path fixture(const char* name) { return fs::path(CODECTX_FIXTURE_DIR) / name; }

Outcome overfit() {
    const auto start = std::chrono::steady_clock::now();
    const auto data = ingest::load_classification_corpus(fixture("toy_classify.jsonl"));
    tasks::TrainConfig cfg;  // d=128, h=100
    cfg.epochs = 200;
    cfg.target_accuracy = 1.0;
    const auto b = tasks::train_task(data, tasks::Variant::None, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double acc = b.log.empty() ? 0.0 : b.log.back().train_accuracy;
    return {data.samples.size() == 20 && data.classes == 4 && acc == 1.0 && secs < 120.0,
            "train accuracy " + fmt(acc) + " after " + std::to_string(b.log.size()) + " epochs, " + fmt(secs, 2) + "s"};
}

// ---------------------------------------------------------------------------
// 4. clone exactness

std::pair<ingest::CloneCorpus, ingest::CloneCorpus> holdout(const ingest::CloneCorpus& all, std::uint64_t seed) {
    std::vector<int> strata;
    for (const auto& p : all.pairs)
        strata.push_back(p.label ? static_cast<int>(p.clone_type) : 10 + static_cast<int>(p.stratum.value()));
    const auto plan = eval::stratified_folds(strata, 3, seed);
    const std::set<std::size_t> test(plan.folds[0].begin(), plan.folds[0].end());
    ingest::CloneCorpus tr{all.store, {}}, te{all.store, {}};
    for (std::size_t i = 0; i < all.pairs.size(); ++i) (test.contains(i) ? te : tr).pairs.push_back(all.pairs[i]);
    return {tr, te};
}

Outcome clones() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto [train, test] = holdout(synth::clone_benchmark(30, 15, seed), seed);
        tasks::TrainConfig cfg;
        cfg.dim = 32;
        cfg.hidden = 32;
        cfg.epochs = 30;
        cfg.lr = 1e-2;
        cfg.seed = seed;
        const auto m = tasks::eval_clone(tasks::train_task(train, tasks::Variant::None, cfg), test);
        const double t1 = m.at("T1").f1, t2 = m.at("T2").f1, st3 = m.at("ST3").f1;
        ok = ok && t1 == 1.0 && t2 == 1.0 && st3 >= 0.90;
        detail += (detail.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + " T1 " + fmt(t1) +
                  " T2 " + fmt(t2) + " ST3 " + fmt(st3);
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------
// 5. clone symmetry

Outcome symmetry() {
    Rng rng(55);
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 1 + rng.below(64);
        nn::Tensor w({n}), a({n}), b({n});
        for (std::size_t k = 0; k < n; ++k) {
            w[k] = rng.normal();
            a[k] = 10.0 * rng.normal();
            b[k] = 10.0 * rng.normal();
        }
        const tasks::CloneHead head{w, rng.normal(), 0.5};
        bad += tasks::clone_score(a, b, head) != tasks::clone_score(b, a, head);
    }
    return {bad == 0, std::to_string(1000 - bad) + "/1000 pairs bit-identical"};
}

// ---------------------------------------------------------------------------
// 6. n-gram oracle

std::map<std::string, std::size_t> brute_counts(const bugs::Tokens& doc, int n_max) {
    std::map<std::string, std::size_t> c;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        std::string g;
        for (int n = 1; n <= n_max && i + n <= doc.size(); ++n) {
            g += (n > 1 ? " " : "") + doc[i + n - 1];
            ++c[g];
        }
    }
    return c;
}

Outcome ngrams() {
    const bugs::Tokens words = {"null", "deref", "leak", "stream", "close", "loop", "index", "bound", "crash"};
    Rng rng(66);
    std::vector<bugs::Tokens> docs(10);
    for (auto& d : docs)
        for (int i = 0; i < 50; ++i) d.push_back(words[rng.below(words.size())]);

    std::map<std::string, std::size_t> df;
    std::vector<std::map<std::string, std::size_t>> counts;
    for (const auto& d : docs) {
        counts.push_back(brute_counts(d, 3));
        for (const auto& [g, _] : counts.back()) ++df[g];
    }
    std::set<std::string> expected;
    for (const auto& [g, n] : df)
        if (n >= 2) expected.insert(g);

    const auto vocab = bugs::build_ngram_vocab(docs, 3, 2);
    std::size_t bad = 0;
    const std::set<std::string> got(vocab.grams.begin(), vocab.grams.end());
    bad += got != expected;
    for (std::size_t i = 0; i < vocab.size(); ++i) bad += vocab.df[i] != df[vocab.grams[i]];
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const auto m = bugs::featurize(docs[d], vocab);
        for (std::size_t i = 0; i < vocab.size(); ++i) {
            const auto it = counts[d].find(vocab.grams[i]);
            const double want = it == counts[d].end() ? 0.0 : static_cast<double>(it->second);
            const auto f = m.find(i);
            bad += (f == m.end() ? 0.0 : f->second) != want;
        }
    }
    return {bad == 0, std::to_string(vocab.size()) + " grams, " + std::to_string(bad) + " mismatches"};
}

// ---------------------------------------------------------------------------
// 7. bug filter

Outcome filter() {
    const auto sel = bugs::select_filter(synth::report_corpus(60, 77), {}, 77);
    const double f1 = sel.model.kind == bugs::FilterKind::LogReg ? sel.logreg_cv_f1 : sel.forest_cv_f1;
    const auto planted = synth::planted_warnings(20, 6, 78);
    const auto rep = bugs::filter_warnings(planted.warnings, {}, sel.model);
    std::vector<ingest::BugWarning> genuine;
    for (std::size_t i = 0; i < planted.warnings.size(); ++i)
        if (planted.genuine[i]) genuine.push_back(planted.warnings[i]);
    const bool exact = rep.kept == genuine && rep.removed == 6;
    return {f1 >= 0.90 && exact, std::string(bugs::to_string(sel.model.kind)) + " cv f1 " + fmt(f1) + ", removed " +
                                     std::to_string(rep.removed) + "/20" + (exact ? " (exactly the planted)" : "")};
}

// ---------------------------------------------------------------------------
// 8. AdaBoost contract

Outcome adaboost() {
    std::vector<patterns::LabeledFeatures> samples;
    for (const auto& s : synth::pattern_corpus(8, 88))
        samples.push_back({patterns::extract_pattern_features(s.ast), s.pattern});
    patterns::BoostTrace trace;
    patterns::train_pattern_model(samples, patterns::default_labels(), {100, 1.0}, &trace);
    double drift = 0.0;
    for (double s : trace.weight_sum) drift = std::max(drift, std::abs(s - 1.0));

    std::vector<patterns::LabeledFeatures> sep;
    for (int i = 0; i < 12; ++i) {
        patterns::PatternFeatures x{};
        x[3] = i;
        x[7] = (i * 7) % 5;
        sep.push_back({x, i < 6 ? "SINGLETON" : "OBSERVER"});
    }
    patterns::BoostTrace sep_trace;
    const auto sep_model = patterns::train_pattern_model(sep, patterns::default_labels(), {100, 1.0}, &sep_trace);
    const bool round1 = !sep_trace.training_error.empty() && sep_trace.training_error.front() == 0.0;

    // 23/17/9 members over 5 folds
    std::vector<int> labels;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < (c == 0 ? 23 : c == 1 ? 17 : 9); ++i) labels.push_back(c);
    const auto plan = eval::stratified_folds(labels, 5, 89);
    double off = 0.0;
    for (const auto& fold : plan.folds) {
        for (int c = 0; c < 3; ++c) {
            const auto n_c = std::count(labels.begin(), labels.end(), c);
            const auto in = std::count_if(fold.begin(), fold.end(), [&](std::size_t i) { return labels[i] == c; });
            off = std::max(off, std::abs(static_cast<double>(in) - static_cast<double>(n_c) / 5.0));
        }
    }
    return {drift <= 1e-12 && round1 && off <= 1.0 && sep_model.stumps.size() == 1,
            "weight-sum drift " + fmt(drift) + " over " + std::to_string(trace.weight_sum.size()) +
                " rounds, separable error after round 1 " +
                (sep_trace.training_error.empty() ? "n/a" : fmt(sep_trace.training_error.front())) +
                ", fold deviation " + fmt(off)};
}

// ---------------------------------------------------------------------------
// 9. pattern channel direction

Outcome pattern_gain() {
    double sum = 0.0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto train = synth::pattern_task_corpus(4, seed);
        const auto test = synth::pattern_task_corpus(10, seed + 1000);
        tasks::TrainConfig cfg;
        cfg.dim = 32;
        cfg.hidden = 32;
        cfg.epochs = 8;
        cfg.lr = 1e-2;
        cfg.seed = seed;
        const double none = tasks::eval_classification(tasks::train_task(train, tasks::Variant::None, cfg), test).accuracy;
        const double pat =
            tasks::eval_classification(tasks::train_task(train, tasks::Variant::Patterns, cfg), test).accuracy;
        sum += pat - none;
        detail += (detail.empty() ? "" : " ") + fmt(pat - none, 3);
    }
    return {sum / 5.0 > 0.0, "mean PATTERNS-NONE " + fmt(sum / 5.0, 3) + " (per seed " + detail + ")"};
}

// ---------------------------------------------------------------------------
// 10. reproducibility, persistence, ablation layout

Outcome reproducibility() {
    const auto data = ingest::load_classification_corpus(fixture("toy_classify.jsonl"));
    tasks::TrainConfig cfg;
    cfg.dim = 16;
    cfg.hidden = 16;
    cfg.epochs = 5;
    cfg.seed = 10;
    const auto b = tasks::train_task(data, tasks::Variant::RawBugs, cfg);
    const auto s1 = tasks::save_bundle(b);
    const bool same = s1 == tasks::save_bundle(tasks::train_task(data, tasks::Variant::RawBugs, cfg));
    const auto loaded = tasks::load_bundle(s1);
    const auto m1 = tasks::eval_classification(b, data), m2 = tasks::eval_classification(loaded, data);
    const bool round_trip = tasks::save_bundle(loaded) == s1 && m1.accuracy == m2.accuracy &&
                            m1.precision == m2.precision && m1.recall == m2.recall && m1.f1 == m2.f1 &&
                            tasks::predict_labels(b, data) == tasks::predict_labels(loaded, data);

    const fs::path dir = fs::path(CODECTX_ACCEPTANCE_DIR) / "ablate";
    fs::create_directories(dir);
    auto corpus = synth::pattern_task_corpus(3, 12);
    std::ofstream(dir / "corpus.jsonl") << ingest::classification_corpus_to_jsonl(corpus);
    std::ofstream(dir / "reports.jsonl") << ingest::report_docs_to_jsonl(synth::report_corpus(40, 13));
    std::ostringstream out, err;
    const int code = cli::run({"ablate", "--corpus", (dir / "corpus.jsonl").string(), "--reports",
                               (dir / "reports.jsonl").string(), "--seed", "3", "--epochs", "2", "--dim", "8",
                               "--hidden", "8", "--out", dir.string()},
                              out, err);
    std::vector<std::string> columns;
    std::ifstream table(dir / "ablation_classify.tsv");
    for (std::string line; std::getline(table, line);) {
        if (!line.starts_with("metric\t")) continue;
        std::istringstream cells(line.substr(7));
        for (std::string c; std::getline(cells, c, '\t');) columns.push_back(c);
    }
    std::vector<std::string> expected;
    for (const auto v : tasks::kVariants) expected.emplace_back(tasks::column_title(v));
    const bool layout = code == 0 && columns == expected;
    return {same && round_trip && layout, std::string("bundles ") + (same ? "identical" : "DIFFER") + ", round trip " +
                                              (round_trip ? "exact" : "MISMATCH") + ", ablate columns " +
                                              (layout ? "in order" : "WRONG (exit " + std::to_string(code) + ")")};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"gradient integrity", gradients},
        {"splitting oracle", splitting},
        {"overfit 20-sample fixture", overfit},
        {"T1/T2 exactness, ST3 >= 0.90", clones},
        {"clone symmetry", symmetry},
        {"n-gram oracle equivalence", ngrams},
        {"bug filter quality", filter},
        {"AdaBoost contract", adaboost},
        {"pattern channel direction", pattern_gain},
        {"reproducibility and persistence", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < std::size(criteria); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << " " << criteria[i].first << ": "
                  << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
