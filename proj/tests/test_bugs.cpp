#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "codectx/bugs.hpp"
#include "codectx/errors.hpp"
#include "codectx/mini_lang.hpp"
#include "codectx/rng.hpp"
#include "codectx/synth.hpp"

using namespace codectx;
using namespace codectx::bugs;
using ingest::BugWarning;

namespace {

Tokens split_words(const std::string& gram) {
    Tokens out;
    std::string cur;
    for (char c : gram) {
        if (c == ' ') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Occurrences of `needle` as a contiguous run in `hay`.
std::size_t occurrences(const Tokens& hay, const Tokens& needle) {
    std::size_t n = 0;
    for (auto it = hay.begin(); (it = std::search(it, hay.end(), needle.begin(), needle.end())) != hay.end(); ++it) ++n;
    return n;
}

std::vector<Tokens> random_docs(std::size_t count, std::size_t length, std::uint64_t seed) {
    const Tokens alphabet = {"null", "pointer", "leak", "stream", "loop", "index", "crash", "value"};
    Rng rng(seed);
    std::vector<Tokens> docs(count);
    for (auto& d : docs)
        for (std::size_t i = 0; i < length; ++i) d.push_back(alphabet[rng.below(alphabet.size())]);
    return docs;
}

BugWarning warning(std::string category, int priority, int ls = 1, int le = 1) {
    BugWarning w;
    w.category = std::move(category);
    w.priority = priority;
    w.line_start = ls;
    w.line_end = le;
    return w;
}

BugFilterModel constant_model(double bias) {
    BugFilterModel m;
    m.logreg.b = bias;
    return m;
}

}  // namespace

TEST(Preprocess, Examples) {
    EXPECT_EQ(preprocess("Null Pointer, exception!"), (Tokens{"null", "pointer", "exception"}));
    EXPECT_TRUE(preprocess("").empty());
    EXPECT_EQ(preprocess("The stream IS not closed in run()"), (Tokens{"stream", "not", "closed", "run"}));
    for (const auto& doc : synth::report_corpus(20, 3)) {
        const Tokens once = preprocess(doc.text);
        std::string joined;
        for (const auto& t : once) joined += t + " ";
        EXPECT_EQ(preprocess(joined), once);
    }
}

TEST(ExtractNgrams, Examples) {
    const auto grams = extract_ngrams({"null", "pointer", "exception"}, 2);
    EXPECT_EQ(grams, (std::vector<std::string>{"null", "pointer", "exception", "null pointer", "pointer exception"}));
    EXPECT_EQ(extract_ngrams({"x"}, 3), (std::vector<std::string>{"x"}));
    EXPECT_THROW(extract_ngrams({"x"}, 0), ConfigError);
}

TEST(ExtractNgrams, CountFormula) {
    for (std::size_t L = 0; L <= 9; ++L) {
        for (int n = 1; n <= 5; ++n) {
            std::size_t expected = 0;
            for (std::size_t k = 1; k <= std::min<std::size_t>(n, L); ++k) expected += L - k + 1;
            EXPECT_EQ(extract_ngrams(Tokens(L, "t"), n).size(), expected) << L << " " << n;
        }
    }
}

TEST(NGramVocab, HandCount) {
    const std::vector<Tokens> docs = {preprocess("null pointer in parser"), preprocess("a null pointer again"),
                                      preprocess("stream leak")};
    const auto v = build_ngram_vocab(docs, 3, 2);
    const auto i = v.index_of("null pointer");
    ASSERT_TRUE(i.has_value());
    EXPECT_EQ(v.df[*i], 2u);
    EXPECT_EQ(v.n_docs, 3u);
    EXPECT_NEAR(v.idf(*i), std::log(1.5), 1e-15);
    EXPECT_FALSE(v.index_of("stream").has_value());
    EXPECT_TRUE(std::is_sorted(v.grams.begin(), v.grams.end()));

    const auto all = build_ngram_vocab(docs, 3, 1);
    std::set<std::string> observed;
    for (const auto& d : docs)
        for (const auto& g : extract_ngrams(d, 3)) observed.insert(g);
    EXPECT_EQ(all.size(), observed.size());
    EXPECT_THROW(build_ngram_vocab({}, 3, 2), EmptyCorpusError);
}

TEST(NGramVocab, MatchesBruteForceCounter) {
    const auto docs = random_docs(10, 50, 17);
    const auto v = build_ngram_vocab(docs, 3, 2);
    // Every stored gram has the brute-force document frequency.
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Tokens g = split_words(v.grams[i]);
        std::size_t df = 0;
        for (const auto& d : docs) df += occurrences(d, g) > 0;
        EXPECT_EQ(v.df[i], df) << v.grams[i];
        EXPECT_GE(df, 2u);
    }
    // Every gram with df >= 2 is stored.
    std::size_t frequent = 0;
    std::set<Tokens> seen;
    for (const auto& d : docs) {
        for (std::size_t n = 1; n <= 3; ++n) {
            for (std::size_t s = 0; s + n <= d.size(); ++s) {
                Tokens g(d.begin() + static_cast<long>(s), d.begin() + static_cast<long>(s + n));
                if (!seen.insert(g).second) continue;
                std::size_t df = 0;
                for (const auto& e : docs) df += occurrences(e, g) > 0;
                frequent += df >= 2;
            }
        }
    }
    EXPECT_EQ(v.size(), frequent);
    // featurize equals brute-force occurrence counting.
    for (const auto& d : random_docs(10, 50, 99)) {
        const auto m = featurize(d, v);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::size_t c = occurrences(d, split_words(v.grams[i]));
            if (c == 0) EXPECT_FALSE(m.contains(i));
            else EXPECT_EQ(m.at(i), static_cast<double>(c));
        }
    }
}

TEST(NGramVocab, CapKeepsHighestFrequencyIdf) {
    const std::vector<Tokens> docs = {{"a", "b", "b", "b"}, {"a", "b", "c"}, {"c", "d"}, {"d"}};
    const auto capped = build_ngram_vocab(docs, 1, 2, 2);
    // a: 2 x ln 2, b: 4 x ln 2, c: 2 x ln 2, d: 2 x ln 2 -> b then a (tie broken by text)
    EXPECT_EQ(capped.grams, (std::vector<std::string>{"a", "b"}));
}

TEST(Featurize, Examples) {
    const auto v = build_ngram_vocab({{"a", "b", "a"}}, 2, 1);
    const auto m = featurize({"a", "b", "a"}, v);
    EXPECT_EQ(m.at(*v.index_of("a")), 2.0);
    EXPECT_EQ(m.at(*v.index_of("b")), 1.0);
    EXPECT_EQ(m.at(*v.index_of("a b")), 1.0);
    EXPECT_EQ(m.at(*v.index_of("b a")), 1.0);
    EXPECT_EQ(m.size(), 4u);
    EXPECT_TRUE(featurize({"zzz"}, v).empty());
}

namespace {

NGramVocabulary two_gram_vocab() {
    NGramVocabulary v;
    v.n_max = 1;
    v.min_df = 1;
    v.n_docs = 8;
    v.grams = {"f0", "f1"};
    v.df = {4, 4};
    return v;
}

}  // namespace

TEST(TrainFilter, LogRegSeparableToy) {
    const auto v = two_gram_vocab();
    std::vector<MembershipVector> X;
    std::vector<int> y;
    for (int i = 0; i < 4; ++i) {
        X.push_back({{0, 1.0 + i}, {1, 0.5}});
        y.push_back(1);
        X.push_back({{0, 0.5}, {1, 1.0 + i}});
        y.push_back(0);
    }
    const auto m = train_filter(X, y, v, FilterKind::LogReg, 1);
    for (std::size_t i = 0; i < X.size(); ++i) EXPECT_EQ(m.score(X[i]) >= 0.5, y[i] == 1);
    const auto& h = m.logreg.loss_history;
    ASSERT_GT(h.size(), 2u);
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1] + 1e-15);
    EXPECT_THROW(train_filter(X, std::vector<int>(8, 1), v, FilterKind::LogReg, 1), DegenerateLabelsError);
    EXPECT_THROW(train_filter(X, std::vector<int>(8, 0), v, FilterKind::RandomForest, 1), DegenerateLabelsError);
}

TEST(TrainFilter, LogRegLossMonotoneOnReports) {
    const auto docs = synth::report_corpus(30, 4);
    std::vector<Tokens> toks;
    std::vector<int> y;
    for (const auto& d : docs) {
        toks.push_back(preprocess(d.text));
        y.push_back(d.label == ingest::ReportLabel::Bug);
    }
    const auto v = build_ngram_vocab(toks);
    std::vector<MembershipVector> X;
    for (const auto& t : toks) X.push_back(featurize(t, v));
    FilterOptions opt;
    opt.logreg.epochs = 300;
    const auto& h = train_filter(X, y, v, FilterKind::LogReg, 1, opt).logreg.loss_history;
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1] + 1e-15);
}

TEST(TrainFilter, SingleStumpForest) {
    NGramVocabulary v;
    v.grams = {"f"};
    v.df = {6};
    v.n_docs = 6;
    std::vector<MembershipVector> X = {{{0, 1}}, {{0, 2}}, {{0, 3}}, {{0, 7}}, {{0, 8}}, {{0, 9}}};
    const std::vector<int> y = {0, 0, 0, 1, 1, 1};
    FilterOptions opt;
    opt.forest = {1, 1, false};
    const auto m = train_filter(X, y, v, FilterKind::RandomForest, 5, opt);
    ASSERT_EQ(m.forest.size(), 1u);
    EXPECT_EQ(m.forest[0].nodes.size(), 3u);
    EXPECT_DOUBLE_EQ(m.forest[0].nodes[0].threshold, 5.0);
    for (std::size_t i = 0; i < X.size(); ++i) EXPECT_EQ(m.score(X[i]) >= 0.5, y[i] == 1);
}

TEST(TrainFilter, DeterministicAndSerializable) {
    const auto docs = synth::report_corpus(24, 8);
    FilterTrainConfig cfg;
    cfg.options.forest.n_trees = 5;
    const auto a = select_filter(docs, cfg, 3);
    const auto b = select_filter(docs, cfg, 3);
    EXPECT_EQ(to_json(a.model).dump(), to_json(b.model).dump());
    for (FilterKind k : {FilterKind::LogReg, FilterKind::RandomForest}) {
        std::vector<MembershipVector> X;
        std::vector<int> y;
        for (const auto& d : docs) {
            X.push_back(featurize(preprocess(d.text), a.model.vocab));
            y.push_back(d.label == ingest::ReportLabel::Bug);
        }
        const auto m = train_filter(X, y, a.model.vocab, k, 2, cfg.options);
        const auto j = to_json(m);
        const auto back = filter_model_from_json(nlohmann::json::parse(j.dump()));
        EXPECT_EQ(to_json(back).dump(), j.dump());
        for (const auto& x : X) EXPECT_EQ(back.score(x), m.score(x));
    }
}

TEST(FilterWarnings, ConstantModels) {
    const auto planted = synth::planted_warnings(10, 3, 1);
    const auto keep = filter_warnings(planted.warnings, {}, constant_model(10.0));
    EXPECT_EQ(keep.kept, planted.warnings);
    EXPECT_EQ(keep.removal_ratio, 0.0);
    const auto drop = filter_warnings(planted.warnings, {}, constant_model(-10.0));
    EXPECT_TRUE(drop.kept.empty());
    EXPECT_EQ(drop.removal_ratio, 1.0);
    EXPECT_EQ(filter_warnings({}, {}, constant_model(1.0)).removal_ratio, 0.0);
}

TEST(FilterWarnings, LinkedReportReplacesMessage) {
    auto w = synth::planted_warnings(1, 0, 2).warnings;
    const auto docs = synth::report_corpus(40, 6);
    const auto sel = select_filter(docs, FilterTrainConfig{}, 1);
    ASSERT_GE(sel.model.score_text(w[0].message), 0.5);
    w[0].report_id = "r-noise";
    const std::map<std::string, std::string> reports = {{"r-noise", docs[1].text}};
    EXPECT_EQ(filter_warnings(w, reports, sel.model).removed, 1u);
    // Unknown report ids fall back to the message.
    w[0].report_id = "missing";
    EXPECT_EQ(filter_warnings(w, reports, sel.model).removed, 0u);
}

TEST(FilterWarnings, RemovesExactlyThePlantedWarnings) {
    const auto planted = synth::planted_warnings(20, 6, 11);
    std::vector<Tokens> toks;
    std::vector<int> y;
    for (std::size_t i = 0; i < 20; ++i) {
        toks.push_back(preprocess(planted.warnings[i].message));
        y.push_back(planted.genuine[i]);
    }
    const auto v = build_ngram_vocab(toks);
    std::vector<MembershipVector> X;
    for (const auto& t : toks) X.push_back(featurize(t, v));
    const auto model = train_filter(X, y, v, FilterKind::LogReg, 1);
    const auto r = filter_warnings(planted.warnings, {}, model);
    EXPECT_EQ(r.removed, 6u);
    EXPECT_DOUBLE_EQ(r.removal_ratio, 0.3);
    std::vector<BugWarning> expected;
    for (std::size_t i = 0; i < 20; ++i)
        if (planted.genuine[i]) expected.push_back(planted.warnings[i]);
    EXPECT_EQ(r.kept, expected);
}

TEST(BugContext, RawFeature) {
    const std::vector<BugWarning> one = {warning("CORRECTNESS", 1)};
    const auto raw = bug_feature(one);
    EXPECT_EQ(raw, nn::Tensor::vec({3, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
    EXPECT_EQ(bug_feature(std::vector<BugWarning>{one[0], one[0]}), raw);
    const std::vector<BugWarning> two = {warning("STYLE", 2), warning("SECURITY", 3), warning("STYLE", 3)};
    const auto r2 = bug_feature(two);
    EXPECT_EQ(r2[2], 2.0);
    EXPECT_EQ(r2[7], 1.0);
    EXPECT_EQ(bug_feature(std::vector<BugWarning>{warning("WHATEVER", 1)})[9], 3.0);
    EXPECT_THROW(bug_feature({}), EmptyInputError);
}

TEST(BugContext, ProjectionAndPermutationInvariance) {
    Rng rng(4);
    const nn::Tensor P = nn::uniform_init({6, kBugFeatureWidth}, 1.0, rng);
    std::vector<BugWarning> ws = {warning("STYLE", 2), warning("CORRECTNESS", 1), warning("I18N", 3),
                                  warning("STYLE", 1)};
    const auto c = bug_context(ws, P);
    EXPECT_EQ(c.channel, encode::Channel::Bug);
    ASSERT_EQ(c.values.size(), 6u);
    const auto raw = bug_feature(ws);
    for (std::size_t i = 0; i < 6; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < kBugFeatureWidth; ++j) s += P.at(i, j) * raw[j];
        EXPECT_DOUBLE_EQ(c.values[i], s);
    }
    std::sort(ws.begin(), ws.end(), [](const BugWarning& a, const BugWarning& b) { return a.category < b.category; });
    do {
        EXPECT_EQ(bug_context(ws, P).values, c.values);
    } while (std::next_permutation(ws.begin(), ws.end(), [](const BugWarning& a, const BugWarning& b) {
        return a.category < b.category || (a.category == b.category && a.priority < b.priority);
    }));
    EXPECT_THROW(bug_context(ws, nn::Tensor({6, 3})), ShapeError);
}

TEST(BugContext, WarningsAttachByLineOverlap) {
    const auto ast = ingest::parse_mini("int f(int x) {\n  int y = x;\n  while (y > 0) {\n    y = y - 1;\n  }\n  return y;\n}");
    const auto stmts = encode::split_statements(ast);
    const std::vector<BugWarning> ws = {warning("STYLE", 1, 2, 2), warning("CORRECTNESS", 2, 4, 6),
                                        warning("I18N", 3, 40, 41)};
    const auto per = warnings_by_statement(stmts, ws);
    ASSERT_EQ(per.size(), stmts.size());
    // FuncDef(1) Decl(2) While(3) Assign(4) END Return(6) END
    EXPECT_TRUE(per[0].empty());
    ASSERT_EQ(per[1].size(), 1u);
    EXPECT_EQ(per[1][0].category, "STYLE");
    EXPECT_TRUE(per[2].empty());
    EXPECT_EQ(per[3].size(), 1u);
    EXPECT_TRUE(per[4].empty());
    EXPECT_EQ(per[5].size(), 1u);
}
