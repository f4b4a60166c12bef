#include <gtest/gtest.h>

#include <cmath>

#include "codectx/embeddings.hpp"
#include "codectx/encoder.hpp"
#include "codectx/errors.hpp"
#include "codectx/kernels.hpp"
#include "codectx/mini_lang.hpp"
#include "codectx/optim.hpp"

using namespace codectx;
using namespace codectx::encode;
using ingest::AstNode;

namespace {

EncoderConfig small_config(std::size_t vocab) {
    EncoderConfig c;
    c.vocab_size = vocab;
    c.dim = 6;
    c.hidden = 5;
    return c;
}

ContextVector context(std::vector<double> v, Channel ch = Channel::Bug) {
    return ContextVector{ch, std::nullopt, nn::Tensor::vec(std::move(v))};
}

}  // namespace

TEST(Vocabulary, ThresholdAndOrder) {
    const AstNode t("Block", std::nullopt,
                    {AstNode("Identifier", "a"), AstNode("Identifier", "a"), AstNode("Identifier", "a"),
                     AstNode("Identifier", "b"), AstNode("Identifier", "c"), AstNode("Identifier", "c")});
    const auto v = Vocabulary::build({&t}, 2);
    EXPECT_TRUE(v.contains("a"));
    EXPECT_TRUE(v.contains("c"));
    EXPECT_FALSE(v.contains("b"));
    EXPECT_EQ(v.symbol_index("b"), Vocabulary::kUnk);
    EXPECT_LT(v.symbol_index("a"), v.symbol_index("c"));
    // The open kind "Block" is counted like a token (once, below threshold).
    EXPECT_FALSE(v.contains(Vocabulary::kind_symbol("Block")));
    EXPECT_EQ(Vocabulary::build({&t}, 1).symbol_index(Vocabulary::kind_symbol("Block")) >= v.reserved_count(), true);
}

TEST(Vocabulary, EmptyCorpusAndDeterminism) {
    const auto empty = Vocabulary::build({}, 1);
    EXPECT_EQ(empty.size(), empty.reserved_count());
    EXPECT_EQ(empty.symbols()[Vocabulary::kUnk], "<UNK>");
    const AstNode ast = ingest::parse_mini("int f(int x){ int y = x + x; return y * 2; }");
    EXPECT_EQ(Vocabulary::build({&ast}, 1), Vocabulary::build({&ast}, 1));
    EXPECT_THROW(Vocabulary::build({&ast}, 0), ConfigError);
    const auto v = Vocabulary::build({&ast}, 1);
    EXPECT_EQ(Vocabulary::from_symbols(v.symbols()), v);
}

TEST(Embeddings, ZeroEpochsIsSeededInit) {
    const AstNode ast = ingest::parse_mini("int f(int x){ return x; }");
    const auto v = Vocabulary::build({&ast}, 1);
    EmbeddingConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 0;
    cfg.seed = 3;
    Rng rng(3);
    const nn::Tensor expected = nn::uniform_init({v.size(), 8}, 0.5 / 8.0, rng);
    EXPECT_EQ(train_embeddings({&ast}, v, cfg), expected);
}

TEST(Embeddings, CoOccurringTokensEndUpCloser) {
    // p and q always share a statement; r only appears with s.
    std::string src = "int f() {\n";
    for (int i = 0; i < 40; ++i) src += "  p = q;\n  r = s;\n";
    src += "  return 0;\n}\n";
    const AstNode ast = ingest::parse_mini(src);
    const auto v = Vocabulary::build({&ast}, 1);
    EmbeddingConfig cfg;
    cfg.dim = 16;
    cfg.window = 2;
    cfg.epochs = 30;
    cfg.seed = 5;
    const nn::Tensor E = train_embeddings({&ast}, v, cfg);
    const double pq = cosine(E.row(v.symbol_index("p")), E.row(v.symbol_index("q")));
    const double pr = cosine(E.row(v.symbol_index("p")), E.row(v.symbol_index("r")));
    EXPECT_GT(pq, pr);
    EXPECT_EQ(train_embeddings({&ast}, v, cfg), E);
}

TEST(EncodeStatement, SingleLeafHandEvaluation) {
    const AstNode ast = ingest::parse_mini("int f(){ return 7; }");
    const auto vocab = Vocabulary::build({&ast}, 1);
    EncoderConfig cfg = small_config(vocab.size());
    Rng rng(1);
    nn::ParamSet ps;
    init_encoder_params(ps, cfg, rng);
    ps.value(kWSelf) = nn::Tensor::identity(cfg.dim);
    ps.value(kBias).fill(0.0);
    StatementTree leaf{AstNode("Literal", "7")};
    const nn::Tensor out = encode_statement(leaf, {}, ps, vocab, cfg);
    const auto row = ps.value(kEmbed).row(vocab.symbol_index("7"));
    for (std::size_t i = 0; i < cfg.dim; ++i) EXPECT_DOUBLE_EQ(out[i], std::tanh(row[i]));
}

TEST(EncodeStatement, DeterministicAndContextFree) {
    const AstNode a = ingest::parse_mini("int f(int x){ int y = x * 2 + 1; return y; }");
    const AstNode b = ingest::parse_mini("int f(int x)\n{\n  // comment\n  int y = x*2+1;\n  return y;\n}");
    const auto vocab = Vocabulary::build({&a}, 1);
    EncoderConfig cfg = small_config(vocab.size());
    Rng rng(2);
    nn::ParamSet ps;
    init_encoder_params(ps, cfg, rng);
    const auto ta = split_statements(a);
    const auto tb = split_statements(b);
    ASSERT_EQ(ta.size(), tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        EXPECT_EQ(encode_statement(ta[i], {}, ps, vocab, cfg), encode_statement(tb[i], {}, ps, vocab, cfg));
    }
    // A context that never wins any component leaves the encoding unchanged.
    const std::vector<ContextVector> low = {context(std::vector<double>(cfg.dim, -100.0))};
    EXPECT_EQ(encode_statement(ta[1], low, ps, vocab, cfg), encode_statement(ta[1], {}, ps, vocab, cfg));
    const std::vector<ContextVector> bad = {context({1.0, 2.0})};
    EXPECT_THROW(encode_statement(ta[1], bad, ps, vocab, cfg), ShapeError);
}

TEST(EncodeStatement, FusedInputDominatesEmbedding) {
    const AstNode ast = ingest::parse_mini("int f(int x){ x = x + 3; return x; }");
    const auto vocab = Vocabulary::build({&ast}, 1);
    EncoderConfig cfg = small_config(vocab.size());
    Rng rng(3);
    nn::ParamSet ps;
    init_encoder_params(ps, cfg, rng);
    const auto trees = split_statements(ast);
    const IndexedStatement st = index_statement(trees[1], vocab);
    const std::vector<ContextVector> ctx = {context({0.5, -0.5, 0.0, 0.2, -0.1, 0.05}),
                                            context({-0.3, 0.4, 0.01, -0.2, 0.3, 0.0}, Channel::Pattern)};
    StatementCache cache;
    encode_statement(st, ctx, ps, cfg, &cache);
    for (std::size_t n = 0; n < st.symbol.size(); ++n) {
        const auto row = ps.value(kEmbed).row(st.symbol[n]);
        for (std::size_t i = 0; i < cfg.dim; ++i) EXPECT_GE(cache.inputs[0][n][i], row[i]);
    }
}

TEST(EncodeCode, SingleStatementIsConcatenatedOneStepStates) {
    EncoderConfig cfg = small_config(40);
    Rng rng(4);
    nn::ParamSet ps;
    init_encoder_params(ps, cfg, rng);
    const nn::Tensor v = nn::uniform_init({cfg.dim}, 1.0, rng);
    const nn::Tensor code = encode_code({v}, ps);
    const nn::Tensor f = nn::gru_step(v, nn::Tensor::zeros(cfg.hidden), ps, kGruFwd);
    const nn::Tensor b = nn::gru_step(v, nn::Tensor::zeros(cfg.hidden), ps, kGruBwd);
    ASSERT_EQ(code.size(), 2 * cfg.hidden);
    for (std::size_t i = 0; i < cfg.hidden; ++i) {
        EXPECT_EQ(code[i], f[i]);
        EXPECT_EQ(code[cfg.hidden + i], b[i]);
    }
    EXPECT_THROW(encode_code({}, ps), EmptyInputError);
    EXPECT_EQ(encode_code({v, v, v}, ps), encode_code({v, v, v}, ps));
}

namespace {

// Loss = r . encode_code(encode_statement(s_i, contexts)) over a short program,
// with every parameter (embedding included) under check.
double program_loss(nn::ParamSet& ps, const std::vector<IndexedStatement>& stmts,
                    const std::vector<std::vector<ContextVector>>& ctx, const EncoderConfig& cfg,
                    const nn::Tensor& r) {
    std::vector<StatementCache> caches(stmts.size());
    std::vector<nn::Tensor> vecs;
    for (std::size_t i = 0; i < stmts.size(); ++i)
        vecs.push_back(encode_statement(stmts[i], ctx[i], ps, cfg, &caches[i]));
    SequenceCache seq;
    const nn::Tensor code = encode_code(vecs, ps, &seq);
    const auto dvecs = encode_code_backward(seq, r, ps);
    for (std::size_t i = 0; i < stmts.size(); ++i) encode_statement_backward(caches[i], dvecs[i], ps, cfg);
    double loss = 0.0;
    for (std::size_t i = 0; i < code.size(); ++i) loss += code[i] * r[i];
    return loss;
}

void check_program_gradients(FusionLevel fusion, int rounds) {
    const AstNode ast = ingest::parse_mini("int f(int x){ int y = x * 2; if (y > 3) { y = y - x; } }");
    const auto vocab = Vocabulary::build({&ast}, 1);
    EncoderConfig cfg = small_config(vocab.size());
    cfg.fusion = fusion;
    cfg.rounds = rounds;
    Rng rng(21);
    nn::ParamSet ps;
    init_encoder_params(ps, cfg, rng);
    ps.value(kBias) = nn::uniform_init({cfg.dim}, 0.3, rng);
    std::vector<IndexedStatement> stmts;
    for (const auto& t : split_statements(ast)) stmts.push_back(index_statement(t, vocab));
    stmts.resize(3);
    const std::vector<std::vector<ContextVector>> ctx = {
        {}, {context({0.05, -0.3, 0.12, -0.4, 0.33, -0.21})}, {}};
    const nn::Tensor r = nn::uniform_init({2 * cfg.hidden}, 1.0, rng);
    auto loss = [&](nn::ParamSet& p) { return program_loss(p, stmts, ctx, cfg, r); };
    const auto res = nn::grad_check(loss, ps, 1e-5);
    EXPECT_LT(res.max_rel_error, 1e-4) << res.worst_param << "[" << res.worst_index << "]";
}

}  // namespace

TEST(EncoderGradients, NodeFusionOneRound) { check_program_gradients(FusionLevel::Node, 1); }
TEST(EncoderGradients, NodeFusionTwoRounds) { check_program_gradients(FusionLevel::Node, 2); }
TEST(EncoderGradients, StatementFusion) { check_program_gradients(FusionLevel::Statement, 1); }
