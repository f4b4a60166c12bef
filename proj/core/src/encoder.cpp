#include "codectx/encoder.hpp"

#include <cmath>

#include "codectx/errors.hpp"
#include "codectx/kernels.hpp"

namespace codectx::encode {

void init_encoder_params(nn::ParamSet& params, const EncoderConfig& config, Rng& rng, const nn::Tensor* embedding) {
    const std::size_t d = config.dim, h = config.hidden;
    if (d == 0 || h == 0 || config.vocab_size == 0) throw ConfigError("encoder dimensions must be positive");
    if (config.rounds < 1) throw ConfigError("encoder rounds must be >= 1");
    if (embedding) {
        nn::require_shape(*embedding, {config.vocab_size, d}, "embedding");
        params.add(kEmbed, *embedding);
    } else {
        params.add(kEmbed, nn::uniform_init({config.vocab_size, d}, 0.5 / static_cast<double>(d), rng));
    }
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    params.add(kWSelf, nn::uniform_init({d, d}, s, rng));
    params.add(kWChild, nn::uniform_init({d, d}, s, rng));
    params.add(kBias, nn::Tensor({d}));
    params.add(kProjBug, nn::uniform_init({d, config.bug_width}, 1.0 / std::sqrt(static_cast<double>(config.bug_width)), rng));
    params.add(kProjPattern, nn::uniform_init({d, config.pattern_width}, 1.0, rng));
    nn::add_gru_params(params, kGruFwd, d, h, rng);
    nn::add_gru_params(params, kGruBwd, d, h, rng);
}

IndexedStatement index_statement(const StatementTree& tree, const Vocabulary& vocab) {
    IndexedStatement out;
    out.line_start = tree.line_start;
    out.line_end = tree.line_end;
    // Postorder flattening; returns the node's position.
    auto visit = [&](auto&& self, const ingest::AstNode& n) -> std::size_t {
        std::vector<std::size_t> kids;
        kids.reserve(n.children.size());
        for (const auto& c : n.children) kids.push_back(self(self, c));
        out.symbol.push_back(vocab.index_of(n));
        out.children.push_back(std::move(kids));
        return out.symbol.size() - 1;
    };
    visit(visit, tree.root);
    return out;
}

namespace {

void check_contexts(std::span<const ContextVector> contexts, std::size_t d) {
    for (const auto& c : contexts) {
        if (c.values.rank() != 1 || c.values.size() != d)
            throw ShapeError("context vector " + c.values.shape_string() + " does not match embedding width " +
                             std::to_string(d));
    }
}

}  // namespace

nn::Tensor encode_statement(const IndexedStatement& stmt, std::span<const ContextVector> contexts,
                            const nn::ParamSet& params, const EncoderConfig& config, StatementCache* cache) {
    const nn::Tensor& E = params.value(kEmbed);
    const nn::Tensor& Ws = params.value(kWSelf);
    const nn::Tensor& Wc = params.value(kWChild);
    const nn::Tensor& b = params.value(kBias);
    const std::size_t d = E.cols();
    check_contexts(contexts, d);
    const std::size_t n_nodes = stmt.symbol.size();
    const bool node_fusion = config.fusion == FusionLevel::Node;

    StatementCache local;
    StatementCache& c = cache ? *cache : local;
    c.stmt = &stmt;
    c.context_count = contexts.size();
    c.fusion_src.assign(n_nodes, std::vector<std::size_t>(d, 0));
    c.inputs.assign(static_cast<std::size_t>(config.rounds), std::vector<std::vector<double>>(n_nodes));
    c.states.assign(static_cast<std::size_t>(config.rounds), std::vector<std::vector<double>>(n_nodes));

    for (std::size_t n = 0; n < n_nodes; ++n) {
        if (stmt.symbol[n] >= E.rows()) throw ShapeError("symbol index beyond embedding rows");
        const auto row = E.row(stmt.symbol[n]);
        std::vector<double> x(row.begin(), row.end());
        if (node_fusion) {
            for (std::size_t k = 0; k < contexts.size(); ++k) {
                const auto cv = contexts[k].values.values();
                for (std::size_t i = 0; i < d; ++i) {
                    if (cv[i] > x[i]) {
                        x[i] = cv[i];
                        c.fusion_src[n][i] = k + 1;
                    }
                }
            }
        }
        c.inputs[0][n] = std::move(x);
    }

    for (int r = 0; r < config.rounds; ++r) {
        auto& in = c.inputs[static_cast<std::size_t>(r)];
        auto& st = c.states[static_cast<std::size_t>(r)];
        if (r > 0) in = c.states[static_cast<std::size_t>(r - 1)];
        for (std::size_t n = 0; n < n_nodes; ++n) {  // postorder: children first
            std::vector<double> a(b.values().begin(), b.values().end());
            nn::matvec_acc(Ws, in[n], a);
            for (auto ch : stmt.children[n]) nn::matvec_acc(Wc, st[ch], a);
            for (auto& v : a) v = std::tanh(v);
            st[n] = std::move(a);
        }
    }

    const auto& final_states = c.states.back();
    std::vector<double> pooled = final_states[0];
    c.pool_src.assign(d, 0);
    for (std::size_t n = 1; n < n_nodes; ++n) {
        for (std::size_t i = 0; i < d; ++i) {
            if (final_states[n][i] > pooled[i]) {
                pooled[i] = final_states[n][i];
                c.pool_src[i] = n;
            }
        }
    }
    c.tree_vec = pooled;
    c.stmt_fusion_src.assign(d, 0);
    if (!node_fusion) {
        for (std::size_t k = 0; k < contexts.size(); ++k) {
            const auto cv = contexts[k].values.values();
            for (std::size_t i = 0; i < d; ++i) {
                if (cv[i] > pooled[i]) {
                    pooled[i] = cv[i];
                    c.stmt_fusion_src[i] = k + 1;
                }
            }
        }
    }
    return nn::Tensor::vec(std::move(pooled));
}

nn::Tensor encode_statement(const StatementTree& tree, std::span<const ContextVector> contexts,
                            const nn::ParamSet& params, const Vocabulary& vocab, const EncoderConfig& config) {
    const IndexedStatement stmt = index_statement(tree, vocab);
    return encode_statement(stmt, contexts, params, config, nullptr);
}

std::vector<nn::Tensor> encode_statement_backward(const StatementCache& c, const nn::Tensor& dvec,
                                                  nn::ParamSet& params, const EncoderConfig& config) {
    const nn::Tensor& Ws = params.value(kWSelf);
    const nn::Tensor& Wc = params.value(kWChild);
    nn::Tensor& gE = params.grad(kEmbed);
    nn::Tensor& gWs = params.grad(kWSelf);
    nn::Tensor& gWc = params.grad(kWChild);
    nn::Tensor& gb = params.grad(kBias);
    const IndexedStatement& stmt = *c.stmt;
    const std::size_t d = dvec.size();
    const std::size_t n_nodes = stmt.symbol.size();
    std::vector<nn::Tensor> dctx(c.context_count, nn::Tensor({d}));

    // Statement-level fusion and node pooling.
    std::vector<std::vector<double>> ds(n_nodes, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t src = c.stmt_fusion_src[i];
        if (src > 0) dctx[src - 1][i] += dvec[i];
        else ds[c.pool_src[i]][i] += dvec[i];
    }

    std::vector<double> da(d);
    for (int r = config.rounds - 1; r >= 0; --r) {
        const auto& in = c.inputs[static_cast<std::size_t>(r)];
        const auto& st = c.states[static_cast<std::size_t>(r)];
        std::vector<std::vector<double>> du(n_nodes, std::vector<double>(d, 0.0));
        for (std::size_t n = n_nodes; n-- > 0;) {  // parents before children
            for (std::size_t i = 0; i < d; ++i) da[i] = ds[n][i] * (1.0 - st[n][i] * st[n][i]);
            nn::outer_acc(gWs, da, in[n]);
            nn::add_to(gb.values(), da);
            nn::matvec_t_acc(Ws, da, du[n]);
            for (auto ch : stmt.children[n]) {
                nn::outer_acc(gWc, da, st[ch]);
                nn::matvec_t_acc(Wc, da, ds[ch]);
            }
        }
        ds = std::move(du);  // gradient w.r.t. this round's inputs
    }

    for (std::size_t n = 0; n < n_nodes; ++n) {
        auto grow = gE.row(stmt.symbol[n]);
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t src = c.fusion_src[n][i];
            if (src == 0) grow[i] += ds[n][i];
            else dctx[src - 1][i] += ds[n][i];
        }
    }
    if (nn::fault::armed("encode_statement")) gWc[0] += nn::fault::kPerturbation;
    return dctx;
}

nn::Tensor encode_code(const std::vector<nn::Tensor>& stmts, const nn::ParamSet& params, SequenceCache* cache) {
    if (stmts.empty()) throw EmptyInputError("encode_code over zero statements");
    const nn::GruView fwd = nn::GruView::bind(params, kGruFwd);
    const nn::GruView bwd = nn::GruView::bind(params, kGruBwd);
    const std::size_t h = fwd.hidden();
    const std::size_t T = stmts.size();
    SequenceCache local;
    SequenceCache& c = cache ? *cache : local;
    c.fwd.assign(T, {});
    c.bwd.assign(T, {});

    std::vector<double> state(h, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        nn::gru_forward(fwd, stmts[t].values(), state, c.fwd[t]);
        state = c.fwd[t].h;
    }
    std::fill(state.begin(), state.end(), 0.0);
    for (std::size_t t = T; t-- > 0;) {
        nn::gru_forward(bwd, stmts[t].values(), state, c.bwd[t]);
        state = c.bwd[t].h;
    }

    nn::Tensor out({2 * h});
    c.pool_src.assign(2 * h, 0);
    for (std::size_t i = 0; i < h; ++i) {
        out[i] = c.fwd[0].h[i];
        out[h + i] = c.bwd[0].h[i];
    }
    for (std::size_t t = 1; t < T; ++t) {
        for (std::size_t i = 0; i < h; ++i) {
            if (c.fwd[t].h[i] > out[i]) {
                out[i] = c.fwd[t].h[i];
                c.pool_src[i] = t;
            }
            if (c.bwd[t].h[i] > out[h + i]) {
                out[h + i] = c.bwd[t].h[i];
                c.pool_src[h + i] = t;
            }
        }
    }
    return out;
}

std::vector<nn::Tensor> encode_code_backward(const SequenceCache& c, const nn::Tensor& dcode, nn::ParamSet& params) {
    const nn::GruView fwd = nn::GruView::bind(params, kGruFwd);
    const nn::GruView bwd = nn::GruView::bind(params, kGruBwd);
    nn::GruGradView gf = nn::GruGradView::bind(params, kGruFwd);
    nn::GruGradView gb = nn::GruGradView::bind(params, kGruBwd);
    const std::size_t h = fwd.hidden();
    const std::size_t d = fwd.input();
    const std::size_t T = c.fwd.size();

    std::vector<std::vector<double>> dout_f(T, std::vector<double>(h, 0.0));
    std::vector<std::vector<double>> dout_b(T, std::vector<double>(h, 0.0));
    for (std::size_t i = 0; i < h; ++i) {
        dout_f[c.pool_src[i]][i] += dcode[i];
        dout_b[c.pool_src[h + i]][i] += dcode[h + i];
    }

    std::vector<nn::Tensor> dx(T, nn::Tensor({d}));
    std::vector<double> carry(h, 0.0), dh(h), dprev(h);
    for (std::size_t t = T; t-- > 0;) {  // forward direction, reverse time
        for (std::size_t i = 0; i < h; ++i) dh[i] = dout_f[t][i] + carry[i];
        std::fill(dprev.begin(), dprev.end(), 0.0);
        nn::gru_backward(fwd, c.fwd[t], dh, gf, dx[t].values(), dprev);
        carry = dprev;
    }
    std::fill(carry.begin(), carry.end(), 0.0);
    for (std::size_t t = 0; t < T; ++t) {  // backward direction ran T-1 .. 0
        for (std::size_t i = 0; i < h; ++i) dh[i] = dout_b[t][i] + carry[i];
        std::fill(dprev.begin(), dprev.end(), 0.0);
        nn::gru_backward(bwd, c.bwd[t], dh, gb, dx[t].values(), dprev);
        carry = dprev;
    }
    if (nn::fault::armed("encode_code")) (*gf.Wz)[0] += nn::fault::kPerturbation;
    return dx;
}

}  // namespace codectx::encode
