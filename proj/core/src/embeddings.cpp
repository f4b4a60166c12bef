#include "codectx/embeddings.hpp"

#include <algorithm>
#include <cmath>

#include "codectx/kernels.hpp"
#include "codectx/rng.hpp"
#include "codectx/statements.hpp"

namespace codectx::encode {

std::vector<std::vector<std::size_t>> statement_sentences(const std::vector<const ingest::AstNode*>& corpus,
                                                          const Vocabulary& vocab) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto* root : corpus) {
        for (const auto& st : split_statements(*root)) {
            std::vector<std::size_t> sentence;
            ingest::preorder(st.root, [&](const ingest::AstNode& n) { sentence.push_back(vocab.index_of(n)); });
            out.push_back(std::move(sentence));
        }
    }
    return out;
}

nn::Tensor train_embeddings(const std::vector<const ingest::AstNode*>& corpus, const Vocabulary& vocab,
                            const EmbeddingConfig& config) {
    return train_embeddings(statement_sentences(corpus, vocab), vocab.size(), config);
}

nn::Tensor train_embeddings(const std::vector<std::vector<std::size_t>>& sentences, std::size_t vocab_size,
                            const EmbeddingConfig& config) {
    const std::size_t d = config.dim;
    Rng rng(config.seed);
    const double scale = 0.5 / static_cast<double>(d);
    nn::Tensor in = nn::uniform_init({vocab_size, d}, scale, rng);
    if (config.epochs <= 0 || sentences.empty()) return in;
    nn::Tensor out({vocab_size, d});

    // Unigram^0.75 sampling table as a cumulative distribution.
    std::vector<double> freq(vocab_size, 0.0);
    std::size_t total_tokens = 0;
    for (const auto& s : sentences) {
        for (auto i : s) freq[i] += 1.0;
        total_tokens += s.size();
    }
    std::vector<double> cdf(vocab_size);
    double acc = 0.0;
    for (std::size_t i = 0; i < vocab_size; ++i) {
        acc += std::pow(freq[i], 0.75);
        cdf[i] = acc;
    }
    auto sample_negative = [&]() {
        const double u = rng.uniform() * acc;
        return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    };

    const double total_steps = static_cast<double>(config.epochs) * static_cast<double>(total_tokens);
    double step = 0.0;
    std::vector<double> grad_in(d);
    auto update = [&](std::size_t center, std::size_t target, double label, double lr) {
        auto v = in.row(center);
        auto u = out.row(target);
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += v[k] * u[k];
        const double g = (label - nn::sigmoid(dot)) * lr;
        for (std::size_t k = 0; k < d; ++k) {
            grad_in[k] += g * u[k];
            u[k] += g * v[k];
        }
    };

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& s : sentences) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double lr = std::max(config.lr * 1e-4, config.lr * (1.0 - step / total_steps));
                step += 1.0;
                const auto lo = i >= static_cast<std::size_t>(config.window) ? i - config.window : 0;
                const auto hi = std::min(s.size() - 1, i + config.window);
                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    std::fill(grad_in.begin(), grad_in.end(), 0.0);
                    update(s[i], s[j], 1.0, lr);
                    for (int n = 0; n < config.negatives; ++n) {
                        const std::size_t neg = sample_negative();
                        if (neg == s[j]) continue;
                        update(s[i], neg, 0.0, lr);
                    }
                    auto v = in.row(s[i]);
                    for (std::size_t k = 0; k < d; ++k) v[k] += grad_in[k];
                }
            }
        }
    }
    return in;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

}  // namespace codectx::encode
