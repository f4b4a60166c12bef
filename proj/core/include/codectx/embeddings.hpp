#pragma once

#include <cstdint>
#include <vector>

#include "codectx/ast.hpp"
#include "codectx/tensor.hpp"
#include "codectx/vocabulary.hpp"

namespace codectx::encode {

struct EmbeddingConfig {
    std::size_t dim = 128;
    int window = 3;
    int epochs = 5;
    int negatives = 5;
    double lr = 0.025;
    std::uint64_t seed = 1;
};

/// Symbol-index sentences, one per statement tree, in statement order.
std::vector<std::vector<std::size_t>> statement_sentences(const std::vector<const ingest::AstNode*>& corpus,
                                                          const Vocabulary& vocab);

/// Skip-gram with negative sampling. Returns the V x dim input-embedding
/// matrix; with zero epochs that is the seeded initialization.
nn::Tensor train_embeddings(const std::vector<const ingest::AstNode*>& corpus, const Vocabulary& vocab,
                            const EmbeddingConfig& config);

/// Same trainer over pre-built sentences.
nn::Tensor train_embeddings(const std::vector<std::vector<std::size_t>>& sentences, std::size_t vocab_size,
                            const EmbeddingConfig& config);

double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace codectx::encode
