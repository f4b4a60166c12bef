#pragma once

#include <optional>
#include <span>
#include <vector>

#include "codectx/kernels.hpp"
#include "codectx/params.hpp"
#include "codectx/statements.hpp"
#include "codectx/vocabulary.hpp"

namespace codectx::encode {

enum class Channel { Bug, Pattern };

/// A static-analysis vector already projected to the embedding width.
struct ContextVector {
    Channel channel = Channel::Bug;
    /// Statement index it is scoped to; empty means the whole unit.
    std::optional<std::size_t> statement;
    nn::Tensor values;
};

/// Where context vectors join the statement encoder.
enum class FusionLevel {
    Node,       // max-pooled into every node input before message passing
    Statement,  // max-pooled with the finished statement vector
};

struct EncoderConfig {
    std::size_t vocab_size = 0;
    std::size_t dim = 128;     // d
    std::size_t hidden = 100;  // h
    std::size_t bug_width = 10;
    std::size_t pattern_width = 5;
    int rounds = 1;
    FusionLevel fusion = FusionLevel::Node;
};

// Parameter names.
inline constexpr const char* kEmbed = "embed";
inline constexpr const char* kWSelf = "enc.W_self";
inline constexpr const char* kWChild = "enc.W_child";
inline constexpr const char* kBias = "enc.b";
inline constexpr const char* kProjBug = "proj.bug";
inline constexpr const char* kProjPattern = "proj.pattern";
inline constexpr const char* kGruFwd = "gru.fwd.";
inline constexpr const char* kGruBwd = "gru.bwd.";

/// Adds embedding, statement-encoder, projection and bidirectional GRU
/// parameters. `embedding` (V x d) replaces the seeded embedding if given.
void init_encoder_params(nn::ParamSet& params, const EncoderConfig& config, Rng& rng,
                         const nn::Tensor* embedding = nullptr);

/// Statement tree flattened in postorder (children before parents).
struct IndexedStatement {
    std::vector<std::size_t> symbol;                 // vocabulary index per node
    std::vector<std::vector<std::size_t>> children;  // node -> child node positions
    int line_start = 0;
    int line_end = 0;
};

IndexedStatement index_statement(const StatementTree& tree, const Vocabulary& vocab);

struct StatementCache {
    const IndexedStatement* stmt = nullptr;
    /// Per round, per node: input u and output s.
    std::vector<std::vector<std::vector<double>>> inputs, states;
    /// Per node, per component: 0 = embedding, k = k-th context.
    std::vector<std::vector<std::size_t>> fusion_src;
    std::vector<std::size_t> pool_src;  // node per component of the pooled vector
    std::vector<double> tree_vec;       // pooled tree output before statement-level fusion
    std::vector<std::size_t> stmt_fusion_src;
    std::size_t context_count = 0;
};

/// Fused statement encoding:
///   x_n = max(embed(n), c_1, ..., c_k)         (node-level fusion)
///   s_n = tanh(W_self x_n + sum_children W_child s_c + b)
///   v   = max over nodes of s_n
/// With more than one round, round r feeds s^(r-1) back in as the node input.
nn::Tensor encode_statement(const IndexedStatement& stmt, std::span<const ContextVector> contexts,
                            const nn::ParamSet& params, const EncoderConfig& config, StatementCache* cache = nullptr);
nn::Tensor encode_statement(const StatementTree& tree, std::span<const ContextVector> contexts,
                            const nn::ParamSet& params, const Vocabulary& vocab, const EncoderConfig& config);

/// Accumulates parameter gradients into `params`; returns dL/dc per context.
std::vector<nn::Tensor> encode_statement_backward(const StatementCache& cache, const nn::Tensor& dvec,
                                                  nn::ParamSet& params, const EncoderConfig& config);

struct SequenceCache {
    std::vector<nn::GruCache> fwd, bwd;
    std::vector<std::size_t> pool_src;  // step per component of the 2h output
};

/// Bidirectional GRU over statement vectors, per-step [forward; backward]
/// concatenation, max-pooled over steps. Output width 2h.
nn::Tensor encode_code(const std::vector<nn::Tensor>& stmts, const nn::ParamSet& params,
                       SequenceCache* cache = nullptr);
/// Returns dL/d(statement vector) per step and accumulates GRU gradients.
std::vector<nn::Tensor> encode_code_backward(const SequenceCache& cache, const nn::Tensor& dcode,
                                             nn::ParamSet& params);

}  // namespace codectx::encode
