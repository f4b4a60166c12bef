#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codectx/optim.hpp"

namespace codectx::selfcheck {

inline constexpr double kGradTolerance = 1e-4;
inline constexpr double kGradEps = 1e-5;

// Gradient checks on random inputs; every parameter and input is checked.
nn::GradCheckResult grad_affine(std::uint64_t seed);
nn::GradCheckResult grad_gru_step(std::uint64_t seed);
nn::GradCheckResult grad_max_pool(std::uint64_t seed);
nn::GradCheckResult grad_softmax_xent(std::uint64_t seed);
/// Statement encoder alone, two rounds of message passing, one node-level context.
nn::GradCheckResult grad_encode_statement(std::uint64_t seed);
/// Bidirectional GRU over fixed statement vectors.
nn::GradCheckResult grad_encode_code(std::uint64_t seed);
/// Statements -> code vector -> classifier loss, both context channels routed
/// through their projections.
nn::GradCheckResult grad_encoder_path(std::uint64_t seed);

// Oracle-equivalence suites. Each returns the number of mismatches found.

/// split_statements vs a direct walk: token order and END_BLOCK count.
std::size_t split_mismatches(std::size_t programs, std::uint64_t seed);
/// build_ngram_vocab and featurize vs brute-force substring counting.
std::size_t ngram_mismatches(std::size_t docs, std::size_t length, std::uint64_t seed);
/// Pairs where clone_score(a, b) != clone_score(b, a).
std::size_t symmetry_mismatches(std::size_t pairs, std::uint64_t seed);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs every check in a fixed order. Deterministic.
std::vector<CheckResult> run_all();

}  // namespace codectx::selfcheck
