#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "codectx/params.hpp"
#include "codectx/tensor.hpp"

namespace codectx::nn {

// ---------------------------------------------------------------------------
// Affine map y = W x + b

Tensor affine(const Tensor& x, const Tensor& W, const Tensor& b);

struct AffineGrads {
    Tensor dx;
    Tensor dW;
    Tensor db;
};
AffineGrads affine_backward(const Tensor& x, const Tensor& W, const Tensor& dy);

// ---------------------------------------------------------------------------
// GRU cell
//
//   z  = sigmoid(Wz x + Uz h + bz)
//   r  = sigmoid(Wr x + Ur h + br)
//   c  = tanh(Wh x + Uh (r * h) + bh)
//   h' = (1 - z) * h + z * c

/// Parameter names of a GRU cell under a prefix: prefix + "Wz", ... "bh".
std::vector<std::string> gru_param_names(std::string_view prefix);
/// Adds a seeded GRU cell (input d, hidden h) to `params`.
void add_gru_params(ParamSet& params, std::string_view prefix, std::size_t input, std::size_t hidden, Rng& rng);

/// Bound view of one cell's weights.
struct GruView {
    const Tensor *Wz, *Uz, *bz, *Wr, *Ur, *br, *Wh, *Uh, *bh;
    std::size_t input() const { return Wz->cols(); }
    std::size_t hidden() const { return Wz->rows(); }
    static GruView bind(const ParamSet& params, std::string_view prefix);
};

struct GruGradView {
    Tensor *Wz, *Uz, *bz, *Wr, *Ur, *br, *Wh, *Uh, *bh;
    static GruGradView bind(ParamSet& params, std::string_view prefix);
};

struct GruCache {
    std::vector<double> x, h_prev, z, r, cand, rh, h;
};

Tensor gru_step(const Tensor& x, const Tensor& h, const ParamSet& params, std::string_view prefix = "gru.");
/// Span-level step used by the sequence encoder; fills `cache` for backward.
void gru_forward(const GruView& w, std::span<const double> x, std::span<const double> h_prev, GruCache& cache);
/// Given dL/dh' accumulates parameter gradients and adds dL/dx, dL/dh_prev.
void gru_backward(const GruView& w, const GruCache& cache, std::span<const double> dh, GruGradView& g,
                  std::span<double> dx, std::span<double> dh_prev);

// ---------------------------------------------------------------------------
// Elementwise max pooling

struct PoolResult {
    Tensor out;
    /// Index of the winning input per component (first index on ties).
    std::vector<std::size_t> argmax;
};

PoolResult max_pool(const std::vector<Tensor>& inputs);
/// Routes dy to the argmax inputs; returns one gradient per input.
std::vector<Tensor> max_pool_backward(const PoolResult& pooled, const Tensor& dy, std::size_t input_count);

// ---------------------------------------------------------------------------
// Softmax cross-entropy

struct XentResult {
    double loss;
    Tensor grad;   // softmax - onehot
    Tensor probs;
};

/// Max-shifted softmax probabilities.
Tensor softmax(const Tensor& logits);
XentResult softmax_xent(const Tensor& logits, int label);

double sigmoid(double x);

// ---------------------------------------------------------------------------
// Test-only fault injection: when an op name is armed, its backward pass
// perturbs the gradient it returns, so gradient checks must catch it.

namespace fault {
void inject(std::string op);
void clear();
bool armed(std::string_view op);
inline constexpr double kPerturbation = 1e-2;
}  // namespace fault

}  // namespace codectx::nn
