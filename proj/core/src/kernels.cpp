#include "codectx/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "codectx/errors.hpp"

namespace codectx::nn {

// ---------------------------------------------------------------------------
// Fault injection

namespace fault {
namespace {
std::mutex& guard() {
    static std::mutex m;
    return m;
}
std::set<std::string, std::less<>>& armed_ops() {
    static std::set<std::string, std::less<>> ops;
    return ops;
}
}  // namespace

void inject(std::string op) {
    std::lock_guard lock(guard());
    armed_ops().insert(std::move(op));
}

void clear() {
    std::lock_guard lock(guard());
    armed_ops().clear();
}

bool armed(std::string_view op) {
    std::lock_guard lock(guard());
    return armed_ops().contains(op);
}
}  // namespace fault

// ---------------------------------------------------------------------------
// Affine

Tensor affine(const Tensor& x, const Tensor& W, const Tensor& b) {
    if (W.rank() != 2 || x.rank() != 1 || b.rank() != 1 || W.cols() != x.size() || W.rows() != b.size())
        throw ShapeError("affine: W " + W.shape_string() + ", x " + x.shape_string() + ", b " + b.shape_string());
    Tensor y = b;
    matvec_acc(W, x.values(), y.values());
    return y;
}

AffineGrads affine_backward(const Tensor& x, const Tensor& W, const Tensor& dy) {
    if (W.rank() != 2 || W.cols() != x.size() || W.rows() != dy.size())
        throw ShapeError("affine_backward: W " + W.shape_string() + ", x " + x.shape_string() + ", dy " +
                         dy.shape_string());
    AffineGrads g{Tensor({x.size()}), Tensor(W.shape()), dy};
    matvec_t_acc(W, dy.values(), g.dx.values());
    outer_acc(g.dW, dy.values(), x.values());
    if (fault::armed("affine")) g.dW[0] += fault::kPerturbation;
    return g;
}

// ---------------------------------------------------------------------------
// GRU

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<std::string> gru_param_names(std::string_view prefix) {
    std::vector<std::string> names;
    for (const char* n : {"Wz", "Uz", "bz", "Wr", "Ur", "br", "Wh", "Uh", "bh"}) names.push_back(std::string(prefix) + n);
    return names;
}

void add_gru_params(ParamSet& params, std::string_view prefix, std::size_t input, std::size_t hidden, Rng& rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));
    const std::string p(prefix);
    for (const char* gate : {"z", "r", "h"}) {
        params.add(p + "W" + gate, uniform_init({hidden, input}, scale, rng));
        params.add(p + "U" + gate, uniform_init({hidden, hidden}, scale, rng));
        params.add(p + "b" + gate, Tensor({hidden}));
    }
}

GruView GruView::bind(const ParamSet& params, std::string_view prefix) {
    const std::string p(prefix);
    GruView v{&params.value(p + "Wz"), &params.value(p + "Uz"), &params.value(p + "bz"),
              &params.value(p + "Wr"), &params.value(p + "Ur"), &params.value(p + "br"),
              &params.value(p + "Wh"), &params.value(p + "Uh"), &params.value(p + "bh")};
    const std::size_t h = v.Wz->rows(), d = v.Wz->cols();
    for (const Tensor* W : {v.Wz, v.Wr, v.Wh}) require_shape(*W, {h, d}, "gru W");
    for (const Tensor* U : {v.Uz, v.Ur, v.Uh}) require_shape(*U, {h, h}, "gru U");
    for (const Tensor* b : {v.bz, v.br, v.bh}) require_shape(*b, {h}, "gru b");
    return v;
}

GruGradView GruGradView::bind(ParamSet& params, std::string_view prefix) {
    const std::string p(prefix);
    return GruGradView{&params.grad(p + "Wz"), &params.grad(p + "Uz"), &params.grad(p + "bz"),
                       &params.grad(p + "Wr"), &params.grad(p + "Ur"), &params.grad(p + "br"),
                       &params.grad(p + "Wh"), &params.grad(p + "Uh"), &params.grad(p + "bh")};
}

void gru_forward(const GruView& w, std::span<const double> x, std::span<const double> h_prev, GruCache& c) {
    const std::size_t H = w.hidden();
    if (x.size() != w.input() || h_prev.size() != H)
        throw ShapeError("gru_step: input " + std::to_string(x.size()) + "/" + std::to_string(w.input()) +
                         ", hidden " + std::to_string(h_prev.size()) + "/" + std::to_string(H));
    c.x.assign(x.begin(), x.end());
    c.h_prev.assign(h_prev.begin(), h_prev.end());
    c.z.assign(w.bz->values().begin(), w.bz->values().end());
    c.r.assign(w.br->values().begin(), w.br->values().end());
    c.cand.assign(w.bh->values().begin(), w.bh->values().end());
    matvec_acc(*w.Wz, x, c.z);
    matvec_acc(*w.Uz, h_prev, c.z);
    matvec_acc(*w.Wr, x, c.r);
    matvec_acc(*w.Ur, h_prev, c.r);
    for (std::size_t i = 0; i < H; ++i) {
        c.z[i] = sigmoid(c.z[i]);
        c.r[i] = sigmoid(c.r[i]);
    }
    c.rh.resize(H);
    for (std::size_t i = 0; i < H; ++i) c.rh[i] = c.r[i] * h_prev[i];
    matvec_acc(*w.Wh, x, c.cand);
    matvec_acc(*w.Uh, c.rh, c.cand);
    c.h.resize(H);
    for (std::size_t i = 0; i < H; ++i) {
        c.cand[i] = std::tanh(c.cand[i]);
        c.h[i] = (1.0 - c.z[i]) * h_prev[i] + c.z[i] * c.cand[i];
    }
}

void gru_backward(const GruView& w, const GruCache& c, std::span<const double> dh, GruGradView& g,
                  std::span<double> dx, std::span<double> dh_prev) {
    const std::size_t H = w.hidden();
    std::vector<double> daz(H), dar(H), dac(H), drh(H, 0.0);
    for (std::size_t i = 0; i < H; ++i) {
        const double dz = dh[i] * (c.cand[i] - c.h_prev[i]);
        const double dc = dh[i] * c.z[i];
        dh_prev[i] += dh[i] * (1.0 - c.z[i]);
        dac[i] = dc * (1.0 - c.cand[i] * c.cand[i]);
        daz[i] = dz * c.z[i] * (1.0 - c.z[i]);
    }
    outer_acc(*g.Wh, dac, c.x);
    outer_acc(*g.Uh, dac, c.rh);
    add_to(g.bh->values(), dac);
    matvec_t_acc(*w.Wh, dac, dx);
    matvec_t_acc(*w.Uh, dac, drh);
    for (std::size_t i = 0; i < H; ++i) {
        const double dr = drh[i] * c.h_prev[i];
        dh_prev[i] += drh[i] * c.r[i];
        dar[i] = dr * c.r[i] * (1.0 - c.r[i]);
    }
    outer_acc(*g.Wr, dar, c.x);
    outer_acc(*g.Ur, dar, c.h_prev);
    add_to(g.br->values(), dar);
    matvec_t_acc(*w.Wr, dar, dx);
    matvec_t_acc(*w.Ur, dar, dh_prev);

    outer_acc(*g.Wz, daz, c.x);
    outer_acc(*g.Uz, daz, c.h_prev);
    add_to(g.bz->values(), daz);
    matvec_t_acc(*w.Wz, daz, dx);
    matvec_t_acc(*w.Uz, daz, dh_prev);
    if (fault::armed("gru_step")) (*g.Uh)[0] += fault::kPerturbation;
}

Tensor gru_step(const Tensor& x, const Tensor& h, const ParamSet& params, std::string_view prefix) {
    const GruView w = GruView::bind(params, prefix);
    if (x.rank() != 1 || h.rank() != 1) throw ShapeError("gru_step: x and h must be vectors");
    GruCache cache;
    gru_forward(w, x.values(), h.values(), cache);
    return Tensor::vec(std::move(cache.h));
}

// ---------------------------------------------------------------------------
// Max pooling

PoolResult max_pool(const std::vector<Tensor>& inputs) {
    if (inputs.empty()) throw EmptyInputError("max_pool over zero vectors");
    const auto& shape = inputs.front().shape();
    for (const auto& t : inputs) {
        if (t.shape() != shape) throw ShapeError("max_pool: mismatched input " + t.shape_string());
    }
    PoolResult r{inputs.front(), std::vector<std::size_t>(inputs.front().size(), 0)};
    for (std::size_t k = 1; k < inputs.size(); ++k) {
        const auto v = inputs[k].values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] > r.out[i]) {
                r.out[i] = v[i];
                r.argmax[i] = k;
            }
        }
    }
    return r;
}

std::vector<Tensor> max_pool_backward(const PoolResult& pooled, const Tensor& dy, std::size_t input_count) {
    if (dy.shape() != pooled.out.shape()) throw ShapeError("max_pool_backward: dy " + dy.shape_string());
    std::vector<Tensor> grads(input_count, Tensor(pooled.out.shape()));
    for (std::size_t i = 0; i < dy.size(); ++i) grads[pooled.argmax[i]][i] += dy[i];
    if (fault::armed("max_pool") && input_count > 0) grads[0][0] += fault::kPerturbation;
    return grads;
}

// ---------------------------------------------------------------------------
// Softmax cross-entropy

Tensor softmax(const Tensor& logits) {
    if (logits.rank() != 1 || logits.size() == 0) throw ShapeError("softmax: expected non-empty vector");
    const double mx = *std::max_element(logits.values().begin(), logits.values().end());
    Tensor p = logits;
    double sum = 0.0;
    for (auto& v : p.values()) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (auto& v : p.values()) v /= sum;
    return p;
}

XentResult softmax_xent(const Tensor& logits, int label) {
    if (logits.rank() != 1 || logits.size() == 0) throw ShapeError("softmax_xent: expected non-empty vector");
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size())
        throw LabelRangeError({"label " + std::to_string(label) + " for " + std::to_string(logits.size()) + " classes"});
    const double mx = *std::max_element(logits.values().begin(), logits.values().end());
    double sum = 0.0;
    for (double v : logits.values()) sum += std::exp(v - mx);
    const double log_z = mx + std::log(sum);
    XentResult r{log_z - logits[static_cast<std::size_t>(label)], Tensor(logits.shape()), Tensor(logits.shape())};
    for (std::size_t i = 0; i < logits.size(); ++i) r.probs[i] = std::exp(logits[i] - log_z);
    r.grad = r.probs;
    r.grad[static_cast<std::size_t>(label)] -= 1.0;
    if (fault::armed("softmax_xent")) r.grad[0] += fault::kPerturbation;
    return r;
}

}  // namespace codectx::nn
