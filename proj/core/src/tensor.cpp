#include "codectx/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "codectx/errors.hpp"

namespace codectx::nn {

namespace {
std::size_t product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 2) throw ShapeError("tensor rank must be 1 or 2");
    values_.assign(product(shape_), fill);
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (shape_.empty() || shape_.size() > 2) throw ShapeError("tensor rank must be 1 or 2");
    if (values_.size() != product(shape_))
        throw ShapeError("value count " + std::to_string(values_.size()) + " does not match shape " + shape_string());
}

Tensor Tensor::vec(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({n}, std::move(values));
}

Tensor Tensor::mat(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor({rows, cols}, std::move(values));
}

Tensor Tensor::identity(std::size_t n) {
    Tensor t({n, n});
    for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
    return t;
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

bool Tensor::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

void require_shape(const Tensor& t, const std::vector<std::size_t>& shape, const char* what) {
    if (t.shape() != shape) {
        Tensor expected(shape);
        throw ShapeError(std::string(what) + ": expected " + expected.shape_string() + ", got " + t.shape_string());
    }
}

void matvec_acc(const Tensor& W, std::span<const double> x, std::span<double> out) {
    const std::size_t m = W.rows(), n = W.cols();
    const double* w = W.values().data();
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        const double* wr = w + i * n;
        for (std::size_t j = 0; j < n; ++j) acc += wr[j] * x[j];
        out[i] += acc;
    }
}

void matvec_t_acc(const Tensor& W, std::span<const double> v, std::span<double> out) {
    const std::size_t m = W.rows(), n = W.cols();
    const double* w = W.values().data();
    for (std::size_t i = 0; i < m; ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        const double* wr = w + i * n;
        for (std::size_t j = 0; j < n; ++j) out[j] += wr[j] * vi;
    }
}

void outer_acc(Tensor& G, std::span<const double> a, std::span<const double> b) {
    const std::size_t m = G.rows(), n = G.cols();
    double* g = G.values().data();
    for (std::size_t i = 0; i < m; ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        double* gr = g + i * n;
        for (std::size_t j = 0; j < n; ++j) gr[j] += ai * b[j];
    }
}

void add_to(std::span<double> dst, std::span<const double> src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace codectx::nn
