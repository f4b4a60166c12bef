#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace codectx::nn {

/// Dense row-major array of doubles, rank 1 or 2.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    static Tensor vec(std::vector<double> values);
    static Tensor vec(std::initializer_list<double> values) { return vec(std::vector<double>(values)); }
    static Tensor mat(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Tensor zeros(std::size_t n) { return Tensor({n}); }
    static Tensor zeros(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }
    static Tensor identity(std::size_t n);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return values_.size(); }
    std::size_t rows() const noexcept { return shape_.empty() ? 0 : shape_[0]; }
    std::size_t cols() const noexcept { return shape_.size() < 2 ? 1 : shape_[1]; }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> row(std::size_t r) { return std::span<double>(values_).subspan(r * cols(), cols()); }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values_).subspan(r * cols(), cols());
    }
    const std::vector<double>& data() const noexcept { return values_; }

    void fill(double v);
    bool all_finite() const;
    std::string shape_string() const;

    bool operator==(const Tensor&) const = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

/// Throws ShapeError unless `t` has exactly `shape`.
void require_shape(const Tensor& t, const std::vector<std::size_t>& shape, const char* what);

// Raw span kernels shared by the layers.

/// out += W x   (W: m x n)
void matvec_acc(const Tensor& W, std::span<const double> x, std::span<double> out);
/// out += W^T v (W: m x n, v: m, out: n)
void matvec_t_acc(const Tensor& W, std::span<const double> v, std::span<double> out);
/// G += a b^T   (G: m x n)
void outer_acc(Tensor& G, std::span<const double> a, std::span<const double> b);
void add_to(std::span<double> dst, std::span<const double> src);

}  // namespace codectx::nn
