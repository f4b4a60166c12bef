#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>

#include "codectx/rng.hpp"
#include "codectx/tensor.hpp"

namespace codectx::nn {

struct Param {
    Tensor value;
    Tensor grad;
};

/// Named parameters with matching gradient accumulators. Iteration order is
/// lexicographic by name.
class ParamSet {
public:
    Param& add(const std::string& name, Tensor init);
    bool contains(std::string_view name) const { return params_.find(name) != params_.end(); }

    Tensor& value(std::string_view name);
    const Tensor& value(std::string_view name) const;
    Tensor& grad(std::string_view name);
    const Tensor& grad(std::string_view name) const;

    void zero_grad();
    std::size_t size() const noexcept { return params_.size(); }
    std::size_t element_count() const;

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

    /// Values-only equality (gradients ignored).
    bool same_values(const ParamSet& other) const;

private:
    Param& get(std::string_view name);
    const Param& get(std::string_view name) const;

    std::map<std::string, Param, std::less<>> params_;
};

/// Uniform(-scale, scale) initialization; the usual scale is 1/sqrt(fan_in).
Tensor uniform_init(std::vector<std::size_t> shape, double scale, Rng& rng);

}  // namespace codectx::nn
