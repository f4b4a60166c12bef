#include "codectx/params.hpp"

#include "codectx/errors.hpp"

namespace codectx::nn {

Param& ParamSet::add(const std::string& name, Tensor init) {
    Tensor grad(init.shape());
    auto [it, inserted] = params_.emplace(name, Param{std::move(init), std::move(grad)});
    if (!inserted) throw Error("duplicate parameter name: " + name);
    return it->second;
}

Param& ParamSet::get(std::string_view name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw Error("unknown parameter: " + std::string(name));
    return it->second;
}

const Param& ParamSet::get(std::string_view name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw Error("unknown parameter: " + std::string(name));
    return it->second;
}

Tensor& ParamSet::value(std::string_view name) { return get(name).value; }
const Tensor& ParamSet::value(std::string_view name) const { return get(name).value; }
Tensor& ParamSet::grad(std::string_view name) { return get(name).grad; }
const Tensor& ParamSet::grad(std::string_view name) const { return get(name).grad; }

void ParamSet::zero_grad() {
    for (auto& [_, p] : params_) p.grad.fill(0.0);
}

std::size_t ParamSet::element_count() const {
    std::size_t n = 0;
    for (const auto& [_, p] : params_) n += p.value.size();
    return n;
}

bool ParamSet::same_values(const ParamSet& other) const {
    if (params_.size() != other.params_.size()) return false;
    auto a = params_.begin();
    auto b = other.params_.begin();
    for (; a != params_.end(); ++a, ++b) {
        if (a->first != b->first || !(a->second.value == b->second.value)) return false;
    }
    return true;
}

Tensor uniform_init(std::vector<std::size_t> shape, double scale, Rng& rng) {
    Tensor t(std::move(shape));
    for (auto& v : t.values()) v = rng.uniform(-scale, scale);
    return t;
}

}  // namespace codectx::nn
