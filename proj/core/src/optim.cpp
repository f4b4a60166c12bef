#include "codectx/optim.hpp"

#include <algorithm>
#include <cmath>

namespace codectx::nn {

void optimizer_step(ParamSet& params, AdamState& state, const AdamConfig& config) {
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    for (auto& [name, p] : params) {
        const auto g = p.grad.values();
        auto m_it = state.m.find(name);
        if (m_it == state.m.end()) {
            if (std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; })) continue;
            m_it = state.m.emplace(name, Tensor(p.value.shape())).first;
            state.v.emplace(name, Tensor(p.value.shape()));
        }
        auto m = m_it->second.values();
        auto v = state.v.find(name)->second.values();
        auto w = p.value.values();
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
            const double mh = m[i] / c1;
            const double vh = v[i] / c2;
            w[i] -= config.lr * mh / (std::sqrt(vh) + config.eps);
        }
    }
}

GradCheckResult grad_check(const std::function<double(ParamSet&)>& loss, ParamSet& params, double eps,
                           std::size_t max_per_param) {
    params.zero_grad();
    loss(params);
    std::map<std::string, Tensor> analytic;
    for (const auto& [name, p] : params) analytic.emplace(name, p.grad);

    GradCheckResult result;
    for (auto& [name, p] : params) {
        const std::size_t n = p.value.size();
        const std::size_t count = max_per_param == 0 ? n : std::min(n, max_per_param);
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t i = count == n ? k : (k * n) / count;
            const double saved = p.value[i];
            p.value[i] = saved + eps;
            params.zero_grad();
            const double up = loss(params);
            p.value[i] = saved - eps;
            params.zero_grad();
            const double down = loss(params);
            p.value[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double ga = analytic.at(name)[i];
            const double err = std::abs(ga - numeric) / std::max({1.0, std::abs(ga), std::abs(numeric)});
            ++result.checked;
            if (err > result.max_rel_error || result.worst_param.empty()) {
                if (err >= result.max_rel_error) {
                    result.max_rel_error = err;
                    result.worst_param = name;
                    result.worst_index = i;
                }
            }
        }
    }
    params.zero_grad();
    for (auto& [name, p] : params) p.grad = analytic.at(name);
    return result;
}

}  // namespace codectx::nn
