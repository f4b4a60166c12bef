#pragma once

#include <functional>
#include <map>
#include <string>

#include "codectx/params.hpp"

namespace codectx::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First/second moment estimates keyed by parameter name.
struct AdamState {
    std::map<std::string, Tensor, std::less<>> m;
    std::map<std::string, Tensor, std::less<>> v;
    long step = 0;
};

/// One bias-corrected Adam update from the gradients held in `params`.
/// Parameters whose gradient is entirely zero are left untouched.
void optimizer_step(ParamSet& params, AdamState& state, const AdamConfig& config);

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
};

/// `loss` must zero nothing itself: it evaluates the loss and accumulates the
/// analytic gradient into `params`. The checker compares that gradient with
/// central differences, error = max |ga - gn| / max(1, |ga|, |gn|).
/// `max_per_param` > 0 samples that many evenly spaced entries per tensor.
GradCheckResult grad_check(const std::function<double(ParamSet&)>& loss, ParamSet& params, double eps = 1e-5,
                           std::size_t max_per_param = 0);

}  // namespace codectx::nn
