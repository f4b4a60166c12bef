#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "codectx/errors.hpp"
#include "codectx/kernels.hpp"
#include "codectx/optim.hpp"

using namespace codectx;
using namespace codectx::nn;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
    return uniform_init(std::move(shape), scale, rng);
}

// Fixed random projection turning a vector output into a scalar loss.
double project(std::span<const double> y, std::span<const double> r) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
    return s;
}

}  // namespace

TEST(Affine, IdentityAndHandArithmetic) {
    EXPECT_EQ(affine(Tensor::vec({3, -1}), Tensor::identity(2), Tensor::vec({0, 0})), Tensor::vec({3, -1}));
    EXPECT_EQ(affine(Tensor::vec({2, 3}), Tensor::mat(1, 2, {1, 1}), Tensor::vec({1})), Tensor::vec({6}));
    EXPECT_THROW(affine(Tensor::vec({1, 2, 3}), Tensor::identity(2), Tensor::vec({0, 0})), ShapeError);
    EXPECT_THROW(affine(Tensor::vec({1, 2}), Tensor::identity(2), Tensor::vec({0})), ShapeError);
}

TEST(Affine, GradientMatchesFiniteDifferences) {
    Rng rng(11);
    ParamSet ps;
    ps.add("W", random_tensor({4, 3}, rng));
    ps.add("b", random_tensor({4}, rng));
    ps.add("x", random_tensor({3}, rng));
    const Tensor r = random_tensor({4}, rng);
    auto loss = [&](ParamSet& p) {
        const Tensor y = affine(p.value("x"), p.value("W"), p.value("b"));
        const AffineGrads g = affine_backward(p.value("x"), p.value("W"), r);
        add_to(p.grad("W").values(), g.dW.values());
        add_to(p.grad("b").values(), g.db.values());
        add_to(p.grad("x").values(), g.dx.values());
        return project(y.values(), r.values());
    };
    const auto res = grad_check(loss, ps, 1e-5);
    EXPECT_LT(res.max_rel_error, 1e-6) << res.worst_param;
    EXPECT_EQ(res.checked, 4u * 3u + 4u + 3u);
}

TEST(Gru, ZeroParamsKeepZeroState) {
    Rng rng(1);
    ParamSet ps;
    add_gru_params(ps, "gru.", 3, 4, rng);
    for (auto& [_, p] : ps) p.value.fill(0.0);
    const Tensor h = gru_step(Tensor::vec({0.3, -2.0, 5.0}), Tensor::zeros(4), ps);
    EXPECT_EQ(h, Tensor::zeros(4));
}

TEST(Gru, OutputsStayInsideUnitInterval) {
    Rng rng(2);
    ParamSet ps;
    add_gru_params(ps, "gru.", 5, 6, rng);
    Tensor h = Tensor::zeros(6);
    for (int step = 0; step < 20; ++step) {
        h = gru_step(random_tensor({5}, rng, 3.0), h, ps);
        for (double v : h.values()) {
            EXPECT_GT(v, -1.0);
            EXPECT_LT(v, 1.0);
        }
    }
    EXPECT_THROW(gru_step(Tensor::zeros(4), Tensor::zeros(6), ps), ShapeError);
}

TEST(Gru, GradientMatchesFiniteDifferences) {
    Rng rng(3);
    ParamSet ps;
    add_gru_params(ps, "gru.", 3, 4, rng);
    for (auto& [_, p] : ps) p.value = random_tensor(p.value.shape(), rng, 0.8);
    ps.add("x", random_tensor({3}, rng));
    ps.add("h", random_tensor({4}, rng, 0.9));
    const Tensor r = random_tensor({4}, rng);
    auto loss = [&](ParamSet& p) {
        const GruView w = GruView::bind(p, "gru.");
        GruGradView g = GruGradView::bind(p, "gru.");
        GruCache cache;
        gru_forward(w, p.value("x").values(), p.value("h").values(), cache);
        gru_backward(w, cache, r.values(), g, p.grad("x").values(), p.grad("h").values());
        return project(cache.h, r.values());
    };
    const auto res = grad_check(loss, ps, 1e-5);
    EXPECT_LT(res.max_rel_error, 1e-4) << res.worst_param << "[" << res.worst_index << "]";
}

TEST(MaxPool, Examples) {
    EXPECT_EQ(max_pool({Tensor::vec({1, 2}), Tensor::vec({3, 1})}).out, Tensor::vec({3, 2}));
    const Tensor v = Tensor::vec({-1, 4, 0.5});
    EXPECT_EQ(max_pool({v}).out, v);
    EXPECT_THROW(max_pool({}), EmptyInputError);
    EXPECT_THROW(max_pool({Tensor::vec({1}), Tensor::vec({1, 2})}), ShapeError);
}

TEST(MaxPool, PermutationInvariantAndDominating) {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Tensor> vs;
        const std::size_t k = 1 + rng.below(6);
        for (std::size_t i = 0; i < k; ++i) vs.push_back(random_tensor({5}, rng));
        const Tensor out = max_pool(vs).out;
        for (const auto& v : vs) {
            for (std::size_t i = 0; i < 5; ++i) EXPECT_GE(out[i], v[i]);
        }
        std::vector<Tensor> shuffled = vs;
        rng.shuffle(std::span<Tensor>(shuffled));
        EXPECT_EQ(max_pool(shuffled).out, out);
    }
}

TEST(MaxPool, TiesRouteToFirstInput) {
    const auto pooled = max_pool({Tensor::vec({1, 2}), Tensor::vec({1, 5})});
    EXPECT_EQ(pooled.argmax, (std::vector<std::size_t>{0, 1}));
    const auto g = max_pool_backward(pooled, Tensor::vec({10, 20}), 2);
    EXPECT_EQ(g[0], Tensor::vec({10, 0}));
    EXPECT_EQ(g[1], Tensor::vec({0, 20}));
}

TEST(MaxPool, GradientAtUntiedInputs) {
    ParamSet ps;
    ps.add("a", Tensor::vec({0.1, 0.9, -0.4, 0.3}));
    ps.add("b", Tensor::vec({0.5, -0.2, 0.0, 0.31}));
    ps.add("c", Tensor::vec({-0.3, 0.2, 0.7, -1.0}));
    const Tensor r = Tensor::vec({0.7, -1.3, 0.4, 2.0});
    auto loss = [&](ParamSet& p) {
        const std::vector<Tensor> in = {p.value("a"), p.value("b"), p.value("c")};
        const auto pooled = max_pool(in);
        const auto g = max_pool_backward(pooled, r, 3);
        add_to(p.grad("a").values(), g[0].values());
        add_to(p.grad("b").values(), g[1].values());
        add_to(p.grad("c").values(), g[2].values());
        return project(pooled.out.values(), r.values());
    };
    EXPECT_LT(grad_check(loss, ps, 1e-5).max_rel_error, 1e-6);
}

TEST(SoftmaxXent, Examples) {
    const auto uniform = softmax_xent(Tensor::vec({0.3, 0.3, 0.3, 0.3}), 2);
    EXPECT_NEAR(uniform.loss, std::log(4.0), 1e-15);
    const auto big = softmax_xent(Tensor::vec({1000, 0}), 0);
    EXPECT_TRUE(std::isfinite(big.loss));
    EXPECT_NEAR(big.loss, 0.0, 1e-12);
    EXPECT_THROW(softmax_xent(Tensor::vec({1, 2}), 2), LabelRangeError);
    EXPECT_THROW(softmax_xent(Tensor::vec({1, 2}), -1), LabelRangeError);
    double sum = 0.0;
    const Tensor probs = softmax(Tensor::vec({3, -2, 8, 0}));
    for (double p : probs.values()) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(SoftmaxXent, GradientMatchesFiniteDifferences) {
    Rng rng(5);
    ParamSet ps;
    ps.add("z", random_tensor({6}, rng, 3.0));
    auto loss = [&](ParamSet& p) {
        const auto r = softmax_xent(p.value("z"), 4);
        add_to(p.grad("z").values(), r.grad.values());
        return r.loss;
    };
    EXPECT_LT(grad_check(loss, ps, 1e-5).max_rel_error, 1e-6);
}

TEST(Adam, ZeroGradientsLeaveParametersUnchanged) {
    Rng rng(6);
    ParamSet ps;
    ps.add("w", random_tensor({3, 2}, rng));
    const ParamSet before = ps;
    AdamState state;
    for (int i = 0; i < 5; ++i) optimizer_step(ps, state, AdamConfig{});
    EXPECT_TRUE(ps.same_values(before));
}

TEST(Adam, MinimizesOneDimensionalQuadratic) {
    // f(x) = (x - 0.75)^2 has its minimum at x* = 0.75.
    ParamSet ps;
    ps.add("x", Tensor::vec({0.0}));
    AdamState state;
    AdamConfig cfg;
    cfg.lr = 1e-2;
    for (int step = 0; step < 200; ++step) {
        ps.zero_grad();
        ps.grad("x")[0] = 2.0 * (ps.value("x")[0] - 0.75);
        optimizer_step(ps, state, cfg);
    }
    EXPECT_LT(std::abs(ps.value("x")[0] - 0.75), 1e-3);
}

TEST(Adam, Deterministic) {
    auto run = [] {
        Rng rng(9);
        ParamSet ps;
        ps.add("w", random_tensor({4}, rng));
        AdamState state;
        for (int i = 0; i < 30; ++i) {
            ps.zero_grad();
            for (std::size_t k = 0; k < 4; ++k) ps.grad("w")[k] = std::sin(ps.value("w")[k] * (i + 1));
            optimizer_step(ps, state, AdamConfig{});
        }
        return ps.value("w");
    };
    EXPECT_EQ(run(), run());
}

TEST(FaultInjection, GradCheckCatchesCorruptedKernel) {
    Rng rng(12);
    ParamSet ps;
    ps.add("W", random_tensor({2, 2}, rng));
    ps.add("b", random_tensor({2}, rng));
    ps.add("x", random_tensor({2}, rng));
    const Tensor r = Tensor::vec({1.0, -0.5});
    auto loss = [&](ParamSet& p) {
        const Tensor y = affine(p.value("x"), p.value("W"), p.value("b"));
        const AffineGrads g = affine_backward(p.value("x"), p.value("W"), r);
        add_to(p.grad("W").values(), g.dW.values());
        add_to(p.grad("b").values(), g.db.values());
        add_to(p.grad("x").values(), g.dx.values());
        return project(y.values(), r.values());
    };
    fault::inject("affine");
    const auto bad = grad_check(loss, ps, 1e-5);
    fault::clear();
    EXPECT_GT(bad.max_rel_error, 1e-3);
    EXPECT_EQ(bad.worst_param, "W");
    EXPECT_LT(grad_check(loss, ps, 1e-5).max_rel_error, 1e-6);
}
