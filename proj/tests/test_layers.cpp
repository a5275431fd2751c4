#include <doctest.h>

#include <cmath>

#include "semturbo/layers.hpp"

using namespace semturbo;
using nn::Activation;
using nn::ConvLayerSpec;
using nn::LayerKind;
using nn::LayerState;
using nn::Tensor4;

namespace {

Tensor4<double> random_tensor(int n, int c, int h, int w, rng::Stream& rs, double scale = 1.0) {
    Tensor4<double> t(n, c, h, w);
    for (auto& v : t.data) v = (2.0 * rs.next_unit() - 1.0) * scale;
    return t;
}

LayerState<double> random_layer(const ConvLayerSpec& spec, int in_c, std::uint64_t seed) {
    auto rs = rng::derive(seed, rng::StreamTag::weight_init);
    return nn::make_layer<double>(spec, in_c, rs);
}

double dot(const Tensor4<double>& a, const Tensor4<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
    return s;
}

// Independent oracle: central differences of the probe loss
// L = <layer(x), probe> against the analytic gradients from the
// backward pass. Checks weights, biases and the input.
void check_layer_gradients(LayerState<double>& st, const Tensor4<double>& x, std::uint64_t seed,
                           double tol) {
    auto rs = rng::derive(seed, rng::StreamTag::message_bits, 99);
    const Tensor4<double> out0 = nn::layer_forward(x, st);
    Tensor4<double> probe = random_tensor(out0.n, out0.c, out0.h, out0.w, rs);

    st.zero_grads();
    Tensor4<double> x_copy = x;
    const Tensor4<double> gin = nn::layer_backward(x_copy, out0, probe, st);

    const double eps = 1e-4;
    auto loss_with = [&](const Tensor4<double>& input) {
        return dot(nn::layer_forward(input, st), probe);
    };
    auto rel_err = [](double a, double n) {
        return std::fabs(a - n) / std::max({std::fabs(a), std::fabs(n), 1e-8});
    };

    for (std::size_t i = 0; i < st.w.size(); ++i) {
        const double saved = st.w[i];
        st.w[i] = saved + eps;
        const double lp = loss_with(x);
        st.w[i] = saved - eps;
        const double lm = loss_with(x);
        st.w[i] = saved;
        CHECK(rel_err(st.gw[i], (lp - lm) / (2 * eps)) < tol);
    }
    for (std::size_t i = 0; i < st.b.size(); ++i) {
        const double saved = st.b[i];
        st.b[i] = saved + eps;
        const double lp = loss_with(x);
        st.b[i] = saved - eps;
        const double lm = loss_with(x);
        st.b[i] = saved;
        CHECK(rel_err(st.gb[i], (lp - lm) / (2 * eps)) < tol);
    }
    Tensor4<double> xp = x;
    for (std::size_t i = 0; i < xp.data.size(); ++i) {
        const double saved = xp.data[i];
        xp.data[i] = saved + eps;
        const double lp = loss_with(xp);
        xp.data[i] = saved - eps;
        const double lm = loss_with(xp);
        xp.data[i] = saved;
        CHECK(rel_err(gin.data[i], (lp - lm) / (2 * eps)) < tol);
    }
}

LayerState<double> identity_1x1(LayerKind kind) {
    ConvLayerSpec spec{1, 1, 1, 1, kind, Activation::none};
    auto st = random_layer(spec, 1, 0);
    st.w = {1.0};
    st.b = {0.0};
    return st;
}

}  // namespace

TEST_CASE("conv output shapes follow the floor formula") {
    auto rs = rng::derive(1, rng::StreamTag::weight_init);
    auto l1 = nn::make_layer<double>({27, 4, 4, 2, LayerKind::conv, Activation::relu}, 3, rs);
    auto l2 = nn::make_layer<double>({16, 3, 3, 2, LayerKind::conv, Activation::relu}, 27, rs);
    Tensor4<double> x(1, 3, 96, 96);
    const auto y1 = nn::conv2d_apply(x, l1);
    CHECK(y1.n == 1);
    CHECK(y1.c == 27);
    CHECK(y1.h == 47);
    CHECK(y1.w == 47);
    const auto y2 = nn::conv2d_apply(y1, l2);
    CHECK(y2.c == 16);
    CHECK(y2.h == 23);
    CHECK(y2.w == 23);
}

TEST_CASE("tconv output shapes invert the encoder chain") {
    auto rs = rng::derive(2, rng::StreamTag::weight_init);
    auto d1 = nn::make_layer<double>({27, 3, 3, 2, LayerKind::tconv, Activation::relu}, 16, rs);
    auto d2 = nn::make_layer<double>({3, 4, 4, 2, LayerKind::tconv, Activation::none}, 27, rs);
    Tensor4<double> latent(1, 16, 23, 23);
    const auto y1 = nn::tconv2d_apply(latent, d1);
    CHECK(y1.c == 27);
    CHECK(y1.h == 47);
    CHECK(y1.w == 47);
    const auto y2 = nn::tconv2d_apply(y1, d2);
    CHECK(y2.c == 3);
    CHECK(y2.h == 96);
    CHECK(y2.w == 96);
}

TEST_CASE("1x1 identity kernels pass values and gradients through") {
    auto rs = rng::derive(3, rng::StreamTag::message_bits);
    const auto x = random_tensor(1, 1, 3, 3, rs);
    for (LayerKind kind : {LayerKind::conv, LayerKind::tconv}) {
        auto st = identity_1x1(kind);
        const auto y = nn::layer_forward(x, st);
        REQUIRE(y.same_shape(x));
        for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == doctest::Approx(x.data[i]));

        const auto g = random_tensor(1, 1, 3, 3, rs);
        auto gin = nn::layer_backward(x, y, g, st);
        for (std::size_t i = 0; i < g.data.size(); ++i)
            CHECK(gin.data[i] == doctest::Approx(g.data[i]));
    }
}

TEST_CASE("zero upstream produces zero gradients") {
    auto rs = rng::derive(4, rng::StreamTag::message_bits);
    const auto x = random_tensor(1, 2, 5, 5, rs);
    auto st = random_layer({3, 3, 3, 1, LayerKind::conv, Activation::relu}, 2, 21);
    const auto y = nn::conv2d_apply(x, st);
    Tensor4<double> zeros(y.n, y.c, y.h, y.w);
    const auto gin = nn::conv2d_grad(x, y, zeros, st);
    for (double v : gin.data) CHECK(v == 0.0);
    for (double v : st.gw) CHECK(v == 0.0);
    for (double v : st.gb) CHECK(v == 0.0);
}

TEST_CASE("conv gradients match central finite differences") {
    auto rs = rng::derive(5, rng::StreamTag::message_bits);
    const auto x = random_tensor(1, 2, 5, 5, rs);
    for (Activation act : {Activation::none, Activation::relu, Activation::sigmoid}) {
        auto st = random_layer({3, 3, 3, 1, LayerKind::conv, act}, 2, 31);
        check_layer_gradients(st, x, 500 + static_cast<int>(act), 1e-3);
    }
    // strided case
    auto st = random_layer({2, 3, 3, 2, LayerKind::conv, Activation::relu}, 2, 32);
    const auto xs = random_tensor(2, 2, 7, 7, rs);
    check_layer_gradients(st, xs, 510, 1e-3);
}

TEST_CASE("tconv gradients match central finite differences") {
    auto rs = rng::derive(6, rng::StreamTag::message_bits);
    const auto x = random_tensor(1, 2, 4, 4, rs);
    for (Activation act : {Activation::none, Activation::relu, Activation::sigmoid}) {
        auto st = random_layer({3, 3, 3, 2, LayerKind::tconv, act}, 2, 41);
        check_layer_gradients(st, x, 600 + static_cast<int>(act), 1e-3);
    }
    // non-square kernel
    auto st = random_layer({2, 2, 3, 1, LayerKind::tconv, Activation::none}, 2, 42);
    check_layer_gradients(st, x, 610, 1e-3);
}

TEST_CASE("transposed conv is the adjoint of conv") {
    auto rs = rng::derive(7, rng::StreamTag::message_bits);
    const int C = 2, F = 3, K = 3, S = 2;
    auto conv = random_layer({F, K, K, S, LayerKind::conv, Activation::none}, C, 51);
    conv.b.assign(conv.b.size(), 0.0);
    auto tconv = random_layer({C, K, K, S, LayerKind::tconv, Activation::none}, F, 52);
    tconv.b.assign(tconv.b.size(), 0.0);
    for (int f = 0; f < F; ++f)
        for (int c = 0; c < C; ++c)
            for (int ky = 0; ky < K; ++ky)
                for (int kx = 0; kx < K; ++kx) tconv.wt(c, f, ky, kx) = conv.wt(f, c, ky, kx);

    // 7 -> 3 -> 7 under k=3, s=2, so shapes line up exactly
    const auto x = random_tensor(1, C, 7, 7, rs);
    const auto y = random_tensor(1, F, 3, 3, rs);
    const double lhs = dot(nn::conv2d_apply(x, conv), y);
    const double rhs = dot(x, nn::tconv2d_apply(y, tconv));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("activation values and derivatives") {
    Tensor4<double> x(1, 1, 1, 3);
    x.data = {-1.0, 0.0, 2.0};
    const auto relu = nn::activation_forward(x, Activation::relu);
    CHECK(relu.data[0] == 0.0);
    CHECK(relu.data[1] == 0.0);
    CHECK(relu.data[2] == 2.0);

    Tensor4<double> zero(1, 1, 1, 1);
    const auto sig = nn::activation_forward(zero, Activation::sigmoid);
    CHECK(sig.data[0] == doctest::Approx(0.5));

    Tensor4<double> ones(1, 1, 1, 1);
    ones.data = {1.0};
    const auto back = nn::activation_backward(zero, ones, Activation::sigmoid);
    CHECK(back.data[0] == doctest::Approx(0.25));

    const auto none = nn::activation_forward(x, Activation::none);
    for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(none.data[i] == x.data[i]);
}

TEST_CASE("dimension errors name both shapes") {
    auto st = random_layer({2, 3, 3, 1, LayerKind::conv, Activation::none}, 3, 61);
    Tensor4<double> wrong_channels(1, 2, 5, 5);
    CHECK_THROWS_AS(nn::conv2d_apply(wrong_channels, st), std::invalid_argument);
    Tensor4<double> too_small(1, 3, 2, 2);
    CHECK_THROWS_AS(nn::conv2d_apply(too_small, st), std::invalid_argument);

    Tensor4<double> x(1, 3, 5, 5);
    const auto y = nn::conv2d_apply(x, st);
    Tensor4<double> bad_upstream(1, 2, 2, 2);
    CHECK_THROWS_AS(nn::conv2d_grad(x, y, bad_upstream, st), std::invalid_argument);

    auto ts = random_layer({2, 3, 3, 1, LayerKind::tconv, Activation::none}, 3, 62);
    CHECK_THROWS_AS(nn::tconv2d_apply(wrong_channels, ts), std::invalid_argument);
    CHECK_THROWS_AS(nn::conv2d_apply(x, ts), std::invalid_argument);
}
