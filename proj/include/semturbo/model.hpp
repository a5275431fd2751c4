#ifndef SEMTURBO_MODEL_HPP
#define SEMTURBO_MODEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "semturbo/layers.hpp"

namespace semturbo::nn {

struct AdamConfig {
    double learning_rate = 0.003;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <typename T>
struct Model {
    std::vector<LayerState<T>> layers;

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.param_count();
        return n;
    }
    void zero_grads() {
        for (auto& l : layers) l.zero_grads();
    }
};

// Layer inputs and outputs captured during a forward pass, consumed by
// model_backward.
template <typename T>
struct ForwardTrace {
    std::vector<Tensor4<T>> inputs;
    std::vector<Tensor4<T>> outputs;
};

template <typename T>
Tensor4<T> model_forward(const Model<T>& m, Tensor4<T> x, ForwardTrace<T>* trace = nullptr) {
    if (trace) {
        trace->inputs.clear();
        trace->outputs.clear();
    }
    for (const auto& layer : m.layers) {
        Tensor4<T> y = layer_forward(x, layer);
        if (trace) {
            trace->inputs.push_back(std::move(x));
            trace->outputs.push_back(y);
        }
        x = std::move(y);
    }
    return x;
}

// Accumulates parameter gradients into the model; returns d(loss)/d(input).
template <typename T>
Tensor4<T> model_backward(Model<T>& m, const ForwardTrace<T>& trace, Tensor4<T> upstream) {
    for (std::size_t i = m.layers.size(); i-- > 0;)
        upstream = layer_backward(trace.inputs[i], trace.outputs[i], upstream, m.layers[i]);
    return upstream;
}

// Mean squared error over all elements; gradient is 2(pred-target)/count.
template <typename T>
std::pair<double, Tensor4<T>> mse_loss(const Tensor4<T>& pred, const Tensor4<T>& target) {
    require_same_shape(pred, target, "mse_loss");
    Tensor4<T> grad(pred.n, pred.c, pred.h, pred.w);
    const double inv_count = 1.0 / static_cast<double>(pred.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double d = static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i]);
        acc += d * d;
        grad.data[i] = static_cast<T>(2.0 * d * inv_count);
    }
    return {acc * inv_count, grad};
}

// Standard Adam with bias correction; consumes and zeroes the
// accumulated gradients.
template <typename T>
void adam_step(Model<T>& m, const AdamConfig& cfg) {
    for (auto& l : m.layers) {
        ++l.step_count;
        const double t = static_cast<double>(l.step_count);
        const double corr1 = 1.0 - std::pow(cfg.beta1, t);
        const double corr2 = 1.0 - std::pow(cfg.beta2, t);
        auto update = [&](std::vector<T>& w, std::vector<T>& g, std::vector<T>& mo,
                          std::vector<T>& vo) {
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double gi = static_cast<double>(g[i]);
                const double mi = cfg.beta1 * static_cast<double>(mo[i]) + (1.0 - cfg.beta1) * gi;
                const double vi = cfg.beta2 * static_cast<double>(vo[i]) + (1.0 - cfg.beta2) * gi * gi;
                mo[i] = static_cast<T>(mi);
                vo[i] = static_cast<T>(vi);
                const double mhat = mi / corr1;
                const double vhat = vi / corr2;
                w[i] = static_cast<T>(static_cast<double>(w[i]) -
                                      cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon));
            }
        };
        update(l.w, l.gw, l.mw, l.vw);
        update(l.b, l.gb, l.mb, l.vb);
        l.zero_grads();
    }
}

// Central finite differences over every parameter against the analytic
// gradients of mse_loss(model(input), target). Returns the worst
// relative error. Meant for small models (exhaustive perturbation).
// Differences below perturbation/2 count as agreement, and a parameter
// whose first difference disagrees is re-measured at smaller steps: a
// relu gate flipping inside the perturbation window produces a spurious
// difference that vanishes as the step shrinks, while a genuine
// gradient error persists at every step size.
template <typename T>
double gradient_check(Model<T>& model, const Tensor4<T>& input, const Tensor4<T>& target,
                      double perturbation = 1e-4) {
    if (model.param_count() > 8000)
        throw std::invalid_argument("gradient_check: model too large for exhaustive perturbation");
    model.zero_grads();
    ForwardTrace<T> trace;
    Tensor4<T> pred = model_forward(model, input, &trace);
    auto [loss, grad] = mse_loss(pred, target);
    if (!std::isfinite(loss)) throw std::runtime_error("gradient_check: non-finite loss");
    model_backward(model, trace, std::move(grad));

    auto loss_at = [&]() {
        auto [l, g] = mse_loss(model_forward(model, input), target);
        (void)g;
        if (!std::isfinite(l)) throw std::runtime_error("gradient_check: non-finite loss");
        return l;
    };
    double worst = 0.0;
    auto check_array = [&](std::vector<T>& params, const std::vector<T>& analytic) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const T saved = params[i];
            auto error_at = [&](double eps) {
                params[i] = static_cast<T>(saved + eps);
                const double lp = loss_at();
                params[i] = static_cast<T>(saved - eps);
                const double lm = loss_at();
                params[i] = saved;
                const double numeric = (lp - lm) / (2.0 * eps);
                const double a = static_cast<double>(analytic[i]);
                if (std::fabs(a - numeric) <= 0.5 * eps) return 0.0;
                return std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-8});
            };
            double rel = error_at(perturbation);
            for (double eps = perturbation / 8.0; rel > 1e-4 && eps > perturbation / 100.0;
                 eps /= 8.0)
                rel = std::min(rel, error_at(eps));
            if (rel > worst) worst = rel;
        }
    };
    for (auto& l : model.layers) {
        check_array(l.w, l.gw);
        check_array(l.b, l.gb);
    }
    model.zero_grads();
    return worst;
}

Model<double> to_double(const Model<float>& m);

// Binary weights file: magic "SEMW", u32 version, u32 layer count, then
// per layer kind/activation tags, dims, stride, and float32 parameters.
// All integers and floats little-endian.
void save_weights(const Model<float>& m, const std::string& path);
Model<float> load_weights(const std::string& path);

}  // namespace semturbo::nn

#endif
