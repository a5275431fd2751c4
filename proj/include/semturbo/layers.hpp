#ifndef SEMTURBO_LAYERS_HPP
#define SEMTURBO_LAYERS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "semturbo/rng.hpp"
#include "semturbo/tensor.hpp"

namespace semturbo::nn {

enum class Activation : std::uint8_t { none = 0, relu = 1, sigmoid = 2 };
enum class LayerKind : std::uint8_t { conv = 0, tconv = 1 };

// {n_F, (w_K, h_K), s} plus the layer kind and its activation.
struct ConvLayerSpec {
    int filters = 1;
    int kernel_h = 1;
    int kernel_w = 1;
    int stride = 1;
    LayerKind kind = LayerKind::conv;
    Activation act = Activation::none;
};

inline int conv_out_dim(int in, int k, int s) {
    if (in < k)
        throw std::invalid_argument("conv: input extent " + std::to_string(in) +
                                    " smaller than kernel " + std::to_string(k));
    return (in - k) / s + 1;
}

inline int tconv_out_dim(int in, int k, int s) { return (in - 1) * s + k; }

// Weights, bias, accumulated gradients and Adam moments for one layer.
// Weight layout is (out_c, in_c, kernel_h, kernel_w) row-major for both
// layer kinds; for tconv, in_c is the layer's input channel count.
template <typename T>
struct LayerState {
    ConvLayerSpec spec;
    int in_c = 0;
    std::vector<T> w, b;
    std::vector<T> gw, gb;
    std::vector<T> mw, vw, mb, vb;
    long step_count = 0;

    std::size_t weight_count() const {
        return static_cast<std::size_t>(spec.filters) * in_c * spec.kernel_h * spec.kernel_w;
    }
    std::size_t param_count() const { return weight_count() + spec.filters; }

    T& wt(int f, int c, int ky, int kx) {
        return w[((static_cast<std::size_t>(f) * in_c + c) * spec.kernel_h + ky) * spec.kernel_w + kx];
    }
    const T& wt(int f, int c, int ky, int kx) const {
        return w[((static_cast<std::size_t>(f) * in_c + c) * spec.kernel_h + ky) * spec.kernel_w + kx];
    }

    void zero_grads() {
        gw.assign(gw.size(), T(0));
        gb.assign(gb.size(), T(0));
    }
};

// Fan-in scaled uniform init in +-sqrt(1/(in_c*kh*kw)).
template <typename T>
LayerState<T> make_layer(const ConvLayerSpec& spec, int in_c, rng::Stream& rs) {
    if (spec.filters < 1 || spec.kernel_h < 1 || spec.kernel_w < 1 || spec.stride < 1 || in_c < 1)
        throw std::invalid_argument("make_layer: nonpositive dimension in layer spec");
    LayerState<T> st;
    st.spec = spec;
    st.in_c = in_c;
    const std::size_t nw = st.weight_count();
    st.w.resize(nw);
    st.b.assign(spec.filters, T(0));
    const double bound = std::sqrt(1.0 / (static_cast<double>(in_c) * spec.kernel_h * spec.kernel_w));
    for (std::size_t i = 0; i < nw; ++i)
        st.w[i] = static_cast<T>((2.0 * rs.next_unit() - 1.0) * bound);
    st.gw.assign(nw, T(0));
    st.gb.assign(spec.filters, T(0));
    st.mw.assign(nw, T(0));
    st.vw.assign(nw, T(0));
    st.mb.assign(spec.filters, T(0));
    st.vb.assign(spec.filters, T(0));
    return st;
}

template <typename T>
Tensor4<T> activation_forward(const Tensor4<T>& x, Activation act) {
    Tensor4<T> y = x;
    switch (act) {
        case Activation::none:
            break;
        case Activation::relu:
            for (T& v : y.data) v = v > T(0) ? v : T(0);
            break;
        case Activation::sigmoid:
            for (T& v : y.data) v = T(1) / (T(1) + std::exp(-v));
            break;
    }
    return y;
}

// Derivative is evaluated at the pre-activation input x.
template <typename T>
Tensor4<T> activation_backward(const Tensor4<T>& x, const Tensor4<T>& upstream, Activation act) {
    require_same_shape(x, upstream, "activation_backward");
    Tensor4<T> g = upstream;
    switch (act) {
        case Activation::none:
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < g.data.size(); ++i)
                if (x.data[i] <= T(0)) g.data[i] = T(0);
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < g.data.size(); ++i) {
                const T s = T(1) / (T(1) + std::exp(-x.data[i]));
                g.data[i] *= s * (T(1) - s);
            }
            break;
    }
    return g;
}

namespace detail {

// act' expressed through the activation output a, valid for all three kinds
template <typename T>
inline T act_deriv_from_output(T a, Activation act) {
    switch (act) {
        case Activation::relu:
            return a > T(0) ? T(1) : T(0);
        case Activation::sigmoid:
            return a * (T(1) - a);
        default:
            return T(1);
    }
}

template <typename T>
Tensor4<T> upstream_to_preact_grad(const Tensor4<T>& output, const Tensor4<T>& upstream,
                                   Activation act) {
    require_same_shape(output, upstream, "layer backward");
    Tensor4<T> dz = upstream;
    if (act != Activation::none)
        for (std::size_t i = 0; i < dz.data.size(); ++i)
            dz.data[i] *= act_deriv_from_output(output.data[i], act);
    return dz;
}

}  // namespace detail

// Valid (unpadded) cross-correlation, bias, then activation.
template <typename T>
Tensor4<T> conv2d_apply(const Tensor4<T>& x, const LayerState<T>& st) {
    const ConvLayerSpec& sp = st.spec;
    if (sp.kind != LayerKind::conv)
        throw std::invalid_argument("conv2d_apply: layer kind is not conv");
    if (x.c != st.in_c)
        throw std::invalid_argument("conv2d_apply: input channels " + x.shape_str() +
                                    " vs layer in_c " + std::to_string(st.in_c));
    const int oh = conv_out_dim(x.h, sp.kernel_h, sp.stride);
    const int ow = conv_out_dim(x.w, sp.kernel_w, sp.stride);
    Tensor4<T> y(x.n, sp.filters, oh, ow);
    for (int in = 0; in < x.n; ++in) {
        for (int f = 0; f < sp.filters; ++f) {
            T* out_plane = y.plane(in, f);
            const std::size_t plane_sz = static_cast<std::size_t>(oh) * ow;
            for (std::size_t i = 0; i < plane_sz; ++i) out_plane[i] = st.b[f];
            for (int c = 0; c < x.c; ++c) {
                const T* in_plane = x.plane(in, c);
                for (int ky = 0; ky < sp.kernel_h; ++ky) {
                    for (int kx = 0; kx < sp.kernel_w; ++kx) {
                        const T wv = st.wt(f, c, ky, kx);
                        for (int oy = 0; oy < oh; ++oy) {
                            const T* in_row = in_plane + (oy * sp.stride + ky) * x.w + kx;
                            T* out_row = out_plane + static_cast<std::size_t>(oy) * ow;
                            for (int ox = 0; ox < ow; ++ox)
                                out_row[ox] += wv * in_row[ox * sp.stride];
                        }
                    }
                }
            }
        }
    }
    return activation_forward(y, sp.act);
}

// Backward through activation, bias, and correlation. Accumulates
// grad_weights/grad_bias into st and returns the input gradient.
// `output` must be the tensor conv2d_apply produced for this input.
template <typename T>
Tensor4<T> conv2d_grad(const Tensor4<T>& x, const Tensor4<T>& output, const Tensor4<T>& upstream,
                       LayerState<T>& st) {
    const ConvLayerSpec& sp = st.spec;
    if (sp.kind != LayerKind::conv)
        throw std::invalid_argument("conv2d_grad: layer kind is not conv");
    const Tensor4<T> dz = detail::upstream_to_preact_grad(output, upstream, sp.act);
    const int oh = dz.h, ow = dz.w;
    if (dz.n != x.n || dz.c != sp.filters || oh != conv_out_dim(x.h, sp.kernel_h, sp.stride) ||
        ow != conv_out_dim(x.w, sp.kernel_w, sp.stride))
        throw std::invalid_argument("conv2d_grad: upstream shape " + upstream.shape_str() +
                                    " does not match forward output for input " + x.shape_str());
    Tensor4<T> gin(x.n, x.c, x.h, x.w);
    for (int in = 0; in < x.n; ++in) {
        for (int f = 0; f < sp.filters; ++f) {
            const T* dz_plane = dz.plane(in, f);
            T gb_acc = T(0);
            for (std::size_t i = 0; i < static_cast<std::size_t>(oh) * ow; ++i) gb_acc += dz_plane[i];
            st.gb[f] += gb_acc;
            for (int c = 0; c < x.c; ++c) {
                const T* in_plane = x.plane(in, c);
                T* gin_plane = gin.plane(in, c);
                for (int ky = 0; ky < sp.kernel_h; ++ky) {
                    for (int kx = 0; kx < sp.kernel_w; ++kx) {
                        const T wv = st.wt(f, c, ky, kx);
                        T gw_acc = T(0);
                        for (int oy = 0; oy < oh; ++oy) {
                            const T* in_row = in_plane + (oy * sp.stride + ky) * x.w + kx;
                            T* gin_row = gin_plane + (oy * sp.stride + ky) * x.w + kx;
                            const T* dz_row = dz_plane + static_cast<std::size_t>(oy) * ow;
                            for (int ox = 0; ox < ow; ++ox) {
                                gw_acc += dz_row[ox] * in_row[ox * sp.stride];
                                gin_row[ox * sp.stride] += wv * dz_row[ox];
                            }
                        }
                        st.gw[((static_cast<std::size_t>(f) * st.in_c + c) * sp.kernel_h + ky) *
                                  sp.kernel_w +
                              kx] += gw_acc;
                    }
                }
            }
        }
    }
    return gin;
}

// Transposed convolution: the adjoint of the valid correlation above
// (every input element scatters a kernel-shaped footprint), then bias
// and activation.
template <typename T>
Tensor4<T> tconv2d_apply(const Tensor4<T>& x, const LayerState<T>& st) {
    const ConvLayerSpec& sp = st.spec;
    if (sp.kind != LayerKind::tconv)
        throw std::invalid_argument("tconv2d_apply: layer kind is not tconv");
    if (x.c != st.in_c)
        throw std::invalid_argument("tconv2d_apply: input channels " + x.shape_str() +
                                    " vs layer in_c " + std::to_string(st.in_c));
    const int oh = tconv_out_dim(x.h, sp.kernel_h, sp.stride);
    const int ow = tconv_out_dim(x.w, sp.kernel_w, sp.stride);
    Tensor4<T> y(x.n, sp.filters, oh, ow);
    for (int in = 0; in < x.n; ++in) {
        for (int f = 0; f < sp.filters; ++f) {
            T* out_plane = y.plane(in, f);
            const std::size_t plane_sz = static_cast<std::size_t>(oh) * ow;
            for (std::size_t i = 0; i < plane_sz; ++i) out_plane[i] = st.b[f];
            for (int c = 0; c < x.c; ++c) {
                const T* in_plane = x.plane(in, c);
                for (int ky = 0; ky < sp.kernel_h; ++ky) {
                    for (int kx = 0; kx < sp.kernel_w; ++kx) {
                        const T wv = st.wt(f, c, ky, kx);
                        for (int iy = 0; iy < x.h; ++iy) {
                            const T* in_row = in_plane + static_cast<std::size_t>(iy) * x.w;
                            T* out_row = out_plane + (iy * sp.stride + ky) * ow + kx;
                            for (int ix = 0; ix < x.w; ++ix)
                                out_row[ix * sp.stride] += wv * in_row[ix];
                        }
                    }
                }
            }
        }
    }
    return activation_forward(y, sp.act);
}

template <typename T>
Tensor4<T> tconv2d_grad(const Tensor4<T>& x, const Tensor4<T>& output, const Tensor4<T>& upstream,
                        LayerState<T>& st) {
    const ConvLayerSpec& sp = st.spec;
    if (sp.kind != LayerKind::tconv)
        throw std::invalid_argument("tconv2d_grad: layer kind is not tconv");
    const Tensor4<T> dz = detail::upstream_to_preact_grad(output, upstream, sp.act);
    const int oh = dz.h, ow = dz.w;
    if (dz.n != x.n || dz.c != sp.filters || oh != tconv_out_dim(x.h, sp.kernel_h, sp.stride) ||
        ow != tconv_out_dim(x.w, sp.kernel_w, sp.stride))
        throw std::invalid_argument("tconv2d_grad: upstream shape " + upstream.shape_str() +
                                    " does not match forward output for input " + x.shape_str());
    Tensor4<T> gin(x.n, x.c, x.h, x.w);
    for (int in = 0; in < x.n; ++in) {
        for (int f = 0; f < sp.filters; ++f) {
            const T* dz_plane = dz.plane(in, f);
            T gb_acc = T(0);
            for (std::size_t i = 0; i < static_cast<std::size_t>(oh) * ow; ++i) gb_acc += dz_plane[i];
            st.gb[f] += gb_acc;
            for (int c = 0; c < x.c; ++c) {
                const T* in_plane = x.plane(in, c);
                T* gin_plane = gin.plane(in, c);
                for (int ky = 0; ky < sp.kernel_h; ++ky) {
                    for (int kx = 0; kx < sp.kernel_w; ++kx) {
                        const T wv = st.wt(f, c, ky, kx);
                        T gw_acc = T(0);
                        for (int iy = 0; iy < x.h; ++iy) {
                            const T* in_row = in_plane + static_cast<std::size_t>(iy) * x.w;
                            T* gin_row = gin_plane + static_cast<std::size_t>(iy) * x.w;
                            const T* dz_row = dz_plane + (iy * sp.stride + ky) * ow + kx;
                            for (int ix = 0; ix < x.w; ++ix) {
                                gw_acc += in_row[ix] * dz_row[ix * sp.stride];
                                gin_row[ix] += wv * dz_row[ix * sp.stride];
                            }
                        }
                        st.gw[((static_cast<std::size_t>(f) * st.in_c + c) * sp.kernel_h + ky) *
                                  sp.kernel_w +
                              kx] += gw_acc;
                    }
                }
            }
        }
    }
    return gin;
}

template <typename T>
Tensor4<T> layer_forward(const Tensor4<T>& x, const LayerState<T>& st) {
    return st.spec.kind == LayerKind::conv ? conv2d_apply(x, st) : tconv2d_apply(x, st);
}

template <typename T>
Tensor4<T> layer_backward(const Tensor4<T>& x, const Tensor4<T>& output, const Tensor4<T>& upstream,
                          LayerState<T>& st) {
    return st.spec.kind == LayerKind::conv ? conv2d_grad(x, output, upstream, st)
                                           : tconv2d_grad(x, output, upstream, st);
}

}  // namespace semturbo::nn

#endif
