#ifndef SEMTURBO_TENSOR_HPP
#define SEMTURBO_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace semturbo::nn {

// Dense (batch, channel, row, col) array in row-major order; the carrier
// of everything the auto-encoder computes.
template <typename T>
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> data;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          data(static_cast<std::size_t>(n_) * c_ * h_ * w_, T(0)) {
        if (n_ < 0 || c_ < 0 || h_ < 0 || w_ < 0)
            throw std::invalid_argument("Tensor4: negative dimension in " + shape_str());
    }

    std::size_t size() const { return data.size(); }

    T& at(int in, int ic, int iy, int ix) {
        return data[((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix];
    }
    const T& at(int in, int ic, int iy, int ix) const {
        return data[((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix];
    }

    T* plane(int in, int ic) { return data.data() + (static_cast<std::size_t>(in) * c + ic) * h * w; }
    const T* plane(int in, int ic) const {
        return data.data() + (static_cast<std::size_t>(in) * c + ic) * h * w;
    }

    bool same_shape(const Tensor4& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }

    std::string shape_str() const {
        return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
               std::to_string(w) + ")";
    }

    bool all_finite() const {
        for (const T& v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    void fill(T v) { data.assign(data.size(), v); }
};

template <typename To, typename From>
Tensor4<To> tensor_cast(const Tensor4<From>& x) {
    Tensor4<To> y(x.n, x.c, x.h, x.w);
    for (std::size_t i = 0; i < x.data.size(); ++i) y.data[i] = static_cast<To>(x.data[i]);
    return y;
}

inline void require_same_shape(const auto& a, const auto& b, const char* who) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(who) + ": shape mismatch " + a.shape_str() +
                                    " vs " + b.shape_str());
}

}  // namespace semturbo::nn

#endif
