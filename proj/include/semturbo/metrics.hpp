#ifndef SEMTURBO_METRICS_HPP
#define SEMTURBO_METRICS_HPP

#include <cstdint>
#include <span>

#include "semturbo/bitcodec.hpp"

namespace semturbo::metrics {

double ber(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> recovered);

// sqrt of the summed squared sample differences, samples in [0,255]
double euclidean_distance(const bitcodec::PixelImage& a, const bitcodec::PixelImage& b);

// 10*log10(255^2/MSE); +infinity for identical images
double psnr(const bitcodec::PixelImage& a, const bitcodec::PixelImage& b);

// Empirical per-bit mutual information from the 2x2 joint histogram.
// degenerate is set when either marginal is constant (MI reported as 0).
double mutual_information_bits(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y,
                               bool* degenerate = nullptr);

// Streaming variant: joint counts accumulated across calls before one
// MI evaluation, so a whole SNR point can be pooled.
struct JointHistogram {
    std::uint64_t count[2][2] = {{0, 0}, {0, 0}};

    void accumulate(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y);
    double mutual_information(bool* degenerate = nullptr) const;
};

struct MiGain {
    double i_semantic = 0.0;
    double i_channel = 0.0;
    double gain = 0.0;
    bool degenerate_semantic = false;
    bool degenerate_channel = false;
};

// Information gain of the semantically assisted recovery over the
// channel-only recovery, both measured against the transmitted bits.
MiGain mi_gain_empirical(std::span<const std::uint8_t> sent,
                         std::span<const std::uint8_t> recovered_semantic,
                         std::span<const std::uint8_t> recovered_channel);

}  // namespace semturbo::metrics

#endif
