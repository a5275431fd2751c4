#include "semturbo/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace semturbo::metrics {

double ber(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> recovered) {
    if (sent.size() != recovered.size())
        throw std::invalid_argument("ber: length mismatch " + std::to_string(sent.size()) + " vs " +
                                    std::to_string(recovered.size()));
    if (sent.empty()) return 0.0;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < sent.size(); ++i) errors += (sent[i] ^ recovered[i]) & 1;
    return static_cast<double>(errors) / static_cast<double>(sent.size());
}

namespace {

double mse(const bitcodec::PixelImage& a, const bitcodec::PixelImage& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("image metric: shape mismatch " + std::to_string(a.h) + "x" +
                                    std::to_string(a.w) + " vs " + std::to_string(b.h) + "x" +
                                    std::to_string(b.w));
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.data.size());
}

}  // namespace

double euclidean_distance(const bitcodec::PixelImage& a, const bitcodec::PixelImage& b) {
    return std::sqrt(mse(a, b) * static_cast<double>(a.data.size()));
}

double psnr(const bitcodec::PixelImage& a, const bitcodec::PixelImage& b) {
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

void JointHistogram::accumulate(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("JointHistogram: length mismatch " + std::to_string(x.size()) +
                                    " vs " + std::to_string(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i) ++count[x[i] & 1][y[i] & 1];
}

double JointHistogram::mutual_information(bool* degenerate) const {
    const double total = static_cast<double>(count[0][0] + count[0][1] + count[1][0] + count[1][1]);
    if (degenerate) *degenerate = false;
    if (total == 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    const double px[2] = {(count[0][0] + count[0][1]) / total, (count[1][0] + count[1][1]) / total};
    const double py[2] = {(count[0][0] + count[1][0]) / total, (count[0][1] + count[1][1]) / total};
    if (px[0] == 0.0 || px[1] == 0.0 || py[0] == 0.0 || py[1] == 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    double mi = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double pab = count[a][b] / total;
            if (pab > 0.0) mi += pab * std::log2(pab / (px[a] * py[b]));
        }
    return mi;
}

double mutual_information_bits(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y,
                               bool* degenerate) {
    JointHistogram h;
    h.accumulate(x, y);
    return h.mutual_information(degenerate);
}

MiGain mi_gain_empirical(std::span<const std::uint8_t> sent,
                         std::span<const std::uint8_t> recovered_semantic,
                         std::span<const std::uint8_t> recovered_channel) {
    MiGain g;
    g.i_semantic = mutual_information_bits(sent, recovered_semantic, &g.degenerate_semantic);
    g.i_channel = mutual_information_bits(sent, recovered_channel, &g.degenerate_channel);
    g.gain = g.i_semantic - g.i_channel;
    return g;
}

}  // namespace semturbo::metrics
