#include "semturbo/phy.hpp"

namespace semturbo::phy {

std::vector<double> transmit(std::span<const std::uint8_t> bits, const SnrConfig& snr,
                             rng::Stream& noise, bool noiseless) {
    const double sigma = std::sqrt(snr.sigma2());
    std::vector<double> y(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const double x = bits[i] ? -1.0 : 1.0;
        y[i] = noiseless ? x : x + sigma * noise.next_gaussian();
    }
    return y;
}

std::vector<double> channel_llr(std::span<const double> received, const SnrConfig& snr) {
    const double scale = 2.0 / snr.sigma2();
    std::vector<double> llr(received.size());
    for (std::size_t i = 0; i < received.size(); ++i) llr[i] = scale * received[i];
    return llr;
}

}  // namespace semturbo::phy
