#ifndef SEMTURBO_PHY_HPP
#define SEMTURBO_PHY_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "semturbo/rng.hpp"

namespace semturbo::phy {

// SNR is symbol energy over noise variance with Es = 1, so
// sigma^2 = 10^(-snr_db/10).
struct SnrConfig {
    double snr_db = 0.0;

    double sigma2() const { return std::pow(10.0, -snr_db / 10.0); }
};

// BPSK map: bit 0 -> +1, bit 1 -> -1; AWGN with variance sigma2. The
// noiseless flag keeps the mapping but skips the noise draw.
std::vector<double> transmit(std::span<const std::uint8_t> bits, const SnrConfig& snr,
                             rng::Stream& noise, bool noiseless = false);

// llr_i = 2*y_i/sigma2; positive favors bit 0
std::vector<double> channel_llr(std::span<const double> received, const SnrConfig& snr);

}  // namespace semturbo::phy

#endif
