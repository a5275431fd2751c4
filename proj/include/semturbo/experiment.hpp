#ifndef SEMTURBO_EXPERIMENT_HPP
#define SEMTURBO_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "semturbo/autoencoder.hpp"
#include "semturbo/ldpc.hpp"
#include "semturbo/metrics.hpp"
#include "semturbo/phy.hpp"
#include "semturbo/turbo.hpp"

namespace semturbo::experiment {

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::vector<double> snr_db;
    int image_count = 20;
    turbo::TurboConfig turbo;
    ldpc::CodeSpec code;
    bool noiseless = false;
    bool baseline_only = false;
    std::string dump_dir;  // per-round PNG dumps when non-empty
    int threads = 0;       // 0 = hardware concurrency (env-capped)
};

// One per-round CSV row of the paired run.
struct RoundRow {
    double snr_db;
    int image_idx;
    int round;
    double ber_ic, ber_noic;
    double ed_ic, ed_noic;
    double psnr_ic, psnr_noic;
    double ed_sem, psnr_sem;
};

// Final-round means over the image set, one per SNR point. PSNR columns
// are computed from the mean squared error over the set.
struct SnrAggregate {
    double snr_db;
    double ber_ic, ber_noic;
    double ed_ic, ed_noic;
    double psnr_ic, psnr_noic;
    double ed_sem, psnr_sem;
    metrics::MiGain mi;
};

struct SweepResult {
    std::vector<RoundRow> rows;
    std::vector<SnrAggregate> aggregates;
};

// Encode one 96x96 image into LDPC codewords and push them through the
// AWGN channel; the noise substream is keyed by (seed, image, block) so
// every SNR point sees the same realizations.
struct TransmittedImage {
    bitcodec::BitFrame frame;
    std::vector<std::vector<double>> received;
};
TransmittedImage transmit_image(const bitcodec::PixelImage& img, const ldpc::SystematicCode& code,
                                const phy::SnrConfig& snr, std::uint64_t seed, int image_idx,
                                bool noiseless);

// Paired IC / no-IC sweep over every SNR point and image. `model` may be
// null only when baseline_only is set.
SweepResult run_sweep(const ExperimentConfig& cfg, const ldpc::SystematicCode& code,
                      const nn::Model<float>* model,
                      const std::vector<bitcodec::PixelImage>& test_images);

void write_round_csv(const std::vector<RoundRow>& rows, const std::string& path);
void write_aggregate_csv(const std::vector<SnrAggregate>& aggs, const std::string& path);
void write_training_log_csv(const std::vector<autoenc::EpochStats>& log, const std::string& path);

// "inf" for infinities, shortest round-trip decimal otherwise
std::string format_value(double v);

}  // namespace semturbo::experiment

#endif
