#ifndef SEMTURBO_TURBO_HPP
#define SEMTURBO_TURBO_HPP

#include <vector>

#include "semturbo/autoencoder.hpp"
#include "semturbo/bitcodec.hpp"
#include "semturbo/ldpc.hpp"
#include "semturbo/phy.hpp"

namespace semturbo::turbo {

struct TurboConfig {
    int rounds = 7;          // outer turbo rounds T
    int inner_bp_iters = 10; // BP iterations per round L
    double alpha = 1.5;      // a priori LLR magnitude (cap when adaptive)
    bool apriori_all_bits = false;  // default: systematic positions only
    bool early_stop = false;        // stop outer rounds once every block converges
    bool semantic_enabled = true;   // false: plain channel decoding baseline
    // Confidence-gated feedback: per bit plane the magnitude is the
    // empirical log-odds of agreement between the decoded and denoised
    // images (capped at alpha); low-order planes, where the
    // reconstruction carries no information, self-mute. Blocks whose
    // syndrome already checks latch onto their own decision. With
    // false, every systematic bit gets the uniform magnitude alpha.
    bool adaptive_apriori = true;
};

// Per-round record for the convergence curves: channel-decoded ("IC")
// image metrics, semantic-decoder image metrics, and BP convergence.
struct RoundMetrics {
    int round = 0;
    double ber = 0.0;
    double ed = 0.0;
    double psnr = 0.0;
    double ed_sem = 0.0;
    double psnr_sem = 0.0;
    int blocks_converged = 0;
    int blocks_total = 0;
};

using IterationTrace = std::vector<RoundMetrics>;

struct TurboResult {
    bitcodec::PixelImage channel_image;   // round-T hard-decision image
    bitcodec::PixelImage semantic_image;  // round-T auto-encoder output
    bitcodec::Bits payload_bits;          // deframed channel-decoded bits
    bitcodec::Bits payload_bits_semantic; // deframed bits of the semantic image
    IterationTrace trace;                 // empty unless a reference was given
    std::vector<bitcodec::PixelImage> round_channel_images;   // filled when keep_round_images
    std::vector<bitcodec::PixelImage> round_semantic_images;
};

// Hard decision (LLR >= 0 -> bit 0) on systematic positions of every
// block, deframe, dequantize.
bitcodec::PixelImage posterior_to_image(const std::vector<ldpc::BpResult>& posteriors,
                                        const ldpc::SystematicCode& code,
                                        const bitcodec::BitFrame& frame, int h, int w);

// Quantize the denoised image and map each payload bit b to alpha*(1-2b)
// at its systematic position; parity and padding positions get zero.
// With apriori_all_bits the payload is re-encoded and parity positions
// are filled too.
std::vector<std::vector<double>> image_to_apriori(const bitcodec::PixelImage& denoised,
                                                  const ldpc::SystematicCode& code,
                                                  const bitcodec::BitFrame& frame,
                                                  const TurboConfig& cfg);

// The adaptive_apriori bridge: same sign map, but per bit plane the
// magnitude is the measured log-odds of agreement between the decoded
// bits and the denoised image over the still-unconverged blocks (capped
// at cfg.alpha, zero at or below chance). Converged blocks are latched:
// they receive their own decoded bits at the full magnitude.
std::vector<std::vector<double>> confidence_gated_apriori(const bitcodec::PixelImage& denoised,
                                                          const bitcodec::Bits& decoded_bits,
                                                          const std::vector<char>& block_converged,
                                                          const ldpc::SystematicCode& code,
                                                          const bitcodec::BitFrame& frame,
                                                          const TurboConfig& cfg);

// The alternating loop: BP over all blocks with the current a priori
// (zero in round 1), bridge posteriors to an image, pass it through the
// auto-encoder, and derive the next round's a priori. Channel LLRs stay
// fixed; the a priori is replaced each round. `reference` enables the
// per-round metric trace; `keep_round_images` retains every round's
// images for dumping.
TurboResult run_turbo_decode(const std::vector<std::vector<double>>& received_blocks,
                             const ldpc::SystematicCode& code, const nn::Model<float>* model,
                             const phy::SnrConfig& snr, const TurboConfig& cfg,
                             const bitcodec::BitFrame& frame, int h, int w,
                             const bitcodec::PixelImage* reference = nullptr,
                             bool keep_round_images = false);

}  // namespace semturbo::turbo

#endif
