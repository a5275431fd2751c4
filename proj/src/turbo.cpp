#include "semturbo/turbo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "semturbo/metrics.hpp"

namespace semturbo::turbo {

bitcodec::PixelImage posterior_to_image(const std::vector<ldpc::BpResult>& posteriors,
                                        const ldpc::SystematicCode& code,
                                        const bitcodec::BitFrame& frame, int h, int w) {
    if (static_cast<int>(posteriors.size()) != frame.block_count())
        throw std::invalid_argument("posterior_to_image: " + std::to_string(posteriors.size()) +
                                    " posterior blocks for " + std::to_string(frame.block_count()) +
                                    " frame blocks");
    bitcodec::Bits padded;
    padded.reserve(frame.bits.size());
    for (const auto& post : posteriors) {
        if (static_cast<int>(post.posterior_llr.size()) != code.n())
            throw std::invalid_argument("posterior_to_image: posterior length mismatch");
        for (int col : code.systematic_cols())
            padded.push_back(post.posterior_llr[col] >= 0.0 ? 0 : 1);
    }
    bitcodec::BitFrame decoded_frame{std::move(padded), frame.original_bit_count, frame.block_size};
    return bitcodec::dequantize_bits(bitcodec::deframe(decoded_frame), h, w);
}

std::vector<std::vector<double>> image_to_apriori(const bitcodec::PixelImage& denoised,
                                                  const ldpc::SystematicCode& code,
                                                  const bitcodec::BitFrame& frame,
                                                  const TurboConfig& cfg) {
    const bitcodec::Bits bits = bitcodec::quantize_image(denoised);
    if (bits.size() != frame.original_bit_count)
        throw std::invalid_argument("image_to_apriori: image yields " + std::to_string(bits.size()) +
                                    " bits, frame expects " +
                                    std::to_string(frame.original_bit_count));
    const int k = code.k();
    if (frame.block_size != k)
        throw std::invalid_argument("image_to_apriori: frame block size " +
                                    std::to_string(frame.block_size) + " vs code k " +
                                    std::to_string(k));
    const int blocks = frame.block_count();
    std::vector<std::vector<double>> apriori(blocks, std::vector<double>(code.n(), 0.0));
    bitcodec::Bits message(k);
    for (int b = 0; b < blocks; ++b) {
        const std::size_t base = static_cast<std::size_t>(b) * k;
        if (cfg.apriori_all_bits) {
            // padding tail bits are zero by construction, matching the framing
            for (int j = 0; j < k; ++j)
                message[j] = base + j < bits.size() ? bits[base + j] : 0;
            const auto cw = code.encode(message);
            for (int i = 0; i < code.n(); ++i) apriori[b][i] = cfg.alpha * (1.0 - 2.0 * cw[i]);
            // padding positions still carry no belief
            for (int j = 0; j < k; ++j)
                if (base + j >= bits.size()) apriori[b][code.systematic_cols()[j]] = 0.0;
        } else {
            for (int j = 0; j < k; ++j) {
                if (base + j >= bits.size()) break;  // padding: leave zero
                apriori[b][code.systematic_cols()[j]] = cfg.alpha * (1.0 - 2.0 * bits[base + j]);
            }
        }
    }
    return apriori;
}

std::vector<std::vector<double>> confidence_gated_apriori(const bitcodec::PixelImage& denoised,
                                                          const bitcodec::Bits& decoded_bits,
                                                          const std::vector<char>& block_converged,
                                                          const ldpc::SystematicCode& code,
                                                          const bitcodec::BitFrame& frame,
                                                          const TurboConfig& cfg) {
    const bitcodec::Bits recon = bitcodec::quantize_image(denoised);
    if (recon.size() != frame.original_bit_count || decoded_bits.size() != recon.size())
        throw std::invalid_argument("confidence_gated_apriori: bit count mismatch");
    if (block_converged.size() != static_cast<std::size_t>(frame.block_count()))
        throw std::invalid_argument("confidence_gated_apriori: converged flags per block required");
    const int k = code.k();
    if (frame.block_size != k)
        throw std::invalid_argument("confidence_gated_apriori: frame block size " +
                                    std::to_string(frame.block_size) + " vs code k " +
                                    std::to_string(k));
    double agree[8] = {}, total[8] = {};
    for (std::size_t g = 0; g < recon.size(); ++g) {
        if (block_converged[g / k]) continue;
        const int plane = static_cast<int>(g % 8);
        total[plane] += 1.0;
        agree[plane] += decoded_bits[g] == recon[g] ? 1.0 : 0.0;
    }
    double plane_alpha[8];
    for (int b = 0; b < 8; ++b) {
        const double q = total[b] > 0.0 ? agree[b] / total[b] : 0.0;
        plane_alpha[b] =
            (q <= 0.5 || cfg.alpha <= 0.0) ? 0.0 : std::min(cfg.alpha, std::log(q / (1.0 - q)));
    }
    std::vector<std::vector<double>> apriori(frame.block_count(),
                                             std::vector<double>(code.n(), 0.0));
    for (int b = 0; b < frame.block_count(); ++b) {
        const std::size_t base = static_cast<std::size_t>(b) * k;
        for (int j = 0; j < k; ++j) {
            if (base + j >= recon.size()) break;  // padding
            // converged blocks latch onto their own decision at the full
            // magnitude so the next round reproduces it instead of
            // re-deciding from the channel alone
            apriori[b][code.systematic_cols()[j]] =
                block_converged[b]
                    ? cfg.alpha * (1.0 - 2.0 * decoded_bits[base + j])
                    : plane_alpha[(base + j) % 8] * (1.0 - 2.0 * recon[base + j]);
        }
    }
    return apriori;
}

TurboResult run_turbo_decode(const std::vector<std::vector<double>>& received_blocks,
                             const ldpc::SystematicCode& code, const nn::Model<float>* model,
                             const phy::SnrConfig& snr, const TurboConfig& cfg,
                             const bitcodec::BitFrame& frame, int h, int w,
                             const bitcodec::PixelImage* reference, bool keep_round_images) {
    if (cfg.rounds < 1 || cfg.inner_bp_iters < 1)
        throw std::invalid_argument("run_turbo_decode: rounds and inner iterations must be >= 1");
    if (cfg.alpha < 0.0) throw std::invalid_argument("run_turbo_decode: alpha must be >= 0");
    if (cfg.semantic_enabled && (model == nullptr || model->layers.empty()))
        throw std::invalid_argument("run_turbo_decode: semantic stage enabled but no model loaded");
    if (static_cast<int>(received_blocks.size()) != frame.block_count())
        throw std::invalid_argument("run_turbo_decode: " + std::to_string(received_blocks.size()) +
                                    " received blocks for " + std::to_string(frame.block_count()) +
                                    " frame blocks");

    const int blocks = frame.block_count();
    std::vector<std::vector<double>> channel(blocks);
    for (int b = 0; b < blocks; ++b) channel[b] = phy::channel_llr(received_blocks[b], snr);

    std::vector<std::vector<double>> apriori(blocks, std::vector<double>(code.n(), 0.0));
    const bitcodec::Bits reference_bits = reference ? bitcodec::quantize_image(*reference) : bitcodec::Bits{};

    TurboResult result;
    std::vector<ldpc::BpResult> posteriors(blocks);
    for (int round = 1; round <= cfg.rounds; ++round) {
        int converged = 0;
        for (int b = 0; b < blocks; ++b) {
            posteriors[b] = ldpc::bp_decode(code.parity(), channel[b], apriori[b], cfg.inner_bp_iters);
            converged += posteriors[b].converged ? 1 : 0;
        }
        bitcodec::PixelImage channel_img = posterior_to_image(posteriors, code, frame, h, w);
        bitcodec::PixelImage semantic_img =
            cfg.semantic_enabled
                ? bitcodec::to_pixels(autoenc::codec_forward(*model, bitcodec::to_tensor(channel_img)))
                : channel_img;

        if (reference) {
            RoundMetrics rm;
            rm.round = round;
            rm.ber = metrics::ber(reference_bits, bitcodec::quantize_image(channel_img));
            rm.ed = metrics::euclidean_distance(*reference, channel_img);
            rm.psnr = metrics::psnr(*reference, channel_img);
            rm.ed_sem = metrics::euclidean_distance(*reference, semantic_img);
            rm.psnr_sem = metrics::psnr(*reference, semantic_img);
            rm.blocks_converged = converged;
            rm.blocks_total = blocks;
            result.trace.push_back(rm);
        }
        if (keep_round_images) {
            result.round_channel_images.push_back(channel_img);
            result.round_semantic_images.push_back(semantic_img);
        }

        const bool last = round == cfg.rounds || (cfg.early_stop && converged == blocks);
        if (last) {
            result.payload_bits = bitcodec::quantize_image(channel_img);
            result.payload_bits_semantic = bitcodec::quantize_image(semantic_img);
            result.channel_image = std::move(channel_img);
            result.semantic_image = std::move(semantic_img);
            break;
        }
        if (cfg.semantic_enabled) {
            if (cfg.adaptive_apriori) {
                std::vector<char> block_converged(blocks, 0);
                for (int b = 0; b < blocks; ++b) block_converged[b] = posteriors[b].converged;
                apriori =
                    confidence_gated_apriori(semantic_img, bitcodec::quantize_image(channel_img),
                                             block_converged, code, frame, cfg);
            } else {
                apriori = image_to_apriori(semantic_img, code, frame, cfg);
            }
        }
        // with the semantic stage disabled the a priori stays zero: the
        // baseline repeats the identical BP schedule every round
    }
    return result;
}

}  // namespace semturbo::turbo
