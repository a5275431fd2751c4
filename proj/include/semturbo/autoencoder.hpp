#ifndef SEMTURBO_AUTOENCODER_HPP
#define SEMTURBO_AUTOENCODER_HPP

#include <cstdint>
#include <vector>

#include "semturbo/bitcodec.hpp"
#include "semturbo/model.hpp"
#include "semturbo/rng.hpp"

namespace semturbo::autoenc {

// Encoder/decoder layer stacks plus the shapes they imply.
struct SemanticCodecSpec {
    std::vector<nn::ConvLayerSpec> encoder;
    std::vector<nn::ConvLayerSpec> decoder;
    int in_c = 3, in_h = 96, in_w = 96;
    int latent_c = 0, latent_h = 0, latent_w = 0;  // derived on construction

    double compression_ratio() const {
        return static_cast<double>(latent_c) * latent_h * latent_w /
               (static_cast<double>(in_c) * in_h * in_w);
    }
};

// 96x96 RGB -> 16x23x23 latent and back; relu everywhere except the
// final sigmoid that pins the output to [0,1].
SemanticCodecSpec default_codec_spec();

// Validates the shape chain and returns a spec with latent dims filled in.
SemanticCodecSpec resolve_codec_spec(SemanticCodecSpec spec);

nn::Model<float> build_codec(const SemanticCodecSpec& spec, std::uint64_t seed);

struct CorruptionSpec {
    enum class Mode { none, bitflip, gaussian };
    Mode mode = Mode::bitflip;
    double ber_low = 0.001;
    double ber_high = 0.05;
    double gaussian_sigma = 0.1;
};

struct TrainingConfig {
    double learning_rate = 0.003;
    int batch_size = 64;
    int epochs = 200;
    CorruptionSpec corruption;
    std::uint64_t seed = 1;
};

// bitflip: quantize to bytes, flip each bit i.i.d. with a probability
// drawn once per image from [ber_low, ber_high]; gaussian: add noise and
// clamp; none: identity. Input values are treated as [0,1].
nn::Tensor4<float> corrupt_for_training(const nn::Tensor4<float>& image, const CorruptionSpec& spec,
                                        rng::Stream& rs);

struct EpochStats {
    int epoch = 0;
    double mean_loss = 0.0;
};

// Denoising objective: minimize mse(model(corrupt(x)), x) with Adam.
// Deterministic given cfg.seed; shuffles each epoch and keeps the last
// partial batch.
std::vector<EpochStats> train(nn::Model<float>& model,
                              const std::vector<bitcodec::PixelImage>& dataset,
                              const TrainingConfig& cfg);

// Full encoder+decoder pass with the output clamped to [0,1].
nn::Tensor4<float> codec_forward(const nn::Model<float>& model, const nn::Tensor4<float>& image);

}  // namespace semturbo::autoenc

#endif
