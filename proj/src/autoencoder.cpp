#include "semturbo/autoencoder.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace semturbo::autoenc {

SemanticCodecSpec default_codec_spec() {
    SemanticCodecSpec spec;
    spec.encoder = {
        {27, 4, 4, 2, nn::LayerKind::conv, nn::Activation::relu},
        {16, 3, 3, 2, nn::LayerKind::conv, nn::Activation::relu},
    };
    spec.decoder = {
        {27, 3, 3, 2, nn::LayerKind::tconv, nn::Activation::relu},
        {3, 4, 4, 2, nn::LayerKind::tconv, nn::Activation::sigmoid},
    };
    return resolve_codec_spec(spec);
}

SemanticCodecSpec resolve_codec_spec(SemanticCodecSpec spec) {
    int c = spec.in_c, h = spec.in_h, w = spec.in_w;
    for (const auto& l : spec.encoder) {
        if (l.kind != nn::LayerKind::conv)
            throw std::invalid_argument("codec spec: encoder layers must be conv");
        h = nn::conv_out_dim(h, l.kernel_h, l.stride);
        w = nn::conv_out_dim(w, l.kernel_w, l.stride);
        c = l.filters;
    }
    spec.latent_c = c;
    spec.latent_h = h;
    spec.latent_w = w;
    for (const auto& l : spec.decoder) {
        if (l.kind != nn::LayerKind::tconv)
            throw std::invalid_argument("codec spec: decoder layers must be tconv");
        h = nn::tconv_out_dim(h, l.kernel_h, l.stride);
        w = nn::tconv_out_dim(w, l.kernel_w, l.stride);
        c = l.filters;
    }
    if (c != spec.in_c || h != spec.in_h || w != spec.in_w)
        throw std::invalid_argument("codec spec: decoder restores (" + std::to_string(c) + "," +
                                    std::to_string(h) + "," + std::to_string(w) +
                                    ") instead of the input shape");
    return spec;
}

nn::Model<float> build_codec(const SemanticCodecSpec& spec, std::uint64_t seed) {
    auto rs = rng::derive(seed, rng::StreamTag::weight_init);
    nn::Model<float> m;
    int c = spec.in_c;
    for (const auto& l : spec.encoder) {
        m.layers.push_back(nn::make_layer<float>(l, c, rs));
        c = l.filters;
    }
    for (const auto& l : spec.decoder) {
        m.layers.push_back(nn::make_layer<float>(l, c, rs));
        c = l.filters;
    }
    return m;
}

namespace {

inline std::uint8_t quantize_sample(float v) {
    const float c = v < 0.f ? 0.f : (v > 1.f ? 1.f : v);
    return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

// flip positions arrive via geometric skips, one stream draw per flip
void flip_bits(std::vector<std::uint8_t>& bytes, double p, rng::Stream& rs) {
    if (p <= 0.0) return;
    const std::size_t total_bits = bytes.size() * 8;
    const double log1mp = std::log1p(-p);
    std::size_t pos = 0;
    while (true) {
        double u = rs.next_unit();
        while (u <= 0.0) u = rs.next_unit();
        pos += static_cast<std::size_t>(std::log(u) / log1mp);
        if (pos >= total_bits) break;
        bytes[pos >> 3] ^= static_cast<std::uint8_t>(0x80u >> (pos & 7));
        ++pos;
    }
}

}  // namespace

nn::Tensor4<float> corrupt_for_training(const nn::Tensor4<float>& image, const CorruptionSpec& spec,
                                        rng::Stream& rs) {
    switch (spec.mode) {
        case CorruptionSpec::Mode::none:
            return image;
        case CorruptionSpec::Mode::gaussian: {
            nn::Tensor4<float> out = image;
            for (float& v : out.data) {
                v += static_cast<float>(spec.gaussian_sigma * rs.next_gaussian());
                v = v < 0.f ? 0.f : (v > 1.f ? 1.f : v);
            }
            return out;
        }
        case CorruptionSpec::Mode::bitflip: {
            if (spec.ber_low < 0.0 || spec.ber_high < spec.ber_low || spec.ber_high > 0.5)
                throw std::invalid_argument("corrupt_for_training: ber range must satisfy 0 <= low <= high <= 0.5");
            const double p = spec.ber_low + (spec.ber_high - spec.ber_low) * rs.next_unit();
            std::vector<std::uint8_t> bytes(image.size());
            for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = quantize_sample(image.data[i]);
            flip_bits(bytes, p, rs);
            nn::Tensor4<float> out(image.n, image.c, image.h, image.w);
            for (std::size_t i = 0; i < bytes.size(); ++i)
                out.data[i] = static_cast<float>(bytes[i]) * (1.0f / 255.0f);
            return out;
        }
    }
    throw std::invalid_argument("corrupt_for_training: unknown corruption mode");
}

std::vector<EpochStats> train(nn::Model<float>& model,
                              const std::vector<bitcodec::PixelImage>& dataset,
                              const TrainingConfig& cfg) {
    if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
    if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (cfg.batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");

    nn::AdamConfig adam;
    adam.learning_rate = cfg.learning_rate;

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<EpochStats> log;
    log.reserve(cfg.epochs);
    nn::ForwardTrace<float> trace;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto shuffle_rs = rng::derive(cfg.seed, rng::StreamTag::shuffle, epoch);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rs.next_below(i)]);

        double epoch_loss = 0.0;
        std::size_t cursor = 0;
        while (cursor < order.size()) {
            const std::size_t batch_n = std::min<std::size_t>(cfg.batch_size, order.size() - cursor);
            model.zero_grads();
            const float inv_batch = 1.0f / static_cast<float>(batch_n);
            for (std::size_t s = 0; s < batch_n; ++s) {
                const std::size_t idx = order[cursor + s];
                auto corrupt_rs = rng::derive(cfg.seed, rng::StreamTag::corruption, epoch, cursor + s);
                const nn::Tensor4<float> clean = bitcodec::to_tensor(dataset[idx]);
                const nn::Tensor4<float> noisy = corrupt_for_training(clean, cfg.corruption, corrupt_rs);
                nn::Tensor4<float> pred = nn::model_forward(model, noisy, &trace);
                auto [loss, grad] = nn::mse_loss(pred, clean);
                epoch_loss += loss;
                for (float& g : grad.data) g *= inv_batch;
                nn::model_backward(model, trace, std::move(grad));
            }
            nn::adam_step(model, adam);
            cursor += batch_n;
        }
        log.push_back({epoch, epoch_loss / static_cast<double>(order.size())});
    }
    return log;
}

nn::Tensor4<float> codec_forward(const nn::Model<float>& model, const nn::Tensor4<float>& image) {
    if (model.layers.empty()) throw std::invalid_argument("codec_forward: model has no layers");
    nn::Tensor4<float> out = nn::model_forward(model, image);
    nn::require_same_shape(out, image, "codec_forward");
    for (float& v : out.data) v = v < 0.f ? 0.f : (v > 1.f ? 1.f : v);
    return out;
}

}  // namespace semturbo::autoenc
