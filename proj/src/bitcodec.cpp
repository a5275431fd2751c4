#include "semturbo/bitcodec.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace semturbo::bitcodec {

Bits quantize_image(const PixelImage& img) {
    Bits bits;
    bits.reserve(img.data.size() * 8);
    for (std::uint8_t byte : img.data)
        for (int b = 7; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((byte >> b) & 1));
    return bits;
}

PixelImage dequantize_bits(std::span<const std::uint8_t> bits, int h, int w) {
    const std::size_t expected = static_cast<std::size_t>(3) * h * w * 8;
    if (bits.size() != expected)
        throw std::invalid_argument("dequantize_bits: got " + std::to_string(bits.size()) +
                                    " bits, expected " + std::to_string(expected) + " for 3x" +
                                    std::to_string(h) + "x" + std::to_string(w));
    PixelImage img(h, w);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        std::uint8_t byte = 0;
        for (int b = 0; b < 8; ++b) byte = static_cast<std::uint8_t>((byte << 1) | bits[i * 8 + b]);
        img.data[i] = byte;
    }
    return img;
}

BitFrame frame_image(Bits bits, int block_size) {
    if (block_size < 1) throw std::invalid_argument("frame_image: block size must be >= 1");
    BitFrame frame;
    frame.original_bit_count = bits.size();
    frame.block_size = block_size;
    const std::size_t blocks = (bits.size() + block_size - 1) / block_size;
    bits.resize(blocks * block_size, 0);
    frame.bits = std::move(bits);
    return frame;
}

Bits deframe(const BitFrame& frame) {
    return Bits(frame.bits.begin(), frame.bits.begin() + frame.original_bit_count);
}

nn::Tensor4<float> to_tensor(const PixelImage& img) {
    nn::Tensor4<float> t(1, 3, img.h, img.w);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        t.data[i] = static_cast<float>(img.data[i]) * (1.0f / 255.0f);
    return t;
}

PixelImage to_pixels(const nn::Tensor4<float>& t) {
    if (t.n != 1 || t.c != 3)
        throw std::invalid_argument("to_pixels: expected shape (1,3,h,w), got " + t.shape_str());
    PixelImage img(t.h, t.w);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const float v = t.data[i];
        const float clamped = v < 0.f ? 0.f : (v > 1.f ? 1.f : v);
        img.data[i] = static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
    }
    return img;
}

}  // namespace semturbo::bitcodec
