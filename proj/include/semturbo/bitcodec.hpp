#ifndef SEMTURBO_BITCODEC_HPP
#define SEMTURBO_BITCODEC_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "semturbo/tensor.hpp"

namespace semturbo::bitcodec {

// 3-channel 8-bit image, channel-major then row-major (same layout as a
// CIFAR-10 record body).
struct PixelImage {
    int h = 0, w = 0;
    std::vector<std::uint8_t> data;  // size 3*h*w

    PixelImage() = default;
    PixelImage(int h_, int w_) : h(h_), w(w_), data(static_cast<std::size_t>(3) * h_ * w_, 0) {}

    std::uint8_t& at(int ch, int y, int x) {
        return data[(static_cast<std::size_t>(ch) * h + y) * w + x];
    }
    std::uint8_t at(int ch, int y, int x) const {
        return data[(static_cast<std::size_t>(ch) * h + y) * w + x];
    }
    bool same_shape(const PixelImage& o) const { return h == o.h && w == o.w; }
    std::size_t sample_count() const { return data.size(); }
};

using Bits = std::vector<std::uint8_t>;  // one bit per element, values 0/1

// MSB-first natural binary per byte, bytes in image storage order.
Bits quantize_image(const PixelImage& img);

// Inverse of quantize_image; bit count must equal 3*h*w*8.
PixelImage dequantize_bits(std::span<const std::uint8_t> bits, int h, int w);

// A bit sequence zero-padded to a whole number of k-bit blocks.
struct BitFrame {
    Bits bits;                          // padded to block_count*block_size
    std::size_t original_bit_count = 0;
    int block_size = 0;

    int block_count() const {
        return block_size == 0 ? 0 : static_cast<int>(bits.size() / block_size);
    }
    std::span<const std::uint8_t> block(int i) const {
        return {bits.data() + static_cast<std::size_t>(i) * block_size,
                static_cast<std::size_t>(block_size)};
    }
};

BitFrame frame_image(Bits bits, int block_size);
Bits deframe(const BitFrame& frame);

// pixel<->[0,1] tensor bridges used by the auto-encoder
nn::Tensor4<float> to_tensor(const PixelImage& img);
PixelImage to_pixels(const nn::Tensor4<float>& t);

}  // namespace semturbo::bitcodec

#endif
