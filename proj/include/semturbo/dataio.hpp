#ifndef SEMTURBO_DATAIO_HPP
#define SEMTURBO_DATAIO_HPP

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "semturbo/bitcodec.hpp"

namespace semturbo::dataio {

enum class Split { train, test };

// CIFAR-10 binary batches: 3073-byte records (label + 3x32x32 samples).
// train reads data_batch_1..5.bin, test reads test_batch.bin; labels are
// discarded. Throws on missing files or sizes that are not record
// multiples, reporting the byte offset.
std::vector<bitcodec::PixelImage> read_cifar10(const std::string& dir, Split split,
                                               std::size_t limit = std::numeric_limits<std::size_t>::max());

// integer-factor nearest-neighbor upscale (pixel replication)
bitcodec::PixelImage resize_nn(const bitcodec::PixelImage& img, int factor);

// lossless 8-bit RGB PNG
void write_png(const bitcodec::PixelImage& img, const std::string& path);
bitcodec::PixelImage read_png(const std::string& path);

}  // namespace semturbo::dataio

#endif
