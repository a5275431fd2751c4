#include "semturbo/dataio.hpp"

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace semturbo::dataio {

namespace {

constexpr std::size_t kRecordBytes = 3073;  // 1 label + 3*32*32 samples
constexpr int kCifarDim = 32;

void read_batch_file(const std::string& path, std::vector<bitcodec::PixelImage>& out,
                     std::size_t limit) {
    std::error_code ec;
    const auto file_size = std::filesystem::file_size(path, ec);
    if (ec) throw std::runtime_error("read_cifar10: cannot stat " + path);
    if (file_size % kRecordBytes != 0)
        throw std::runtime_error("read_cifar10: " + path + " size " + std::to_string(file_size) +
                                 " is not a multiple of " + std::to_string(kRecordBytes) +
                                 "; trailing partial record at byte offset " +
                                 std::to_string((file_size / kRecordBytes) * kRecordBytes));
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_cifar10: cannot open " + path);
    const std::size_t records = file_size / kRecordBytes;
    std::vector<char> record(kRecordBytes);
    for (std::size_t r = 0; r < records && out.size() < limit; ++r) {
        is.read(record.data(), kRecordBytes);
        if (static_cast<std::size_t>(is.gcount()) != kRecordBytes)
            throw std::runtime_error("read_cifar10: short read in " + path + " at byte offset " +
                                     std::to_string(r * kRecordBytes));
        bitcodec::PixelImage img(kCifarDim, kCifarDim);
        // record[0] is the label, skipped
        for (std::size_t i = 0; i < img.data.size(); ++i)
            img.data[i] = static_cast<std::uint8_t>(record[i + 1]);
        out.push_back(std::move(img));
    }
}

[[noreturn]] void png_fail(const std::string& what, const std::string& path) {
    throw std::runtime_error("png: " + what + " (" + path + ")");
}

}  // namespace

std::vector<bitcodec::PixelImage> read_cifar10(const std::string& dir, Split split,
                                                std::size_t limit) {
    std::vector<bitcodec::PixelImage> out;
    if (split == Split::test) {
        read_batch_file(dir + "/test_batch.bin", out, limit);
    } else {
        for (int b = 1; b <= 5 && out.size() < limit; ++b)
            read_batch_file(dir + "/data_batch_" + std::to_string(b) + ".bin", out, limit);
    }
    return out;
}

bitcodec::PixelImage resize_nn(const bitcodec::PixelImage& img, int factor) {
    if (factor < 1) throw std::invalid_argument("resize_nn: factor must be a positive integer");
    bitcodec::PixelImage out(img.h * factor, img.w * factor);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < out.h; ++y)
            for (int x = 0; x < out.w; ++x) out.at(c, y, x) = img.at(c, y / factor, x / factor);
    return out;
}

void write_png(const bitcodec::PixelImage& img, const std::string& path) {
    if (img.h < 1 || img.w < 1) throw std::invalid_argument("write_png: empty image");
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) throw std::runtime_error("write_png: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) png_fail("create_write_struct failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        png_fail("create_info_struct failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        png_fail("write error", path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.w, img.h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.w) * 3);
    for (int y = 0; y < img.h; ++y) {
        for (int x = 0; x < img.w; ++x)
            for (int c = 0; c < 3; ++c) row[x * 3 + c] = img.at(c, y, x);
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

bitcodec::PixelImage read_png(const std::string& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!fp) throw std::runtime_error("read_png: cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) png_fail("create_read_struct failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        png_fail("create_info_struct failed", path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        png_fail("read error", path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    // normalize anything reasonable to 8-bit RGB
    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    bitcodec::PixelImage img(h, w);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) img.at(c, y, x) = row[x * 3 + c];
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace semturbo::dataio
