#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "semturbo/dataio.hpp"
#include "testdata.hpp"

using namespace semturbo;
using bitcodec::PixelImage;

namespace {

std::filesystem::path temp_dir(const char* name) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("synthetic CIFAR batches read back deterministically") {
    const auto dir = temp_dir("semturbo_cifar");
    testdata::write_synthetic_cifar(dir.string(), 20, 10, 5);

    const auto train = dataio::read_cifar10(dir.string(), dataio::Split::train, 20);
    REQUIRE(train.size() == 20);
    for (const auto& img : train) {
        CHECK(img.h == 32);
        CHECK(img.w == 32);
        CHECK(img.data.size() == 3072);
    }
    const auto test = dataio::read_cifar10(dir.string(), dataio::Split::test);
    CHECK(test.size() == 10);

    const auto again = dataio::read_cifar10(dir.string(), dataio::Split::test);
    for (std::size_t i = 0; i < test.size(); ++i) CHECK(test[i].data == again[i].data);

    const auto limited = dataio::read_cifar10(dir.string(), dataio::Split::test, 3);
    CHECK(limited.size() == 3);
}

TEST_CASE("a truncated batch file is a format error with an offset") {
    const auto dir = temp_dir("semturbo_cifar_bad");
    testdata::write_synthetic_cifar(dir.string(), 4, 4, 6);
    const auto path = dir / "test_batch.bin";
    std::filesystem::resize_file(path, 4 * 3073 + 1);
    CHECK_THROWS_WITH_AS(dataio::read_cifar10(dir.string(), dataio::Split::test),
                         doctest::Contains("byte offset"), std::runtime_error);
    CHECK_THROWS_AS(dataio::read_cifar10("/nonexistent/dir", dataio::Split::test),
                    std::runtime_error);
}

TEST_CASE("nearest-neighbor resize replicates pixels") {
    PixelImage constant(4, 4);
    for (auto& v : constant.data) v = 77;
    const auto up = dataio::resize_nn(constant, 3);
    CHECK(up.h == 12);
    CHECK(up.w == 12);
    for (auto v : up.data) CHECK(v == 77);

    PixelImage dot(32, 32);
    dot.at(0, 0, 0) = dot.at(1, 0, 0) = dot.at(2, 0, 0) = 255;
    const auto big = dataio::resize_nn(dot, 3);
    CHECK(big.h == 96);
    CHECK(big.w == 96);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) {
            const bool inside = y < 3 && x < 3;
            CHECK(big.at(0, y, x) == (inside ? 255 : 0));
        }

    // no new pixel values introduced
    auto rs = rng::derive(3, rng::StreamTag::message_bits);
    const auto img = testdata::synth_image32(rs);
    const auto scaled = dataio::resize_nn(img, 3);
    bool value_set_ok = true;
    for (int c = 0; c < 3 && value_set_ok; ++c)
        for (int y = 0; y < scaled.h && value_set_ok; ++y)
            for (int x = 0; x < scaled.w; ++x)
                if (scaled.at(c, y, x) != img.at(c, y / 3, x / 3)) {
                    value_set_ok = false;
                    break;
                }
    CHECK(value_set_ok);

    CHECK_THROWS_AS(dataio::resize_nn(constant, 0), std::invalid_argument);
}

TEST_CASE("png write/read round-trips losslessly") {
    const auto dir = temp_dir("semturbo_png");
    auto rs = rng::derive(4, rng::StreamTag::message_bits);
    PixelImage img(96, 96);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rs.next_below(256));
    const auto path = (dir / "random.png").string();
    dataio::write_png(img, path);
    const auto back = dataio::read_png(path);
    CHECK(back.h == img.h);
    CHECK(back.w == img.w);
    CHECK(back.data == img.data);
}

TEST_CASE("png handles black frames and gradient cards") {
    const auto dir = temp_dir("semturbo_png");
    PixelImage black(96, 96);
    dataio::write_png(black, (dir / "black.png").string());
    CHECK(dataio::read_png((dir / "black.png").string()).data == black.data);

    PixelImage card(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            card.at(0, y, x) = static_cast<std::uint8_t>(4 * x);
            card.at(1, y, x) = static_cast<std::uint8_t>(4 * y);
            card.at(2, y, x) = 128;
        }
    const auto path = (dir / "card.png").string();
    dataio::write_png(card, path);
    const auto back = dataio::read_png(path);
    CHECK(back.at(0, 0, 0) == 0);
    CHECK(back.at(0, 0, 63) == 252);
    CHECK(back.at(1, 63, 0) == 252);
    CHECK(back.at(2, 31, 31) == 128);
}
