#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ca/datasets.hpp"
#include "ca/hash.hpp"
#include "ca/rng.hpp"

#include "oracles.hpp"

namespace {

ca::GrayImage constant_image(int h, int w, double value) {
    return ca::make_image(h, w, std::vector<double>(static_cast<std::size_t>(h) * w, value));
}

// Texture squeezed into [lo, hi] so later shifts or noise cannot clamp.
ca::GrayImage ranged_texture(int h, int w, std::uint64_t seed, double lo, double hi) {
    ca::GrayImage img = ca::texture_image(h, w, seed);
    for (double& p : img.pixels) p = lo + p * (hi - lo);
    return img;
}

ca::GrayImage shifted(const ca::GrayImage& img, double c) {
    std::vector<double> px = img.pixels;
    for (double& p : px) p += c;
    return ca::make_image(img.height, img.width, std::move(px));
}

} // namespace

TEST_CASE("bilinear resize maps constants to constants") {
    const ca::GrayImage img = constant_image(5, 7, 0.5);
    for (const auto [h, w] : {std::pair{8, 8}, std::pair{3, 11}, std::pair{1, 1}}) {
        const ca::GrayImage out = ca::resize_bilinear(img, h, w);
        for (double p : out.pixels) REQUIRE(p == 0.5);
    }
}

TEST_CASE("bilinear resize to the same size copies pixels") {
    const ca::GrayImage img = ca::texture_image(9, 13, 3);
    const ca::GrayImage out = ca::resize_bilinear(img, 9, 13);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        REQUIRE(out.pixels[i] == Catch::Approx(img.pixels[i]).margin(1e-12));
}

TEST_CASE("bilinear downsample of a 2x2 checker column pair is its center value") {
    const ca::GrayImage img = ca::make_image(2, 2, {0.0, 1.0, 0.0, 1.0});
    const ca::GrayImage out = ca::resize_bilinear(img, 1, 1);
    REQUIRE(out.pixels[0] == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("ahash of a constant image is zero") {
    REQUIRE(ca::ahash(constant_image(16, 16, 0.3)).bits == 0x0ULL);
    REQUIRE(ca::ahash(constant_image(8, 8, 0.0)).bits == 0x0ULL);
}

TEST_CASE("ahash packs a half-dark half-bright image as 0x0F0F0F0F0F0F0F0F") {
    std::vector<double> px(64, 0.0);
    for (int r = 0; r < 8; ++r)
        for (int c = 4; c < 8; ++c) px[static_cast<std::size_t>(r * 8 + c)] = 1.0;
    const ca::GrayImage img = ca::make_image(8, 8, std::move(px));
    REQUIRE(ca::ahash(img).bits == 0x0F0F0F0F0F0F0F0FULL);
}

TEST_CASE("dhash of a strictly increasing ramp is all ones") {
    std::vector<double> px;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 9; ++c) px.push_back(c / 9.0);
    const ca::GrayImage img = ca::make_image(8, 9, std::move(px));
    REQUIRE(ca::dhash(img).bits == 0xFFFFFFFFFFFFFFFFULL);
}

TEST_CASE("dhash of a constant image is zero") {
    REQUIRE(ca::dhash(constant_image(12, 10, 0.7)).bits == 0x0ULL);
}

TEST_CASE("phash of a constant image is zero") {
    REQUIRE(ca::phash(constant_image(32, 32, 0.4)).bits == 0x0ULL);
    REQUIRE(ca::phash(constant_image(17, 23, 0.9)).bits == 0x0ULL);
}

TEST_CASE("all three hashes are invariant under brightness shifts") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ca::GrayImage img = ranged_texture(48, 48, seed, 0.1, 0.8);
        const ca::GrayImage bright = shifted(img, 0.1);
        REQUIRE(ca::ahash(img) == ca::ahash(bright));
        REQUIRE(ca::dhash(img) == ca::dhash(bright));
        REQUIRE(ca::phash(img) == ca::phash(bright));
    }
}

TEST_CASE("phash matches a direct-summation DCT oracle on a pure cosine") {
    // Image aligned with the (1,0) DCT basis function: exactly one positive AC
    // coefficient, so exactly one hash bit.
    const int n = 32;
    std::vector<double> px;
    const double pi = 3.141592653589793238462643383279502884;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) px.push_back(0.5 + 0.25 * std::cos(pi * (2 * r + 1) / 64.0));
    const ca::GrayImage img = ca::make_image(n, n, std::move(px));

    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            if (u == 0 && v == 0) continue;
            const double coef = oracle::direct_dct_coefficient(img, u, v);
            if (u == 1 && v == 0)
                REQUIRE(coef > 1.0); // 0.25 * 16 = 4 up to normalization
            else
                REQUIRE(std::abs(coef) <= 1e-10);
        }
    REQUIRE(ca::phash(img).bits == (1ULL << (63 - 8)));
}

TEST_CASE("hamming distance counts differing bits of same-kind hashes") {
    const ca::PerceptualHash a{0xF000000000000000ULL, ca::HashKind::DHash};
    const ca::PerceptualHash b{0x0F00000000000000ULL, ca::HashKind::DHash};
    REQUIRE(ca::hamming(a, a) == 0);
    REQUIRE(ca::hamming(a, b) == 8);
    REQUIRE(ca::hamming(b, a) == 8);

    const ca::PerceptualHash other{0, ca::HashKind::AHash};
    REQUIRE_THROWS_AS(ca::hamming(a, other), ca::hash_error);
}

TEST_CASE("hamming is a metric on random hash triples") {
    ca::Stream rng(404);
    for (int t = 0; t < 200; ++t) {
        const ca::PerceptualHash a{rng.next_u64(), ca::HashKind::PHash};
        const ca::PerceptualHash b{rng.next_u64(), ca::HashKind::PHash};
        const ca::PerceptualHash c{rng.next_u64(), ca::HashKind::PHash};
        REQUIRE(ca::hamming(a, a) == 0);
        REQUIRE(ca::hamming(a, b) == ca::hamming(b, a));
        REQUIRE(ca::hamming(a, c) <= ca::hamming(a, b) + ca::hamming(b, c));
    }
}

TEST_CASE("is_duplicate applies the threshold inclusively") {
    const ca::PerceptualHash a{0, ca::HashKind::DHash};
    REQUIRE(ca::is_duplicate(a, a, 0));
    const ca::PerceptualHash eleven{0x7FF, ca::HashKind::DHash}; // 11 bits set
    REQUIRE_FALSE(ca::is_duplicate(a, eleven, 10));
    REQUIRE(ca::is_duplicate(a, eleven, 11));
    REQUIRE_THROWS_AS(ca::is_duplicate(a, a, -1), ca::parameter_error);
    REQUIRE_THROWS_AS(ca::is_duplicate(a, a, 65), ca::parameter_error);
}

TEST_CASE("dhash flags noised copies and separates unrelated textures") {
    const int pairs = 50;
    int duplicates = 0;
    std::vector<int> unrelated;
    for (int t = 0; t < pairs; ++t) {
        const ca::GrayImage img =
            ranged_texture(64, 64, 3000 + static_cast<std::uint64_t>(t), 0.1, 0.9);
        ca::Stream noise(8000 + static_cast<std::uint64_t>(t));
        std::vector<double> px = img.pixels;
        for (double& p : px) p += 0.02 * (2.0 * noise.uniform01() - 1.0);
        const ca::GrayImage noised = ca::make_image(64, 64, std::move(px));
        if (ca::is_duplicate(ca::dhash(img), ca::dhash(noised), 10)) ++duplicates;

        const ca::GrayImage other =
            ranged_texture(64, 64, 500000 + static_cast<std::uint64_t>(t), 0.1, 0.9);
        unrelated.push_back(ca::hamming(ca::dhash(img), ca::dhash(other)));
    }
    REQUIRE(duplicates >= static_cast<int>(0.95 * pairs));
    std::sort(unrelated.begin(), unrelated.end());
    REQUIRE(unrelated[pairs / 2] >= 20);
}

TEST_CASE("hash strings round trip through the text form") {
    const ca::PerceptualHash h{0xDEADBEEF01234567ULL, ca::HashKind::PHash};
    const std::string text = ca::to_string(h);
    REQUIRE(text == "phash:deadbeef01234567");
    REQUIRE(ca::parse_hash(text) == h);
    REQUIRE(ca::to_string(ca::PerceptualHash{0, ca::HashKind::DHash}) ==
            "dhash:0000000000000000");
    REQUIRE_THROWS_AS(ca::parse_hash("dhash:123"), ca::format_error);
    REQUIRE_THROWS_AS(ca::parse_hash("dhash:00000000000000zz"), ca::format_error);
    REQUIRE_THROWS_AS(ca::parse_hash("nothash:0000000000000000"), ca::parameter_error);
}

TEST_CASE("make_image validates and clamps") {
    REQUIRE_THROWS_AS(ca::make_image(0, 4, {}), ca::parameter_error);
    REQUIRE_THROWS_AS(ca::make_image(2, 2, {0, 0, 0}), ca::dimension_error);
    REQUIRE_THROWS_AS(ca::make_image(1, 2, {0.0, std::nan("")}), ca::parameter_error);
    const ca::GrayImage img = ca::make_image(1, 3, {-0.5, 0.25, 1.75});
    REQUIRE(img.pixels == std::vector<double>{0.0, 0.25, 1.0});
}
