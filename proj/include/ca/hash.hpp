#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ca/errors.hpp"

// Perceptual hashing: 64-bit digests designed so visually similar images land
// at small Hamming distance. Three standard constructions are provided
// (average hash, difference hash, DCT hash); all comparisons are strict ">"
// so ties produce 0 bits, and bits are packed row-major with bit 0 as the
// most significant bit.

namespace ca {

struct GrayImage {
    int height = 0;
    int width = 0;
    std::vector<double> pixels; // row-major, values in [0,1]

    double at(int r, int c) const {
        return pixels[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(c)];
    }
    double& at(int r, int c) {
        return pixels[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(c)];
    }
};

// Validates finiteness and clamps pixel values into [0,1].
inline GrayImage make_image(int height, int width, std::vector<double> pixels) {
    if (height < 1 || width < 1)
        throw parameter_error("image dimensions must be positive");
    if (pixels.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width))
        throw dimension_error("pixel count does not match image dimensions");
    for (double& p : pixels) {
        if (!std::isfinite(p)) throw parameter_error("image pixels must be finite");
        p = std::clamp(p, 0.0, 1.0);
    }
    return GrayImage{height, width, std::move(pixels)};
}

enum class HashKind : std::uint8_t { AHash, DHash, PHash };

inline const char* to_string(HashKind k) {
    switch (k) {
        case HashKind::AHash: return "ahash";
        case HashKind::DHash: return "dhash";
        case HashKind::PHash: return "phash";
    }
    return "unknown";
}

inline HashKind parse_hash_kind(const std::string& name) {
    if (name == "ahash") return HashKind::AHash;
    if (name == "dhash") return HashKind::DHash;
    if (name == "phash") return HashKind::PHash;
    throw parameter_error("unknown hash kind '" + name + "'");
}

struct PerceptualHash {
    std::uint64_t bits = 0;
    HashKind kind = HashKind::AHash;

    bool operator==(const PerceptualHash&) const = default;
};

// Bilinear resampling with pixel-center alignment. The interpolation is
// written in lerp form a + t(b-a) so a constant image maps to the exact same
// constant and same-size resizes copy pixels bit for bit.
inline GrayImage resize_bilinear(const GrayImage& img, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1)
        throw parameter_error("resize dimensions must be positive");

    const auto lerp = [](double a, double b, double t) { return a + t * (b - a); };
    GrayImage out;
    out.height = out_h;
    out.width = out_w;
    out.pixels.resize(static_cast<std::size_t>(out_h) * static_cast<std::size_t>(out_w));

    const double sy_scale = static_cast<double>(img.height) / out_h;
    const double sx_scale = static_cast<double>(img.width) / out_w;
    for (int r = 0; r < out_h; ++r) {
        double sy = (r + 0.5) * sy_scale - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = std::min(static_cast<int>(sy), img.height - 1);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = sy - y0;
        for (int c = 0; c < out_w; ++c) {
            double sx = (c + 0.5) * sx_scale - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = std::min(static_cast<int>(sx), img.width - 1);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = sx - x0;
            const double top = lerp(img.at(y0, x0), img.at(y0, x1), fx);
            const double bottom = lerp(img.at(y1, x0), img.at(y1, x1), fx);
            out.at(r, c) = lerp(top, bottom, fy);
        }
    }
    return out;
}

namespace detail {

inline void set_bit(std::uint64_t& bits, int index) { bits |= 1ULL << (63 - index); }

// Orthonormal DCT-II coefficients of the leading block x block corner of a
// size x size image. For k >= 1 the basis row sums to zero, so any constant
// offset of the input is algebraically invisible; computing those
// coefficients on line[i] - line[0] exploits this to make AC coefficients of
// constant input exactly zero.
template <int Size, int Block>
std::array<double, Block * Block> dct_block(const GrayImage& img) {
    static_assert(Block <= Size);
    struct Basis {
        std::array<std::array<double, Size>, Block> row; // row[k][i]
        Basis() {
            const double pi = 3.141592653589793238462643383279502884;
            for (int k = 0; k < Block; ++k) {
                const double alpha = k == 0 ? std::sqrt(1.0 / Size) : std::sqrt(2.0 / Size);
                for (int i = 0; i < Size; ++i)
                    row[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
                        alpha * std::cos(pi * (2 * i + 1) * k / (2.0 * Size));
            }
        }
    };
    static const Basis basis;

    const auto transform = [](const std::array<double, Size>& x) {
        std::array<double, Block> out{};
        for (int k = 0; k < Block; ++k) {
            double acc = 0.0;
            if (k == 0) {
                for (int i = 0; i < Size; ++i)
                    acc += basis.row[0][static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
            } else {
                for (int i = 0; i < Size; ++i)
                    acc += basis.row[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                           (x[static_cast<std::size_t>(i)] - x[0]);
            }
            out[static_cast<std::size_t>(k)] = acc;
        }
        return out;
    };

    // Rows first, then columns of the row-transformed data.
    std::array<std::array<double, Size>, Block> row_pass{}; // [k][source row]
    for (int r = 0; r < Size; ++r) {
        std::array<double, Size> line{};
        for (int c = 0; c < Size; ++c) line[static_cast<std::size_t>(c)] = img.at(r, c);
        const std::array<double, Block> coefs = transform(line);
        for (int k = 0; k < Block; ++k)
            row_pass[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] =
                coefs[static_cast<std::size_t>(k)];
    }

    std::array<double, Block * Block> out{};
    for (int v = 0; v < Block; ++v) { // v indexes horizontal frequency (row coefficient)
        const std::array<double, Size>& column = row_pass[static_cast<std::size_t>(v)];
        const std::array<double, Block> coefs = transform(column);
        for (int u = 0; u < Block; ++u)
            out[static_cast<std::size_t>(u) * Block + static_cast<std::size_t>(v)] =
                coefs[static_cast<std::size_t>(u)];
    }
    return out;
}

} // namespace detail

// Average hash: resize to 8x8, bit = 1 iff the pixel strictly exceeds the
// mean of the 64 resized pixels.
inline PerceptualHash ahash(const GrayImage& img) {
    const GrayImage small = resize_bilinear(img, 8, 8);
    double mean = 0.0;
    for (double p : small.pixels) mean += p;
    mean /= 64.0;
    PerceptualHash h{0, HashKind::AHash};
    for (int i = 0; i < 64; ++i)
        if (small.pixels[static_cast<std::size_t>(i)] > mean) detail::set_bit(h.bits, i);
    return h;
}

// Difference hash: resize to 8 rows x 9 columns, bit (r,c) = 1 iff the right
// neighbour strictly exceeds the pixel.
inline PerceptualHash dhash(const GrayImage& img) {
    const GrayImage small = resize_bilinear(img, 8, 9);
    PerceptualHash h{0, HashKind::DHash};
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            if (small.at(r, c + 1) > small.at(r, c)) detail::set_bit(h.bits, r * 8 + c);
    return h;
}

// DCT hash: resize to 32x32, orthonormal 2-D DCT-II, keep the 8x8
// low-frequency block, bit = 1 iff the coefficient strictly exceeds the
// median of the 63 AC coefficients; the DC bit is fixed to 0. Coefficients
// within 1e-12 of zero relative to the largest AC magnitude are flushed to
// exact zero first, so values that vanish in exact arithmetic behave as the
// ties they are instead of keeping floating-point dust.
inline PerceptualHash phash(const GrayImage& img) {
    const GrayImage small = resize_bilinear(img, 32, 32);
    std::array<double, 64> block = detail::dct_block<32, 8>(small);

    double max_ac = 0.0;
    for (int i = 1; i < 64; ++i)
        max_ac = std::max(max_ac, std::abs(block[static_cast<std::size_t>(i)]));
    for (int i = 1; i < 64; ++i)
        if (std::abs(block[static_cast<std::size_t>(i)]) <= 1e-12 * max_ac)
            block[static_cast<std::size_t>(i)] = 0.0;

    std::array<double, 63> sorted{};
    std::copy(block.begin() + 1, block.end(), sorted.begin());
    std::nth_element(sorted.begin(), sorted.begin() + 31, sorted.end());
    const double median = sorted[31];

    PerceptualHash h{0, HashKind::PHash};
    for (int i = 1; i < 64; ++i)
        if (block[static_cast<std::size_t>(i)] > median) detail::set_bit(h.bits, i);
    return h;
}

inline int hamming(PerceptualHash a, PerceptualHash b) {
    if (a.kind != b.kind)
        throw hash_error("hashes of different kinds are not comparable");
    return std::popcount(a.bits ^ b.bits);
}

inline bool is_duplicate(PerceptualHash a, PerceptualHash b, int threshold) {
    if (threshold < 0 || threshold > 64)
        throw parameter_error("duplicate threshold must lie in [0, 64]");
    return hamming(a, b) <= threshold;
}

// "kind:16 lowercase hex digits", e.g. "dhash:ffffffffffffffff".
inline std::string to_string(PerceptualHash h) {
    static const char* digits = "0123456789abcdef";
    std::string out = to_string(h.kind);
    out += ':';
    for (int shift = 60; shift >= 0; shift -= 4)
        out += digits[(h.bits >> shift) & 0xF];
    return out;
}

inline PerceptualHash parse_hash(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || text.size() != colon + 17)
        throw format_error("hash string must be 'kind:16 hex digits'");
    PerceptualHash h{0, parse_hash_kind(text.substr(0, colon))};
    for (std::size_t i = colon + 1; i < text.size(); ++i) {
        const char c = text[i];
        std::uint64_t digit;
        if (c >= '0' && c <= '9') digit = static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') digit = static_cast<std::uint64_t>(c - 'a' + 10);
        else throw format_error("hash string contains a non-hex digit");
        h.bits = (h.bits << 4) | digit;
    }
    return h;
}

} // namespace ca
