#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ca/classify.hpp"
#include "ca/errors.hpp"
#include "ca/hash.hpp"
#include "ca/rng.hpp"
#include "ca/sensing.hpp"

// Synthetic data generators: exactly k-sparse test signals, value-noise
// textures, and the two-class print-inspection task used by the tradeoff
// harness.

namespace ca {

// Exactly k nonzeros at uniformly chosen indices, each +-amplitude with a
// random sign. Support indices come from a partial Fisher-Yates shuffle.
inline Signal gen_sparse(int n, int k, double amplitude, std::uint64_t seed) {
    if (n < 1) throw parameter_error("signal length must be positive");
    if (k < 1 || k > n) throw parameter_error("sparsity k must satisfy 1 <= k <= n");
    if (!(amplitude > 0.0)) throw parameter_error("amplitude must be positive");

    Stream rng(seed);
    std::vector<int> indices(static_cast<std::size_t>(n));
    std::iota(indices.begin(), indices.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
    }
    Vec values = Vec::Zero(n);
    for (int i = 0; i < k; ++i)
        values[indices[static_cast<std::size_t>(i)]] =
            (rng.next_u64() >> 63) ? amplitude : -amplitude;
    return make_signal(std::move(values));
}

// Smooth random texture: an 8x8 (or smaller) grid of uniform values upsampled
// bilinearly. Cheap, seeded, and structured enough to stand in for natural
// image content in hashing and classification experiments.
inline GrayImage texture_image(int height, int width, std::uint64_t seed) {
    if (height < 1 || width < 1) throw parameter_error("texture dimensions must be positive");
    const int ch = std::min(8, height);
    const int cw = std::min(8, width);
    Stream rng(seed);
    std::vector<double> cells(static_cast<std::size_t>(ch) * static_cast<std::size_t>(cw));
    for (double& v : cells) v = rng.uniform01();
    const GrayImage coarse{ch, cw, std::move(cells)};
    return resize_bilinear(coarse, height, width);
}

// Two-class print-inspection surrogate: class "ok" is a fixed seeded texture,
// class "defect" the same texture plus a square patch of a given side and
// amplitude. The canonical templates use a seeded patch location; sample()
// draws fresh defect locations for per-trial ground-truth instances.
class PrintTask {
public:
    PrintTask(int n, int defect_size, double defect_amplitude, std::uint64_t seed)
        : side_(static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))))),
          defect_size_(defect_size),
          defect_amplitude_(defect_amplitude),
          seed_(seed) {
        if (n < 1 || side_ * side_ != n)
            throw parameter_error("print task requires n to be a perfect square");
        if (defect_size < 1 || defect_size > side_)
            throw parameter_error("defect size must satisfy 1 <= size^2 <= n");
        if (defect_amplitude < 0.0)
            throw parameter_error("defect amplitude must be nonnegative");

        const GrayImage tex = texture_image(side_, side_, derive_seed(seed, 0));
        base_ = Vec(n);
        for (int i = 0; i < n; ++i) base_[i] = tex.pixels[static_cast<std::size_t>(i)];

        Stream loc(derive_seed(seed, 1));
        const auto [r0, c0] = draw_location(loc);
        Vec defect = base_;
        add_patch(defect, r0, c0);

        templates_.classes = {"ok", "defect"};
        templates_.templates = {base_, std::move(defect)};
    }

    const ClassTemplates& templates() const { return templates_; }
    int side() const { return side_; }
    int dim() const { return side_ * side_; }

    // Canonical labeled signals, identical to the templates.
    std::vector<Signal> canonical_dataset() const {
        const std::array<int, 2> shape{side_, side_};
        return {Signal{templates_.templates[0], "ok", shape},
                Signal{templates_.templates[1], "defect", shape}};
    }

    // Ground-truth instance for one trial: "ok" is the base texture, "defect"
    // adds the patch at a location drawn from draw_seed.
    Signal sample(const std::string& cls, std::uint64_t draw_seed) const {
        const std::array<int, 2> shape{side_, side_};
        if (cls == "ok") return Signal{base_, "ok", shape};
        if (cls != "defect") throw dataset_error("print task has classes 'ok' and 'defect'");
        Stream rng(draw_seed);
        const auto [r0, c0] = draw_location(rng);
        Vec values = base_;
        add_patch(values, r0, c0);
        return Signal{std::move(values), "defect", shape};
    }

private:
    std::pair<int, int> draw_location(Stream& rng) const {
        const std::uint64_t span = static_cast<std::uint64_t>(side_ - defect_size_ + 1);
        const int r0 = static_cast<int>(rng.below(span));
        const int c0 = static_cast<int>(rng.below(span));
        return {r0, c0};
    }

    void add_patch(Vec& values, int r0, int c0) const {
        for (int r = r0; r < r0 + defect_size_; ++r)
            for (int c = c0; c < c0 + defect_size_; ++c)
                values[r * side_ + c] += defect_amplitude_;
    }

    int side_;
    int defect_size_;
    double defect_amplitude_;
    std::uint64_t seed_;
    Vec base_;
    ClassTemplates templates_;
};

inline PrintTask gen_print_task(int n, int defect_size, double defect_amplitude,
                                std::uint64_t seed) {
    return PrintTask(n, defect_size, defect_amplitude, seed);
}

} // namespace ca
