// Perceptual-hash duplicate detection: a noised copy of an image stays within
// a small Hamming distance of the original while unrelated images land far
// apart.

#include <cstdio>

#include "ca/datasets.hpp"
#include "ca/hash.hpp"
#include "ca/rng.hpp"

int main() {
    const ca::GrayImage original = ca::texture_image(64, 64, 11);

    ca::GrayImage noised = original;
    ca::Stream rng(99);
    for (double& p : noised.pixels) p += 0.02 * (2.0 * rng.uniform01() - 1.0);
    noised = ca::make_image(64, 64, noised.pixels);

    const ca::GrayImage unrelated = ca::texture_image(64, 64, 12);

    const ca::PerceptualHash h0 = ca::dhash(original);
    const ca::PerceptualHash h1 = ca::dhash(noised);
    const ca::PerceptualHash h2 = ca::dhash(unrelated);

    std::printf("original   %s\n", ca::to_string(h0).c_str());
    std::printf("noised     %s  distance=%2d  duplicate=%s\n", ca::to_string(h1).c_str(),
                ca::hamming(h0, h1), ca::is_duplicate(h0, h1, 10) ? "yes" : "no");
    std::printf("unrelated  %s  distance=%2d  duplicate=%s\n", ca::to_string(h2).c_str(),
                ca::hamming(h0, h2), ca::is_duplicate(h0, h2, 10) ? "yes" : "no");
    return 0;
}
