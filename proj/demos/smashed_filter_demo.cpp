// Minimal end-to-end walk through compressive acquisition: classify noisy
// compressed samples of a two-class task at a few compression ratios and
// watch the reconstruction attack degrade while accuracy stays high.

#include <cstdio>

#include "ca/classify.hpp"
#include "ca/datasets.hpp"
#include "ca/reconstruction.hpp"
#include "ca/sensing.hpp"

int main() {
    const int n = 4096; // 64x64 image
    const ca::PrintTask task(n, 12, 0.5, /*seed=*/7);

    for (const int m : {16, 64, 256, 1024}) {
        int correct = 0;
        double err_sum = 0.0;
        const int trials = 20;
        for (int t = 0; t < trials; ++t) {
            const ca::SensingMatrix phi =
                ca::generate_matrix(ca::derive_seed(1, m, t), m, n, ca::Ensemble::Gaussian);
            for (const ca::Signal& x : task.canonical_dataset()) {
                const ca::Measurement y =
                    ca::acquire_noisy(phi, x, 0.05, ca::derive_seed(2, m, t));
                if (ca::classify(y, phi, task.templates()).label == *x.label) ++correct;
            }
            const ca::Signal target = task.sample("defect", ca::derive_seed(3, m, t));
            const ca::Measurement y = ca::acquire(phi, target);
            const ca::SparseEstimate attack = ca::ista(phi, y, 0.01, 300, 1e-6);
            err_sum += ca::evaluate_reconstruction(target, attack).relative_l2;
        }
        std::printf("m=%5d  ratio=%6.3f%%  accuracy=%.3f  attack relative error=%.3f\n", m,
                    100.0 * m / n, correct / (2.0 * trials), err_sum / trials);
    }
    return 0;
}
