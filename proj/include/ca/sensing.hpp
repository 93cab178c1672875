#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "ca/errors.hpp"
#include "ca/linalg.hpp"
#include "ca/rng.hpp"

// Compressive acquisition: seeded random measurement operators and the
// linear sampling step y = Phi x (optionally with additive gaussian noise).

namespace ca {

enum class Ensemble : std::uint8_t {
    Gaussian = 0,  // i.i.d. N(0, 1/m) entries
    Bernoulli = 1, // entries +-1/sqrt(m), equiprobable
    Identity = 2,  // m == n, identity operator
};

inline const char* to_string(Ensemble e) {
    switch (e) {
        case Ensemble::Gaussian: return "gaussian";
        case Ensemble::Bernoulli: return "bernoulli";
        case Ensemble::Identity: return "identity";
    }
    return "unknown";
}

inline Ensemble parse_ensemble(const std::string& name) {
    if (name == "gaussian") return Ensemble::Gaussian;
    if (name == "bernoulli") return Ensemble::Bernoulli;
    if (name == "identity") return Ensemble::Identity;
    throw parameter_error("unknown ensemble '" + name + "'");
}

struct MatrixId {
    std::uint64_t seed = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    Ensemble ensemble = Ensemble::Gaussian;

    bool operator==(const MatrixId&) const = default;
};

struct SensingMatrix {
    MatrixId id;
    Mat entries; // rows x cols

    int rows() const { return static_cast<int>(id.rows); }
    int cols() const { return static_cast<int>(id.cols); }
};

struct Signal {
    Vec values;
    std::optional<std::string> label;
    std::optional<std::array<int, 2>> shape; // {height, width}, row-major

    int size() const { return static_cast<int>(values.size()); }
};

// Validating constructor used by every ingestion path.
inline Signal make_signal(Vec values,
                          std::optional<std::string> label = std::nullopt,
                          std::optional<std::array<int, 2>> shape = std::nullopt) {
    if (values.size() < 1) throw parameter_error("signal must have length >= 1");
    if (!values.allFinite()) throw parameter_error("signal values must be finite");
    if (shape) {
        const auto [h, w] = *shape;
        if (h < 1 || w < 1 || static_cast<long>(h) * w != values.size())
            throw dimension_error("signal shape does not match its length");
    }
    return Signal{std::move(values), std::move(label), shape};
}

struct Measurement {
    Vec values;
    MatrixId matrix_id;
    double noise_sigma = 0.0;

    int size() const { return static_cast<int>(values.size()); }
};

// Deterministic in all four arguments; the matrix stream is seeded with
// `seed` directly and entries are drawn in row-major order.
inline SensingMatrix generate_matrix(std::uint64_t seed, int m, int n, Ensemble ensemble) {
    if (m < 1 || n < 1) throw parameter_error("matrix dimensions must be positive");
    if (ensemble == Ensemble::Identity && m != n)
        throw dimension_error("identity ensemble requires m == n");
    if (ensemble != Ensemble::Identity && m > n)
        throw dimension_error("random ensembles require m <= n");

    SensingMatrix phi;
    phi.id = MatrixId{seed, static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(n), ensemble};
    phi.entries.resize(m, n);

    switch (ensemble) {
        case Ensemble::Identity:
            phi.entries.setIdentity();
            break;
        case Ensemble::Gaussian: {
            Stream rng(seed);
            const double scale = 1.0 / std::sqrt(static_cast<double>(m));
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < n; ++c)
                    phi.entries(r, c) = scale * rng.gaussian();
            break;
        }
        case Ensemble::Bernoulli: {
            Stream rng(seed);
            const double mag = 1.0 / std::sqrt(static_cast<double>(m));
            // Sign from the top bit of one raw draw: 1 -> +, 0 -> -.
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < n; ++c)
                    phi.entries(r, c) = (rng.next_u64() >> 63) ? mag : -mag;
            break;
        }
    }
    return phi;
}

inline Measurement acquire(const SensingMatrix& phi, const Signal& x) {
    if (x.values.size() != phi.entries.cols())
        throw dimension_error("signal length does not match matrix columns");
    Measurement y;
    y.values.noalias() = phi.entries * x.values;
    y.matrix_id = phi.id;
    y.noise_sigma = 0.0;
    return y;
}

// y = Phi x + e with e ~ N(0, sigma^2) i.i.d., drawn from a stream seeded
// with noise_seed, one variate per coordinate in index order.
inline Measurement acquire_noisy(const SensingMatrix& phi, const Signal& x,
                                 double sigma, std::uint64_t noise_seed) {
    if (sigma < 0.0 || !std::isfinite(sigma))
        throw parameter_error("noise sigma must be nonnegative");
    Measurement y = acquire(phi, x);
    if (sigma > 0.0) {
        Stream rng(noise_seed);
        for (int i = 0; i < y.values.size(); ++i)
            y.values[i] += sigma * rng.gaussian();
    }
    y.noise_sigma = sigma;
    return y;
}

inline double compression_ratio(const SensingMatrix& phi) {
    return static_cast<double>(phi.id.rows) / static_cast<double>(phi.id.cols);
}

} // namespace ca
