#pragma once

#include <cstdint>

#include "ca/errors.hpp"
#include "ca/linalg.hpp"
#include "ca/rng.hpp"

// Laplace mechanism: calibrated noise addition for differential privacy.
// The caller supplies the l1 sensitivity of the released vector; the
// mechanism adds i.i.d. Laplace(0, sensitivity/epsilon) noise per coordinate.

namespace ca {

struct DpParams {
    double epsilon = 0.0;
    double sensitivity = 0.0;
    double scale = 0.0; // sensitivity / epsilon, fixed at construction
};

inline DpParams make_dp_params(double epsilon, double sensitivity) {
    if (!(epsilon > 0.0)) throw parameter_error("epsilon must be positive");
    if (!(sensitivity > 0.0)) throw parameter_error("sensitivity must be positive");
    return DpParams{epsilon, sensitivity, sensitivity / epsilon};
}

inline double laplace_scale(const DpParams& params) { return params.scale; }

inline Vec laplace_perturb(const Vec& values, const DpParams& params, std::uint64_t seed) {
    if (!values.allFinite()) throw parameter_error("values to perturb must be finite");
    Stream rng(seed);
    Vec out = values;
    for (int i = 0; i < out.size(); ++i) out[i] += rng.laplace(params.scale);
    return out;
}

} // namespace ca
