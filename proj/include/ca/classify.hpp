#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ca/errors.hpp"
#include "ca/sensing.hpp"

// Smashed filter: maximum-likelihood template matching performed directly on
// compressed measurements. Under isotropic gaussian measurement noise the ML
// rule is minimum Euclidean distance ||y - Phi t_c||.

namespace ca {

struct ClassTemplates {
    std::vector<std::string> classes; // unique, in first-appearance order
    std::vector<Vec> templates;       // one per class, all length n

    int dim() const { return templates.empty() ? 0 : static_cast<int>(templates.front().size()); }
    int num_classes() const { return static_cast<int>(classes.size()); }
};

struct ClassificationResult {
    std::string label;
    int label_index = 0;
    std::vector<double> scores; // per-class distance ||y - Phi t_c||_2
    double margin = 0.0;        // runner-up distance minus winner distance
};

// Per-class arithmetic mean of the labeled samples. Class order is the order
// of first appearance in the dataset.
inline ClassTemplates build_templates(const std::vector<Signal>& dataset) {
    ClassTemplates out;
    std::vector<int> counts;
    for (const Signal& s : dataset) {
        if (!s.label) throw dataset_error("build_templates requires labeled samples");
        if (!dataset.empty() && s.values.size() != dataset.front().values.size())
            throw dataset_error("build_templates requires uniform sample length");
        int idx = -1;
        for (int c = 0; c < out.num_classes(); ++c)
            if (out.classes[static_cast<std::size_t>(c)] == *s.label) { idx = c; break; }
        if (idx < 0) {
            out.classes.push_back(*s.label);
            out.templates.push_back(s.values);
            counts.push_back(1);
        } else {
            out.templates[static_cast<std::size_t>(idx)] += s.values;
            ++counts[static_cast<std::size_t>(idx)];
        }
    }
    if (out.num_classes() < 2)
        throw dataset_error("build_templates requires at least two classes");
    for (std::size_t c = 0; c < out.templates.size(); ++c)
        out.templates[c] /= static_cast<double>(counts[c]);
    return out;
}

// argmin_c ||y - Phi t_c||_2, ties resolved to the lowest class index.
inline ClassificationResult classify(const Measurement& y, const SensingMatrix& phi,
                                     const ClassTemplates& templates) {
    if (templates.num_classes() < 2)
        throw dataset_error("classify requires at least two class templates");
    if (templates.dim() != phi.cols())
        throw dimension_error("template length does not match matrix columns");
    if (!(y.matrix_id == phi.id) || y.values.size() != phi.entries.rows())
        throw dimension_error("measurement does not conform to the sensing matrix");

    ClassificationResult result;
    result.scores.resize(static_cast<std::size_t>(templates.num_classes()));
    int best = 0;
    for (int c = 0; c < templates.num_classes(); ++c) {
        const double d = (y.values - phi.entries * templates.templates[static_cast<std::size_t>(c)]).norm();
        result.scores[static_cast<std::size_t>(c)] = d;
        if (d < result.scores[static_cast<std::size_t>(best)]) best = c;
    }
    double runner_up = std::numeric_limits<double>::infinity();
    for (int c = 0; c < templates.num_classes(); ++c)
        if (c != best) runner_up = std::min(runner_up, result.scores[static_cast<std::size_t>(c)]);
    result.label_index = best;
    result.label = templates.classes[static_cast<std::size_t>(best)];
    result.margin = runner_up - result.scores[static_cast<std::size_t>(best)];
    return result;
}

// Fraction of correct labels over trials x dataset noisy acquisitions of a
// fixed matrix. Trial t draws its noise from an independent stream seeded
// with seed + t, consuming one m-vector per sample in dataset order, so the
// result does not depend on how trials are scheduled.
inline double evaluate_accuracy(const std::vector<Signal>& dataset, const SensingMatrix& phi,
                                const ClassTemplates& templates, double sigma, int trials,
                                std::uint64_t seed) {
    if (dataset.empty()) throw dataset_error("evaluate_accuracy requires a nonempty dataset");
    if (trials < 1) throw parameter_error("evaluate_accuracy requires trials >= 1");
    if (sigma < 0.0) throw parameter_error("noise sigma must be nonnegative");

    long correct = 0;
    for (int t = 0; t < trials; ++t) {
        Stream noise(seed + static_cast<std::uint64_t>(t));
        for (const Signal& s : dataset) {
            if (!s.label) throw dataset_error("evaluate_accuracy requires labeled samples");
            Measurement y = acquire(phi, s);
            if (sigma > 0.0)
                for (int i = 0; i < y.values.size(); ++i)
                    y.values[i] += sigma * noise.gaussian();
            y.noise_sigma = sigma;
            if (classify(y, phi, templates).label == *s.label) ++correct;
        }
    }
    return static_cast<double>(correct) /
           (static_cast<double>(trials) * static_cast<double>(dataset.size()));
}

} // namespace ca
