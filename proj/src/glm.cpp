#include "itlm/glm.hpp"

#include <cmath>
#include <fmt/format.h>

#include "itlm/errors.hpp"

namespace itlm {

LinkFunction LinkFunction::piecewise_linear(double neg_slope,
                                            double pos_slope) {
    if (!(neg_slope > 0.0) || !(pos_slope > 0.0)) {
        throw ConfigError(
            fmt::format("piecewise link slopes must be positive, got ({}, {})",
                        neg_slope, pos_slope));
    }
    bool ident = neg_slope == 1.0 && pos_slope == 1.0;
    return LinkFunction(neg_slope, pos_slope, ident);
}

void Dataset::validate() const {
    if (features.rows() == 0 || features.cols() == 0) {
        throw ConfigError("dataset must have at least one row and one column");
    }
    if (responses.size() != features.rows()) {
        throw ConfigError(fmt::format(
            "response count {} does not match row count {}",
            responses.size(), features.rows()));
    }
    if (!features.allFinite() || !responses.allFinite()) {
        throw ConfigError("dataset contains non-finite values");
    }
    if (truth) {
        const Index n = features.rows();
        if (truth->theta_star.empty()) {
            throw ConfigError("truth info must carry at least one component");
        }
        for (const Vector& t : truth->theta_star) {
            if (t.size() != features.cols()) {
                throw ConfigError(fmt::format(
                    "truth component dimension {} does not match feature "
                    "dimension {}",
                    t.size(), features.cols()));
            }
        }
        if (static_cast<Index>(truth->clean_mask.size()) != n ||
            static_cast<Index>(truth->component_id.size()) != n) {
            throw ConfigError("truth mask sizes must match row count");
        }
        const int n_comp = static_cast<int>(truth->theta_star.size());
        for (Index i = 0; i < n; ++i) {
            const int c = truth->component_id[static_cast<std::size_t>(i)];
            if (c < -1 || c >= n_comp) {
                throw ConfigError(fmt::format(
                    "component id {} out of range at row {}", c, i));
            }
        }
    }
}

Index trim_count(double alpha, Index n) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw ConfigError(
            fmt::format("alpha must lie in (0, 1], got {}", alpha));
    }
    if (n <= 0) {
        throw ConfigError(fmt::format("sample count must be positive, got {}", n));
    }
    // Absolute slack absorbs binary representation error in alpha * n
    // (0.6 * 5 evaluates just below 3).
    return static_cast<Index>(std::floor(alpha * static_cast<double>(n) + 1e-9));
}

namespace {

void check_row(const Parameter& theta, const Dataset& dataset, Index i) {
    if (i < 0 || i >= dataset.n()) {
        throw ConfigError(
            fmt::format("row index {} out of range [0, {})", i, dataset.n()));
    }
    if (theta.theta.size() != dataset.d()) {
        throw ConfigError(fmt::format(
            "parameter dimension {} does not match feature dimension {}",
            theta.theta.size(), dataset.d()));
    }
}

} // namespace

double predict(const Parameter& theta, const Dataset& dataset, Index i) {
    check_row(theta, dataset, i);
    const double u = dataset.features.row(i).dot(theta.theta);
    return dataset.link.value(u);
}

double sample_loss(const Parameter& theta, const Dataset& dataset, Index i) {
    check_row(theta, dataset, i);
    const double u = dataset.features.row(i).dot(theta.theta);
    const double r = dataset.responses[i] - dataset.link.value(u);
    return r * r;
}

Vector loss_gradient(const Parameter& theta, const Dataset& dataset, Index i) {
    check_row(theta, dataset, i);
    const double u = dataset.features.row(i).dot(theta.theta);
    const double r = dataset.responses[i] - dataset.link.value(u);
    const double scale = -2.0 * r * dataset.link.derivative(u);
    return scale * dataset.features.row(i).transpose();
}

std::vector<double> all_sample_losses(const Parameter& theta,
                                      const Dataset& dataset) {
    if (theta.theta.size() != dataset.d()) {
        throw ConfigError(fmt::format(
            "parameter dimension {} does not match feature dimension {}",
            theta.theta.size(), dataset.d()));
    }
    const Index n = dataset.n();
    std::vector<double> losses(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const double u = dataset.features.row(i).dot(theta.theta);
        const double r = dataset.responses[i] - dataset.link.value(u);
        losses[static_cast<std::size_t>(i)] = r * r;
    }
    return losses;
}

TrimmedLoss trimmed_loss(const Parameter& theta, const Dataset& dataset,
                         double alpha) {
    const Index k = trim_count(alpha, dataset.n());
    if (k < 1) {
        throw ConfigError(fmt::format(
            "alpha {} keeps no samples out of {}", alpha, dataset.n()));
    }
    const std::vector<double> losses = all_sample_losses(theta, dataset);
    TrimmedLoss out;
    out.subset = select_k_smallest(losses, k);
    for (Index i : out.subset) {
        out.value += losses[static_cast<std::size_t>(i)];
    }
    return out;
}

} // namespace itlm
