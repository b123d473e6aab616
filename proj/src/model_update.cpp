#include "itlm/model_update.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <fmt/format.h>
#include <vector>

#include "itlm/errors.hpp"

namespace itlm {

namespace {

/// Validated copy of an index set, sorted ascending. All gradient and
/// solve paths consume subsets in this canonical order, which is what
/// makes the full-gradient / full-batch equivalence exact.
std::vector<Index> canonical_subset(std::span<const Index> subset, Index n) {
    if (subset.empty()) {
        throw ConfigError("subset must not be empty");
    }
    std::vector<Index> out(subset.begin(), subset.end());
    std::sort(out.begin(), out.end());
    if (out.front() < 0 || out.back() >= n) {
        throw ConfigError(fmt::format(
            "subset index out of range [0, {})", n));
    }
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
        throw ConfigError("subset contains a duplicate index");
    }
    return out;
}

void check_theta(const Parameter& theta, const Dataset& dataset) {
    if (theta.theta.size() != dataset.d()) {
        throw ConfigError(fmt::format(
            "parameter dimension {} does not match feature dimension {}",
            theta.theta.size(), dataset.d()));
    }
}

/// (1/|batch|) * sum of sample-loss gradients, accumulated in the given
/// order. Both update paths route through here.
Vector mean_gradient(const Parameter& theta, const Dataset& dataset,
                     std::span<const Index> batch) {
    Vector g = Vector::Zero(dataset.d());
    for (Index i : batch) {
        const double u = dataset.features.row(i).dot(theta.theta);
        const double r = dataset.responses[i] - dataset.link.value(u);
        const double scale = -2.0 * r * dataset.link.derivative(u);
        g.noalias() += scale * dataset.features.row(i).transpose();
    }
    g /= static_cast<double>(batch.size());
    return g;
}

/// Uniform draw of `count` indices from `pool` without replacement,
/// returned ascending. A full draw is the pool itself and consumes no
/// randomness.
std::vector<Index> draw_batch(const std::vector<Index>& pool, Index count,
                              SplitMix64& rng) {
    const Index size = static_cast<Index>(pool.size());
    if (count == size) {
        return pool;
    }
    std::vector<Index> shuffled = pool;
    for (Index j = 0; j < count; ++j) {
        const std::uint64_t span = static_cast<std::uint64_t>(size - j);
        const Index pick = j + static_cast<Index>(rng.next_below(span));
        std::swap(shuffled[static_cast<std::size_t>(j)],
                  shuffled[static_cast<std::size_t>(pick)]);
    }
    shuffled.resize(static_cast<std::size_t>(count));
    std::sort(shuffled.begin(), shuffled.end());
    return shuffled;
}

} // namespace

UpdatePolicy with_round_schedule(const UpdatePolicy& policy, Index round) {
    auto it = policy.steps_schedule.find(round);
    if (it == policy.steps_schedule.end()) {
        return policy;
    }
    if (it->second < 1) {
        throw ConfigError(fmt::format(
            "step schedule entry for round {} must be >= 1, got {}",
            round, it->second));
    }
    UpdatePolicy adjusted = policy;
    if (auto* sgd = std::get_if<BatchSgdUpdate>(&adjusted.mode)) {
        sgd->steps = it->second;
    }
    return adjusted;
}

Parameter closed_form_ls(const Dataset& dataset,
                         std::span<const Index> subset) {
    if (!dataset.link.is_identity()) {
        throw ConfigError("closed-form least squares requires the identity link");
    }
    const std::vector<Index> rows = canonical_subset(subset, dataset.n());
    const Index k = static_cast<Index>(rows.size());
    const Index d = dataset.d();
    if (k < d) {
        throw ConfigError(fmt::format(
            "subset size {} is below parameter dimension {}", k, d));
    }

    Matrix phi(k, d);
    Vector y(k);
    for (Index j = 0; j < k; ++j) {
        phi.row(j) = dataset.features.row(rows[static_cast<std::size_t>(j)]);
        y[j] = dataset.responses[rows[static_cast<std::size_t>(j)]];
    }

    const Matrix gram = phi.transpose() * phi;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram,
                                              Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || lo < 1e-10 * hi) {
        throw NumericalError(fmt::format(
            "subset Gram matrix is rank-deficient: eigenvalue ratio {:.3e} "
            "below tolerance 1e-10",
            hi > 0.0 ? lo / hi : 0.0));
    }

    return Parameter{phi.householderQr().solve(y)};
}

Parameter batch_sgd_update(const Parameter& theta, const Dataset& dataset,
                           std::span<const Index> subset,
                           const UpdatePolicy& policy, SplitMix64& rng) {
    const auto* params = std::get_if<BatchSgdUpdate>(&policy.mode);
    if (params == nullptr) {
        throw ConfigError("update policy mode is not batch SGD");
    }
    check_theta(theta, dataset);
    const std::vector<Index> rows = canonical_subset(subset, dataset.n());
    const Index k = static_cast<Index>(rows.size());
    if (!(params->eta > 0.0)) {
        throw ConfigError(fmt::format("step size must be positive, got {}",
                                      params->eta));
    }
    if (params->steps < 1) {
        throw ConfigError(fmt::format("step count must be >= 1, got {}",
                                      params->steps));
    }
    if (params->batch < 1 || params->batch > k) {
        throw ConfigError(fmt::format(
            "batch size {} outside [1, {}]", params->batch, k));
    }
    if (!(params->reinit_scale > 0.0)) {
        throw ConfigError(fmt::format(
            "re-initialization scale must be positive, got {}",
            params->reinit_scale));
    }

    Parameter current = theta;
    if (params->reinit) {
        for (Index j = 0; j < dataset.d(); ++j) {
            current.theta[j] = params->reinit_scale * rng.next_gaussian();
        }
    }
    for (Index step = 0; step < params->steps; ++step) {
        const std::vector<Index> batch = draw_batch(rows, params->batch, rng);
        current.theta -= params->eta * mean_gradient(current, dataset, batch);
    }
    return current;
}

Parameter full_gradient_step(const Parameter& theta, const Dataset& dataset,
                             std::span<const Index> subset, double eta) {
    check_theta(theta, dataset);
    if (!(eta > 0.0)) {
        throw ConfigError(fmt::format("step size must be positive, got {}", eta));
    }
    const std::vector<Index> rows = canonical_subset(subset, dataset.n());
    Parameter next = theta;
    next.theta -= eta * mean_gradient(theta, dataset, rows);
    return next;
}

} // namespace itlm
