#include "itlm/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <fmt/format.h>
#include <limits>

#include "itlm/errors.hpp"
#include "itlm/selection.hpp"

namespace itlm {

std::uint64_t subset_count_clamped(Index n, Index k, std::uint64_t limit) {
    if (k < 0 || k > n) {
        return 0;
    }
    const Index kk = std::min(k, n - k);
    // C(n, j) grows monotonically along this recurrence, so clamping once
    // keeps every intermediate product in range.
    long double count = 1.0L;
    for (Index j = 1; j <= kk; ++j) {
        count = count * static_cast<long double>(n - kk + j) /
                static_cast<long double>(j);
        if (count > static_cast<long double>(limit)) {
            return limit + 1;
        }
    }
    return static_cast<std::uint64_t>(count + 0.5L);
}

ExactTrimmedLoss exact_trimmed_loss(const Dataset& dataset, double alpha,
                                    Index max_n) {
    dataset.validate();
    if (!dataset.link.is_identity()) {
        throw ConfigError(
            "exhaustive trimmed-loss search requires the identity link");
    }
    const Index n = dataset.n();
    const Index d = dataset.d();
    if (n > max_n) {
        throw ConfigError(fmt::format(
            "exhaustive search refused: n={} exceeds the guard {}", n, max_n));
    }
    const Index k = trim_count(alpha, n);
    if (k < d) {
        throw ConfigError(fmt::format(
            "alpha {} keeps {} samples, below parameter dimension {}",
            alpha, k, d));
    }

    ExactTrimmedLoss best;
    best.value = std::numeric_limits<double>::infinity();
    Matrix gram(d, d);
    Vector rhs(d);

    for_each_subset(n, k, [&](const std::vector<Index>& subset) {
        gram.setZero();
        rhs.setZero();
        for (Index i : subset) {
            const auto row = dataset.features.row(i);
            gram.noalias() += row.transpose() * row;
            rhs.noalias() += dataset.responses[i] * row.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram,
                                                  Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (!(hi > 0.0) || lo < 1e-10 * hi) {
            ++best.skipped_subsets;
            return;
        }
        // Normal equations on purpose: an independent route from the
        // estimator's orthogonal-factorization solve.
        const Vector theta = gram.ldlt().solve(rhs);
        double value = 0.0;
        for (Index i : subset) {
            const double r =
                dataset.responses[i] - dataset.features.row(i).dot(theta);
            value += r * r;
        }
        // Strict improvement keeps the lexicographically first minimizer.
        if (value < best.value) {
            best.value = value;
            best.theta.theta = theta;
            best.subset = subset;
        }
    });

    if (best.subset.empty()) {
        throw NumericalError(fmt::format(
            "every size-{} subset is rank-deficient ({} skipped)", k,
            best.skipped_subsets));
    }
    return best;
}

RegularityReport regularity_constants(const Matrix& features, Index k,
                                      std::uint64_t max_subsets) {
    const Index n = features.rows();
    const Index d = features.cols();
    if (n < 1 || d < 1) {
        throw ConfigError("feature matrix must be non-empty");
    }
    if (!features.allFinite()) {
        throw ConfigError("feature matrix contains non-finite values");
    }
    if (d > n) {
        throw ConfigError(fmt::format(
            "feature matrix needs at least as many rows as columns, got "
            "{}x{}",
            n, d));
    }
    if (k < 1 || k > n) {
        throw ConfigError(
            fmt::format("subset size {} outside [1, {}]", k, n));
    }
    const std::uint64_t count = subset_count_clamped(n, k, max_subsets);
    if (count > max_subsets) {
        throw ConfigError(fmt::format(
            "enumeration refused: C({}, {}) exceeds the guard {}", n, k,
            max_subsets));
    }

    RegularityReport report;
    report.k = k;
    report.psi_minus = std::numeric_limits<double>::infinity();
    report.psi_plus = -std::numeric_limits<double>::infinity();
    Matrix gram(d, d);

    for_each_subset(n, k, [&](const std::vector<Index>& subset) {
        gram.setZero();
        for (Index i : subset) {
            const auto row = features.row(i);
            gram.noalias() += row.transpose() * row;
        }
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram,
                                                  Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        // Strict comparisons keep lexicographically smallest witnesses.
        if (lo < report.psi_minus) {
            report.psi_minus = lo;
            report.argmin_subset = subset;
        }
        if (hi > report.psi_plus) {
            report.psi_plus = hi;
            report.argmax_subset = subset;
        }
    });
    return report;
}

std::vector<Index> contamination_profile(const Dataset& dataset,
                                         const EstimationTrace& trace) {
    if (!dataset.truth) {
        throw ConfigError("contamination profile requires ground truth");
    }
    std::vector<Index> counts;
    counts.reserve(trace.selected.size());
    for (const std::vector<Index>& subset : trace.selected) {
        counts.push_back(
            selection_stats(subset, dataset.truth->clean_mask).n_bad_selected);
    }
    return counts;
}

} // namespace itlm
