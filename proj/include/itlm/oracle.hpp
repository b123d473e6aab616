#ifndef ITLM_ORACLE_HPP
#define ITLM_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "itlm/driver.hpp"
#include "itlm/glm.hpp"

namespace itlm {

/// Extreme eigenvalues of the selected-row Gram matrix over every k-row
/// subset, with the lexicographically smallest witnesses.
struct RegularityReport {
    Index k = 0;
    double psi_minus = 0.0;
    double psi_plus = 0.0;
    std::vector<Index> argmin_subset;
    std::vector<Index> argmax_subset;
};

struct ExactTrimmedLoss {
    Parameter theta;
    std::vector<Index> subset;  // lexicographically first global minimizer
    double value = 0.0;
    std::uint64_t skipped_subsets = 0;  // rank-deficient, noted and skipped
};

/// Global minimizer of the trimmed-loss objective by enumerating every
/// size-floor(alpha*n) subset and solving least squares on each (identity
/// link only). The enumeration guard is a hard limit: datasets above
/// max_n are refused, never subsampled. Throws NumericalError when every
/// subset is rank-deficient.
ExactTrimmedLoss exact_trimmed_loss(const Dataset& dataset, double alpha,
                                    Index max_n = 20);

/// Exact min of the smallest and max of the largest Gram eigenvalue over
/// all k-subsets of the feature rows. Refuses to enumerate more than
/// max_subsets subsets (hard guard, no sampling fallback).
RegularityReport regularity_constants(const Matrix& features, Index k,
                                      std::uint64_t max_subsets = 200000);

/// Per-round count of selected rows outside the clean set. Requires
/// ground truth on the dataset.
std::vector<Index> contamination_profile(const Dataset& dataset,
                                         const EstimationTrace& trace);

/// C(n, k) clamped to `limit + 1` to keep guard checks overflow-free.
std::uint64_t subset_count_clamped(Index n, Index k, std::uint64_t limit);

/// Calls fn(subset) for every size-k subset of {0,...,n-1} in
/// lexicographic order. fn receives a sorted index vector.
template <typename Fn>
void for_each_subset(Index n, Index k, Fn&& fn) {
    std::vector<Index> subset(static_cast<std::size_t>(k));
    for (Index j = 0; j < k; ++j) {
        subset[static_cast<std::size_t>(j)] = j;
    }
    while (true) {
        fn(const_cast<const std::vector<Index>&>(subset));
        // Advance: rightmost index that can still move right.
        Index j = k - 1;
        while (j >= 0 &&
               subset[static_cast<std::size_t>(j)] == n - k + j) {
            --j;
        }
        if (j < 0) {
            return;
        }
        ++subset[static_cast<std::size_t>(j)];
        for (Index l = j + 1; l < k; ++l) {
            subset[static_cast<std::size_t>(l)] =
                subset[static_cast<std::size_t>(l - 1)] + 1;
        }
    }
}

} // namespace itlm

#endif // ITLM_ORACLE_HPP
