#ifndef ITLM_SELECTION_HPP
#define ITLM_SELECTION_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace itlm {

using Index = std::int64_t;

/// Indices of the k smallest entries of `losses`.
///
/// Ties break toward the smaller index, so the result is deterministic.
/// Returned indices are sorted ascending. Non-finite losses and k outside
/// [1, n] are rejected. Average cost is O(n) (partial selection, no full
/// sort).
std::vector<Index> select_k_smallest(std::span<const double> losses, Index k);

struct SelectionStats {
    Index n_selected = 0;
    Index n_bad_selected = 0;           // selected rows with clean_mask false
    double clean_recovery_ratio = 0.0;  // selected-clean / total-clean
};

/// Diagnostics of a selected subset against ground-truth clean flags.
/// If the mask has no clean rows at all, clean_recovery_ratio is 0.
SelectionStats selection_stats(std::span<const Index> subset,
                               std::span<const std::uint8_t> clean_mask);

} // namespace itlm

#endif // ITLM_SELECTION_HPP
