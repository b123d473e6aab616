#include "itlm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "itlm/errors.hpp"

namespace itlm {

std::vector<Index> select_k_smallest(std::span<const double> losses, Index k) {
    const Index n = static_cast<Index>(losses.size());
    if (k < 1 || k > n) {
        throw ConfigError("select_k_smallest: k=" + std::to_string(k) +
                          " out of range [1, " + std::to_string(n) + "]");
    }
    for (Index i = 0; i < n; ++i) {
        if (!std::isfinite(losses[static_cast<std::size_t>(i)])) {
            throw ConfigError("select_k_smallest: non-finite loss at index " +
                              std::to_string(i));
        }
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    auto less = [&losses](Index a, Index b) {
        const double la = losses[static_cast<std::size_t>(a)];
        const double lb = losses[static_cast<std::size_t>(b)];
        return la < lb || (la == lb && a < b);
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), less);

    std::vector<Index> subset(order.begin(), order.begin() + k);
    std::sort(subset.begin(), subset.end());
    return subset;
}

SelectionStats selection_stats(std::span<const Index> subset,
                               std::span<const std::uint8_t> clean_mask) {
    if (subset.empty()) {
        throw ConfigError("selection_stats: empty subset");
    }
    const Index mask_len = static_cast<Index>(clean_mask.size());
    SelectionStats stats;
    stats.n_selected = static_cast<Index>(subset.size());
    Index selected_clean = 0;
    for (Index i : subset) {
        if (i < 0 || i >= mask_len) {
            throw ConfigError("selection_stats: subset index " +
                              std::to_string(i) + " outside mask of length " +
                              std::to_string(mask_len));
        }
        if (clean_mask[static_cast<std::size_t>(i)]) {
            ++selected_clean;
        } else {
            ++stats.n_bad_selected;
        }
    }
    Index total_clean = 0;
    for (std::uint8_t c : clean_mask) {
        total_clean += (c != 0);
    }
    stats.clean_recovery_ratio =
        total_clean > 0 ? static_cast<double>(selected_clean) /
                              static_cast<double>(total_clean)
                        : 0.0;
    return stats;
}

} // namespace itlm
