#include "itlm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <vector>

#include "itlm/errors.hpp"

namespace itlm::stats {

namespace {

void require_nonempty(std::span<const double> values) {
    if (values.empty()) {
        throw ConfigError("statistic of an empty sample");
    }
}

/// Average ranks, 1-based, ties share their mean rank.
std::vector<double> ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> out(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double shared = 0.5 * (static_cast<double>(i + 1) +
                                     static_cast<double>(j + 1));
        for (std::size_t l = i; l <= j; ++l) {
            out[order[l]] = shared;
        }
        i = j + 1;
    }
    return out;
}

} // namespace

double mean(std::span<const double> values) {
    require_nonempty(values);
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
    require_nonempty(values);
    if (values.size() < 2) {
        return 0.0;
    }
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double quantile(std::span<const double> values, double p) {
    require_nonempty(values);
    if (!(p >= 0.0) || p > 1.0) {
        throw ConfigError(fmt::format("quantile level {} outside [0, 1]", p));
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double median(std::span<const double> values) {
    return quantile(values, 0.5);
}

Quartiles quartiles(std::span<const double> values) {
    return Quartiles{quantile(values, 0.25), quantile(values, 0.5),
                     quantile(values, 0.75)};
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ConfigError(fmt::format(
            "rank correlation needs equal lengths, got {} and {}", a.size(),
            b.size()));
    }
    if (a.size() < 2) {
        throw ConfigError("rank correlation needs at least two pairs");
    }
    const std::vector<double> ra = ranks(a);
    const std::vector<double> rb = ranks(b);
    const double ma = mean(ra);
    const double mb = mean(rb);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - ma;
        const double db = rb[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (!(va > 0.0) || !(vb > 0.0)) {
        throw NumericalError("rank correlation undefined: constant input");
    }
    return cov / std::sqrt(va * vb);
}

} // namespace itlm::stats
