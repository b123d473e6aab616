#ifndef ITLM_STATS_HPP
#define ITLM_STATS_HPP

#include <span>

namespace itlm::stats {

struct Quartiles {
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
};

double mean(std::span<const double> values);

/// Sample standard deviation (n-1 denominator); 0 for a single value.
double sample_std(std::span<const double> values);

/// Linear-interpolation quantile on the sorted copy (the common
/// "type 7" rule), p in [0, 1].
double quantile(std::span<const double> values, double p);

double median(std::span<const double> values);

Quartiles quartiles(std::span<const double> values);

/// Spearman rank correlation with average ranks on ties. Throws
/// NumericalError when either side has zero rank variance.
double spearman(std::span<const double> a, std::span<const double> b);

} // namespace itlm::stats

#endif // ITLM_STATS_HPP
