#ifndef ITLM_GLM_HPP
#define ITLM_GLM_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "itlm/selection.hpp"

namespace itlm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Monotone increasing link applied to the linear predictor. Either the
/// identity or a piecewise-linear map with separate slopes on u < 0 and
/// u >= 0. The derivative at the kink u = 0 is the positive-branch slope,
/// so evaluation is deterministic. derivative(u) lies in
/// [min_derivative(), max_derivative()] with both bounds positive.
class LinkFunction {
public:
    static LinkFunction identity() { return LinkFunction(1.0, 1.0, true); }
    static LinkFunction piecewise_linear(double neg_slope, double pos_slope);

    double value(double u) const {
        return (u < 0.0 ? neg_slope_ : pos_slope_) * u;
    }
    double derivative(double u) const {
        return u < 0.0 ? neg_slope_ : pos_slope_;
    }
    double min_derivative() const {
        return neg_slope_ < pos_slope_ ? neg_slope_ : pos_slope_;
    }
    double max_derivative() const {
        return neg_slope_ > pos_slope_ ? neg_slope_ : pos_slope_;
    }
    bool is_identity() const { return identity_; }
    double neg_slope() const { return neg_slope_; }
    double pos_slope() const { return pos_slope_; }

    bool operator==(const LinkFunction&) const = default;

private:
    LinkFunction(double neg, double pos, bool ident)
        : neg_slope_(neg), pos_slope_(pos), identity_(ident) {}

    double neg_slope_;
    double pos_slope_;
    bool identity_;
};

/// Ground-truth metadata attached to generated datasets.
///
/// component_id[i] indexes into theta_star for rows generated by a model
/// component; rows whose response carries no generating component
/// (constant offsets, random outputs) use -1.
struct TruthInfo {
    std::vector<Vector> theta_star;        // one per component, component 0 first
    std::vector<std::uint8_t> clean_mask;  // 1 = generated by component 0
    std::vector<int> component_id;
};

/// Feature rows, responses, the link they were generated under, and
/// optional ground truth. Row i of `features` is the embedded feature
/// vector of sample i.
struct Dataset {
    Matrix features;   // n x d
    Vector responses;  // n
    LinkFunction link = LinkFunction::identity();
    std::optional<TruthInfo> truth;

    Index n() const { return features.rows(); }
    Index d() const { return features.cols(); }

    /// Throws ConfigError on any violated structural invariant.
    void validate() const;
};

struct Parameter {
    Vector theta;
};

struct TrimmedLoss {
    double value = 0.0;
    std::vector<Index> subset;  // sorted ascending, |subset| = floor(alpha*n)
};

/// floor(alpha * n) with a 1e-9 absolute tolerance so decimal fractions
/// like 0.6 * 5 land on the intended integer.
Index trim_count(double alpha, Index n);

/// omega(phi(x_i)' theta).
double predict(const Parameter& theta, const Dataset& dataset, Index i);

/// Squared loss (y_i - omega(phi(x_i)' theta))^2, no 1/2 factor.
double sample_loss(const Parameter& theta, const Dataset& dataset, Index i);

/// Exact gradient of sample_loss: -2 (y - omega(u)) omega'(u) phi(x), with
/// u = phi(x)' theta.
Vector loss_gradient(const Parameter& theta, const Dataset& dataset, Index i);

/// Sum of the floor(alpha*n) smallest sample losses at fixed theta, with
/// the minimizing index set (ties toward smaller indices).
TrimmedLoss trimmed_loss(const Parameter& theta, const Dataset& dataset,
                         double alpha);

/// Per-sample losses at theta for all rows; helper shared by the driver
/// and the trimmed-loss evaluation.
std::vector<double> all_sample_losses(const Parameter& theta,
                                      const Dataset& dataset);

} // namespace itlm

#endif // ITLM_GLM_HPP
