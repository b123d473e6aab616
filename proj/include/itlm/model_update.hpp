#ifndef ITLM_MODEL_UPDATE_HPP
#define ITLM_MODEL_UPDATE_HPP

#include <map>
#include <span>
#include <variant>

#include "itlm/glm.hpp"
#include "itlm/rng.hpp"

namespace itlm {

/// Exact least squares on the selected rows. Identity link only.
struct ClosedFormUpdate {};

/// `steps` gradient steps of size `eta`, each on a batch of `batch`
/// indices drawn uniformly without replacement from the selected set.
/// With `reinit` the input parameter is replaced by a spherical Gaussian
/// draw of the given scale before the first step.
struct BatchSgdUpdate {
    double eta = 0.1;
    Index steps = 1;
    Index batch = 1;
    bool reinit = false;
    double reinit_scale = 1.0;
};

/// One deterministic step along the mean gradient of the selected set.
struct FullGradientUpdate {
    double eta = 0.1;
};

struct UpdatePolicy {
    std::variant<ClosedFormUpdate, BatchSgdUpdate, FullGradientUpdate> mode =
        ClosedFormUpdate{};
    /// Per-round override of the step count, batch SGD only. Rounds not
    /// present use the policy's own step count.
    std::map<Index, Index> steps_schedule;
};

/// Copy of `policy` with the batch-SGD step count replaced by the
/// schedule entry for `round`, when one exists.
UpdatePolicy with_round_schedule(const UpdatePolicy& policy, Index round);

/// Least-squares minimizer of the subset loss under the identity link,
/// solved through an orthogonal factorization of the selected rows.
/// Throws NumericalError when the subset Gram matrix has a relative
/// eigenvalue gap below 1e-10 (the ratio is reported), ConfigError on a
/// non-identity link or |subset| < d.
Parameter closed_form_ls(const Dataset& dataset, std::span<const Index> subset);

/// Algorithm: (optionally re-initialize), then `steps` times draw a batch
/// and move against its mean gradient. `policy.mode` must hold
/// BatchSgdUpdate. A full batch (batch == |subset|) consumes no
/// randomness, so the step is deterministic given theta.
Parameter batch_sgd_update(const Parameter& theta, const Dataset& dataset,
                           std::span<const Index> subset,
                           const UpdatePolicy& policy, SplitMix64& rng);

/// theta - (eta/|subset|) * sum of sample-loss gradients over the subset.
/// Bit-identical to batch_sgd_update with one step and a full batch.
Parameter full_gradient_step(const Parameter& theta, const Dataset& dataset,
                             std::span<const Index> subset, double eta);

} // namespace itlm

#endif // ITLM_MODEL_UPDATE_HPP
