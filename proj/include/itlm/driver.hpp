#ifndef ITLM_DRIVER_HPP
#define ITLM_DRIVER_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "itlm/errors.hpp"
#include "itlm/glm.hpp"
#include "itlm/model_update.hpp"

namespace itlm {

/// Initial parameter for the alternation. The default depends on the
/// update mode: fit-all for closed form and full gradient, random with
/// scale 1 for batch SGD.
struct FitAllInit {};            // run the configured update once on all rows
struct ZeroInit {};              // theta_0 = 0
struct RandomInit {              // theta_0 ~ scale * N(0, I)
    double scale = 1.0;
};
struct GivenInit {               // theta_0 supplied by the caller
    Parameter theta;
};
using InitMode = std::variant<FitAllInit, ZeroInit, RandomInit, GivenInit>;

struct ItlmConfig {
    double alpha = 0.8;          // fraction of samples kept per round
    Index rounds = 10;
    std::optional<InitMode> init;
    UpdatePolicy update;
    std::uint64_t seed = 0;
};

/// Full trajectory of one run. With T rounds: thetas and trimmed_losses
/// hold T+1 entries (before round 0 through after round T-1), selected
/// holds the T per-round index sets. The truth-dependent vectors are
/// filled only when the dataset carries ground truth: recovery_errors
/// (T+1) measures distance to the first truth component, contamination
/// (T) counts selected rows outside the clean set, clean_recovery (T) is
/// the fraction of clean rows selected.
struct EstimationTrace {
    std::vector<Parameter> thetas;
    std::vector<std::vector<Index>> selected;
    std::vector<double> trimmed_losses;
    std::vector<double> recovery_errors;
    std::vector<Index> contamination;
    std::vector<double> clean_recovery;
};

/// Mid-run numerical failure (rank-deficient selected subset, divergent
/// parameters). Carries everything recorded before the failing round.
class EstimationAborted : public NumericalError {
public:
    EstimationAborted(const std::string& message, EstimationTrace partial)
        : NumericalError(message), trace_(std::move(partial)) {}
    const EstimationTrace& partial_trace() const { return trace_; }

private:
    EstimationTrace trace_;
};

/// Alternating estimation: round t keeps the floor(alpha*n) rows with the
/// smallest loss at theta_t, then updates the parameter on that subset
/// (the round index feeds the step-count schedule). Randomness is split
/// off config.seed: stream 0 initializes theta, stream 1 drives batch
/// sampling and re-initialization across all rounds.
EstimationTrace run_itlm(const Dataset& dataset, const ItlmConfig& config);

/// True when the last two parameters are within tol of each other or the
/// last two selected sets are identical. Needs at least two completed
/// rounds.
bool stopping_check(const EstimationTrace& trace, double tol);

} // namespace itlm

#endif // ITLM_DRIVER_HPP
