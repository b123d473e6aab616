#include "itlm/driver.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>

#include "itlm/rng.hpp"
#include "itlm/selection.hpp"

namespace itlm {

namespace {

template <class... Ts> struct Overload : Ts... { using Ts::operator()...; };
template <class... Ts> Overload(Ts...) -> Overload<Ts...>;

Parameter apply_update(const Parameter& theta, const Dataset& dataset,
                       std::span<const Index> subset,
                       const UpdatePolicy& policy, SplitMix64& rng) {
    return std::visit(
        Overload{
            [&](const ClosedFormUpdate&) {
                return closed_form_ls(dataset, subset);
            },
            [&](const BatchSgdUpdate&) {
                return batch_sgd_update(theta, dataset, subset, policy, rng);
            },
            [&](const FullGradientUpdate& fg) {
                return full_gradient_step(theta, dataset, subset, fg.eta);
            },
        },
        policy.mode);
}

InitMode default_init(const UpdatePolicy& policy) {
    if (std::holds_alternative<BatchSgdUpdate>(policy.mode)) {
        return RandomInit{1.0};
    }
    return FitAllInit{};
}

void record_truth_metrics(EstimationTrace& trace, const Dataset& dataset,
                          const Parameter& theta,
                          const std::vector<Index>* selected) {
    if (!dataset.truth) {
        return;
    }
    const TruthInfo& truth = *dataset.truth;
    trace.recovery_errors.push_back((theta.theta - truth.theta_star[0]).norm());
    if (selected != nullptr) {
        const SelectionStats stats =
            selection_stats(*selected, truth.clean_mask);
        trace.contamination.push_back(stats.n_bad_selected);
        trace.clean_recovery.push_back(stats.clean_recovery_ratio);
    }
}

} // namespace

EstimationTrace run_itlm(const Dataset& dataset, const ItlmConfig& config) {
    dataset.validate();
    const Index n = dataset.n();
    const Index d = dataset.d();
    const Index k = trim_count(config.alpha, n);
    if (k < 1) {
        throw ConfigError(fmt::format(
            "alpha {} keeps no samples out of {}", config.alpha, n));
    }
    if (config.rounds < 1) {
        throw ConfigError(fmt::format("round count must be >= 1, got {}",
                                      config.rounds));
    }
    const bool closed_form =
        std::holds_alternative<ClosedFormUpdate>(config.update.mode);
    if (closed_form) {
        if (!dataset.link.is_identity()) {
            throw ConfigError(
                "closed-form updates require the identity link");
        }
        if (k < d) {
            throw ConfigError(fmt::format(
                "alpha {} keeps {} samples, below parameter dimension {}",
                config.alpha, k, d));
        }
    }

    SplitMix64 init_rng(derive_stream(config.seed, 0));
    SplitMix64 update_rng(derive_stream(config.seed, 1));

    EstimationTrace trace;
    const InitMode init = config.init.value_or(default_init(config.update));

    Parameter theta{Vector::Zero(d)};
    try {
        std::visit(
            Overload{
                [&](const FitAllInit&) {
                    std::vector<Index> all(static_cast<std::size_t>(n));
                    std::iota(all.begin(), all.end(), Index{0});
                    theta = apply_update(theta, dataset, all, config.update,
                                         update_rng);
                },
                [&](const ZeroInit&) {},
                [&](const RandomInit& r) {
                    if (!(r.scale > 0.0)) {
                        throw ConfigError(fmt::format(
                            "init scale must be positive, got {}", r.scale));
                    }
                    for (Index j = 0; j < d; ++j) {
                        theta.theta[j] = r.scale * init_rng.next_gaussian();
                    }
                },
                [&](const GivenInit& g) {
                    if (g.theta.theta.size() != d) {
                        throw ConfigError(fmt::format(
                            "initial parameter dimension {} does not match "
                            "feature dimension {}",
                            g.theta.theta.size(), d));
                    }
                    theta = g.theta;
                },
            },
            init);
    } catch (const NumericalError& e) {
        throw EstimationAborted(
            fmt::format("initialization failed: {}", e.what()),
            std::move(trace));
    }

    for (Index t = 0; t < config.rounds; ++t) {
        if (!theta.theta.allFinite()) {
            throw EstimationAborted(
                fmt::format("parameter diverged entering round {}", t),
                std::move(trace));
        }
        const std::vector<double> losses = all_sample_losses(theta, dataset);
        std::vector<Index> sel = select_k_smallest(losses, k);
        double tl = 0.0;
        for (Index i : sel) {
            tl += losses[static_cast<std::size_t>(i)];
        }

        trace.thetas.push_back(theta);
        trace.trimmed_losses.push_back(tl);
        record_truth_metrics(trace, dataset, theta, &sel);
        trace.selected.push_back(std::move(sel));

        try {
            theta = apply_update(theta, dataset, trace.selected.back(),
                                 with_round_schedule(config.update, t),
                                 update_rng);
        } catch (const NumericalError& e) {
            throw EstimationAborted(
                fmt::format("update failed in round {}: {}", t, e.what()),
                std::move(trace));
        }
    }

    if (!theta.theta.allFinite()) {
        throw EstimationAborted(
            fmt::format("parameter diverged after round {}", config.rounds - 1),
            std::move(trace));
    }
    const std::vector<double> losses = all_sample_losses(theta, dataset);
    const std::vector<Index> final_sel = select_k_smallest(losses, k);
    double tl = 0.0;
    for (Index i : final_sel) {
        tl += losses[static_cast<std::size_t>(i)];
    }
    trace.thetas.push_back(theta);
    trace.trimmed_losses.push_back(tl);
    record_truth_metrics(trace, dataset, theta, nullptr);
    return trace;
}

bool stopping_check(const EstimationTrace& trace, double tol) {
    if (trace.thetas.size() < 2 || trace.selected.size() < 2) {
        throw ConfigError("stopping check needs at least two completed rounds");
    }
    if (!(tol >= 0.0)) {
        throw ConfigError(fmt::format("tolerance must be >= 0, got {}", tol));
    }
    const Parameter& last = trace.thetas[trace.thetas.size() - 1];
    const Parameter& prev = trace.thetas[trace.thetas.size() - 2];
    if ((last.theta - prev.theta).norm() <= tol) {
        return true;
    }
    const std::vector<Index>& s_last = trace.selected[trace.selected.size() - 1];
    const std::vector<Index>& s_prev = trace.selected[trace.selected.size() - 2];
    return s_last == s_prev;
}

} // namespace itlm
