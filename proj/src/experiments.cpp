#include "itlm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "itlm/errors.hpp"
#include "itlm/model_update.hpp"
#include "itlm/parallel.hpp"
#include "itlm/rng.hpp"
#include "itlm/stats.hpp"
#include "itlm/version.hpp"

namespace itlm {

namespace {

template <class... Ts> struct Overload : Ts... { using Ts::operator()...; };
template <class... Ts> Overload(Ts...) -> Overload<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_index(Index v) { return std::to_string(v); }

/// One scenario cell of a scalar sweep.
struct GridPoint {
    Index n = 0;
    double alpha_star = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
};

std::vector<GridPoint> build_grid(const SweepSpec& spec) {
    std::vector<GridPoint> grid;
    const GenConfig& gen = spec.base_gen;
    switch (spec.experiment) {
    case ExperimentKind::inconsistency:
        if (spec.n_grid.empty()) {
            throw ConfigError("inconsistency sweep needs sample sizes");
        }
        for (Index n : spec.n_grid) {
            grid.push_back({n, gen.alpha_star, spec.base_fit.alpha, gen.sigma});
        }
        break;
    case ExperimentKind::recovery_vs_alpha_star:
    case ExperimentKind::nonlinear: {
        if (spec.alpha_star_grid.empty()) {
            throw ConfigError("recovery sweep needs clean-fraction values");
        }
        // The kept fraction tracks the clean fraction at the base gap.
        const double gap = gen.alpha_star - spec.base_fit.alpha;
        for (double alpha_star : spec.alpha_star_grid) {
            grid.push_back({gen.n, alpha_star, alpha_star - gap, gen.sigma});
        }
        break;
    }
    case ExperimentKind::misspecification:
        if (spec.delta_alpha_grid.empty()) {
            throw ConfigError("misspecification sweep needs gap values");
        }
        for (double delta : spec.delta_alpha_grid) {
            grid.push_back(
                {gen.n, gen.alpha_star, gen.alpha_star - delta, gen.sigma});
        }
        break;
    default:
        throw ConfigError("experiment is not a scalar sweep");
    }
    for (const GridPoint& p : grid) {
        if (!(p.alpha > 0.0) || p.alpha > 1.0) {
            throw ConfigError(fmt::format(
                "grid produces kept fraction {} outside (0, 1]", p.alpha));
        }
        if (!(p.alpha_star > 0.0) || p.alpha_star > 1.0) {
            throw ConfigError(fmt::format(
                "grid produces clean fraction {} outside (0, 1]",
                p.alpha_star));
        }
    }
    return grid;
}

std::uint64_t run_seed_for(const SweepSpec& spec, Index g, Index r) {
    return derive_stream(
        derive_stream(spec.base_gen.seed, static_cast<std::uint64_t>(g)),
        static_cast<std::uint64_t>(r));
}

GenConfig point_gen_config(const SweepSpec& spec, const GridPoint& p,
                           std::uint64_t run_seed) {
    GenConfig gc = spec.base_gen;
    gc.n = p.n;
    gc.alpha_star = p.alpha_star;
    gc.sigma = p.sigma;
    gc.seed = derive_stream(run_seed, 0);
    return gc;
}

struct RunResult {
    std::uint64_t seed = 0;
    bool ok = false;
    Index rounds = 0;
    double final_error = kInf;
    double oracle_error = kInf;
    double naive_error = kInf;
    double trimmed = kInf;
    double clean_recovery = 0.0;
    Index contamination = -1;
};

RunResult run_scalar_one(const SweepSpec& spec, const GridPoint& p, Index g,
                         Index r) {
    RunResult out;
    out.seed = run_seed_for(spec, g, r);
    const Dataset ds = generate(point_gen_config(spec, p, out.seed));

    ItlmConfig fc = spec.base_fit;
    fc.alpha = p.alpha;
    fc.seed = derive_stream(out.seed, 1);
    try {
        const EstimationTrace trace = run_itlm(ds, fc);
        out.ok = true;
        out.rounds = static_cast<Index>(trace.selected.size());
        out.final_error = trace.recovery_errors.back();
        out.trimmed = trace.trimmed_losses.back();
        out.contamination = trace.contamination.back();
        out.clean_recovery = trace.clean_recovery.back();
    } catch (const EstimationAborted&) {
        // Sentinels stay; the row reports status=aborted.
    }

    std::vector<Index> clean;
    std::vector<Index> all(static_cast<std::size_t>(ds.n()));
    std::iota(all.begin(), all.end(), Index{0});
    for (Index i = 0; i < ds.n(); ++i) {
        if (ds.truth->clean_mask[static_cast<std::size_t>(i)] != 0) {
            clean.push_back(i);
        }
    }
    const Vector& star = ds.truth->theta_star[0];
    try {
        out.oracle_error = (fit_subset(ds, clean).theta - star).norm();
    } catch (const Error&) {
    }
    try {
        out.naive_error = (fit_subset(ds, all).theta - star).norm();
    } catch (const Error&) {
    }
    return out;
}

Table scalar_sweep(const SweepSpec& spec) {
    if (spec.repeats < 1) {
        throw ConfigError(fmt::format("repeats must be >= 1, got {}",
                                      spec.repeats));
    }
    const std::vector<GridPoint> grid = build_grid(spec);
    const Index n_grid = static_cast<Index>(grid.size());
    const Index total = n_grid * spec.repeats;
    std::vector<RunResult> results(static_cast<std::size_t>(total));
    parallel_for(total, spec.threads, [&](Index idx) {
        const Index g = idx / spec.repeats;
        const Index r = idx % spec.repeats;
        results[static_cast<std::size_t>(idx)] =
            run_scalar_one(spec, grid[static_cast<std::size_t>(g)], g, r);
    });

    Table table;
    table.header = {
        "row_kind",          "experiment",
        "grid_index",        "n",
        "d",                 "alpha_star",
        "alpha",             "sigma",
        "repeat",            "seed",
        "status",            "rounds",
        "final_error",       "oracle_error",
        "naive_error",       "final_trimmed_loss",
        "final_contamination", "final_clean_recovery",
        "mean_error",        "median_error",
        "std_error",         "mean_clean_recovery",
        "median_oracle_error", "median_naive_error",
    };
    const std::string name = experiment_name(spec.experiment);
    const std::string d_str = fmt_index(spec.base_gen.d);

    for (Index g = 0; g < n_grid; ++g) {
        const GridPoint& p = grid[static_cast<std::size_t>(g)];
        for (Index r = 0; r < spec.repeats; ++r) {
            const RunResult& res =
                results[static_cast<std::size_t>(g * spec.repeats + r)];
            table.rows.push_back({
                "run", name, fmt_index(g), fmt_index(p.n), d_str,
                format_double(p.alpha_star), format_double(p.alpha),
                format_double(p.sigma), fmt_index(r),
                std::to_string(res.seed), res.ok ? "ok" : "aborted",
                fmt_index(res.rounds), format_double(res.final_error),
                format_double(res.oracle_error),
                format_double(res.naive_error), format_double(res.trimmed),
                fmt_index(res.contamination),
                format_double(res.clean_recovery),
                "", "", "", "", "", "",
            });
        }
    }
    for (Index g = 0; g < n_grid; ++g) {
        const GridPoint& p = grid[static_cast<std::size_t>(g)];
        std::vector<double> errors, oracle, naive, recovery;
        for (Index r = 0; r < spec.repeats; ++r) {
            const RunResult& res =
                results[static_cast<std::size_t>(g * spec.repeats + r)];
            errors.push_back(res.final_error);
            oracle.push_back(res.oracle_error);
            naive.push_back(res.naive_error);
            recovery.push_back(res.clean_recovery);
        }
        table.rows.push_back({
            "aggregate", name, fmt_index(g), fmt_index(p.n), d_str,
            format_double(p.alpha_star), format_double(p.alpha),
            format_double(p.sigma), "", "", "", "", "", "", "", "", "", "",
            format_double(stats::mean(errors)),
            format_double(stats::median(errors)),
            format_double(stats::sample_std(errors)),
            format_double(stats::mean(recovery)),
            format_double(stats::median(oracle)),
            format_double(stats::median(naive)),
        });
    }
    return table;
}

nlohmann::ordered_json link_json(const LinkFunction& link) {
    if (link.is_identity()) {
        return {{"kind", "identity"}};
    }
    return {{"kind", "piecewise"},
            {"neg_slope", link.neg_slope()},
            {"pos_slope", link.pos_slope()}};
}

nlohmann::ordered_json corruption_json(const CorruptionModel& corruption) {
    return std::visit(
        Overload{
            [](const NoCorruption&) {
                return nlohmann::ordered_json{{"kind", "none"}};
            },
            [](const ConstantCorruption& c) {
                return nlohmann::ordered_json{{"kind", "constant"},
                                              {"value", c.value}};
            },
            [](const AdversarialModelCorruption& c) {
                return nlohmann::ordered_json{
                    {"kind", "adversarial_model"},
                    {"offset", c.offset},
                    {"dimension", c.theta_adv.size()}};
            },
            [](const RandomOutputCorruption& c) {
                return nlohmann::ordered_json{{"kind", "random_output"},
                                              {"std", c.std_dev}};
            },
            [](const MixtureCorruption& c) {
                return nlohmann::ordered_json{
                    {"kind", "mixture"},
                    {"weights", c.weights},
                    {"explicit_components", c.extra_components.size()}};
            },
        },
        corruption);
}

nlohmann::ordered_json update_json(const UpdatePolicy& policy) {
    nlohmann::ordered_json out = std::visit(
        Overload{
            [](const ClosedFormUpdate&) {
                return nlohmann::ordered_json{{"mode", "closed_form"}};
            },
            [](const BatchSgdUpdate& u) {
                return nlohmann::ordered_json{
                    {"mode", "batch_sgd"}, {"eta", u.eta},
                    {"steps", u.steps},    {"batch", u.batch},
                    {"reinit", u.reinit},  {"reinit_scale", u.reinit_scale}};
            },
            [](const FullGradientUpdate& u) {
                return nlohmann::ordered_json{{"mode", "full_gradient"},
                                              {"eta", u.eta}};
            },
        },
        policy.mode);
    if (!policy.steps_schedule.empty()) {
        nlohmann::ordered_json schedule;
        for (const auto& [round, steps] : policy.steps_schedule) {
            schedule[std::to_string(round)] = steps;
        }
        out["steps_schedule"] = schedule;
    }
    return out;
}

nlohmann::ordered_json init_json(const std::optional<InitMode>& init) {
    if (!init) {
        return {{"mode", "default"}};
    }
    return std::visit(
        Overload{
            [](const FitAllInit&) {
                return nlohmann::ordered_json{{"mode", "fit_all"}};
            },
            [](const ZeroInit&) {
                return nlohmann::ordered_json{{"mode", "zero"}};
            },
            [](const RandomInit& r) {
                return nlohmann::ordered_json{{"mode", "random"},
                                              {"scale", r.scale}};
            },
            [](const GivenInit&) {
                return nlohmann::ordered_json{{"mode", "given"}};
            },
        },
        *init);
}

nlohmann::ordered_json sweep_metadata(const SweepSpec& spec) {
    nlohmann::ordered_json meta;
    meta["artifact_version"] = kArtifactVersion;
    meta["seed_split_rule"] = kSeedSplitRule;
    meta["experiment"] = experiment_name(spec.experiment);
    meta["repeats"] = spec.repeats;
    meta["base_seed"] = spec.base_gen.seed;
    nlohmann::ordered_json grids;
    if (!spec.n_grid.empty()) grids["n"] = spec.n_grid;
    if (!spec.alpha_star_grid.empty()) grids["alpha_star"] = spec.alpha_star_grid;
    if (!spec.delta_alpha_grid.empty()) grids["delta_alpha"] = spec.delta_alpha_grid;
    if (!spec.sigma_grid.empty()) grids["sigma"] = spec.sigma_grid;
    if (!spec.rho_grid.empty()) grids["rho"] = spec.rho_grid;
    meta["grid"] = grids;
    meta["gen"] = {
        {"n", spec.base_gen.n},
        {"d", spec.base_gen.d},
        {"alpha_star", spec.base_gen.alpha_star},
        {"sigma", spec.base_gen.sigma},
        {"link", link_json(spec.base_gen.link)},
        {"corruption", corruption_json(spec.base_gen.corruption)},
        {"theta_star", spec.base_gen.theta_star ? "given" : "unit"},
    };
    meta["fit"] = {
        {"alpha", spec.base_fit.alpha},
        {"rounds", spec.base_fit.rounds},
        {"update", update_json(spec.base_fit.update)},
        {"init", init_json(spec.base_fit.init)},
    };
    return meta;
}

} // namespace

ExperimentKind parse_experiment(const std::string& name) {
    if (name == "inconsistency") return ExperimentKind::inconsistency;
    if (name == "recovery_vs_alpha_star")
        return ExperimentKind::recovery_vs_alpha_star;
    if (name == "misspecification") return ExperimentKind::misspecification;
    if (name == "convergence") return ExperimentKind::convergence;
    if (name == "mixture_local") return ExperimentKind::mixture_local;
    if (name == "nonlinear") return ExperimentKind::nonlinear;
    throw ConfigError(fmt::format(
        "unknown experiment '{}' (expected inconsistency, "
        "recovery_vs_alpha_star, misspecification, convergence, "
        "mixture_local, or nonlinear)",
        name));
}

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::inconsistency: return "inconsistency";
    case ExperimentKind::recovery_vs_alpha_star:
        return "recovery_vs_alpha_star";
    case ExperimentKind::misspecification: return "misspecification";
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::mixture_local: return "mixture_local";
    case ExperimentKind::nonlinear: return "nonlinear";
    }
    throw ConfigError("invalid experiment kind");
}

Parameter fit_subset(const Dataset& dataset,
                     const std::vector<Index>& subset) {
    if (dataset.link.is_identity()) {
        return closed_form_ls(dataset, subset);
    }
    // Smooth strongly-convex-like objective under a positive-slope link:
    // plain descent with a conservative step converges well below the
    // noise floor of every study here.
    Parameter theta{Vector::Zero(dataset.d())};
    for (int iter = 0; iter < 400; ++iter) {
        Parameter next = full_gradient_step(theta, dataset, subset, 0.1);
        const double moved = (next.theta - theta.theta).norm();
        theta = std::move(next);
        if (moved <= 1e-12) {
            break;
        }
    }
    return theta;
}

Table convergence_curve(const SweepSpec& spec) {
    if (spec.sigma_grid.empty()) {
        throw ConfigError("convergence study needs noise levels");
    }
    if (spec.repeats < 1) {
        throw ConfigError(fmt::format("repeats must be >= 1, got {}",
                                      spec.repeats));
    }
    double fg_eta = 0.3;
    if (const auto* fg =
            std::get_if<FullGradientUpdate>(&spec.base_fit.update.mode)) {
        fg_eta = fg->eta;
    }
    struct Variant {
        const char* name;
        UpdatePolicy policy;
    };
    const std::vector<Variant> variants = {
        {"closed_form", UpdatePolicy{ClosedFormUpdate{}, {}}},
        {"full_gradient", UpdatePolicy{FullGradientUpdate{fg_eta}, {}}},
    };

    const Index n_sigma = static_cast<Index>(spec.sigma_grid.size());
    const Index n_var = static_cast<Index>(variants.size());
    const Index n_rounds = spec.base_fit.rounds;
    const Index total = n_sigma * n_var * spec.repeats;
    std::vector<std::vector<double>> errors(static_cast<std::size_t>(total));

    parallel_for(total, spec.threads, [&](Index idx) {
        const Index g = idx / spec.repeats;
        const Index r = idx % spec.repeats;
        const Index si = g / n_var;
        const Index vi = g % n_var;
        const std::uint64_t run_seed = run_seed_for(spec, g, r);

        GenConfig gc = spec.base_gen;
        gc.sigma = spec.sigma_grid[static_cast<std::size_t>(si)];
        gc.seed = derive_stream(run_seed, 0);
        const Dataset ds = generate(gc);

        ItlmConfig fc = spec.base_fit;
        fc.update = variants[static_cast<std::size_t>(vi)].policy;
        fc.seed = derive_stream(run_seed, 1);
        std::vector<double> per_round;
        try {
            per_round = run_itlm(ds, fc).recovery_errors;
        } catch (const EstimationAborted& e) {
            per_round = e.partial_trace().recovery_errors;
        }
        per_round.resize(static_cast<std::size_t>(n_rounds + 1), kInf);
        errors[static_cast<std::size_t>(idx)] = std::move(per_round);
    });

    Table table;
    table.header = {"experiment", "sigma",        "variant",
                    "round",      "n_runs",       "median_error",
                    "q1_error",   "q3_error"};
    const std::string name = experiment_name(ExperimentKind::convergence);
    for (Index si = 0; si < n_sigma; ++si) {
        for (Index vi = 0; vi < n_var; ++vi) {
            const Index g = si * n_var + vi;
            for (Index t = 0; t <= n_rounds; ++t) {
                std::vector<double> at_round;
                at_round.reserve(static_cast<std::size_t>(spec.repeats));
                for (Index r = 0; r < spec.repeats; ++r) {
                    at_round.push_back(
                        errors[static_cast<std::size_t>(g * spec.repeats + r)]
                              [static_cast<std::size_t>(t)]);
                }
                const stats::Quartiles q = stats::quartiles(at_round);
                table.rows.push_back({
                    name,
                    format_double(spec.sigma_grid[static_cast<std::size_t>(si)]),
                    variants[static_cast<std::size_t>(vi)].name,
                    fmt_index(t),
                    fmt_index(spec.repeats),
                    format_double(q.q2),
                    format_double(q.q1),
                    format_double(q.q3),
                });
            }
        }
    }
    return table;
}

Table mixture_local_experiment(const SweepSpec& spec) {
    const auto* mix =
        std::get_if<MixtureCorruption>(&spec.base_gen.corruption);
    if (mix == nullptr) {
        throw ConfigError("mixture study requires mixture corruption");
    }
    if (spec.rho_grid.empty()) {
        throw ConfigError("mixture study needs initialization distances");
    }
    if (spec.repeats < 1) {
        throw ConfigError(fmt::format("repeats must be >= 1, got {}",
                                      spec.repeats));
    }
    if (mix->weights.size() < 2 ||
        !(spec.base_fit.alpha < mix->weights[0])) {
        throw ConfigError(fmt::format(
            "kept fraction {} must stay below the target component weight",
            spec.base_fit.alpha));
    }
    const double threshold = 10.0 * spec.base_gen.sigma + 0.01;
    const Index n_rho = static_cast<Index>(spec.rho_grid.size());
    const Index total = n_rho * spec.repeats;

    struct MixResult {
        double dist0 = kInf;
        double dist1 = kInf;
    };
    std::vector<MixResult> results(static_cast<std::size_t>(total));

    parallel_for(total, spec.threads, [&](Index idx) {
        const Index g = idx / spec.repeats;
        const Index r = idx % spec.repeats;
        const double rho = spec.rho_grid[static_cast<std::size_t>(g)];
        const std::uint64_t run_seed = run_seed_for(spec, g, r);

        GenConfig gc = spec.base_gen;
        gc.seed = derive_stream(run_seed, 0);
        const Dataset ds = generate_mixture(gc);
        const Vector& star0 = ds.truth->theta_star[0];
        const Vector& star1 = ds.truth->theta_star[1];

        Vector start = star0;
        if (rho > 0.0) {
            SplitMix64 dir_rng(derive_stream(run_seed, 2));
            Vector u(ds.d());
            double norm = 0.0;
            do {
                for (Index j = 0; j < ds.d(); ++j) {
                    u[j] = dir_rng.next_gaussian();
                }
                norm = u.norm();
            } while (!(norm > 0.0));
            start += (rho / norm) * u;
        }

        ItlmConfig fc = spec.base_fit;
        fc.init = GivenInit{Parameter{start}};
        fc.seed = derive_stream(run_seed, 1);
        MixResult out;
        try {
            const EstimationTrace trace = run_itlm(ds, fc);
            out.dist0 = (trace.thetas.back().theta - star0).norm();
            out.dist1 = (trace.thetas.back().theta - star1).norm();
        } catch (const EstimationAborted&) {
            // inf sentinels count as non-converged
        }
        results[static_cast<std::size_t>(idx)] = out;
    });

    Table table;
    table.header = {"experiment",
                    "rho",
                    "sigma",
                    "alpha",
                    "threshold",
                    "n_runs",
                    "converged_component0",
                    "fraction_component0",
                    "converged_component1",
                    "fraction_component1",
                    "median_distance_component0"};
    const std::string name = experiment_name(ExperimentKind::mixture_local);
    for (Index g = 0; g < n_rho; ++g) {
        Index conv0 = 0;
        Index conv1 = 0;
        std::vector<double> dist0;
        for (Index r = 0; r < spec.repeats; ++r) {
            const MixResult& res =
                results[static_cast<std::size_t>(g * spec.repeats + r)];
            if (res.dist0 <= threshold) ++conv0;
            if (res.dist1 <= threshold) ++conv1;
            dist0.push_back(res.dist0);
        }
        const double repeats = static_cast<double>(spec.repeats);
        table.rows.push_back({
            name,
            format_double(spec.rho_grid[static_cast<std::size_t>(g)]),
            format_double(spec.base_gen.sigma),
            format_double(spec.base_fit.alpha),
            format_double(threshold),
            fmt_index(spec.repeats),
            fmt_index(conv0),
            format_double(static_cast<double>(conv0) / repeats),
            fmt_index(conv1),
            format_double(static_cast<double>(conv1) / repeats),
            format_double(stats::median(dist0)),
        });
    }
    return table;
}

Table trace_table(const EstimationTrace& trace, const Dataset& dataset) {
    Table table;
    table.header = {"round",          "trimmed_loss", "theta_norm",
                    "step_norm",      "selected_size", "recovery_error",
                    "contamination",  "clean_recovery"};
    const bool truth = dataset.truth.has_value();
    for (std::size_t t = 0; t < trace.thetas.size(); ++t) {
        std::vector<std::string> row;
        row.push_back(std::to_string(t));
        row.push_back(format_double(trace.trimmed_losses[t]));
        row.push_back(format_double(trace.thetas[t].theta.norm()));
        row.push_back(t > 0 ? format_double((trace.thetas[t].theta -
                                             trace.thetas[t - 1].theta)
                                                .norm())
                            : "");
        row.push_back(t < trace.selected.size()
                          ? std::to_string(trace.selected[t].size())
                          : "");
        row.push_back(truth ? format_double(trace.recovery_errors[t]) : "");
        row.push_back(truth && t < trace.contamination.size()
                          ? fmt_index(trace.contamination[t])
                          : "");
        row.push_back(truth && t < trace.clean_recovery.size()
                          ? format_double(trace.clean_recovery[t])
                          : "");
        table.rows.push_back(std::move(row));
    }
    return table;
}

SweepSpec default_sweep(ExperimentKind kind) {
    SweepSpec spec;
    spec.experiment = kind;
    spec.repeats = 100;
    spec.base_gen.n = 1000;
    spec.base_gen.d = 100;
    spec.base_gen.alpha_star = 0.8;
    spec.base_gen.sigma = 0.2;
    spec.base_gen.link = LinkFunction::identity();
    spec.base_gen.corruption = RandomOutputCorruption{1.0};
    spec.base_gen.seed = 20260818;
    spec.base_fit.alpha = 0.75;
    spec.base_fit.rounds = 10;
    spec.base_fit.update = UpdatePolicy{ClosedFormUpdate{}, {}};

    switch (kind) {
    case ExperimentKind::inconsistency:
        spec.base_gen.sigma = 1.0;
        spec.n_grid = {1000, 5000, 25000};
        break;
    case ExperimentKind::recovery_vs_alpha_star:
        spec.alpha_star_grid = {0.60, 0.65, 0.70, 0.75,
                                0.80, 0.85, 0.90, 0.95};
        break;
    case ExperimentKind::misspecification:
        spec.delta_alpha_grid = {0.05, 0.10, 0.15};
        break;
    case ExperimentKind::convergence:
        spec.sigma_grid = {0.01, 0.05, 0.10, 0.20};
        spec.base_fit.rounds = 30;
        break;
    case ExperimentKind::mixture_local:
        spec.rho_grid = {0.0, 0.1, 0.5, 1.0, 1.4};
        spec.base_gen.sigma = 0.05;
        spec.base_gen.corruption = MixtureCorruption{{}, {0.7, 0.3}};
        spec.base_fit.alpha = 0.65;
        spec.base_fit.rounds = 15;
        break;
    case ExperimentKind::nonlinear:
        spec.base_gen.link = LinkFunction::piecewise_linear(1.0, 1.2);
        spec.base_fit.update = UpdatePolicy{FullGradientUpdate{0.3}, {}};
        spec.base_fit.rounds = 40;
        spec.alpha_star_grid = {0.60, 0.65, 0.70, 0.75,
                                0.80, 0.85, 0.90, 0.95};
        break;
    }
    return spec;
}

Table run_sweep(const SweepSpec& spec) {
    Table table;
    switch (spec.experiment) {
    case ExperimentKind::convergence:
        table = convergence_curve(spec);
        break;
    case ExperimentKind::mixture_local:
        table = mixture_local_experiment(spec);
        break;
    default:
        table = scalar_sweep(spec);
        break;
    }
    if (!spec.output_path.empty()) {
        emit_csv(table, spec.output_path, sweep_metadata(spec));
    }
    return table;
}

} // namespace itlm
