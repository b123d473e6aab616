#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <fmt/format.h>
#include <optional>
#include <string>
#include <vector>

#include "itlm/csv.hpp"
#include "itlm/datagen.hpp"
#include "itlm/dataset_io.hpp"
#include "itlm/driver.hpp"
#include "itlm/errors.hpp"
#include "itlm/experiments.hpp"
#include "itlm/oracle.hpp"
#include "itlm/version.hpp"

namespace {

using itlm::Index;

struct GenerateOptions {
    Index n = 1000;
    Index d = 100;
    double alpha_star = 0.8;
    double sigma = 0.2;
    std::uint64_t seed = 0;
    std::string link = "identity";
    double neg_slope = 1.0;
    double pos_slope = 1.2;
    std::string corruption = "random_output";
    double constant_value = 0.0;
    std::vector<double> adv_theta;
    double adv_offset = 0.0;
    double random_std = 1.0;
    std::vector<double> mixture_weights;
    std::vector<double> theta_star;
    std::string out;
};

struct UpdateOptions {
    std::string update = "closed_form";
    double eta = 0.1;
    Index steps = 10;
    Index batch = 32;
    bool reinit = false;
    double reinit_scale = 1.0;
    std::vector<std::string> schedule;
};

struct FitOptions {
    std::string data;
    double alpha = 0.75;
    Index rounds = 10;
    std::uint64_t seed = 0;
    UpdateOptions upd;
    std::string init;  // empty: library default for the update mode
    double init_scale = 1.0;
    std::vector<double> init_theta;
    std::string trace_out;
};

struct OracleOptions {
    std::string data;
    std::optional<double> alpha;
    std::optional<Index> k;
    Index max_n = 20;
    std::uint64_t max_subsets = 200000;
};

struct SweepOptions {
    std::string experiment;
    std::string out;
    Index repeats = 0;  // 0: keep the experiment default
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    std::vector<Index> n_grid;
    std::vector<double> alpha_star_grid;
    std::vector<double> delta_grid;
    std::vector<double> sigma_grid;
    std::vector<double> rho_grid;
    std::optional<Index> n;
    std::optional<Index> d;
    std::optional<double> sigma;
    std::optional<double> alpha_star;
    std::optional<double> alpha;
    std::optional<Index> rounds;
    std::optional<std::string> update;
    std::optional<double> eta;
};

itlm::LinkFunction build_link(const std::string& kind, double neg,
                              double pos) {
    if (kind == "identity") {
        return itlm::LinkFunction::identity();
    }
    if (kind == "piecewise") {
        return itlm::LinkFunction::piecewise_linear(neg, pos);
    }
    throw itlm::ConfigError(fmt::format(
        "unknown link '{}' (expected identity or piecewise)", kind));
}

itlm::CorruptionModel build_corruption(const GenerateOptions& opt) {
    if (opt.corruption == "none") {
        return itlm::NoCorruption{};
    }
    if (opt.corruption == "constant") {
        return itlm::ConstantCorruption{opt.constant_value};
    }
    if (opt.corruption == "adversarial") {
        if (opt.adv_theta.empty()) {
            throw itlm::ConfigError(
                "adversarial corruption needs --adv-theta values");
        }
        itlm::Vector theta(static_cast<Index>(opt.adv_theta.size()));
        for (std::size_t j = 0; j < opt.adv_theta.size(); ++j) {
            theta[static_cast<Index>(j)] = opt.adv_theta[j];
        }
        return itlm::AdversarialModelCorruption{std::move(theta),
                                                opt.adv_offset};
    }
    if (opt.corruption == "random_output") {
        return itlm::RandomOutputCorruption{opt.random_std};
    }
    if (opt.corruption == "mixture") {
        if (opt.mixture_weights.empty()) {
            throw itlm::ConfigError(
                "mixture corruption needs --mixture-weights values");
        }
        return itlm::MixtureCorruption{{}, opt.mixture_weights};
    }
    throw itlm::ConfigError(fmt::format(
        "unknown corruption '{}' (expected none, constant, adversarial, "
        "random_output, or mixture)",
        opt.corruption));
}

itlm::UpdatePolicy build_update(const UpdateOptions& opt) {
    itlm::UpdatePolicy policy;
    if (opt.update == "closed_form") {
        policy.mode = itlm::ClosedFormUpdate{};
    } else if (opt.update == "batch_sgd") {
        policy.mode = itlm::BatchSgdUpdate{opt.eta, opt.steps, opt.batch,
                                           opt.reinit, opt.reinit_scale};
    } else if (opt.update == "full_gradient") {
        policy.mode = itlm::FullGradientUpdate{opt.eta};
    } else {
        throw itlm::ConfigError(fmt::format(
            "unknown update '{}' (expected closed_form, batch_sgd, or "
            "full_gradient)",
            opt.update));
    }
    for (const std::string& entry : opt.schedule) {
        const std::size_t sep = entry.find('=');
        if (sep == std::string::npos) {
            throw itlm::ConfigError(fmt::format(
                "schedule entry '{}' is not round=steps", entry));
        }
        Index round = 0, steps = 0;
        const char* rb = entry.data();
        const char* sb = entry.data() + sep + 1;
        auto r1 = std::from_chars(rb, rb + sep, round);
        auto r2 = std::from_chars(sb, entry.data() + entry.size(), steps);
        if (r1.ec != std::errc() || r1.ptr != rb + sep ||
            r2.ec != std::errc() ||
            r2.ptr != entry.data() + entry.size() || round < 0 || steps < 1) {
            throw itlm::ConfigError(fmt::format(
                "schedule entry '{}' is not round=steps", entry));
        }
        policy.steps_schedule[round] = steps;
    }
    return policy;
}

std::optional<itlm::InitMode> build_init(const FitOptions& opt) {
    if (opt.init.empty()) {
        return std::nullopt;
    }
    if (opt.init == "fit_all") {
        return itlm::FitAllInit{};
    }
    if (opt.init == "zero") {
        return itlm::ZeroInit{};
    }
    if (opt.init == "random") {
        return itlm::RandomInit{opt.init_scale};
    }
    if (opt.init == "given") {
        if (opt.init_theta.empty()) {
            throw itlm::ConfigError("init given needs --init-theta values");
        }
        itlm::Vector theta(static_cast<Index>(opt.init_theta.size()));
        for (std::size_t j = 0; j < opt.init_theta.size(); ++j) {
            theta[static_cast<Index>(j)] = opt.init_theta[j];
        }
        return itlm::GivenInit{itlm::Parameter{std::move(theta)}};
    }
    throw itlm::ConfigError(fmt::format(
        "unknown init '{}' (expected fit_all, zero, random, or given)",
        opt.init));
}

int run_generate(const GenerateOptions& opt) {
    itlm::GenConfig config;
    config.n = opt.n;
    config.d = opt.d;
    config.alpha_star = opt.alpha_star;
    config.sigma = opt.sigma;
    config.seed = opt.seed;
    config.link = build_link(opt.link, opt.neg_slope, opt.pos_slope);
    config.corruption = build_corruption(opt);
    if (!opt.theta_star.empty()) {
        itlm::Vector theta(static_cast<Index>(opt.theta_star.size()));
        for (std::size_t j = 0; j < opt.theta_star.size(); ++j) {
            theta[static_cast<Index>(j)] = opt.theta_star[j];
        }
        config.theta_star = std::move(theta);
    }
    const itlm::Dataset ds = itlm::generate(config);
    itlm::save_dataset(ds, opt.out);
    Index clean = 0;
    for (std::uint8_t flag : ds.truth->clean_mask) {
        clean += flag;
    }
    fmt::print("wrote {} ({} rows, {} columns, {} clean)\n", opt.out, ds.n(),
               ds.d(), clean);
    return 0;
}

int run_fit(const FitOptions& opt) {
    const itlm::Dataset ds = itlm::load_dataset(opt.data);
    itlm::ItlmConfig config;
    config.alpha = opt.alpha;
    config.rounds = opt.rounds;
    config.seed = opt.seed;
    config.update = build_update(opt.upd);
    config.init = build_init(opt);
    const itlm::EstimationTrace trace = itlm::run_itlm(ds, config);

    if (!opt.trace_out.empty()) {
        nlohmann::ordered_json meta;
        meta["artifact_version"] = itlm::kArtifactVersion;
        meta["seed_split_rule"] = itlm::kSeedSplitRule;
        meta["command"] = "fit";
        meta["data"] = opt.data;
        meta["alpha"] = opt.alpha;
        meta["rounds"] = opt.rounds;
        meta["seed"] = opt.seed;
        meta["update"] = opt.upd.update;
        itlm::emit_csv(itlm::trace_table(trace, ds), opt.trace_out, meta);
    }

    fmt::print("rounds {}\n", trace.selected.size());
    fmt::print("final_trimmed_loss {}\n",
               itlm::format_double(trace.trimmed_losses.back()));
    if (ds.truth) {
        fmt::print("recovery_error {}\n",
                   itlm::format_double(trace.recovery_errors.back()));
        fmt::print("final_contamination {}\n", trace.contamination.back());
    }
    std::string theta_line = "theta";
    for (Index j = 0; j < trace.thetas.back().theta.size(); ++j) {
        theta_line += ' ';
        theta_line += itlm::format_double(trace.thetas.back().theta[j]);
    }
    fmt::print("{}\n", theta_line);
    return 0;
}

int run_oracle(const OracleOptions& opt) {
    if (!opt.alpha && !opt.k) {
        throw itlm::ConfigError(
            "oracle needs --alpha (exhaustive trimmed loss) or --k "
            "(regularity constants)");
    }
    const itlm::Dataset ds = itlm::load_dataset(opt.data);
    if (opt.alpha) {
        const itlm::ExactTrimmedLoss best =
            itlm::exact_trimmed_loss(ds, *opt.alpha, opt.max_n);
        fmt::print("exact_tl_value {}\n", itlm::format_double(best.value));
        std::string subset = "exact_tl_subset";
        for (Index i : best.subset) {
            subset += fmt::format(" {}", i);
        }
        fmt::print("{}\n", subset);
        std::string theta = "exact_tl_theta";
        for (Index j = 0; j < best.theta.theta.size(); ++j) {
            theta += ' ';
            theta += itlm::format_double(best.theta.theta[j]);
        }
        fmt::print("{}\n", theta);
        fmt::print("exact_tl_skipped_subsets {}\n", best.skipped_subsets);
    }
    if (opt.k) {
        const itlm::RegularityReport report = itlm::regularity_constants(
            ds.features, *opt.k, opt.max_subsets);
        fmt::print("psi_minus {}\n", itlm::format_double(report.psi_minus));
        fmt::print("psi_plus {}\n", itlm::format_double(report.psi_plus));
        std::string lo = "argmin_subset";
        for (Index i : report.argmin_subset) {
            lo += fmt::format(" {}", i);
        }
        std::string hi = "argmax_subset";
        for (Index i : report.argmax_subset) {
            hi += fmt::format(" {}", i);
        }
        fmt::print("{}\n{}\n", lo, hi);
    }
    return 0;
}

int run_sweep_cmd(const SweepOptions& opt) {
    itlm::SweepSpec spec =
        itlm::default_sweep(itlm::parse_experiment(opt.experiment));
    if (opt.repeats > 0) spec.repeats = opt.repeats;
    if (opt.seed_set) spec.base_gen.seed = opt.seed;
    spec.threads = opt.threads;
    if (!opt.n_grid.empty()) spec.n_grid = opt.n_grid;
    if (!opt.alpha_star_grid.empty()) spec.alpha_star_grid = opt.alpha_star_grid;
    if (!opt.delta_grid.empty()) spec.delta_alpha_grid = opt.delta_grid;
    if (!opt.sigma_grid.empty()) spec.sigma_grid = opt.sigma_grid;
    if (!opt.rho_grid.empty()) spec.rho_grid = opt.rho_grid;
    if (opt.n) spec.base_gen.n = *opt.n;
    if (opt.d) spec.base_gen.d = *opt.d;
    if (opt.sigma) spec.base_gen.sigma = *opt.sigma;
    if (opt.alpha_star) spec.base_gen.alpha_star = *opt.alpha_star;
    if (opt.alpha) spec.base_fit.alpha = *opt.alpha;
    if (opt.rounds) spec.base_fit.rounds = *opt.rounds;
    if (opt.update) {
        UpdateOptions upd;
        upd.update = *opt.update;
        if (opt.eta) upd.eta = *opt.eta;
        spec.base_fit.update = build_update(upd);
    } else if (opt.eta) {
        if (auto* fg = std::get_if<itlm::FullGradientUpdate>(
                &spec.base_fit.update.mode)) {
            fg->eta = *opt.eta;
        } else if (auto* sgd = std::get_if<itlm::BatchSgdUpdate>(
                       &spec.base_fit.update.mode)) {
            sgd->eta = *opt.eta;
        }
    }
    spec.output_path = opt.out;
    const itlm::Table table = itlm::run_sweep(spec);
    fmt::print("wrote {} ({} rows)\n", opt.out, table.rows.size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative trimmed-loss estimation for linear and "
                 "piecewise-linear models"};
    app.set_version_flag("--version", itlm::kArtifactVersion);
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Plain-text key=value file; subcommand options live in "
                   "[subcommand] sections. Command-line flags win.");

    GenerateOptions gen;
    CLI::App* gen_cmd =
        app.add_subcommand("generate", "Write a seeded synthetic dataset");
    gen_cmd->configurable();
    gen_cmd->add_option("--n", gen.n, "Number of rows");
    gen_cmd->add_option("--d", gen.d, "Feature dimension");
    gen_cmd->add_option("--alpha-star", gen.alpha_star, "Clean fraction");
    gen_cmd->add_option("--sigma", gen.sigma, "Additive noise level");
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--link", gen.link, "identity or piecewise");
    gen_cmd->add_option("--neg-slope", gen.neg_slope,
                        "Piecewise slope for u < 0");
    gen_cmd->add_option("--pos-slope", gen.pos_slope,
                        "Piecewise slope for u >= 0");
    gen_cmd->add_option("--corruption", gen.corruption,
                        "none, constant, adversarial, random_output, mixture");
    gen_cmd->add_option("--constant-value", gen.constant_value,
                        "Response for constant corruption");
    gen_cmd->add_option("--adv-theta", gen.adv_theta,
                        "Adversarial model coefficients");
    gen_cmd->add_option("--adv-offset", gen.adv_offset,
                        "Adversarial response offset");
    gen_cmd->add_option("--random-std", gen.random_std,
                        "Random-output standard deviation");
    gen_cmd->add_option("--mixture-weights", gen.mixture_weights,
                        "Component fractions, clean component first");
    gen_cmd->add_option("--theta-star", gen.theta_star,
                        "Ground-truth coefficients (default: random unit)");
    gen_cmd->add_option("--out", gen.out, "Output dataset path")->required();

    FitOptions fit;
    CLI::App* fit_cmd =
        app.add_subcommand("fit", "Run the estimator on a dataset file");
    fit_cmd->configurable();
    fit_cmd->add_option("--data", fit.data, "Dataset path")->required();
    fit_cmd->add_option("--alpha", fit.alpha, "Kept fraction per round");
    fit_cmd->add_option("--rounds", fit.rounds, "Number of rounds");
    fit_cmd->add_option("--seed", fit.seed, "Fit seed");
    fit_cmd->add_option("--update", fit.upd.update,
                        "closed_form, batch_sgd, or full_gradient");
    fit_cmd->add_option("--eta", fit.upd.eta, "Gradient step size");
    fit_cmd->add_option("--steps", fit.upd.steps, "SGD steps per round");
    fit_cmd->add_option("--batch", fit.upd.batch, "SGD batch size");
    fit_cmd->add_flag("--reinit", fit.upd.reinit,
                      "Re-initialize randomly every round (SGD)");
    fit_cmd->add_option("--reinit-scale", fit.upd.reinit_scale,
                        "Re-initialization scale");
    fit_cmd->add_option("--schedule", fit.upd.schedule,
                        "Per-round step overrides, round=steps");
    fit_cmd->add_option("--init", fit.init,
                        "fit_all, zero, random, or given");
    fit_cmd->add_option("--init-scale", fit.init_scale,
                        "Random initialization scale");
    fit_cmd->add_option("--init-theta", fit.init_theta,
                        "Initial coefficients for --init given");
    fit_cmd->add_option("--trace-out", fit.trace_out,
                        "Write the per-round trace CSV here");

    OracleOptions oracle;
    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle", "Exhaustive small-instance diagnostics");
    oracle_cmd->configurable();
    oracle_cmd->add_option("--data", oracle.data, "Dataset path")->required();
    double oracle_alpha = 0.0;
    CLI::Option* oa = oracle_cmd->add_option(
        "--alpha", oracle_alpha, "Exhaustive trimmed-loss kept fraction");
    Index oracle_k = 0;
    CLI::Option* ok = oracle_cmd->add_option(
        "--k", oracle_k, "Regularity-constant subset size");
    oracle_cmd->add_option("--max-n", oracle.max_n,
                           "Exhaustive search row guard");
    oracle_cmd->add_option("--max-subsets", oracle.max_subsets,
                           "Enumeration subset guard");

    SweepOptions sweep;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Run a seeded experiment grid");
    sweep_cmd->configurable();
    sweep_cmd->add_option("--experiment", sweep.experiment,
                          "inconsistency, recovery_vs_alpha_star, "
                          "misspecification, convergence, mixture_local, "
                          "or nonlinear")
        ->required();
    sweep_cmd->add_option("--out", sweep.out, "Output CSV path")->required();
    sweep_cmd->add_option("--repeats", sweep.repeats, "Runs per grid point");
    CLI::Option* seed_opt =
        sweep_cmd->add_option("--seed", sweep.seed, "Base seed");
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads");
    sweep_cmd->add_option("--n-grid", sweep.n_grid, "Sample sizes");
    sweep_cmd->add_option("--alpha-star-grid", sweep.alpha_star_grid,
                          "Clean fractions");
    sweep_cmd->add_option("--delta-grid", sweep.delta_grid,
                          "Gaps alpha_star - alpha");
    sweep_cmd->add_option("--sigma-grid", sweep.sigma_grid, "Noise levels");
    sweep_cmd->add_option("--rho-grid", sweep.rho_grid,
                          "Initialization distances");
    sweep_cmd->add_option("--n", sweep.n, "Base sample size");
    sweep_cmd->add_option("--d", sweep.d, "Base dimension");
    sweep_cmd->add_option("--sigma", sweep.sigma, "Base noise level");
    sweep_cmd->add_option("--alpha-star", sweep.alpha_star,
                          "Base clean fraction");
    sweep_cmd->add_option("--alpha", sweep.alpha, "Base kept fraction");
    sweep_cmd->add_option("--rounds", sweep.rounds, "Rounds per run");
    sweep_cmd->add_option("--update", sweep.update,
                          "Override the update mode");
    sweep_cmd->add_option("--eta", sweep.eta, "Override the step size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen_cmd) {
            return run_generate(gen);
        }
        if (*fit_cmd) {
            return run_fit(fit);
        }
        if (*oracle_cmd) {
            if (oa->count() > 0) oracle.alpha = oracle_alpha;
            if (ok->count() > 0) oracle.k = oracle_k;
            return run_oracle(oracle);
        }
        if (*sweep_cmd) {
            sweep.seed_set = seed_opt->count() > 0;
            return run_sweep_cmd(sweep);
        }
        throw itlm::ConfigError("no subcommand selected");
    } catch (const itlm::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 2;
    } catch (const itlm::IoError& e) {
        fmt::print(stderr, "io error: {}\n", e.what());
        return 4;
    } catch (const itlm::NumericalError& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
