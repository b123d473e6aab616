#include "itlm/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "itlm/errors.hpp"
#include "itlm/rng.hpp"

namespace itlm {

namespace {

void check_common(const GenConfig& config) {
    if (config.n < 1 || config.d < 1) {
        throw ConfigError(fmt::format(
            "dataset shape must be positive, got n={} d={}", config.n,
            config.d));
    }
    if (!(config.sigma >= 0.0)) {
        throw ConfigError(
            fmt::format("noise level must be >= 0, got {}", config.sigma));
    }
    if (config.theta_star) {
        if (config.theta_star->size() != config.d) {
            throw ConfigError(fmt::format(
                "theta_star dimension {} does not match d={}",
                config.theta_star->size(), config.d));
        }
        if (!config.theta_star->allFinite()) {
            throw ConfigError("theta_star contains non-finite values");
        }
    }
}

Vector draw_unit_vector(Index d, SplitMix64& rng) {
    Vector v(d);
    double norm = 0.0;
    do {
        for (Index j = 0; j < d; ++j) {
            v[j] = rng.next_gaussian();
        }
        norm = v.norm();
    } while (!(norm > 0.0));
    return v / norm;
}

/// Random unit vector orthogonal to `anchor` (redrawn in the measure-zero
/// parallel case).
Vector draw_orthogonal_unit(const Vector& anchor, SplitMix64& rng) {
    const Vector dir = anchor / anchor.norm();
    while (true) {
        Vector v(anchor.size());
        for (Index j = 0; j < anchor.size(); ++j) {
            v[j] = rng.next_gaussian();
        }
        v -= dir.dot(v) * dir;
        const double norm = v.norm();
        if (norm > 1e-8) {
            return v / norm;
        }
    }
}

/// Uniform shuffle; consumes n-1 bounded draws.
void shuffle_labels(std::vector<int>& labels, SplitMix64& rng) {
    const std::size_t n = labels.size();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const std::size_t pick =
            j + static_cast<std::size_t>(
                    rng.next_below(static_cast<std::uint64_t>(n - j)));
        std::swap(labels[j], labels[pick]);
    }
}

Matrix draw_features(Index n, Index d, SplitMix64& rng) {
    Matrix phi(n, d);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) {
            phi(i, j) = rng.next_gaussian();
        }
    }
    return phi;
}

Dataset generate_plain(const GenConfig& config, SplitMix64& rng) {
    const Index n = config.n;
    const Index d = config.d;

    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConstantCorruption>) {
                if (!std::isfinite(c.value)) {
                    throw ConfigError("constant corruption value must be finite");
                }
            } else if constexpr (std::is_same_v<T,
                                                AdversarialModelCorruption>) {
                if (c.theta_adv.size() != d || !c.theta_adv.allFinite()) {
                    throw ConfigError(
                        "adversarial model must be finite and of dimension d");
                }
                if (!std::isfinite(c.offset)) {
                    throw ConfigError("adversarial offset must be finite");
                }
            } else if constexpr (std::is_same_v<T, RandomOutputCorruption>) {
                if (!(c.std_dev > 0.0)) {
                    throw ConfigError(fmt::format(
                        "random-output std must be positive, got {}",
                        c.std_dev));
                }
            }
        },
        config.corruption);

    // Tolerant floor, same rule the estimator uses for the kept fraction.
    const Index n_clean = trim_count(config.alpha_star, n);

    Dataset ds;
    ds.link = config.link;
    const Vector theta = config.theta_star ? *config.theta_star
                                           : draw_unit_vector(d, rng);
    ds.features = draw_features(n, d, rng);

    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    std::fill(labels.begin(), labels.begin() + n_clean, 1);
    shuffle_labels(labels, rng);

    ds.responses.resize(n);
    for (Index i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] == 1) {
            ds.responses[i] =
                config.link.value(ds.features.row(i).dot(theta));
        } else {
            ds.responses[i] = std::visit(
                [&](const auto& c) -> double {
                    using T = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<T, ConstantCorruption>) {
                        return c.value;
                    } else if constexpr (std::is_same_v<
                                             T, AdversarialModelCorruption>) {
                        return config.link.value(
                                   ds.features.row(i).dot(c.theta_adv)) +
                               c.offset;
                    } else if constexpr (std::is_same_v<T,
                                                        RandomOutputCorruption>) {
                        return c.std_dev * rng.next_gaussian();
                    } else {
                        // NoCorruption with alpha_star < 1 leaves the
                        // response at the model value: nothing to corrupt.
                        return config.link.value(ds.features.row(i).dot(theta));
                    }
                },
                config.corruption);
        }
    }
    for (Index i = 0; i < n; ++i) {
        ds.responses[i] += config.sigma * rng.next_gaussian();
    }

    TruthInfo truth;
    truth.theta_star.push_back(theta);
    truth.clean_mask.resize(static_cast<std::size_t>(n));
    truth.component_id.resize(static_cast<std::size_t>(n));
    const bool no_corruption =
        std::holds_alternative<NoCorruption>(config.corruption);
    for (Index i = 0; i < n; ++i) {
        const bool clean =
            labels[static_cast<std::size_t>(i)] == 1 || no_corruption;
        truth.clean_mask[static_cast<std::size_t>(i)] = clean ? 1 : 0;
        truth.component_id[static_cast<std::size_t>(i)] = clean ? 0 : -1;
    }
    ds.truth = std::move(truth);
    ds.validate();
    return ds;
}

} // namespace

Dataset generate_mixture(const GenConfig& config) {
    check_common(config);
    const auto* mix = std::get_if<MixtureCorruption>(&config.corruption);
    if (mix == nullptr) {
        throw ConfigError("generate_mixture requires mixture corruption");
    }
    const Index n = config.n;
    const Index d = config.d;

    const std::size_t m = mix->weights.size();
    if (m < 2) {
        throw ConfigError("mixture needs at least two weights");
    }
    double total = 0.0;
    for (double w : mix->weights) {
        if (!(w > 0.0)) {
            throw ConfigError(
                fmt::format("mixture weights must be positive, got {}", w));
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError(
            fmt::format("mixture weights must sum to 1, got {}", total));
    }
    const bool auto_component = mix->extra_components.empty();
    if (auto_component) {
        if (m != 2) {
            throw ConfigError(
                "auto-generated mixture component requires exactly two weights");
        }
        if (d < 2) {
            throw ConfigError(
                "orthogonal mixture component requires d >= 2");
        }
    } else if (mix->extra_components.size() + 1 != m) {
        throw ConfigError(fmt::format(
            "mixture has {} weights but {} components",
            m, mix->extra_components.size() + 1));
    }

    SplitMix64 rng(config.seed);
    std::vector<Vector> components;
    components.push_back(config.theta_star ? *config.theta_star
                                           : draw_unit_vector(d, rng));
    if (!(components[0].norm() > 0.0)) {
        throw ConfigError("mixture component 0 must be nonzero");
    }
    if (auto_component) {
        components.push_back(draw_orthogonal_unit(components[0], rng));
    } else {
        for (const Vector& c : mix->extra_components) {
            if (c.size() != d || !c.allFinite()) {
                throw ConfigError(
                    "mixture components must be finite and of dimension d");
            }
            components.push_back(c);
        }
    }

    // Exact counts via cumulative floors; the last boundary lands on n.
    std::vector<Index> boundary(m + 1, 0);
    double cum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        cum += mix->weights[j];
        boundary[j + 1] = static_cast<Index>(
            std::floor(cum * static_cast<double>(n) + 1e-9));
    }
    boundary[m] = n;

    Dataset ds;
    ds.link = config.link;
    ds.features = draw_features(n, d, rng);

    std::vector<int> labels(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < m; ++j) {
        for (Index i = boundary[j]; i < boundary[j + 1]; ++i) {
            labels[static_cast<std::size_t>(i)] = static_cast<int>(j);
        }
    }
    shuffle_labels(labels, rng);

    ds.responses.resize(n);
    for (Index i = 0; i < n; ++i) {
        const int c = labels[static_cast<std::size_t>(i)];
        ds.responses[i] = config.link.value(
            ds.features.row(i).dot(components[static_cast<std::size_t>(c)]));
    }
    for (Index i = 0; i < n; ++i) {
        ds.responses[i] += config.sigma * rng.next_gaussian();
    }

    TruthInfo truth;
    truth.theta_star = components;
    truth.clean_mask.resize(static_cast<std::size_t>(n));
    truth.component_id.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const int c = labels[static_cast<std::size_t>(i)];
        truth.clean_mask[static_cast<std::size_t>(i)] = c == 0 ? 1 : 0;
        truth.component_id[static_cast<std::size_t>(i)] = c;
    }
    ds.truth = std::move(truth);
    ds.validate();
    return ds;
}

Dataset generate(const GenConfig& config) {
    check_common(config);
    if (std::holds_alternative<MixtureCorruption>(config.corruption)) {
        return generate_mixture(config);
    }
    SplitMix64 rng(config.seed);
    return generate_plain(config, rng);
}

} // namespace itlm
