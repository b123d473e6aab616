#ifndef ITLM_DATAGEN_HPP
#define ITLM_DATAGEN_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "itlm/glm.hpp"

namespace itlm {

/// How the non-clean rows get their responses. Constant and adversarial
/// responses exist as reproducible fixtures for worst-case tests; the
/// sweep experiments use random_output and mixture.
struct NoCorruption {};
struct ConstantCorruption {
    double value = 0.0;  // y = value + noise
};
struct AdversarialModelCorruption {
    Vector theta_adv;    // y = omega(phi' theta_adv) + offset + noise
    double offset = 0.0;
};
struct RandomOutputCorruption {
    double std_dev = 1.0;  // y = N(0, std_dev^2) + noise, independent of phi
};
/// Responses from a mixture of linear models. Component 0 is the
/// dataset's theta_star; extra_components lists components 1..m-1. An
/// empty list auto-generates one random unit vector orthogonal to
/// theta_star (needs d >= 2 and exactly two weights). weights holds the
/// m component fractions, component 0 first; they must be positive and
/// sum to 1, and weights[0] replaces alpha_star as the clean fraction.
struct MixtureCorruption {
    std::vector<Vector> extra_components;
    std::vector<double> weights;
};
using CorruptionModel =
    std::variant<NoCorruption, ConstantCorruption, AdversarialModelCorruption,
                 RandomOutputCorruption, MixtureCorruption>;

struct GenConfig {
    Index n = 1000;
    Index d = 100;
    double alpha_star = 1.0;  // clean fraction (ignored for mixture kind)
    double sigma = 0.0;       // additive N(0, sigma^2) noise on every row
    LinkFunction link = LinkFunction::identity();
    CorruptionModel corruption = NoCorruption{};
    std::optional<Vector> theta_star;  // nullopt: uniform random unit vector
    std::uint64_t seed = 0;
};

/// Seeded synthetic dataset. Exactly floor(alpha_star * n) rows are clean
/// (y = omega(phi' theta_star) + e with phi ~ N(0, I_d)), the rest carry
/// the corruption model's response plus the same noise; the clean/bad
/// assignment is a uniform shuffle. Ground truth is always attached.
///
/// Reproducibility contract: one stream seeded by config.seed, consumed
/// in this fixed order: theta_star draw (when auto), the auto mixture
/// component (when applicable), features row-major, the row-label
/// shuffle, corrupted responses in ascending row order, then one noise
/// draw per row in ascending row order (taken even when sigma = 0).
Dataset generate(const GenConfig& config);

/// Mixture-specific entry: requires mixture corruption, routes row j of
/// component c to y = omega(phi' theta_c) + e, records component ids.
/// Component counts are exact (cumulative floor of the weights).
Dataset generate_mixture(const GenConfig& config);

} // namespace itlm

#endif // ITLM_DATAGEN_HPP
