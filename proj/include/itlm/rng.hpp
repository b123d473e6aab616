#ifndef ITLM_RNG_HPP
#define ITLM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace itlm {

/// splitmix64 finalizer. Stateless 64-bit mixing function; also the hash
/// used by the seed-splitting rule below.
inline std::uint64_t mix64(std::uint64_t z) {
    z += UINT64_C(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
    return z ^ (z >> 31);
}

/// Seed-splitting rule, version 1 (part of the output-file contract):
///
///     stream(base, index) = mix64(base ^ mix64(index))
///
/// Independent streams for run r of grid point g are derived by nesting:
/// stream(stream(base_seed, g), r). Documented in the README; any change
/// bumps the rule version recorded in sweep metadata.
inline std::uint64_t derive_stream(std::uint64_t base, std::uint64_t index) {
    return mix64(base ^ mix64(index));
}

/// Counter-style 64-bit generator (splitmix64). One instance per run;
/// concurrent runs use streams derived with derive_stream.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += UINT64_C(0x9E3779B97F4A7C15));
        z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. Consumes exactly two draws per call;
    /// no spare is cached, so the draw count per call is fixed.
    double next_gaussian() {
        // u1 in (0,1] so log(u1) is finite.
        double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
        double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.28318530717958647692 * u2);
    }

    /// Uniform integer in [0, bound), bound >= 1. Rejection keeps it exact.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit =
            UINT64_MAX - (UINT64_MAX % bound);  // largest multiple of bound
        std::uint64_t r;
        do {
            r = next();
        } while (r >= limit);
        return r % bound;
    }

private:
    std::uint64_t state_;
};

} // namespace itlm

#endif // ITLM_RNG_HPP
