#ifndef ITLM_VERSION_HPP
#define ITLM_VERSION_HPP

namespace itlm {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Version tag of the seed-splitting rule baked into result metadata:
/// stream(base, index) = mix64(base XOR mix64(index)), nested per level.
inline constexpr const char* kSeedSplitRule = "xor-mix64/v1";

} // namespace itlm

#endif // ITLM_VERSION_HPP
