#pragma once

#include <array>
#include <cstdint>

namespace uai {

// Deterministic pseudo-random stream: xoshiro256++ seeded through splitmix64.
//
// A generator is identified by (seed, stream).  Distinct streams derived from
// the same seed are statistically independent, which lets a batch of simulated
// paths assign one stream per path and reproduce any single path in isolation.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1); never returns 0 or 1.
    double next_uniform();

    // Standard normal variate via the inverse-CDF transform applied to
    // next_uniform().  Deterministic: no rejection loop, one draw per call.
    double next_gaussian();

private:
    std::array<std::uint64_t, 4> state_;
};

// Inverse of the standard normal CDF (Acklam's rational approximation with one
// Halley refinement step).  Requires p in (0,1).
double normal_quantile(double p);

} // namespace uai
