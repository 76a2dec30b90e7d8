#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "uai/sample.hpp"

namespace uai {

// Return-generating processes.  All return models are per-step log returns;
// the OU variant is a mean-reverting *level* series (its returns are the
// caller's business).
struct IidGaussianSpec {
    double mean = 0.0;
    double sigma = 1.0;
};

struct ArmaSpec {
    std::vector<double> ar;    // phi_1..phi_p
    std::vector<double> ma;    // theta_1..theta_q
    double mean = 0.0;
    double noise_sigma = 1.0;
};

struct FgnSpec {
    double hurst = 0.5;        // H in (0,1)
    double sigma = 1.0;
    double mean = 0.0;
};

struct OuSpec {
    double kappa = 1.0;        // mean-reversion speed, > 0
    double theta_level = 0.0;  // long-run level
    double sigma = 0.0;
    double x0 = 0.0;
    double dt = 1.0;
};

using PathModelSpec = std::variant<IidGaussianSpec, ArmaSpec, FgnSpec, OuSpec>;

// Throws std::invalid_argument when parameters are out of range; for ARMA
// this includes the stationarity check (AR polynomial roots outside the unit
// circle).
void validate(const PathModelSpec& spec);

// One path; bit-identical for fixed (spec, n_steps, seed).  Path 0 of a batch
// equals the single-path simulation with the same seed.
ReturnSeries simulate(const PathModelSpec& spec, std::size_t n_steps, std::uint64_t seed);

// n_paths independent paths (stream j of the seed drives path j).
std::vector<std::vector<double>> simulate_batch(const PathModelSpec& spec, std::size_t n_steps,
                                                std::size_t n_paths, std::uint64_t seed);

// Fractional Gaussian noise autocovariance
// rho(k) = (sigma^2/2)(|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}).
double fgn_autocovariance(double hurst, double sigma, std::size_t lag);

// Model autocovariances rho(0..max_lag) for the stationary return variants
// (iid_gaussian, arma, fgn); throws for ou.
std::vector<double> model_autocovariances(const PathModelSpec& spec, std::size_t max_lag);

// Stationary per-step mean of the return variants; throws for ou.
double model_mean(const PathModelSpec& spec);

// Var(r_1 + ... + r_T) = sum_{|k|<T} (T-|k|) rho(k); for fGn this equals
// sigma^2 T^{2H} exactly.
double cumulative_variance(const PathModelSpec& spec, std::size_t T);

// Canonical "model:key=value,..." string for reports.
std::string spec_string(const PathModelSpec& spec);

// Parse the canonical model string, e.g. "fgn:hurst=0.7,sigma=0.02,mean=0.001"
// or "arma:ar=0.5;-0.2,ma=0.3,mean=0,noise_sigma=1".
PathModelSpec parse_model(const std::string& text);

} // namespace uai
