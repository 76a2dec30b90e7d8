#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "uai/index.hpp"
#include "uai/paths.hpp"
#include "uai/sample.hpp"
#include "uai/utility.hpp"

namespace uai {

// A strategy enters as the law of its terminal log growth ln V_T.
struct StrategyCandidate {
    std::string label;
    EmpiricalDistribution terminal_log_growth;
};

// Benchmarked finite-horizon performance: acceptability index of
// ln V_T - benchmark_log.
IndexValue finite_horizon_index(const UtilityFamily& family, const StrategyCandidate& candidate,
                                double benchmark_log, const IndexOptions& opts = {});

struct Ranking {
    std::string best;
    std::vector<std::pair<std::string, IndexValue>> ranking; // best first
};

// Rank candidates by index (classification order zero < finite < infinite),
// ties broken by label; labels must be unique.
Ranking maximize_over_strategies(const UtilityFamily& family,
                                 const std::vector<StrategyCandidate>& candidates,
                                 double benchmark_log, const IndexOptions& opts = {});

enum class Regime { divergent, vanishing, finite_positive, undetermined };

const char* regime_name(Regime r);

struct SlopeFit {
    double slope = 0.0;
    double se = 0.0;   // standard error of the slope
    int n_points = 0;  // finite-positive points entering the fit
};

struct LongRunReport {
    std::vector<std::size_t> T_grid;
    std::vector<IndexValue> alpha_values;
    Regime regime = Regime::undetermined;
    double liminf_estimate = 0.0; // +inf / 0 / min finite alpha over the tail
    SlopeFit fit;
};

enum class LongRunMethod { monte_carlo, exact_gaussian };

// Trajectory T -> alpha(S_T) with S_T = sum_{t<=T} (r_t - lambda).
// monte_carlo: common-random-number partial sums over one simulated batch
// (n_paths >= 1000).  exact_gaussian: closed-form alpha from the model's
// cumulative variance; requires the exponential family and a stationary
// Gaussian return model.
// Regime call: majority of infinite alphas over the last half of the grid ->
// divergent; majority of zeros -> vanishing; otherwise the log-log slope of
// finite alphas over that tail (> +0.2 divergent, < -0.2 vanishing, |s| <=
// 0.2 with all tail values finite-positive -> finite_positive), else
// undetermined.
LongRunReport longrun_trajectory(const UtilityFamily& family, const PathModelSpec& spec,
                                 double lambda_rate, const std::vector<std::size_t>& T_grid,
                                 std::uint64_t seed, std::size_t n_paths,
                                 LongRunMethod method = LongRunMethod::monte_carlo,
                                 const IndexOptions& opts = {});

// alpha(S_T) = 2 (m - lambda) T / sigma_T^2 for Gaussian S_T; 0 when
// m <= lambda.
double closed_form_gaussian_alpha(double m, double lambda_rate, double sigma_T_sq, std::size_t T);

// Risk-sensitive growth rate -mu_gamma(law of ln V_T) / T from Monte Carlo
// samples of terminal log value; exponential family only.
double risk_sensitive_rate(const UtilityFamily& family, RiskAversion gamma,
                           const std::vector<double>& terminal_log_values, std::size_t T);

struct DualityResult {
    double lhs = 0.0; // long-run index estimate
    double rhs = 0.0; // sup{gamma : risk-sensitive rate >= lambda}
    LongRunReport lhs_report;
};

// Two routes to the same number for iid Gaussian log returns with m > lambda:
// both should land near 2 (m - lambda) / sigma^2.
DualityResult duality_check(const PathModelSpec& iid_model, double lambda_rate,
                            std::uint64_t seed, std::size_t n_paths, std::size_t T);

// Reduced benchmarked-growth trajectory: per horizon T the caller supplies a
// deterministic growth target g(T) and candidate terminal-value laws; the
// engine reports the best candidate and its index at each stage.
struct KgStage {
    std::size_t T = 0;
    double benchmark_value = 0.0; // g(T)
    std::vector<StrategyCandidate> candidates;
};

struct KgPoint {
    std::size_t T = 0;
    std::string best;
    IndexValue alpha;
};

std::vector<KgPoint> kg_trajectory(const UtilityFamily& family, const std::vector<KgStage>& stages,
                                   const IndexOptions& opts = {});

} // namespace uai
