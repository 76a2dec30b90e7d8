#pragma once

#include <optional>
#include <utility>

#include "uai/sample.hpp"
#include "uai/utility.hpp"

namespace uai {

// Certainty-equivalent value: finite real, or +infinity (reserved for laws
// whose utility expectation diverges; finite laws always yield finite values,
// up to floating-point saturation in deep double-exponential tails).
struct CEValue {
    double value = 0.0;
    bool finite_flag = true;

    static CEValue finite(double v);
    static CEValue infinite();
};

// Scaled certainty equivalent mu_gamma(X) = -(1/gamma) U^{-1}(E[U(gamma X)]).
// The expectation is an exact compensated weighted sum over the finite law,
// taken in descending term magnitude; when the direct sum over- or underflows
// (exponential-type tails at large gamma), the computation switches to the
// family's log-space channel so the result stays exact.
CEValue certainty_equivalent(const UtilityFamily& family, RiskAversion gamma,
                             const EmpiricalDistribution& dist);

// Entropic closed form (1/gamma) ln E[exp(-gamma X)] via log-sum-exp with
// max subtraction.  Kept as an independent code path from the generic route;
// the two must agree to 1e-10 on every law.
CEValue entropic_closed_form(RiskAversion gamma, const EmpiricalDistribution& dist);

// Gaussian closed form -m + gamma sigma^2 / 2 (exponential-family CE of an
// N(m, sigma^2) position).
double gaussian_entropic(RiskAversion gamma, double m, double sigma);

// Optimized certainty equivalent sup_c { c + E[U(gamma (X - c))] / gamma } by
// golden-section search; throws std::runtime_error("oce: non-coercive
// objective") when the maximizer sits at (or the objective stays flat to) the
// search boundary, as happens for linear and modified_exponential tails.
double oce(const UtilityFamily& family, RiskAversion gamma, const EmpiricalDistribution& dist,
           std::optional<std::pair<double, double>> c_bounds = std::nullopt);

// Smallest cash add-on m with mu_gamma(X + m) <= 0, by monotone bisection.
double cash_additive_hull(const UtilityFamily& family, RiskAversion gamma,
                          const EmpiricalDistribution& dist);

// Mean-variance proxy -E[X] + (gamma/2) Var[X].
double mv_approx(RiskAversion gamma, const EmpiricalDistribution& dist);

} // namespace uai
