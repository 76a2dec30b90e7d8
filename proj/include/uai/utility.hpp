#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace uai {

// The utility families the engine understands.  Every family is strictly
// increasing and concave on the whole real line; all except `linear` are
// bounded above, which is what makes the acceptability index well defined.
enum class FamilyId {
    exponential,           // U(x) = -exp(-x)
    power_like,            // piecewise: power decay right of 0, polynomial left, C^2 glue
    modified_exponential,  // U(x) = -exp(-x) for x >= 0, x - 1 for x < 0 (C^1 only)
    iterated_exponential,  // U(x) = -exp(exp(-x))
    linear,                // U(x) = x (reference case; unbounded above)
    affine_wrapped,        // U(x) = a * inner(x) + b with a > 0
};

// Positive scale parameter gamma applied as x -> U(gamma * x).
class RiskAversion {
public:
    explicit RiskAversion(double gamma);
    double value() const { return gamma_; }

private:
    double gamma_;
};

class UtilityFamily {
public:
    static UtilityFamily exponential();
    static UtilityFamily power_like(double alpha, double beta);
    static UtilityFamily modified_exponential();
    static UtilityFamily iterated_exponential();
    static UtilityFamily linear();
    static UtilityFamily affine(double a, double b, UtilityFamily inner);

    FamilyId id() const { return id_; }
    double alpha() const;         // power_like only
    double beta() const;          // power_like only
    double affine_scale() const;  // affine_wrapped only
    double affine_shift() const;  // affine_wrapped only
    const UtilityFamily& inner() const;

    double eval(double x) const;
    double deriv(double x) const;
    double second_deriv(double x) const;

    // Inverse of eval on the family's range.  Throws std::domain_error when y
    // lies outside the range (at or above the supremum, or below an attained
    // lower bound -- the shipped families are all unbounded below).
    double invert(double y) const;

    double sup() const;               // +inf for linear
    bool bounded_above() const;

    // Log-space channel for families with strictly negative values:
    // log_neg(x) = ln(-U(x)) and its inverse.  Lets expectations of U be
    // accumulated in log space when exp(-gamma x) style terms overflow.
    bool negative_valued() const;
    double log_neg(double x) const;
    double invert_log_neg(double L) const;

    // lim_{x -> -inf} U'(x); +inf for the families with exponential left tails.
    double deriv_limit_neg_inf() const;

    std::string spec_string() const;

private:
    UtilityFamily(FamilyId id, double p0, double p1,
                  std::shared_ptr<const UtilityFamily> inner);

    FamilyId id_;
    double p0_ = 0.0; // power_like: alpha, affine: a
    double p1_ = 0.0; // power_like: beta,  affine: b
    std::shared_ptr<const UtilityFamily> inner_;
};

double eval_u(const UtilityFamily& u, double x);
double eval_scaled(const UtilityFamily& u, RiskAversion gamma, double x);
double invert_u(const UtilityFamily& u, double y);

// Local relative risk sensitivity of the scaled utility at x:
//   A_gamma(x) = -gamma * U''(gamma x) / U'(gamma x),
// computed from the per-family closed form so it stays finite where the raw
// quotient would underflow.
double arrow_pratt(const UtilityFamily& u, RiskAversion gamma, double x);

struct RegularityWitness {
    double gamma_low = 0.0;   // smaller scale with the larger sensitivity
    double gamma_high = 0.0;
    double x = 0.0;
    double a_low = 0.0;       // A_{gamma_low}(x)
    double a_high = 0.0;      // A_{gamma_high}(x)
};

struct RegularityReport {
    enum class Verdict { regular_on_grid, violated };
    Verdict verdict = Verdict::regular_on_grid;
    std::optional<RegularityWitness> witness; // present iff verdict == violated
    std::vector<double> gamma_grid;
    std::vector<double> x_grid;
    double tol = 0.0;
};

// Grid certificate that gamma -> A_gamma(x) is non-decreasing: flags the first
// pair gamma_i < gamma_j with A_{gamma_i}(x) > A_{gamma_j}(x) + tol, scanning
// x_grid in order and gamma ascending.
RegularityReport check_scale_aversion_regularity(const UtilityFamily& u,
                                                 const std::vector<double>& gamma_grid,
                                                 const std::vector<double>& x_grid,
                                                 double tol);

std::vector<double> default_gamma_grid(); // 64 log-spaced points on [1e-2, 1e2]
std::vector<double> default_x_grid();     // 401 uniform points on [-20, 20]
double default_regularity_tol();          // 1e-9

// Convex conjugate U*(y) = sup_x [U(x) - x y] for y > 0; +inf when the slope y
// is never attained (y above lim_{x->-inf} U'(x)).
double convex_conjugate(const UtilityFamily& u, double y);

// Parse a family spec string: "exp", "powerlike:alpha=1,beta=2", "modexp",
// "iterexp", "linear", "affine:a=2,b=1,inner=exp".
UtilityFamily parse_utility(const std::string& spec);

} // namespace uai
