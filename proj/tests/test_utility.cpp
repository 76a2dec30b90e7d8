#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "uai/utility.hpp"

using namespace uai;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Central finite differences on eval; independent check of deriv/second_deriv.
double fd1(const UtilityFamily& u, double x, double h = 1e-6) {
    return (u.eval(x + h) - u.eval(x - h)) / (2.0 * h);
}
double fd2(const UtilityFamily& u, double x, double h = 1e-4) {
    return (u.eval(x + h) - 2.0 * u.eval(x) + u.eval(x - h)) / (h * h);
}

} // namespace

TEST_CASE("risk aversion must be a positive finite scale", "[utility]") {
    REQUIRE(RiskAversion(2.5).value() == 2.5);
    REQUIRE_THROWS_AS(RiskAversion(0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(RiskAversion(-1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(RiskAversion(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    REQUIRE_THROWS_AS(RiskAversion(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("exponential family closed forms", "[utility]") {
    UtilityFamily u = UtilityFamily::exponential();
    REQUIRE(u.eval(0.0) == -1.0);
    REQUIRE(u.sup() == 0.0);
    REQUIRE(u.bounded_above());
    REQUIRE(u.negative_valued());
    for (double x : {-5.0, -0.3, 0.0, 0.7, 4.0}) {
        REQUIRE_THAT(u.deriv(x), WithinRel(std::exp(-x), 1e-12));
        REQUIRE_THAT(u.second_deriv(x), WithinRel(-std::exp(-x), 1e-12));
        REQUIRE_THAT(u.invert(u.eval(x)), WithinAbs(x, 1e-12));
        REQUIRE(u.log_neg(x) == -x); // exact channel
        REQUIRE_THAT(u.invert_log_neg(-x), WithinAbs(x, 1e-12));
    }
    REQUIRE_THROWS_AS(u.invert(0.0), std::domain_error);  // at the supremum
    REQUIRE_THROWS_AS(u.invert(0.5), std::domain_error);  // above it
    REQUIRE(u.deriv_limit_neg_inf() == std::numeric_limits<double>::infinity());
}

TEST_CASE("power-like family glues to C^2 at the origin", "[utility]") {
    for (auto [alpha, beta] : std::vector<std::pair<double, double>>{
             {1.0, 2.0}, {0.5, 3.0}, {2.0, 2.5}, {3.0, 4.0}}) {
        UtilityFamily u = UtilityFamily::power_like(alpha, beta);
        INFO("alpha=" << alpha << " beta=" << beta);

        // closed-form values at 0 from both branches
        REQUIRE_THAT(u.eval(0.0), WithinRel(-1.0 / (alpha * (alpha + 1.0)), 1e-14));
        REQUIRE_THAT(u.deriv(0.0), WithinRel(1.0 / (alpha + 1.0), 1e-14));
        REQUIRE_THAT(u.second_deriv(0.0), WithinAbs(-1.0, 1e-14));

        // continuity across the glue
        double h = 1e-7;
        REQUIRE_THAT(u.eval(h) - u.eval(-h), WithinAbs(2.0 * h * u.deriv(0.0), 1e-10));
        REQUIRE_THAT(u.deriv(h) - u.deriv(-h), WithinAbs(2.0 * h * u.second_deriv(0.0), 1e-6));
        REQUIRE_THAT(u.second_deriv(h) - u.second_deriv(-h), WithinAbs(0.0, 1e-5));

        // derivatives consistent with finite differences away from the glue
        for (double x : {-3.0, -0.5, 0.8, 5.0}) {
            REQUIRE_THAT(u.deriv(x), WithinRel(fd1(u, x), 1e-7));
            REQUIRE_THAT(u.second_deriv(x), WithinRel(fd2(u, x), 1e-5));
        }

        // strictly increasing, concave, bounded above by 0
        double prev = u.eval(-10.0);
        for (double x = -9.5; x <= 10.0; x += 0.5) {
            double v = u.eval(x);
            REQUIRE(v > prev);
            REQUIRE(v < 0.0);
            REQUIRE(u.deriv(x) > 0.0);
            REQUIRE(u.second_deriv(x) < 0.0);
            prev = v;
        }
        REQUIRE(u.sup() == 0.0);

        // inverse round-trips on both branches
        for (double x : {-6.0, -1.2, 0.0, 0.4, 7.0})
            REQUIRE_THAT(u.invert(u.eval(x)), WithinAbs(x, 1e-9));

        REQUIRE_THROWS_AS(u.invert(0.0), std::domain_error);
    }

    REQUIRE_THROWS_AS(UtilityFamily::power_like(0.0, 2.0), std::invalid_argument);
    REQUIRE_THROWS_AS(UtilityFamily::power_like(-1.0, 2.0), std::invalid_argument);
    REQUIRE_THROWS_AS(UtilityFamily::power_like(1.0, 1.9), std::invalid_argument);
}

TEST_CASE("modified exponential is C^1 with a linear left branch", "[utility]") {
    UtilityFamily u = UtilityFamily::modified_exponential();
    REQUIRE(u.eval(0.0) == -1.0);
    REQUIRE(u.eval(-2.0) == -3.0);
    REQUIRE_THAT(u.eval(1.5), WithinRel(-std::exp(-1.5), 1e-15));
    REQUIRE(u.deriv(-4.0) == 1.0);
    REQUIRE(u.deriv(0.0) == 1.0);
    // kink convention: U''(0) takes the right branch value
    REQUIRE(u.second_deriv(0.0) == -1.0);
    REQUIRE(u.second_deriv(-1.0) == 0.0);
    REQUIRE(u.deriv_limit_neg_inf() == 1.0);
    for (double x : {-7.0, -0.5, 0.0, 0.5, 3.0})
        REQUIRE_THAT(u.invert(u.eval(x)), WithinAbs(x, 1e-12));
    REQUIRE(u.negative_valued());
    REQUIRE_THAT(u.log_neg(-2.0), WithinRel(std::log(3.0), 1e-15));
    REQUIRE(u.log_neg(2.0) == -2.0);
}

TEST_CASE("iterated exponential and its exact log channel", "[utility]") {
    UtilityFamily u = UtilityFamily::iterated_exponential();
    REQUIRE(u.sup() == -1.0);
    REQUIRE(u.bounded_above());
    REQUIRE(u.negative_valued());
    for (double x : {-4.0, -1.0, 0.0, 2.0, 6.0}) {
        REQUIRE_THAT(u.eval(x), WithinRel(-std::exp(std::exp(-x)), 1e-13));
        REQUIRE(u.log_neg(x) == std::exp(-x)); // exact: ln(-U) = e^{-x}
        REQUIRE_THAT(u.invert_log_neg(u.log_neg(x)), WithinAbs(x, 1e-12));
        REQUIRE_THAT(u.invert(u.eval(x)), WithinAbs(x, 1e-9));
        REQUIRE_THAT(u.deriv(x), WithinRel(fd1(u, x), 1e-6));
    }
    // the log channel keeps working where eval has underflowed to its sup
    REQUIRE(u.log_neg(500.0) == std::exp(-500.0));
    REQUIRE_THROWS_AS(u.invert(-0.5), std::domain_error); // above sup = -1
}

TEST_CASE("linear family is the unbounded reference case", "[utility]") {
    UtilityFamily u = UtilityFamily::linear();
    REQUIRE(u.eval(3.25) == 3.25);
    REQUIRE(u.deriv(-7.0) == 1.0);
    REQUIRE(u.second_deriv(2.0) == 0.0);
    REQUIRE(u.invert(1.75) == 1.75);
    REQUIRE_FALSE(u.bounded_above());
    REQUIRE_FALSE(u.negative_valued());
    REQUIRE(u.sup() == std::numeric_limits<double>::infinity());
    for (double g : {0.1, 1.0, 10.0})
        REQUIRE(arrow_pratt(u, RiskAversion(g), 0.7) == 0.0);
}

TEST_CASE("affine wrapper rescales values but not risk aversion", "[utility]") {
    UtilityFamily inner = UtilityFamily::exponential();
    UtilityFamily u = UtilityFamily::affine(2.0, 1.0, inner);
    REQUIRE(u.id() == FamilyId::affine_wrapped);
    REQUIRE(u.affine_scale() == 2.0);
    REQUIRE(u.affine_shift() == 1.0);
    for (double x : {-3.0, 0.0, 1.4}) {
        REQUIRE_THAT(u.eval(x), WithinRel(2.0 * inner.eval(x) + 1.0, 1e-15));
        REQUIRE_THAT(u.deriv(x), WithinRel(2.0 * inner.deriv(x), 1e-15));
        REQUIRE_THAT(u.invert(u.eval(x)), WithinAbs(x, 1e-12));
        // Arrow-Pratt is invariant under positive affine maps
        REQUIRE_THAT(arrow_pratt(u, RiskAversion(3.0), x),
                     WithinRel(arrow_pratt(inner, RiskAversion(3.0), x), 1e-12));
    }
    REQUIRE(u.sup() == 1.0); // 2*0 + 1
    REQUIRE_THROWS_AS(UtilityFamily::affine(0.0, 1.0, inner), std::invalid_argument);
    REQUIRE_THROWS_AS(UtilityFamily::affine(-2.0, 0.0, inner), std::invalid_argument);
}

TEST_CASE("arrow-pratt closed forms agree with the defining quotient", "[utility]") {
    auto quotient = [](const UtilityFamily& u, double gamma, double x) {
        return -gamma * u.second_deriv(gamma * x) / u.deriv(gamma * x);
    };
    std::vector<UtilityFamily> fams = {
        UtilityFamily::exponential(), UtilityFamily::power_like(1.0, 2.0),
        UtilityFamily::power_like(0.5, 3.0), UtilityFamily::iterated_exponential()};
    for (const auto& u : fams)
        for (double g : {0.05, 1.0, 8.0})
            for (double x : {-2.0, -0.1, 0.3, 1.7}) {
                const double q = quotient(u, g, x);
                if (!std::isfinite(q)) continue; // U' overflows in the quotient, not the closed form
                REQUIRE_THAT(arrow_pratt(u, RiskAversion(g), x), WithinRel(q, 1e-10));
            }

    // exponential: A_gamma = gamma, exactly, even where exp(-gamma x) underflows
    UtilityFamily e = UtilityFamily::exponential();
    REQUIRE(arrow_pratt(e, RiskAversion(1.0), 800.0) == 1.0);
    REQUIRE(arrow_pratt(e, RiskAversion(50.0), 100.0) == 50.0);

    // iterated exponential: A_gamma(x) = gamma (1 + e^{-gamma x})
    UtilityFamily it = UtilityFamily::iterated_exponential();
    REQUIRE_THAT(arrow_pratt(it, RiskAversion(2.0), 1.5),
                 WithinRel(2.0 * (1.0 + std::exp(-3.0)), 1e-13));

    // modified exponential: 0 on the linear branch, gamma on the right
    UtilityFamily m = UtilityFamily::modified_exponential();
    REQUIRE(arrow_pratt(m, RiskAversion(2.0), -1.0) == 0.0);
    REQUIRE(arrow_pratt(m, RiskAversion(2.0), 1.0) == 2.0);
    REQUIRE(arrow_pratt(m, RiskAversion(2.0), 0.0) == 2.0); // kink convention
}

TEST_CASE("all shipped families certify scale-aversion regular", "[utility]") {
    std::vector<UtilityFamily> fams = {
        UtilityFamily::exponential(),
        UtilityFamily::power_like(1.0, 2.0),
        UtilityFamily::power_like(0.5, 3.0),
        UtilityFamily::modified_exponential(),
        UtilityFamily::iterated_exponential(),
        UtilityFamily::linear(),
        UtilityFamily::affine(2.0, -1.0, UtilityFamily::exponential()),
    };
    for (const auto& u : fams) {
        RegularityReport rep = check_scale_aversion_regularity(
            u, default_gamma_grid(), default_x_grid(), default_regularity_tol());
        INFO(u.spec_string());
        REQUIRE(rep.verdict == RegularityReport::Verdict::regular_on_grid);
        REQUIRE_FALSE(rep.witness.has_value());
        REQUIRE(rep.gamma_grid.size() == 64);
        REQUIRE(rep.x_grid.size() == 401);
    }
}

TEST_CASE("certifier validates its inputs", "[utility]") {
    UtilityFamily u = UtilityFamily::exponential();
    const std::vector<double> gg = {0.5, 0.6};
    const std::vector<double> xg = {0.0};
    REQUIRE_THROWS_AS(check_scale_aversion_regularity(u, {}, xg, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(check_scale_aversion_regularity(u, gg, {}, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(check_scale_aversion_regularity(u, {0.6, 0.5}, xg, 0.0),
                      std::invalid_argument); // gamma grid must ascend
    REQUIRE_THROWS_AS(check_scale_aversion_regularity(u, {0.0, 0.5}, xg, 0.0),
                      std::invalid_argument); // gamma must be positive
    REQUIRE_THROWS_AS(check_scale_aversion_regularity(u, gg, {1.0 / 0.0}, 0.0),
                      std::invalid_argument); // x grid must be finite
    REQUIRE_THROWS_AS(check_scale_aversion_regularity(u, gg, xg, -1.0),
                      std::invalid_argument); // tol must be >= 0

    // tol = 0 accepts flat sensitivity runs: the modified-exponential family
    // has A identically zero on its linear branch.
    RegularityReport flat = check_scale_aversion_regularity(
        UtilityFamily::modified_exponential(), gg, {-2.0, -1.0}, 0.0);
    REQUIRE(flat.verdict == RegularityReport::Verdict::regular_on_grid);
    REQUIRE_FALSE(flat.witness.has_value());
    REQUIRE(flat.tol == 0.0);
}

TEST_CASE("convex conjugate of the exponential family is y ln y - y", "[utility]") {
    UtilityFamily u = UtilityFamily::exponential();
    REQUIRE_THAT(convex_conjugate(u, 0.1), WithinAbs(oracles::conj_exp_at_01, 1e-8));
    REQUIRE_THAT(convex_conjugate(u, 1.0), WithinAbs(oracles::conj_exp_at_1, 1e-8));
    REQUIRE_THAT(convex_conjugate(u, 10.0), WithinRel(oracles::conj_exp_at_10, 1e-8));
}

TEST_CASE("convex conjugate handles bounded slopes and plateaus", "[utility]") {
    UtilityFamily lin = UtilityFamily::linear();
    REQUIRE(convex_conjugate(lin, 1.0) == 0.0);
    REQUIRE(convex_conjugate(lin, 2.0) == std::numeric_limits<double>::infinity());
    REQUIRE(convex_conjugate(lin, 0.5) == std::numeric_limits<double>::infinity());

    // modified exponential: slopes live in (0,1]; above 1 the sup diverges,
    // at exactly 1 the objective plateaus at -1 along the linear branch.
    UtilityFamily m = UtilityFamily::modified_exponential();
    REQUIRE(convex_conjugate(m, 2.0) == std::numeric_limits<double>::infinity());
    REQUIRE_THAT(convex_conjugate(m, 1.0), WithinAbs(-1.0, 1e-8));
    // interior slope: argmax at x = -ln y on the right branch,
    // U* = y ln y - y there as well
    REQUIRE_THAT(convex_conjugate(m, 0.5), WithinAbs(0.5 * std::log(0.5) - 0.5, 1e-8));

    // brute-force scan oracle for a power-like case
    UtilityFamily p = UtilityFamily::power_like(1.0, 2.0);
    double y = 0.2;
    double best = -1e300;
    for (double x = -50.0; x <= 50.0; x += 1e-3)
        best = std::max(best, p.eval(x) - x * y);
    REQUIRE_THAT(convex_conjugate(p, y), WithinAbs(best, 1e-4));
}

TEST_CASE("utility spec strings parse and round-trip", "[utility]") {
    for (const char* spec : {"exp", "modexp", "iterexp", "linear"}) {
        UtilityFamily u = parse_utility(spec);
        REQUIRE(u.spec_string() == spec);
    }
    UtilityFamily p = parse_utility("powerlike:alpha=1,beta=2");
    REQUIRE(p.id() == FamilyId::power_like);
    REQUIRE(p.alpha() == 1.0);
    REQUIRE(p.beta() == 2.0);
    REQUIRE(parse_utility(p.spec_string()).spec_string() == p.spec_string());

    UtilityFamily a = parse_utility("affine:a=2,b=1,inner=exp");
    REQUIRE(a.id() == FamilyId::affine_wrapped);
    REQUIRE(a.inner().id() == FamilyId::exponential);
    REQUIRE(parse_utility(a.spec_string()).spec_string() == a.spec_string());

    REQUIRE_THROWS_AS(parse_utility("quadratic"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_utility("powerlike:alpha=0,beta=2"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_utility("powerlike:alpha=1"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_utility("affine:a=-1,b=0,inner=exp"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_utility(""), std::invalid_argument);
}
