#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "uai/certainty.hpp"
#include "uai/index.hpp"
#include "uai/rng.hpp"
#include "uai/sample.hpp"
#include "uai/utility.hpp"

using namespace uai;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Law with a positive mean and a real downside, so the index is finite.
EmpiricalDistribution mixed_law(Rng& rng) {
    for (;;) {
        std::size_t n = 2 + rng.next_u64() % 15;
        std::vector<double> xs(n), ps(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = -10.0 + 20.0 * rng.next_uniform();
            ps[i] = 0.2 + 0.8 * rng.next_uniform();
            total += ps[i];
        }
        for (double& p : ps) p /= total;
        EmpiricalDistribution d(xs, ps);
        Moments m = moments(d);
        if (m.mean > 0.05 && m.min < -0.05) return d;
    }
}

} // namespace

TEST_CASE("index of the golden two-point law is ln phi", "[index]") {
    // E[e^{-g X}] = (e^{g} + e^{-2g})/2 crosses 1 at g = ln((1+sqrt 5)/2)
    EmpiricalDistribution d({-1.0, 2.0}, {0.5, 0.5});
    IndexValue v = acceptability_index(UtilityFamily::exponential(), d);
    REQUIRE(v.kind == IndexValue::Kind::finite);
    REQUIRE(v.diagnostic == IndexValue::Diagnostic::root_found);
    REQUIRE_THAT(v.value, WithinRel(oracles::ln_golden, 1e-7));
    REQUIRE(v.gamma_lo <= v.value);
    REQUIRE(v.value <= v.gamma_hi);
    REQUIRE(v.evaluations > 0);
}

TEST_CASE("nonnegative positions are infinitely acceptable", "[index]") {
    UtilityFamily u = UtilityFamily::exponential();
    for (auto d : {EmpiricalDistribution({0.0, 1.0}, {0.5, 0.5}),
                   EmpiricalDistribution({0.0}, {1.0}),
                   EmpiricalDistribution({2.0, 5.0}, {0.3, 0.7})}) {
        IndexValue v = acceptability_index(u, d);
        REQUIRE(v.kind == IndexValue::Kind::infinite);
        REQUIRE(v.diagnostic == IndexValue::Diagnostic::nonneg_position);
        REQUIRE(std::isinf(v.value));
        REQUIRE(v.evaluations == 0); // classified without solving
    }
}

TEST_CASE("nonpositive mean positions have index zero", "[index]") {
    UtilityFamily u = UtilityFamily::exponential();
    for (auto d : {EmpiricalDistribution({-1.0, 0.5}, {0.5, 0.5}),
                   EmpiricalDistribution({-1.0, 1.0}, {0.5, 0.5}),   // mean exactly 0
                   EmpiricalDistribution({-3.0}, {1.0})}) {
        IndexValue v = acceptability_index(u, d);
        REQUIRE(v.kind == IndexValue::Kind::zero);
        REQUIRE(v.diagnostic == IndexValue::Diagnostic::expectation_negative);
        REQUIRE(v.value == 0.0);
    }
}

TEST_CASE("solver root stays within one cell of an independent grid scan", "[index]") {
    Rng rng(31);
    std::vector<UtilityFamily> fams = {UtilityFamily::exponential(),
                                       UtilityFamily::power_like(1.0, 2.0),
                                       UtilityFamily::modified_exponential()};
    const int grid_points = 2000; // log grid over [1e-4, 1e4]
    const double ratio = std::pow(1e8, 1.0 / (grid_points - 1));
    for (int rep = 0; rep < 15; ++rep) {
        EmpiricalDistribution d = mixed_law(rng);
        for (const auto& u : fams) {
            IndexValue v = acceptability_index(u, d);
            if (v.kind != IndexValue::Kind::finite) continue;
            // oracle: largest grid gamma whose certainty equivalent is <= 0
            double best = 0.0;
            for (int i = 0; i < grid_points; ++i) {
                double g = 1e-4 * std::pow(ratio, i);
                CEValue mu = certainty_equivalent(u, RiskAversion(g), d);
                if (mu.finite_flag && mu.value <= 0.0) best = g;
            }
            INFO(u.spec_string() << " root=" << v.value << " oracle=" << best);
            REQUIRE(best > 0.0);
            REQUIRE(v.value >= best / ratio);
            REQUIRE(v.value <= best * ratio * ratio);
        }
    }
}

TEST_CASE("index is inverse positively homogeneous", "[index]") {
    Rng rng(41);
    UtilityFamily u = UtilityFamily::exponential();
    for (int rep = 0; rep < 10; ++rep) {
        EmpiricalDistribution d = mixed_law(rng);
        IndexValue base = acceptability_index(u, d);
        REQUIRE(base.kind == IndexValue::Kind::finite);
        for (double lam : {0.1, 0.5, 2.0, 10.0}) {
            IndexValue scaled = acceptability_index(u, scale(d, lam));
            REQUIRE(scaled.kind == IndexValue::Kind::finite);
            REQUIRE_THAT(lam * scaled.value, WithinRel(base.value, 1e-6));
        }
    }
}

TEST_CASE("index is monotone under sure improvements", "[index]") {
    Rng rng(43);
    UtilityFamily u = UtilityFamily::power_like(1.0, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        EmpiricalDistribution d = mixed_law(rng);
        IndexValue lo = acceptability_index(u, d);
        IndexValue hi = acceptability_index(u, d.shifted(0.5));
        // d + 0.5 dominates d outcome-wise, so its index cannot be smaller
        REQUIRE_FALSE(index_less(hi, lo));
    }
}

TEST_CASE("a small cap turns unfinished expansion into a diagnosed infinity", "[index]") {
    EmpiricalDistribution d({-1.0, 2.0}, {0.5, 0.5}); // true root ~0.48
    IndexOptions opts;
    opts.gamma_cap = 1e-2;
    IndexValue v = acceptability_index(UtilityFamily::exponential(), d, opts);
    REQUIRE(v.kind == IndexValue::Kind::infinite);
    REQUIRE(v.diagnostic == IndexValue::Diagnostic::cap_exceeded);
}

TEST_CASE("roots below gamma_min are still resolved", "[index]") {
    // mean barely positive: the acceptable set ends near 2e-4, below the
    // configured expansion start
    EmpiricalDistribution d({-1.0, 1.0 + 2e-4}, {0.5, 0.5});
    UtilityFamily u = UtilityFamily::exponential();
    IndexOptions opts;
    opts.gamma_min = 1e-3;
    IndexValue v = acceptability_index(u, d, opts);
    REQUIRE(v.kind == IndexValue::Kind::finite);
    REQUIRE(v.value < 1e-3);
    REQUIRE(v.gamma_hi <= 1e-3);
    double ref = oracles::bisect(
        [&](double g) {
            return certainty_equivalent(u, RiskAversion(g), d).value;
        },
        1e-6, 1e-3);
    REQUIRE_THAT(v.value, WithinRel(ref, 1e-6));

    // At the default gamma_min the same story with a 1e-9 gap is numerically
    // atomic: E[exp(-gamma X)] - 1 sits below double resolution there, so the
    // solver can only promise a tiny answer, not a certified digit count.
    EmpiricalDistribution tiny({-1.0, 1.0 + 1e-9}, {0.5, 0.5});
    IndexValue w = acceptability_index(u, tiny);
    REQUIRE(w.kind == IndexValue::Kind::finite);
    REQUIRE(w.value < 1e-7);
    REQUIRE(w.value > 0.0);
}

TEST_CASE("only certified families may be indexed", "[index]") {
    EmpiricalDistribution d({-1.0, 2.0}, {0.5, 0.5});
    UtilityFamily it = UtilityFamily::iterated_exponential();
    REQUIRE_THROWS_AS(acceptability_index(it, d), std::invalid_argument);

    IndexOptions certified;
    certified.regularity_certified = true;
    IndexValue v = acceptability_index(it, d, certified);
    REQUIRE(v.kind == IndexValue::Kind::finite);
    REQUIRE(v.value > 0.0);
}

TEST_CASE("shipped regularity covers exactly the proven families", "[index]") {
    REQUIRE(is_shipped_regular(UtilityFamily::exponential()));
    REQUIRE(is_shipped_regular(UtilityFamily::power_like(2.0, 3.0)));
    REQUIRE(is_shipped_regular(UtilityFamily::modified_exponential()));
    REQUIRE(is_shipped_regular(UtilityFamily::affine(2.0, 1.0, UtilityFamily::exponential())));
    REQUIRE_FALSE(is_shipped_regular(UtilityFamily::iterated_exponential()));
    REQUIRE_FALSE(is_shipped_regular(UtilityFamily::linear()));
    REQUIRE_FALSE(
        is_shipped_regular(UtilityFamily::affine(1.0, 0.0, UtilityFamily::iterated_exponential())));
}

TEST_CASE("affine wrapping leaves the index bitwise unchanged", "[index]") {
    Rng rng(47);
    UtilityFamily inner = UtilityFamily::exponential();
    UtilityFamily wrapped = UtilityFamily::affine(5.0, 2.0, inner);
    for (int rep = 0; rep < 5; ++rep) {
        EmpiricalDistribution d = mixed_law(rng);
        IndexValue a = acceptability_index(inner, d);
        IndexValue b = acceptability_index(wrapped, d);
        REQUIRE(a.kind == b.kind);
        REQUIRE(a.value == b.value);
        REQUIRE(a.evaluations == b.evaluations);
    }
}

TEST_CASE("classification order and names", "[index]") {
    IndexValue z, f, inf;
    z.kind = IndexValue::Kind::zero;
    f.kind = IndexValue::Kind::finite;
    f.value = 2.0;
    inf.kind = IndexValue::Kind::infinite;
    inf.value = std::numeric_limits<double>::infinity();
    REQUIRE(index_less(z, f));
    REQUIRE(index_less(f, inf));
    REQUIRE(index_less(z, inf));
    REQUIRE_FALSE(index_less(f, f));
    IndexValue f2 = f;
    f2.value = 3.0;
    REQUIRE(index_less(f, f2));

    REQUIRE(std::string(kind_name(IndexValue::Kind::zero)) == "zero");
    REQUIRE(std::string(kind_name(IndexValue::Kind::finite)) == "finite");
    REQUIRE(std::string(kind_name(IndexValue::Kind::infinite)) == "infinite");
    REQUIRE(std::string(diagnostic_name(IndexValue::Diagnostic::nonneg_position)) ==
            "nonneg_position");
    REQUIRE(std::string(diagnostic_name(IndexValue::Diagnostic::root_found)) == "root_found");
    REQUIRE(std::string(diagnostic_name(IndexValue::Diagnostic::expectation_negative)) ==
            "expectation_negative");
    REQUIRE(std::string(diagnostic_name(IndexValue::Diagnostic::cap_exceeded)) == "cap_exceeded");
}

TEST_CASE("grid oracle helper agrees with the solver", "[index]") {
    EmpiricalDistribution d({-1.0, 2.0}, {0.5, 0.5});
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(1e-2 * std::pow(10.0, 4.0 * i / 400.0));
    IndexValue v = index_grid_oracle(UtilityFamily::exponential(), d, grid);
    REQUIRE(v.kind == IndexValue::Kind::finite);
    REQUIRE_THAT(v.value, WithinRel(oracles::ln_golden, 0.05));
}
