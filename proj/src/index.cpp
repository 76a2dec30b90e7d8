#include "uai/index.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uai {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

bool is_shipped_regular(const UtilityFamily& f) {
    switch (f.id()) {
        case FamilyId::exponential:
        case FamilyId::power_like:
        case FamilyId::modified_exponential:
            return true;
        case FamilyId::affine_wrapped:
            return is_shipped_regular(f.inner());
        default:
            return false;
    }
}

IndexValue acceptability_index(const UtilityFamily& family, const EmpiricalDistribution& dist,
                               const IndexOptions& opts) {
    if (!(opts.gamma_min > 0.0 && opts.gamma_cap > opts.gamma_min && opts.tol_rel > 0.0))
        throw std::invalid_argument("acceptability_index: invalid solver options");
    if (!family.bounded_above())
        throw std::invalid_argument("acceptability_index: family must be bounded above");
    if (!is_shipped_regular(family) && !opts.regularity_certified)
        throw std::invalid_argument(
            "acceptability_index: family is not scale-aversion regular (certify on a grid first)");

    IndexValue out;

    // Exact classifications come before any solver work.
    if (dist.min_outcome() >= 0.0) {
        out.kind = IndexValue::Kind::infinite;
        out.value = kInf;
        out.gamma_lo = 0.0;
        out.gamma_hi = kInf;
        out.diagnostic = IndexValue::Diagnostic::nonneg_position;
        return out;
    }
    const Moments m = moments(dist);
    if (m.mean < 0.0 || m.mean == 0.0) {
        // mean == 0 with some negative outcome: mu_gamma > 0 for every
        // gamma > 0 under strict risk aversion, so the supremum is empty.
        out.kind = IndexValue::Kind::zero;
        out.value = 0.0;
        out.gamma_lo = 0.0;
        out.gamma_hi = 0.0;
        out.diagnostic = IndexValue::Diagnostic::expectation_negative;
        return out;
    }

    int evals = 0;
    const auto acceptable = [&](double g) {
        ++evals;
        const CEValue v = certainty_equivalent(family, RiskAversion(g), dist);
        return v.finite_flag && v.value <= 0.0;
    };

    double lo, hi;
    if (!acceptable(opts.gamma_min)) {
        // Root below gamma_min: the mean is positive so acceptability holds
        // for gamma small enough; bisect down from gamma_min with lo pinned
        // at the (not evaluable) origin.
        lo = 0.0;
        hi = opts.gamma_min;
    } else {
        lo = opts.gamma_min;
        hi = kInf;
        for (double g = opts.gamma_min * 10.0; g <= opts.gamma_cap; g *= 10.0) {
            if (acceptable(g)) {
                lo = g;
            } else {
                hi = g;
                break;
            }
        }
        if (hi == kInf) {
            if (acceptable(opts.gamma_cap)) {
                out.kind = IndexValue::Kind::infinite;
                out.value = kInf;
                out.gamma_lo = opts.gamma_cap;
                out.gamma_hi = kInf;
                out.evaluations = evals;
                out.diagnostic = IndexValue::Diagnostic::cap_exceeded;
                return out;
            }
            hi = opts.gamma_cap;
        }
    }

    // Monotone bisection on the <= 0 predicate; ties resolve to the upper
    // (supremum) side because equality keeps the point in the lo set.
    for (int i = 0; i < 400; ++i) {
        const double scale = lo > 0.0 ? lo : hi;
        if (hi - lo <= opts.tol_rel * scale) break;
        const double mid = 0.5 * (lo + hi);
        if (acceptable(mid))
            lo = mid;
        else
            hi = mid;
    }

    out.kind = IndexValue::Kind::finite;
    out.value = 0.5 * (lo + hi);
    out.gamma_lo = lo;
    out.gamma_hi = hi;
    out.evaluations = evals;
    out.diagnostic = IndexValue::Diagnostic::root_found;
    return out;
}

IndexValue index_grid_oracle(const UtilityFamily& family, const EmpiricalDistribution& dist,
                             const std::vector<double>& gamma_grid) {
    if (gamma_grid.empty())
        throw std::invalid_argument("index_grid_oracle: empty grid");
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
        if (!(gamma_grid[i] > 0.0))
            throw std::invalid_argument("index_grid_oracle: grid must be positive");
        if (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1]))
            throw std::invalid_argument("index_grid_oracle: grid must be ascending");
    }

    IndexValue out;
    if (dist.min_outcome() >= 0.0) {
        out.kind = IndexValue::Kind::infinite;
        out.value = kInf;
        out.gamma_lo = 0.0;
        out.gamma_hi = kInf;
        out.diagnostic = IndexValue::Diagnostic::nonneg_position;
        return out;
    }

    int evals = 0;
    double best = -1.0;
    for (double g : gamma_grid) {
        ++evals;
        const CEValue v = certainty_equivalent(family, RiskAversion(g), dist);
        if (v.finite_flag && v.value <= 0.0) best = g;
    }
    out.evaluations = evals;
    if (best < 0.0) {
        out.kind = IndexValue::Kind::zero;
        out.value = 0.0;
        out.gamma_lo = 0.0;
        out.gamma_hi = 0.0;
        out.diagnostic = IndexValue::Diagnostic::expectation_negative;
    } else {
        out.kind = IndexValue::Kind::finite;
        out.value = best;
        out.gamma_lo = best;
        out.gamma_hi = best;
        out.diagnostic = IndexValue::Diagnostic::root_found;
    }
    return out;
}

bool index_less(const IndexValue& a, const IndexValue& b) {
    const auto rank = [](const IndexValue& v) {
        switch (v.kind) {
            case IndexValue::Kind::zero: return 0;
            case IndexValue::Kind::finite: return 1;
            case IndexValue::Kind::infinite: return 2;
        }
        return 0;
    };
    if (rank(a) != rank(b)) return rank(a) < rank(b);
    if (a.kind == IndexValue::Kind::finite) return a.value < b.value;
    return false;
}

const char* diagnostic_name(IndexValue::Diagnostic d) {
    switch (d) {
        case IndexValue::Diagnostic::expectation_negative: return "expectation_negative";
        case IndexValue::Diagnostic::nonneg_position: return "nonneg_position";
        case IndexValue::Diagnostic::root_found: return "root_found";
        case IndexValue::Diagnostic::cap_exceeded: return "cap_exceeded";
    }
    return "unknown";
}

const char* kind_name(IndexValue::Kind k) {
    switch (k) {
        case IndexValue::Kind::zero: return "zero";
        case IndexValue::Kind::finite: return "finite";
        case IndexValue::Kind::infinite: return "infinite";
    }
    return "unknown";
}

} // namespace uai
