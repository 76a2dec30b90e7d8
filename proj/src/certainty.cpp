#include "uai/certainty.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uai {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier-compensated accumulator: keeps weighted sums exact to the last bit
// even when term magnitudes span many orders.
struct CompensatedSum {
    double s = 0.0, c = 0.0;
    void add(double v) {
        const double t = s + v;
        if (std::fabs(s) >= std::fabs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    double get() const { return s + c; }
};

} // namespace

CEValue CEValue::finite(double v) {
    if (!std::isfinite(v))
        throw std::invalid_argument("CEValue::finite: value must be finite");
    CEValue r;
    r.value = v;
    r.finite_flag = true;
    return r;
}

CEValue CEValue::infinite() {
    CEValue r;
    r.value = kInf;
    r.finite_flag = false;
    return r;
}

CEValue certainty_equivalent(const UtilityFamily& family, RiskAversion gamma,
                             const EmpiricalDistribution& dist) {
    const double g = gamma.value();
    const auto& xs = dist.outcomes();
    const auto& ps = dist.probabilities();

    if (family.id() == FamilyId::linear) {
        // Scale-invariant reference case: the CE of the mean.
        CompensatedSum acc;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (ps[i] > 0.0) acc.add(ps[i] * xs[i]);
        return CEValue::finite(-acc.get());
    }
    if (family.id() == FamilyId::affine_wrapped) {
        // U^{-1}(E[a U_in + b]) = U_in^{-1}(E[U_in]): the wrapper cancels
        // identically, so the CE is that of the inner family, bit for bit.
        return certainty_equivalent(family.inner(), gamma, dist);
    }
    if (!family.bounded_above())
        throw std::invalid_argument("certainty_equivalent: family must be bounded above");

    // Direct route: exact weighted sum of U(gamma x_i).  Outcomes are sorted
    // ascending and U is negative and increasing, so this order is descending
    // in term magnitude.
    bool direct_ok = true;
    CompensatedSum acc;
    for (std::size_t i = 0; i < xs.size() && direct_ok; ++i) {
        if (ps[i] == 0.0) continue;
        const double u = family.eval(g * xs[i]);
        if (!std::isfinite(u)) {
            direct_ok = false;
            break;
        }
        acc.add(ps[i] * u);
    }
    if (direct_ok) {
        const double e = acc.get();
        // Reject saturated or denormal-adjacent expectations and retry in log
        // space: invert() loses all precision there.  For families whose sup
        // is negative, "near zero" is the wrong test: the danger zone is an
        // expectation that has rounded against the sup itself, where the
        // inversion has to resolve ln(-e) from a cancelling tail.
        bool safe = std::isfinite(e);
        if (safe && family.negative_valued()) {
            const double sup = family.sup();
            if (sup == 0.0)
                safe = -e > 1e-290;
            else
                safe = e < sup - 1e-3 * std::fabs(sup);
        }
        if (safe)
            return CEValue::finite(-family.invert(e) / g);
    }

    if (!family.negative_valued())
        throw std::runtime_error("certainty_equivalent: expectation overflowed and family has no log-space channel");

    // Log-space route: ln(-E[U]) = logsumexp_i( ln p_i + ln(-U(gamma x_i)) ).
    double m = -kInf;
    double max_tail = -kInf, min_tail = kInf;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ps[i] == 0.0) continue;
        const double ln = family.log_neg(g * xs[i]);
        if (ln > max_tail) max_tail = ln;
        if (ln < min_tail) min_tail = ln;
        const double li = std::log(ps[i]) + ln;
        if (li > m) m = li;
    }
    if (m == kInf) {
        // Double-exponential tail saturated even in log space; the true value
        // is a huge positive CE.
        return CEValue::infinite();
    }
    if (family.sup() < 0.0 && max_tail <= 1e-8 && min_tail >= -1e-8) {
        // Every ln(-U) term is tiny, so the logsumexp collapses to
        // ln(sum p_i) and rounds the answer away; use
        // ln(sum p_i e^{t_i}) = sum p_i t_i + O(max t^2) instead.
        CompensatedSum tails;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (ps[i] > 0.0) tails.add(ps[i] * family.log_neg(g * xs[i]));
        const double L = tails.get();
        if (!(L > 0.0))
            throw std::runtime_error(
                "certainty_equivalent: log-space tails underflowed; outcomes too large");
        return CEValue::finite(-family.invert_log_neg(L) / g);
    }
    CompensatedSum es;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ps[i] == 0.0) continue;
        es.add(std::exp(std::log(ps[i]) + family.log_neg(g * xs[i]) - m));
    }
    const double L = m + std::log(es.get());
    return CEValue::finite(-family.invert_log_neg(L) / g);
}

CEValue entropic_closed_form(RiskAversion gamma, const EmpiricalDistribution& dist) {
    const double g = gamma.value();
    const auto& xs = dist.outcomes();
    const auto& ps = dist.probabilities();
    double m = -kInf;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ps[i] == 0.0) continue;
        const double li = std::log(ps[i]) - g * xs[i];
        if (li > m) m = li;
    }
    CompensatedSum es;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ps[i] == 0.0) continue;
        es.add(std::exp(std::log(ps[i]) - g * xs[i] - m));
    }
    return CEValue::finite((m + std::log(es.get())) / g);
}

double gaussian_entropic(RiskAversion gamma, double m, double sigma) {
    if (!std::isfinite(m))
        throw std::invalid_argument("gaussian_entropic: m must be finite");
    if (!(std::isfinite(sigma) && sigma >= 0.0))
        throw std::invalid_argument("gaussian_entropic: sigma must be finite and >= 0");
    return -m + gamma.value() * sigma * sigma / 2.0;
}

double oce(const UtilityFamily& family, RiskAversion gamma, const EmpiricalDistribution& dist,
           std::optional<std::pair<double, double>> c_bounds) {
    const double g = gamma.value();
    const auto& xs = dist.outcomes();
    const auto& ps = dist.probabilities();

    double lo, hi;
    if (c_bounds) {
        lo = c_bounds->first;
        hi = c_bounds->second;
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
            throw std::invalid_argument("oce: invalid c bounds");
    } else {
        lo = dist.min_outcome() - 10.0 / g;
        hi = dist.max_outcome() + 10.0 / g;
    }

    const auto objective = [&](double c) {
        CompensatedSum acc;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (ps[i] > 0.0) acc.add(ps[i] * family.eval(g * (xs[i] - c)));
        return c + acc.get() / g;
    };

    // Golden-section search; concavity of the objective makes it exact.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while (b - a > 1e-10 * std::max(1.0, std::fabs(a) + std::fabs(b))) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = objective(x1);
        }
    }
    const double c_star = 0.5 * (a + b);
    const double v_star = objective(c_star);

    // Coercivity check: a maximizer at (or a plateau reaching) either bound
    // means the supremum is not attained inside the interval.
    const double span = hi - lo;
    const double vtol = 1e-9 * std::max(1.0, std::fabs(v_star));
    if (c_star - lo < 1e-6 * span || hi - c_star < 1e-6 * span ||
        objective(lo) >= v_star - vtol || objective(hi) >= v_star - vtol)
        throw std::runtime_error("oce: non-coercive objective");
    return v_star;
}

double cash_additive_hull(const UtilityFamily& family, RiskAversion gamma,
                          const EmpiricalDistribution& dist) {
    if (!family.bounded_above())
        throw std::invalid_argument("cash_additive_hull: family must be bounded above");

    const auto mu_shift = [&](double m) {
        return certainty_equivalent(family, gamma, dist.shifted(m));
    };
    // mu_gamma(X + m) is continuous and strictly decreasing in m; bracket a
    // sign change and bisect to the acceptability boundary.
    double lo = -dist.max_outcome() - 1.0; // mu > 0 here
    double hi = -dist.min_outcome() + 1.0; // mu < 0 here
    int guard = 0;
    while (true) {
        const CEValue v = mu_shift(lo);
        if (!v.finite_flag || v.value > 0.0) break;
        lo -= std::max(1.0, std::fabs(lo));
        if (++guard > 200)
            throw std::runtime_error("cash_additive_hull: bracket expansion failed");
    }
    guard = 0;
    while (true) {
        const CEValue v = mu_shift(hi);
        if (v.finite_flag && v.value <= 0.0) break;
        hi += std::max(1.0, std::fabs(hi));
        if (++guard > 200)
            throw std::runtime_error("cash_additive_hull: bracket expansion failed");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-10 * std::max(1.0, std::fabs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const CEValue v = mu_shift(mid);
        if (v.finite_flag && v.value <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double mv_approx(RiskAversion gamma, const EmpiricalDistribution& dist) {
    const Moments m = moments(dist);
    return -m.mean + gamma.value() * m.variance / 2.0;
}

} // namespace uai
