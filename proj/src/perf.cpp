#include "uai/perf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "uai/certainty.hpp"
#include "uai/parallel.hpp"

namespace uai {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

IndexValue finite_horizon_index(const UtilityFamily& family, const StrategyCandidate& candidate,
                                double benchmark_log, const IndexOptions& opts) {
    if (!std::isfinite(benchmark_log))
        throw std::invalid_argument("finite_horizon_index: benchmark must be finite");
    return acceptability_index(family, candidate.terminal_log_growth.shifted(-benchmark_log), opts);
}

Ranking maximize_over_strategies(const UtilityFamily& family,
                                 const std::vector<StrategyCandidate>& candidates,
                                 double benchmark_log, const IndexOptions& opts) {
    if (candidates.empty())
        throw std::invalid_argument("maximize_over_strategies: empty candidate list");
    std::set<std::string> labels;
    for (const auto& c : candidates)
        if (!labels.insert(c.label).second)
            throw std::invalid_argument("maximize_over_strategies: duplicate label '" + c.label + "'");

    std::vector<IndexValue> values(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t i) {
        values[i] = finite_horizon_index(family, candidates[i], benchmark_log, opts);
    });

    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (index_less(values[b], values[a])) return true;
        if (index_less(values[a], values[b])) return false;
        return candidates[a].label < candidates[b].label;
    });

    Ranking out;
    out.best = candidates[order[0]].label;
    out.ranking.reserve(order.size());
    for (std::size_t i : order)
        out.ranking.emplace_back(candidates[i].label, values[i]);
    return out;
}

double closed_form_gaussian_alpha(double m, double lambda_rate, double sigma_T_sq, std::size_t T) {
    if (!std::isfinite(m) || !std::isfinite(lambda_rate))
        throw std::invalid_argument("closed_form_gaussian_alpha: m and lambda must be finite");
    if (!(std::isfinite(sigma_T_sq) && sigma_T_sq > 0.0))
        throw std::invalid_argument("closed_form_gaussian_alpha: sigma_T_sq must be > 0");
    if (T == 0)
        throw std::invalid_argument("closed_form_gaussian_alpha: T must be positive");
    if (m <= lambda_rate) return 0.0;
    return 2.0 * (m - lambda_rate) * static_cast<double>(T) / sigma_T_sq;
}

double risk_sensitive_rate(const UtilityFamily& family, RiskAversion gamma,
                           const std::vector<double>& terminal_log_values, std::size_t T) {
    if (family.id() != FamilyId::exponential)
        throw std::invalid_argument("risk_sensitive_rate: exponential family only");
    if (T == 0)
        throw std::invalid_argument("risk_sensitive_rate: T must be positive");
    const CEValue mu = entropic_closed_form(gamma, from_samples(terminal_log_values));
    return -mu.value / static_cast<double>(T);
}

namespace {

SlopeFit fit_loglog(const std::vector<std::pair<double, double>>& pts) {
    SlopeFit fit;
    fit.n_points = static_cast<int>(pts.size());
    if (pts.size() < 2) return fit;
    double sx = 0, sy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
    }
    const double mx = sx / pts.size(), my = sy / pts.size();
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    fit.slope = sxy / sxx;
    if (pts.size() > 2) {
        double rss = 0;
        for (const auto& [x, y] : pts) {
            const double r = y - my - fit.slope * (x - mx);
            rss += r * r;
        }
        fit.se = std::sqrt(rss / (pts.size() - 2) / sxx);
    }
    return fit;
}

void classify(LongRunReport& rep) {
    const std::size_t n = rep.T_grid.size();
    const std::size_t tail_begin = n / 2;
    std::size_t inf_ct = 0, zero_ct = 0;
    std::vector<std::pair<double, double>> pts;
    double min_finite = kInf;
    for (std::size_t i = tail_begin; i < n; ++i) {
        const IndexValue& v = rep.alpha_values[i];
        switch (v.kind) {
            case IndexValue::Kind::infinite:
                ++inf_ct;
                break;
            case IndexValue::Kind::zero:
                ++zero_ct;
                break;
            case IndexValue::Kind::finite:
                if (v.value > 0.0) {
                    pts.emplace_back(std::log(static_cast<double>(rep.T_grid[i])),
                                     std::log(v.value));
                    min_finite = std::min(min_finite, v.value);
                }
                break;
        }
    }
    const std::size_t tail_n = n - tail_begin;
    rep.fit = fit_loglog(pts);

    if (inf_ct * 2 > tail_n) {
        rep.regime = Regime::divergent;
        rep.liminf_estimate = kInf;
        return;
    }
    if (zero_ct * 2 > tail_n) {
        rep.regime = Regime::vanishing;
        rep.liminf_estimate = 0.0;
        return;
    }
    if (pts.size() >= 2) {
        if (rep.fit.slope > 0.2) {
            rep.regime = Regime::divergent;
            rep.liminf_estimate = kInf;
            return;
        }
        if (rep.fit.slope < -0.2) {
            rep.regime = Regime::vanishing;
            rep.liminf_estimate = 0.0;
            return;
        }
        if (pts.size() == tail_n) {
            rep.regime = Regime::finite_positive;
            rep.liminf_estimate = min_finite;
            return;
        }
    }
    rep.regime = Regime::undetermined;
    rep.liminf_estimate = std::isfinite(min_finite) ? min_finite
                          : inf_ct > 0              ? kInf
                                                    : 0.0;
}

} // namespace

LongRunReport longrun_trajectory(const UtilityFamily& family, const PathModelSpec& spec,
                                 double lambda_rate, const std::vector<std::size_t>& T_grid,
                                 std::uint64_t seed, std::size_t n_paths, LongRunMethod method,
                                 const IndexOptions& opts) {
    if (!std::isfinite(lambda_rate))
        throw std::invalid_argument("longrun_trajectory: lambda must be finite");
    if (T_grid.empty())
        throw std::invalid_argument("longrun_trajectory: empty T grid");
    for (std::size_t i = 0; i < T_grid.size(); ++i) {
        if (T_grid[i] == 0 || T_grid[i] > (1u << 14))
            throw std::invalid_argument("longrun_trajectory: T values must lie in [1, 2^14]");
        if (i > 0 && T_grid[i] <= T_grid[i - 1])
            throw std::invalid_argument("longrun_trajectory: T grid must be strictly ascending");
    }
    if (std::holds_alternative<OuSpec>(spec))
        throw std::invalid_argument(
            "longrun_trajectory: ou is a level process, not a stationary return model");

    LongRunReport rep;
    rep.T_grid = T_grid;
    rep.alpha_values.resize(T_grid.size());

    if (method == LongRunMethod::exact_gaussian) {
        if (family.id() != FamilyId::exponential)
            throw std::invalid_argument(
                "longrun_trajectory: exact route requires the exponential family");
        const double m = model_mean(spec);
        for (std::size_t i = 0; i < T_grid.size(); ++i) {
            const std::size_t T = T_grid[i];
            const double a =
                closed_form_gaussian_alpha(m, lambda_rate, cumulative_variance(spec, T), T);
            IndexValue v;
            if (a > 0.0) {
                v.kind = IndexValue::Kind::finite;
                v.value = a;
                v.gamma_lo = a;
                v.gamma_hi = a;
                v.diagnostic = IndexValue::Diagnostic::root_found;
            } else {
                v.kind = IndexValue::Kind::zero;
                v.value = 0.0;
                v.diagnostic = IndexValue::Diagnostic::expectation_negative;
            }
            rep.alpha_values[i] = v;
        }
        classify(rep);
        return rep;
    }

    if (n_paths < 1000)
        throw std::invalid_argument("longrun_trajectory: Monte Carlo route needs n_paths >= 1000");

    // Common random numbers: one batch, nested partial sums per grid horizon.
    const std::size_t T_max = T_grid.back();
    const auto batch = simulate_batch(spec, T_max, n_paths, seed);

    std::vector<std::vector<double>> terminal(T_grid.size(),
                                              std::vector<double>(n_paths, 0.0));
    for (std::size_t j = 0; j < n_paths; ++j) {
        double acc = 0.0;
        std::size_t gi = 0;
        for (std::size_t t = 0; t < T_max && gi < T_grid.size(); ++t) {
            acc += batch[j][t] - lambda_rate;
            if (t + 1 == T_grid[gi]) {
                terminal[gi][j] = acc;
                ++gi;
            }
        }
    }

    parallel_for(T_grid.size(), [&](std::size_t i) {
        rep.alpha_values[i] = acceptability_index(family, from_samples(terminal[i]), opts);
    });
    classify(rep);
    return rep;
}

DualityResult duality_check(const PathModelSpec& iid_model, double lambda_rate,
                            std::uint64_t seed, std::size_t n_paths, std::size_t T) {
    const auto* iid = std::get_if<IidGaussianSpec>(&iid_model);
    if (!iid)
        throw std::invalid_argument("duality_check: iid_gaussian model only");
    if (!(iid->sigma > 0.0))
        throw std::invalid_argument("duality_check: sigma must be > 0");
    if (!std::isfinite(lambda_rate))
        throw std::invalid_argument("duality_check: lambda must be finite");
    if (T < 64)
        throw std::invalid_argument("duality_check: T must be >= 64");

    if (n_paths < 1000)
        throw std::invalid_argument("duality_check: n_paths must be >= 1000");

    std::vector<std::size_t> grid;
    for (std::size_t t = 32; t <= T; t *= 2) grid.push_back(t);
    if (grid.back() != T) grid.push_back(T);

    // Long-run side through the exact Gaussian law: the empirical index of a
    // finite Gaussian sample saturates to "infinite" once every sampled S_T
    // is positive, which is certain at the larger horizons, so Monte Carlo
    // cannot estimate the liminf there.
    DualityResult out;
    out.lhs_report = longrun_trajectory(UtilityFamily::exponential(), iid_model, lambda_rate,
                                        grid, seed, n_paths, LongRunMethod::exact_gaussian);
    out.lhs = out.lhs_report.liminf_estimate;

    // Risk-sensitive side by Monte Carlo at a short horizon: for iid returns
    // the rate -mu_gamma(ln V_T)/T does not depend on T, and the log-sum-exp
    // estimator is only well conditioned while gamma^2 sigma^2 T stays small
    // against ln(n_paths).
    const std::size_t T_rate = std::min<std::size_t>(T, 8);
    const auto batch = simulate_batch(iid_model, T_rate, n_paths, seed);
    std::vector<double> lnv(n_paths, 0.0);
    for (std::size_t j = 0; j < n_paths; ++j) {
        double acc = 0.0;
        for (double r : batch[j]) acc += r;
        lnv[j] = acc;
    }
    const UtilityFamily expf = UtilityFamily::exponential();
    double rhs = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double g = std::pow(10.0, -4.0 + 8.0 * i / 2000.0);
        const double rate = risk_sensitive_rate(expf, RiskAversion(g), lnv, T_rate);
        if (rate >= lambda_rate) rhs = g;
    }
    out.rhs = rhs;
    return out;
}

std::vector<KgPoint> kg_trajectory(const UtilityFamily& family, const std::vector<KgStage>& stages,
                                   const IndexOptions& opts) {
    if (stages.empty())
        throw std::invalid_argument("kg_trajectory: empty stage list");
    std::vector<KgPoint> out;
    out.reserve(stages.size());
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (i > 0 && stages[i].T <= stages[i - 1].T)
            throw std::invalid_argument("kg_trajectory: stages must have ascending T");
        const Ranking r = maximize_over_strategies(family, stages[i].candidates,
                                                   stages[i].benchmark_value, opts);
        KgPoint p;
        p.T = stages[i].T;
        p.best = r.best;
        p.alpha = r.ranking.front().second;
        out.push_back(p);
    }
    return out;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::divergent: return "divergent";
        case Regime::vanishing: return "vanishing";
        case Regime::finite_positive: return "finite_positive";
        case Regime::undetermined: return "undetermined";
    }
    return "unknown";
}

} // namespace uai
