#include "uai/paths.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "uai/rng.hpp"

namespace uai {

namespace {

void check_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string("paths: ") + what + " must be finite");
}

// Roots of c[0] + c[1] z + ... + c[n] z^n by the Durand-Kerner iteration.
std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
    const std::size_t n = c.size() - 1;
    std::vector<std::complex<double>> monic(n);
    for (std::size_t i = 0; i < n; ++i) monic[i] = c[i] / c[n];

    const auto eval = [&](std::complex<double> z) {
        std::complex<double> p = 1.0;
        for (std::size_t i = n; i-- > 0;) p = p * z + monic[i];
        return p;
    };

    std::vector<std::complex<double>> r(n);
    const std::complex<double> g(0.4, 0.9);
    r[0] = g;
    for (std::size_t k = 1; k < n; ++k) r[k] = r[k - 1] * g;

    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            std::complex<double> denom = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) denom *= r[k] - r[j];
            const std::complex<double> delta = eval(r[k]) / denom;
            r[k] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-13) break;
    }
    return r;
}

void validate_arma(const ArmaSpec& s) {
    check_finite(s.mean, "arma mean");
    if (!(std::isfinite(s.noise_sigma) && s.noise_sigma >= 0.0))
        throw std::invalid_argument("paths: arma noise_sigma must be >= 0");
    for (double v : s.ar) check_finite(v, "arma AR coefficient");
    for (double v : s.ma) check_finite(v, "arma MA coefficient");

    // Stationarity: roots of 1 - phi_1 z - ... - phi_p z^p outside the unit circle.
    std::vector<double> ar = s.ar;
    while (!ar.empty() && ar.back() == 0.0) ar.pop_back();
    if (ar.empty()) return;
    std::vector<double> c(ar.size() + 1);
    c[0] = 1.0;
    for (std::size_t i = 0; i < ar.size(); ++i) c[i + 1] = -ar[i];
    for (const auto& z : poly_roots(c))
        if (std::abs(z) <= 1.0 + 1e-8)
            throw std::invalid_argument(
                "paths: arma AR polynomial has a root inside or on the unit circle (non-stationary)");
}

// psi-weights of the MA(infinity) representation, extended until the tail is
// negligible past `min_len` terms.
std::vector<double> arma_psi(const ArmaSpec& s, std::size_t min_len) {
    const std::size_t p = s.ar.size(), q = s.ma.size();
    std::vector<double> psi;
    psi.reserve(min_len + 64);
    psi.push_back(1.0);
    double peak = 1.0;
    for (std::size_t j = 1;; ++j) {
        double v = j <= q ? s.ma[j - 1] : 0.0;
        for (std::size_t i = 1; i <= std::min(j, p); ++i)
            v += s.ar[i - 1] * psi[j - i];
        psi.push_back(v);
        peak = std::max(peak, std::fabs(v));
        if (j >= min_len && j > p + q && std::fabs(v) < 1e-16 * peak) break;
        if (j > 2000000)
            throw std::runtime_error("paths: arma psi-weight expansion failed to decay");
    }
    return psi;
}

} // namespace

void validate(const PathModelSpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, IidGaussianSpec>) {
                check_finite(s.mean, "iid mean");
                if (!(std::isfinite(s.sigma) && s.sigma >= 0.0))
                    throw std::invalid_argument("paths: iid sigma must be >= 0");
            } else if constexpr (std::is_same_v<T, ArmaSpec>) {
                validate_arma(s);
            } else if constexpr (std::is_same_v<T, FgnSpec>) {
                if (!(std::isfinite(s.hurst) && s.hurst > 0.0 && s.hurst < 1.0))
                    throw std::invalid_argument("paths: fgn hurst must lie in (0,1)");
                if (!(std::isfinite(s.sigma) && s.sigma >= 0.0))
                    throw std::invalid_argument("paths: fgn sigma must be >= 0");
                check_finite(s.mean, "fgn mean");
            } else {
                if (!(std::isfinite(s.kappa) && s.kappa > 0.0))
                    throw std::invalid_argument("paths: ou kappa must be > 0");
                check_finite(s.theta_level, "ou theta");
                if (!(std::isfinite(s.sigma) && s.sigma >= 0.0))
                    throw std::invalid_argument("paths: ou sigma must be >= 0");
                check_finite(s.x0, "ou x0");
                if (!(std::isfinite(s.dt) && s.dt > 0.0))
                    throw std::invalid_argument("paths: ou dt must be > 0");
            }
        },
        spec);
}

namespace {

void simulate_iid(const IidGaussianSpec& s, std::size_t n, std::uint64_t seed,
                  std::size_t n_paths, std::vector<std::vector<double>>& out) {
    for (std::size_t j = 0; j < n_paths; ++j) {
        Rng rng(seed, j);
        auto& path = out[j];
        path.resize(n);
        for (std::size_t t = 0; t < n; ++t)
            path[t] = s.mean + s.sigma * rng.next_gaussian();
    }
}

void simulate_arma(const ArmaSpec& s, std::size_t n, std::uint64_t seed,
                   std::size_t n_paths, std::vector<std::vector<double>>& out) {
    const std::size_t p = s.ar.size(), q = s.ma.size();
    const std::size_t burn = 10 * (p + q) + 100;
    for (std::size_t j = 0; j < n_paths; ++j) {
        Rng rng(seed, j);
        auto& path = out[j];
        path.resize(n);
        std::vector<double> d(p, 0.0);   // recent deviations, d[0] most recent
        std::vector<double> e(q, 0.0);   // recent noises
        for (std::size_t t = 0; t < burn + n; ++t) {
            const double eps = s.noise_sigma * rng.next_gaussian();
            double v = eps;
            for (std::size_t i = 0; i < p; ++i) v += s.ar[i] * d[i];
            for (std::size_t i = 0; i < q; ++i) v += s.ma[i] * e[i];
            if (p > 0) {
                for (std::size_t i = p - 1; i > 0; --i) d[i] = d[i - 1];
                d[0] = v;
            }
            if (q > 0) {
                for (std::size_t i = q - 1; i > 0; --i) e[i] = e[i - 1];
                e[0] = eps;
            }
            if (t >= burn) path[t - burn] = s.mean + v;
        }
    }
}

// Hosking's sequential sampler for fractional Gaussian noise, batched over
// paths.  The Durbin-Levinson prediction coefficients are shared by every
// path; both the natural array phi (phi[k] multiplies X_{t-k}) and its
// reversal psi (psi[i] multiplies X_i) are carried so all inner loops run
// with unit stride.
void simulate_fgn(const FgnSpec& s, std::size_t n, std::uint64_t seed,
                  std::size_t n_paths, std::vector<std::vector<double>>& out) {
    const std::size_t P = n_paths;
    std::vector<double> rho(n);
    for (std::size_t k = 0; k < n; ++k) rho[k] = fgn_autocovariance(s.hurst, s.sigma, k);

    if (s.sigma == 0.0) {
        for (std::size_t j = 0; j < P; ++j) out[j].assign(n, s.mean);
        return;
    }

    // Step-major noise and state: index [t*P + j].
    std::vector<double> z(n * P), X(n * P);
    for (std::size_t j = 0; j < P; ++j) {
        Rng rng(seed, j);
        for (std::size_t t = 0; t < n; ++t) z[t * P + j] = rng.next_gaussian();
    }

    std::vector<double> phi_prev(n, 0.0), phi_cur(n, 0.0);
    std::vector<double> psi_prev(n, 0.0), psi_cur(n, 0.0);
    std::vector<double> mu(P);

    double v = rho[0];
    {
        const double sd = std::sqrt(v);
        for (std::size_t j = 0; j < P; ++j) X[j] = sd * z[j];
    }
    for (std::size_t t = 1; t < n; ++t) {
        double num = rho[t];
        for (std::size_t i = 1; i < t; ++i) num -= psi_prev[i - 1] * rho[i];
        const double kappa = num / v;

        phi_cur[t] = kappa;
        for (std::size_t k = 1; k < t; ++k)
            phi_cur[k] = phi_prev[k] - kappa * psi_prev[k - 1];
        psi_cur[0] = kappa;
        for (std::size_t i = 1; i < t; ++i)
            psi_cur[i] = psi_prev[i - 1] - kappa * phi_prev[i];

        v *= (1.0 - kappa * kappa);
        if (!(v > 0.0))
            throw std::runtime_error("paths: fgn innovation variance collapsed");

        if (P == 1) {
            double acc = 0.0;
            for (std::size_t i = 0; i < t; ++i) acc += psi_cur[i] * X[i];
            mu[0] = acc;
        } else {
            std::fill(mu.begin(), mu.end(), 0.0);
            for (std::size_t i = 0; i < t; ++i) {
                const double c = psi_cur[i];
                const double* row = &X[i * P];
                for (std::size_t j = 0; j < P; ++j) mu[j] += c * row[j];
            }
        }
        const double sd = std::sqrt(v);
        double* cur = &X[t * P];
        const double* zt = &z[t * P];
        for (std::size_t j = 0; j < P; ++j) cur[j] = mu[j] + sd * zt[j];

        std::swap(phi_prev, phi_cur);
        std::swap(psi_prev, psi_cur);
    }

    for (std::size_t j = 0; j < P; ++j) {
        auto& path = out[j];
        path.resize(n);
        for (std::size_t t = 0; t < n; ++t) path[t] = s.mean + X[t * P + j];
    }
}

void simulate_ou(const OuSpec& s, std::size_t n, std::uint64_t seed,
                 std::size_t n_paths, std::vector<std::vector<double>>& out) {
    const double decay = std::exp(-s.kappa * s.dt);
    const double sd = s.sigma * std::sqrt((1.0 - decay * decay) / (2.0 * s.kappa));
    for (std::size_t j = 0; j < n_paths; ++j) {
        Rng rng(seed, j);
        auto& path = out[j];
        path.resize(n);
        double x = s.x0;
        for (std::size_t t = 0; t < n; ++t) {
            x = s.theta_level + (x - s.theta_level) * decay + sd * rng.next_gaussian();
            path[t] = x;
        }
    }
}

} // namespace

std::vector<std::vector<double>> simulate_batch(const PathModelSpec& spec, std::size_t n_steps,
                                                std::size_t n_paths, std::uint64_t seed) {
    validate(spec);
    if (n_steps == 0) throw std::invalid_argument("paths: n_steps must be positive");
    if (n_paths == 0) throw std::invalid_argument("paths: n_paths must be positive");
    std::vector<std::vector<double>> out(n_paths);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, IidGaussianSpec>)
                simulate_iid(s, n_steps, seed, n_paths, out);
            else if constexpr (std::is_same_v<T, ArmaSpec>)
                simulate_arma(s, n_steps, seed, n_paths, out);
            else if constexpr (std::is_same_v<T, FgnSpec>)
                simulate_fgn(s, n_steps, seed, n_paths, out);
            else
                simulate_ou(s, n_steps, seed, n_paths, out);
        },
        spec);
    return out;
}

ReturnSeries simulate(const PathModelSpec& spec, std::size_t n_steps, std::uint64_t seed) {
    auto batch = simulate_batch(spec, n_steps, 1, seed);
    ReturnSeries series;
    series.values = std::move(batch[0]);
    series.origin = spec_string(spec) + ",n=" + std::to_string(n_steps) +
                    ",seed=" + std::to_string(seed);
    return series;
}

double fgn_autocovariance(double hurst, double sigma, std::size_t lag) {
    if (!(std::isfinite(hurst) && hurst > 0.0 && hurst < 1.0))
        throw std::invalid_argument("fgn_autocovariance: hurst must lie in (0,1)");
    if (!(std::isfinite(sigma) && sigma >= 0.0))
        throw std::invalid_argument("fgn_autocovariance: sigma must be >= 0");
    const double k = static_cast<double>(lag);
    const double h2 = 2.0 * hurst;
    if (lag == 0) return sigma * sigma;
    return 0.5 * sigma * sigma *
           (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(k - 1.0, h2));
}

std::vector<double> model_autocovariances(const PathModelSpec& spec, std::size_t max_lag) {
    validate(spec);
    std::vector<double> rho(max_lag + 1, 0.0);
    if (const auto* iid = std::get_if<IidGaussianSpec>(&spec)) {
        rho[0] = iid->sigma * iid->sigma;
        return rho;
    }
    if (const auto* f = std::get_if<FgnSpec>(&spec)) {
        for (std::size_t k = 0; k <= max_lag; ++k)
            rho[k] = fgn_autocovariance(f->hurst, f->sigma, k);
        return rho;
    }
    if (const auto* a = std::get_if<ArmaSpec>(&spec)) {
        const auto psi = arma_psi(*a, max_lag + 1000);
        const double s2 = a->noise_sigma * a->noise_sigma;
        for (std::size_t k = 0; k <= max_lag; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j + k < psi.size(); ++j)
                acc += psi[j] * psi[j + k];
            rho[k] = s2 * acc;
        }
        return rho;
    }
    throw std::invalid_argument("model_autocovariances: ou is a level process, not a stationary return model");
}

double model_mean(const PathModelSpec& spec) {
    validate(spec);
    if (const auto* iid = std::get_if<IidGaussianSpec>(&spec)) return iid->mean;
    if (const auto* f = std::get_if<FgnSpec>(&spec)) return f->mean;
    if (const auto* a = std::get_if<ArmaSpec>(&spec)) return a->mean;
    throw std::invalid_argument("model_mean: ou is a level process, not a stationary return model");
}

double cumulative_variance(const PathModelSpec& spec, std::size_t T) {
    if (T == 0) throw std::invalid_argument("cumulative_variance: T must be positive");
    const auto rho = model_autocovariances(spec, T - 1);
    double acc = static_cast<double>(T) * rho[0];
    for (std::size_t k = 1; k < T; ++k)
        acc += 2.0 * static_cast<double>(T - k) * rho[k];
    return acc;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string join_coeffs(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += fmt(v[i]);
    }
    return out;
}

double to_number(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_model: bad numeric value for " + what + ": '" + s + "'");
    }
}

std::vector<double> to_coeffs(const std::string& s, const std::string& what) {
    std::vector<double> out;
    if (s.empty()) return out;
    std::size_t start = 0;
    while (true) {
        std::size_t end = s.find(';', start);
        if (end == std::string::npos) end = s.size();
        out.push_back(to_number(s.substr(start, end - start), what));
        if (end == s.size()) break;
        start = end + 1;
    }
    return out;
}

} // namespace

std::string spec_string(const PathModelSpec& spec) {
    std::ostringstream os;
    if (const auto* s = std::get_if<IidGaussianSpec>(&spec)) {
        os << "iid:mean=" << fmt(s->mean) << ",sigma=" << fmt(s->sigma);
    } else if (const auto* a = std::get_if<ArmaSpec>(&spec)) {
        os << "arma:ar=" << join_coeffs(a->ar) << ",ma=" << join_coeffs(a->ma)
           << ",mean=" << fmt(a->mean) << ",noise_sigma=" << fmt(a->noise_sigma);
    } else if (const auto* f = std::get_if<FgnSpec>(&spec)) {
        os << "fgn:hurst=" << fmt(f->hurst) << ",sigma=" << fmt(f->sigma)
           << ",mean=" << fmt(f->mean);
    } else if (const auto* o = std::get_if<OuSpec>(&spec)) {
        os << "ou:kappa=" << fmt(o->kappa) << ",theta=" << fmt(o->theta_level)
           << ",sigma=" << fmt(o->sigma) << ",x0=" << fmt(o->x0) << ",dt=" << fmt(o->dt);
    }
    return os.str();
}

PathModelSpec parse_model(const std::string& text) {
    const std::size_t colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);

    std::vector<std::pair<std::string, std::string>> kv;
    if (!body.empty()) {
        std::size_t start = 0;
        while (true) {
            std::size_t end = body.find(',', start);
            if (end == std::string::npos) end = body.size();
            const std::string item = body.substr(start, end - start);
            const std::size_t eq = item.find('=');
            if (eq == std::string::npos || eq == 0)
                throw std::invalid_argument("parse_model: expected key=value, got '" + item + "'");
            kv.emplace_back(item.substr(0, eq), item.substr(eq + 1));
            if (end == body.size()) break;
            start = end + 1;
        }
    }

    PathModelSpec spec;
    if (head == "iid") {
        IidGaussianSpec s;
        for (const auto& [k, v] : kv) {
            if (k == "mean") s.mean = to_number(v, "mean");
            else if (k == "sigma") s.sigma = to_number(v, "sigma");
            else throw std::invalid_argument("parse_model: unknown iid parameter '" + k + "'");
        }
        spec = s;
    } else if (head == "arma") {
        ArmaSpec s;
        for (const auto& [k, v] : kv) {
            if (k == "ar") s.ar = to_coeffs(v, "ar");
            else if (k == "ma") s.ma = to_coeffs(v, "ma");
            else if (k == "mean") s.mean = to_number(v, "mean");
            else if (k == "noise_sigma") s.noise_sigma = to_number(v, "noise_sigma");
            else throw std::invalid_argument("parse_model: unknown arma parameter '" + k + "'");
        }
        spec = s;
    } else if (head == "fgn") {
        FgnSpec s;
        for (const auto& [k, v] : kv) {
            if (k == "hurst") s.hurst = to_number(v, "hurst");
            else if (k == "sigma") s.sigma = to_number(v, "sigma");
            else if (k == "mean") s.mean = to_number(v, "mean");
            else throw std::invalid_argument("parse_model: unknown fgn parameter '" + k + "'");
        }
        spec = s;
    } else if (head == "ou") {
        OuSpec s;
        for (const auto& [k, v] : kv) {
            if (k == "kappa") s.kappa = to_number(v, "kappa");
            else if (k == "theta") s.theta_level = to_number(v, "theta");
            else if (k == "sigma") s.sigma = to_number(v, "sigma");
            else if (k == "x0") s.x0 = to_number(v, "x0");
            else if (k == "dt") s.dt = to_number(v, "dt");
            else throw std::invalid_argument("parse_model: unknown ou parameter '" + k + "'");
        }
        spec = s;
    } else {
        throw std::invalid_argument("parse_model: unknown model '" + head + "'");
    }
    validate(spec);
    return spec;
}

} // namespace uai
