#include "uai/utility.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace uai {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    double m = a > b ? a : b;
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be finite");
}

} // namespace

RiskAversion::RiskAversion(double gamma) : gamma_(gamma) {
    if (!(std::isfinite(gamma) && gamma > 0.0))
        throw std::invalid_argument("RiskAversion: gamma must be finite and > 0");
}

UtilityFamily::UtilityFamily(FamilyId id, double p0, double p1,
                             std::shared_ptr<const UtilityFamily> inner)
    : id_(id), p0_(p0), p1_(p1), inner_(std::move(inner)) {}

UtilityFamily UtilityFamily::exponential() {
    return UtilityFamily(FamilyId::exponential, 0, 0, nullptr);
}

UtilityFamily UtilityFamily::power_like(double alpha, double beta) {
    require_finite(alpha, "power_like alpha");
    require_finite(beta, "power_like beta");
    if (!(alpha > 0.0))
        throw std::invalid_argument("power_like: alpha must be > 0");
    if (!(beta >= 2.0))
        throw std::invalid_argument("power_like: beta must be >= 2");
    return UtilityFamily(FamilyId::power_like, alpha, beta, nullptr);
}

UtilityFamily UtilityFamily::modified_exponential() {
    return UtilityFamily(FamilyId::modified_exponential, 0, 0, nullptr);
}

UtilityFamily UtilityFamily::iterated_exponential() {
    return UtilityFamily(FamilyId::iterated_exponential, 0, 0, nullptr);
}

UtilityFamily UtilityFamily::linear() {
    return UtilityFamily(FamilyId::linear, 0, 0, nullptr);
}

UtilityFamily UtilityFamily::affine(double a, double b, UtilityFamily inner) {
    require_finite(a, "affine a");
    require_finite(b, "affine b");
    if (!(a > 0.0))
        throw std::invalid_argument("affine: scale a must be > 0");
    return UtilityFamily(FamilyId::affine_wrapped, a, b,
                         std::make_shared<const UtilityFamily>(std::move(inner)));
}

double UtilityFamily::alpha() const {
    if (id_ != FamilyId::power_like)
        throw std::logic_error("alpha() only defined for power_like");
    return p0_;
}

double UtilityFamily::beta() const {
    if (id_ != FamilyId::power_like)
        throw std::logic_error("beta() only defined for power_like");
    return p1_;
}

double UtilityFamily::affine_scale() const {
    if (id_ != FamilyId::affine_wrapped)
        throw std::logic_error("affine_scale() only defined for affine_wrapped");
    return p0_;
}

double UtilityFamily::affine_shift() const {
    if (id_ != FamilyId::affine_wrapped)
        throw std::logic_error("affine_shift() only defined for affine_wrapped");
    return p1_;
}

const UtilityFamily& UtilityFamily::inner() const {
    if (!inner_)
        throw std::logic_error("inner() only defined for affine_wrapped");
    return *inner_;
}

// power_like constants: right branch -c_pos (1+x)^{-alpha}, left branch
// -(1-x)^beta / (beta(beta-1)) + s x + k, chosen so value and the first two
// derivatives agree at 0 (U(0) = -c_pos, U'(0) = 1/(alpha+1), U''(0) = -1).
namespace {
struct PowerLikeConsts {
    double c_pos, s, k;
};
PowerLikeConsts pl_consts(double a, double b) {
    PowerLikeConsts c;
    c.c_pos = 1.0 / (a * (a + 1.0));
    c.s = (b - a - 2.0) / ((a + 1.0) * (b - 1.0));
    c.k = 1.0 / (b * (b - 1.0)) - c.c_pos;
    return c;
}
} // namespace

double UtilityFamily::eval(double x) const {
    switch (id_) {
        case FamilyId::exponential:
            return -std::exp(-x);
        case FamilyId::power_like: {
            const auto c = pl_consts(p0_, p1_);
            if (x >= 0.0) return -c.c_pos * std::pow(1.0 + x, -p0_);
            return -std::pow(1.0 - x, p1_) / (p1_ * (p1_ - 1.0)) + c.s * x + c.k;
        }
        case FamilyId::modified_exponential:
            return x >= 0.0 ? -std::exp(-x) : x - 1.0;
        case FamilyId::iterated_exponential:
            return -std::exp(std::exp(-x));
        case FamilyId::linear:
            return x;
        case FamilyId::affine_wrapped:
            return p0_ * inner_->eval(x) + p1_;
    }
    throw std::logic_error("eval: unknown family");
}

double UtilityFamily::deriv(double x) const {
    switch (id_) {
        case FamilyId::exponential:
            return std::exp(-x);
        case FamilyId::power_like: {
            const auto c = pl_consts(p0_, p1_);
            if (x >= 0.0) return std::pow(1.0 + x, -p0_ - 1.0) / (p0_ + 1.0);
            return std::pow(1.0 - x, p1_ - 1.0) / (p1_ - 1.0) + c.s;
        }
        case FamilyId::modified_exponential:
            return x >= 0.0 ? std::exp(-x) : 1.0;
        case FamilyId::iterated_exponential: {
            const double g = std::exp(-x);
            return g * std::exp(g);
        }
        case FamilyId::linear:
            return 1.0;
        case FamilyId::affine_wrapped:
            return p0_ * inner_->deriv(x);
    }
    throw std::logic_error("deriv: unknown family");
}

double UtilityFamily::second_deriv(double x) const {
    switch (id_) {
        case FamilyId::exponential:
            return -std::exp(-x);
        case FamilyId::power_like:
            if (x >= 0.0) return -std::pow(1.0 + x, -p0_ - 2.0);
            return -std::pow(1.0 - x, p1_ - 2.0);
        case FamilyId::modified_exponential:
            // C^1 family: at 0 we adopt the right-branch value -1.
            return x >= 0.0 ? -std::exp(-x) : 0.0;
        case FamilyId::iterated_exponential: {
            const double g = std::exp(-x);
            return -g * (1.0 + g) * std::exp(g);
        }
        case FamilyId::linear:
            return 0.0;
        case FamilyId::affine_wrapped:
            return p0_ * inner_->second_deriv(x);
    }
    throw std::logic_error("second_deriv: unknown family");
}

double UtilityFamily::sup() const {
    switch (id_) {
        case FamilyId::exponential:
        case FamilyId::power_like:
        case FamilyId::modified_exponential:
            return 0.0;
        case FamilyId::iterated_exponential:
            return -1.0;
        case FamilyId::linear:
            return kInf;
        case FamilyId::affine_wrapped:
            return p0_ * inner_->sup() + p1_;
    }
    throw std::logic_error("sup: unknown family");
}

bool UtilityFamily::bounded_above() const {
    if (id_ == FamilyId::linear) return false;
    if (id_ == FamilyId::affine_wrapped) return inner_->bounded_above();
    return true;
}

bool UtilityFamily::negative_valued() const {
    switch (id_) {
        case FamilyId::exponential:
        case FamilyId::power_like:
        case FamilyId::modified_exponential:
        case FamilyId::iterated_exponential:
            return true;
        case FamilyId::linear:
            return false;
        case FamilyId::affine_wrapped:
            return inner_->negative_valued() && inner_->bounded_above() &&
                   p0_ * inner_->sup() + p1_ <= 0.0;
    }
    return false;
}

double UtilityFamily::log_neg(double x) const {
    switch (id_) {
        case FamilyId::exponential:
            return -x;
        case FamilyId::power_like: {
            // left branch values stay modest; only the right tail, where
            // -U -> 0, benefits from the explicit log form.
            if (x >= 0.0) {
                const auto c = pl_consts(p0_, p1_);
                return std::log(c.c_pos) - p0_ * std::log1p(x);
            }
            return std::log(-eval(x));
        }
        case FamilyId::modified_exponential:
            return x >= 0.0 ? -x : std::log1p(-x);
        case FamilyId::iterated_exponential:
            return std::exp(-x);
        case FamilyId::linear:
            throw std::domain_error("log_neg: family is not negative-valued");
        case FamilyId::affine_wrapped: {
            if (!negative_valued())
                throw std::domain_error("log_neg: family is not negative-valued");
            const double la = std::log(p0_) + inner_->log_neg(x);
            if (p1_ == 0.0) return la;
            if (p1_ < 0.0) return logaddexp(la, std::log(-p1_));
            // b > 0 with a*sup+b <= 0: the subtracted term never dominates.
            return la + std::log1p(-p1_ * std::exp(-la));
        }
    }
    throw std::logic_error("log_neg: unknown family");
}

double UtilityFamily::invert_log_neg(double L) const {
    switch (id_) {
        case FamilyId::exponential:
            return -L;
        case FamilyId::power_like: {
            const auto c = pl_consts(p0_, p1_);
            const double L0 = std::log(c.c_pos);
            if (L <= L0) // right branch: L = ln c_pos - alpha ln(1+x)
                return std::expm1((L0 - L) / p0_);
            return invert(-std::exp(L));
        }
        case FamilyId::modified_exponential:
            return L <= 0.0 ? -L : -std::expm1(L);
        case FamilyId::iterated_exponential:
            if (!(L > 0.0))
                throw std::domain_error("invert_log_neg: value above supremum");
            return -std::log(L);
        case FamilyId::linear:
            throw std::domain_error("invert_log_neg: family is not negative-valued");
        case FamilyId::affine_wrapped: {
            if (!negative_valued())
                throw std::domain_error("invert_log_neg: family is not negative-valued");
            double lin;
            if (p1_ == 0.0) {
                lin = L - std::log(p0_);
            } else if (p1_ < 0.0) {
                // -U_in = (e^L - |b|)/a; requires e^L > |b|.
                const double t = -p1_ * std::exp(-L);
                if (!(t < 1.0))
                    throw std::domain_error("invert_log_neg: value above supremum");
                lin = L + std::log1p(-t) - std::log(p0_);
            } else {
                lin = logaddexp(L, std::log(p1_)) - std::log(p0_);
            }
            return inner_->invert_log_neg(lin);
        }
    }
    throw std::logic_error("invert_log_neg: unknown family");
}

double UtilityFamily::invert(double y) const {
    if (std::isnan(y)) throw std::domain_error("invert: y is NaN");
    switch (id_) {
        case FamilyId::exponential:
            if (!(y < 0.0)) throw std::domain_error("invert: y outside range of exponential utility");
            return -std::log(-y);
        case FamilyId::power_like: {
            if (!(y < 0.0)) throw std::domain_error("invert: y outside range of power_like utility");
            const auto c = pl_consts(p0_, p1_);
            if (y >= -c.c_pos)
                return std::pow(-y / c.c_pos, -1.0 / p0_) - 1.0;
            if (y == -kInf) throw std::domain_error("invert: y outside range of power_like utility");
            // left branch: bisect the strictly increasing eval on [lo, 0].
            double lo = -1.0;
            while (eval(lo) > y) {
                lo *= 2.0;
                if (lo < -1e300) throw std::domain_error("invert: bracket expansion failed");
            }
            double hi = 0.0;
            for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++i) {
                const double mid = 0.5 * (lo + hi);
                (eval(mid) < y ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        case FamilyId::modified_exponential:
            if (!(y < 0.0)) throw std::domain_error("invert: y outside range of modified_exponential utility");
            if (y >= -1.0) return -std::log(-y);
            return y + 1.0;
        case FamilyId::iterated_exponential: {
            if (!(y < -1.0)) throw std::domain_error("invert: y outside range of iterated_exponential utility");
            if (y == -kInf) throw std::domain_error("invert: y outside range of iterated_exponential utility");
            return -std::log(std::log(-y));
        }
        case FamilyId::linear:
            if (!std::isfinite(y)) throw std::domain_error("invert: y outside range of linear utility");
            return y;
        case FamilyId::affine_wrapped:
            return inner_->invert((y - p1_) / p0_);
    }
    throw std::logic_error("invert: unknown family");
}

double UtilityFamily::deriv_limit_neg_inf() const {
    switch (id_) {
        case FamilyId::exponential:
        case FamilyId::power_like:
        case FamilyId::iterated_exponential:
            return kInf;
        case FamilyId::modified_exponential:
        case FamilyId::linear:
            return 1.0;
        case FamilyId::affine_wrapped:
            return p0_ * inner_->deriv_limit_neg_inf();
    }
    throw std::logic_error("deriv_limit_neg_inf: unknown family");
}

std::string UtilityFamily::spec_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (id_) {
        case FamilyId::exponential: return "exp";
        case FamilyId::power_like:
            os << "powerlike:alpha=" << p0_ << ",beta=" << p1_;
            return os.str();
        case FamilyId::modified_exponential: return "modexp";
        case FamilyId::iterated_exponential: return "iterexp";
        case FamilyId::linear: return "linear";
        case FamilyId::affine_wrapped:
            os << "affine:a=" << p0_ << ",b=" << p1_ << ",inner=" << inner_->spec_string();
            return os.str();
    }
    throw std::logic_error("spec_string: unknown family");
}

double eval_u(const UtilityFamily& u, double x) { return u.eval(x); }

double eval_scaled(const UtilityFamily& u, RiskAversion gamma, double x) {
    return u.eval(gamma.value() * x);
}

double invert_u(const UtilityFamily& u, double y) { return u.invert(y); }

double arrow_pratt(const UtilityFamily& u, RiskAversion gamma, double x) {
    const double g = gamma.value();
    switch (u.id()) {
        case FamilyId::exponential:
            return g;
        case FamilyId::power_like: {
            const double v = g * x;
            const double a = u.alpha(), b = u.beta();
            if (v >= 0.0) return g * (a + 1.0) / (1.0 + v);
            const double s = (b - a - 2.0) / ((a + 1.0) * (b - 1.0));
            return g * std::pow(1.0 - v, b - 2.0) /
                   (std::pow(1.0 - v, b - 1.0) / (b - 1.0) + s);
        }
        case FamilyId::modified_exponential:
            return g * x >= 0.0 ? g : 0.0;
        case FamilyId::iterated_exponential:
            return g * (1.0 + std::exp(-g * x));
        case FamilyId::linear:
            return 0.0;
        case FamilyId::affine_wrapped:
            return arrow_pratt(u.inner(), gamma, x); // positive affine maps preserve it
    }
    throw std::logic_error("arrow_pratt: unknown family");
}

RegularityReport check_scale_aversion_regularity(const UtilityFamily& u,
                                                 const std::vector<double>& gamma_grid,
                                                 const std::vector<double>& x_grid,
                                                 double tol) {
    if (gamma_grid.empty() || x_grid.empty())
        throw std::invalid_argument("regularity check: grids must be non-empty");
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
        if (!(std::isfinite(gamma_grid[i]) && gamma_grid[i] > 0.0))
            throw std::invalid_argument("regularity check: gamma grid must be positive and finite");
        if (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1]))
            throw std::invalid_argument("regularity check: gamma grid must be strictly ascending");
    }
    for (double x : x_grid)
        if (!std::isfinite(x))
            throw std::invalid_argument("regularity check: x grid must be finite");
    if (!(tol >= 0.0))
        throw std::invalid_argument("regularity check: tol must be >= 0");

    RegularityReport rep;
    rep.gamma_grid = gamma_grid;
    rep.x_grid = x_grid;
    rep.tol = tol;
    rep.verdict = RegularityReport::Verdict::regular_on_grid;

    for (double x : x_grid) {
        double run_max = -kInf;
        std::size_t run_arg = 0;
        for (std::size_t j = 0; j < gamma_grid.size(); ++j) {
            const double a = arrow_pratt(u, RiskAversion(gamma_grid[j]), x);
            if (std::isnan(a))
                throw std::runtime_error("regularity check: sensitivity evaluated to NaN");
            if (run_max > a + tol) {
                rep.verdict = RegularityReport::Verdict::violated;
                RegularityWitness w;
                w.gamma_low = gamma_grid[run_arg];
                w.gamma_high = gamma_grid[j];
                w.x = x;
                w.a_low = run_max;
                w.a_high = a;
                rep.witness = w;
                return rep;
            }
            if (a > run_max) {
                run_max = a;
                run_arg = j;
            }
        }
    }
    return rep;
}

std::vector<double> default_gamma_grid() {
    std::vector<double> g(64);
    for (int i = 0; i < 64; ++i)
        g[i] = std::pow(10.0, -2.0 + 4.0 * i / 63.0);
    return g;
}

std::vector<double> default_x_grid() {
    std::vector<double> x(401);
    for (int i = 0; i <= 400; ++i)
        x[i] = -20.0 + 0.1 * i;
    return x;
}

double default_regularity_tol() { return 1e-9; }

double convex_conjugate(const UtilityFamily& u, double y) {
    if (!(std::isfinite(y) && y > 0.0))
        throw std::invalid_argument("convex_conjugate: y must be finite and > 0");
    if (u.id() == FamilyId::linear)
        return y == 1.0 ? 0.0 : kInf;
    const double slope_lim = u.deriv_limit_neg_inf();
    if (y > slope_lim) return kInf;

    // U' is non-increasing with limit 0 on the right for the bounded families;
    // bracket the slope y and bisect.
    double hi = 1.0;
    while (u.deriv(hi) >= y) {
        hi *= 2.0;
        if (hi > 1e12)
            throw std::runtime_error("convex_conjugate: failed to bracket slope from above");
    }
    double lo = -1.0;
    while (u.deriv(lo) <= y) {
        lo *= 2.0;
        if (lo < -1e7) // flat left tail with U' == y: the objective is constant there
            return u.eval(lo) - lo * y;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (u.deriv(mid) > y ? lo : hi) = mid;
    }
    const double xs = 0.5 * (lo + hi);
    return u.eval(xs) - xs * y;
}

namespace {

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_utility: bad numeric value for " + what + ": '" + s + "'");
    }
}

// Split "k1=v1,k2=v2,..." into pairs.
std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& body) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t start = 0;
    while (start <= body.size()) {
        std::size_t end = body.find(',', start);
        if (end == std::string::npos) end = body.size();
        const std::string item = body.substr(start, end - start);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("parse_utility: expected key=value, got '" + item + "'");
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        start = end + 1;
        if (end == body.size()) break;
    }
    return out;
}

} // namespace

UtilityFamily parse_utility(const std::string& spec) {
    const std::size_t colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (head == "exp") {
        if (!body.empty()) throw std::invalid_argument("parse_utility: 'exp' takes no parameters");
        return UtilityFamily::exponential();
    }
    if (head == "modexp") {
        if (!body.empty()) throw std::invalid_argument("parse_utility: 'modexp' takes no parameters");
        return UtilityFamily::modified_exponential();
    }
    if (head == "iterexp") {
        if (!body.empty()) throw std::invalid_argument("parse_utility: 'iterexp' takes no parameters");
        return UtilityFamily::iterated_exponential();
    }
    if (head == "linear") {
        if (!body.empty()) throw std::invalid_argument("parse_utility: 'linear' takes no parameters");
        return UtilityFamily::linear();
    }
    if (head == "powerlike") {
        std::optional<double> alpha, beta;
        for (const auto& [k, v] : parse_kv(body)) {
            if (k == "alpha") alpha = parse_number(v, "alpha");
            else if (k == "beta") beta = parse_number(v, "beta");
            else throw std::invalid_argument("parse_utility: unknown powerlike parameter '" + k + "'");
        }
        if (!alpha || !beta)
            throw std::invalid_argument("parse_utility: powerlike requires alpha and beta");
        return UtilityFamily::power_like(*alpha, *beta);
    }
    if (head == "affine") {
        std::optional<double> a, b;
        std::optional<std::string> inner;
        for (const auto& [k, v] : parse_kv(body)) {
            if (k == "a") a = parse_number(v, "a");
            else if (k == "b") b = parse_number(v, "b");
            else if (k == "inner") inner = v;
            else throw std::invalid_argument("parse_utility: unknown affine parameter '" + k + "'");
        }
        if (!a || !b || !inner)
            throw std::invalid_argument("parse_utility: affine requires a, b and inner");
        if (inner->find(':') != std::string::npos || *inner == "affine")
            throw std::invalid_argument("parse_utility: affine inner must be a parameterless family id");
        return UtilityFamily::affine(*a, *b, parse_utility(*inner));
    }
    throw std::invalid_argument("parse_utility: unknown family '" + head + "'");
}

} // namespace uai
