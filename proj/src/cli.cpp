#include "uai/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "uai/certainty.hpp"
#include "uai/csv.hpp"
#include "uai/index.hpp"
#include "uai/parallel.hpp"
#include "uai/paths.hpp"
#include "uai/perf.hpp"
#include "uai/sample.hpp"
#include "uai/utility.hpp"
#include "json_writer.hpp"

namespace uai::cli {
namespace {

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(what + ": cannot parse number '" + s + "'");
    }
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    if (s.empty()) return out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        std::string tok = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        out.push_back(parse_double(tok, what));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// Accepts "a:b:xk" (geometric: a, a*k, ... up to b) or a comma list of
// horizons.  Values must be positive and strictly increasing.
std::vector<std::size_t> parse_tgrid(const std::string& s) {
    std::vector<std::size_t> grid;
    auto push_checked = [&](double v) {
        if (!(v >= 1.0) || v != std::floor(v) || v > 16384.0)
            throw std::runtime_error("--tgrid: horizons must be integers in [1, 16384], got '" + s + "'");
        std::size_t t = static_cast<std::size_t>(v);
        if (!grid.empty() && t <= grid.back())
            throw std::runtime_error("--tgrid: horizons must be strictly increasing in '" + s + "'");
        grid.push_back(t);
    };
    std::size_t c1 = s.find(':');
    if (c1 != std::string::npos) {
        std::size_t c2 = s.find(':', c1 + 1);
        if (c2 == std::string::npos || s.size() <= c2 + 1 || (s[c2 + 1] != 'x' && s[c2 + 1] != 'X'))
            throw std::runtime_error("--tgrid: expected 'start:stop:xFACTOR' or a comma list, got '" + s + "'");
        double a = parse_double(s.substr(0, c1), "--tgrid start");
        double b = parse_double(s.substr(c1 + 1, c2 - c1 - 1), "--tgrid stop");
        double k = parse_double(s.substr(c2 + 2), "--tgrid factor");
        if (!(k > 1.0)) throw std::runtime_error("--tgrid: factor must exceed 1");
        if (!(b >= a)) throw std::runtime_error("--tgrid: stop must be >= start");
        for (double t = a; t <= b + 1e-9; t *= k) push_checked(std::round(t));
        return grid;
    }
    for (double v : parse_double_list(s, "--tgrid")) push_checked(v);
    if (grid.empty()) throw std::runtime_error("--tgrid: empty grid");
    return grid;
}

struct SolverFlags {
    double gamma_min = 1e-8;
    double gamma_cap = 1e8;
    double tol_rel = 1e-8;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--gamma-min", f.gamma_min, "Smallest scale probed by the index solver");
    cmd->add_option("--gamma-cap", f.gamma_cap, "Scale above which the index is reported infinite");
    cmd->add_option("--tol-rel", f.tol_rel, "Relative bracket width at which bisection stops");
}

void echo_solver_flags(JsonWriter& w, const SolverFlags& f) {
    w.key("gamma_min");
    w.value_number(f.gamma_min);
    w.key("gamma_cap");
    w.value_number(f.gamma_cap);
    w.key("tol_rel");
    w.value_number(f.tol_rel);
}

IndexOptions to_options(const SolverFlags& f) {
    IndexOptions o;
    o.gamma_min = f.gamma_min;
    o.gamma_cap = f.gamma_cap;
    o.tol_rel = f.tol_rel;
    return o;
}

// Families without a shipped regularity proof are certified on the default
// grids before the solver runs; a witness aborts the command.
std::string certify(const UtilityFamily& fam, IndexOptions& opts) {
    if (is_shipped_regular(fam)) return "shipped";
    RegularityReport rep = check_scale_aversion_regularity(
        fam, default_gamma_grid(), default_x_grid(), default_regularity_tol());
    if (rep.verdict != RegularityReport::Verdict::regular_on_grid) {
        const RegularityWitness& wit = *rep.witness;
        std::ostringstream msg;
        msg << "utility '" << fam.spec_string()
            << "' failed scale-aversion certification: A_gamma(x) decreases between gamma="
            << wit.gamma_low << " and gamma=" << wit.gamma_high << " at x=" << wit.x;
        throw std::runtime_error(msg.str());
    }
    opts.regularity_certified = true;
    return "grid";
}

void emit_index_core(JsonWriter& w, const IndexValue& v) {
    w.key("alpha");
    if (v.kind == IndexValue::Kind::zero)
        w.value_int(0);
    else
        w.value_number(v.value);
    w.key("diagnostic");
    w.value_string(diagnostic_name(v.diagnostic));
    w.key("bracket");
    w.begin_array();
    w.value_number(v.gamma_lo);
    w.value_number(v.gamma_hi);
    w.end_array();
    w.key("evals");
    w.value_int(v.evaluations);
    w.key("kind");
    w.value_string(kind_name(v.kind));
}

void emit_grid_axis(JsonWriter& w, const std::vector<double>& g) {
    w.begin_object();
    w.key("min");
    w.value_number(g.front());
    w.key("max");
    w.value_number(g.back());
    w.key("points");
    w.value_uint(g.size());
    w.end_object();
}

struct CandidateArg {
    std::string label;
    std::string path;
};

CandidateArg parse_candidate(const std::string& s) {
    std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= s.size())
        throw std::runtime_error("--candidate: expected LABEL=PATH, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

// ---- per-command flag bundles -------------------------------------------

struct CeArgs {
    std::string utility;
    double gamma = 1.0;
    std::string input;
    std::string gaussian;
};

struct IndexArgs {
    std::string utility = "exp";
    std::string input;
    double benchmark_rate = 0.0;
    SolverFlags solver;
};

struct PerfArgs {
    std::string utility = "exp";
    std::string input;
    double benchmark = 0.0;
    SolverFlags solver;
};

struct ModelArgs {
    std::string model;
    std::optional<double> mean, sigma, hurst, kappa, theta, x0, dt;
    std::optional<std::string> ar, ma;
};

struct SimulateArgs {
    ModelArgs model;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string out_path;
};

struct LongrunArgs {
    std::string utility = "exp";
    ModelArgs model;
    double lambda = 0.0;
    std::string tgrid = "32:2048:x2";
    std::size_t paths = 2000;
    std::uint64_t seed = 7;
    std::string method = "mc";
    SolverFlags solver;
};

struct RegularityArgs {
    std::string utility;
};

struct DualityArgs {
    double m = 0.08;
    double sigma = 0.2;
    double lambda = 0.02;
    std::size_t T = 512;
    std::size_t paths = 20000;
    std::uint64_t seed = 1;
};

struct MaximizeArgs {
    std::string utility = "exp";
    double benchmark = 0.0;
    std::vector<std::string> candidates;
    SolverFlags solver;
};

void add_model_flags(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--model", m.model,
                    "Model id (iid|arma|fgn|ou) with per-parameter flags, or a full "
                    "spec string like fgn:hurst=0.7,sigma=0.02,mean=0.001")
        ->required();
    cmd->add_option("--mean", m.mean, "Per-step mean (iid, arma, fgn)");
    cmd->add_option("--sigma", m.sigma, "Per-step / noise standard deviation");
    cmd->add_option("--hurst", m.hurst, "Hurst exponent in (0,1) (fgn)");
    cmd->add_option("--ar", m.ar, "AR coefficients, comma separated (arma)");
    cmd->add_option("--ma", m.ma, "MA coefficients, comma separated (arma)");
    cmd->add_option("--kappa", m.kappa, "Mean-reversion speed (ou)");
    cmd->add_option("--theta", m.theta, "Long-run level (ou)");
    cmd->add_option("--x0", m.x0, "Initial level (ou)");
    cmd->add_option("--dt", m.dt, "Time step (ou)");
}

PathModelSpec build_model(const ModelArgs& a) {
    bool any_param = a.mean || a.sigma || a.hurst || a.ar || a.ma || a.kappa || a.theta || a.x0 || a.dt;
    if (a.model.find(':') != std::string::npos) {
        if (any_param)
            throw std::runtime_error("--model spec string cannot be combined with per-parameter flags");
        return parse_model(a.model);
    }
    PathModelSpec spec;
    if (a.model == "iid") {
        IidGaussianSpec s;
        if (a.mean) s.mean = *a.mean;
        if (a.sigma) s.sigma = *a.sigma;
        spec = s;
    } else if (a.model == "fgn") {
        if (!a.hurst) throw std::runtime_error("--model fgn requires --hurst");
        FgnSpec s;
        s.hurst = *a.hurst;
        if (a.mean) s.mean = *a.mean;
        if (a.sigma) s.sigma = *a.sigma;
        spec = s;
    } else if (a.model == "arma") {
        ArmaSpec s;
        if (a.ar) s.ar = parse_double_list(*a.ar, "--ar");
        if (a.ma) s.ma = parse_double_list(*a.ma, "--ma");
        if (a.mean) s.mean = *a.mean;
        if (a.sigma) s.noise_sigma = *a.sigma;
        spec = s;
    } else if (a.model == "ou") {
        OuSpec s;
        s.sigma = 1.0;
        if (a.kappa) s.kappa = *a.kappa;
        if (a.theta) s.theta_level = *a.theta;
        if (a.sigma) s.sigma = *a.sigma;
        if (a.x0) s.x0 = *a.x0;
        if (a.dt) s.dt = *a.dt;
        spec = s;
    } else {
        throw std::runtime_error("unknown model id '" + a.model + "' (expected iid, arma, fgn, ou, or a spec string)");
    }
    validate(spec);
    return spec;
}

// ---- command handlers ----------------------------------------------------

void run_ce(const CeArgs& a, JsonWriter& w) {
    if (a.input.empty() == a.gaussian.empty())
        throw std::runtime_error("ce: exactly one of --input and --gaussian is required");
    UtilityFamily fam = parse_utility(a.utility);
    RiskAversion gamma(a.gamma);

    double mu = 0.0;
    bool mu_finite = true;
    std::optional<std::size_t> n;
    std::string source;
    if (!a.gaussian.empty()) {
        if (fam.id() != FamilyId::exponential)
            throw std::runtime_error("ce: --gaussian closed form is exponential-only; use --input for other families");
        std::vector<double> ms = parse_double_list(a.gaussian, "--gaussian");
        if (ms.size() != 2) throw std::runtime_error("--gaussian: expected 'mean,sigma'");
        mu = gaussian_entropic(gamma, ms[0], ms[1]);
        source = "gaussian";
    } else {
        ReturnSeries series = read_returns_csv(a.input);
        EmpiricalDistribution dist = from_samples(series.values);
        CEValue v = certainty_equivalent(fam, gamma, dist);
        mu_finite = v.finite_flag;
        mu = mu_finite ? v.value : std::numeric_limits<double>::infinity();
        n = dist.size();
        source = "input";
    }

    w.begin_object();
    w.key("mu");
    w.value_number(mu);
    w.key("gamma");
    w.value_number(a.gamma);
    w.key("utility");
    w.value_string(fam.spec_string());
    w.key("source");
    w.value_string(source);
    w.key("n");
    if (n)
        w.value_uint(*n);
    else
        w.value_null();
    w.key("command");
    w.value_string("ce");
    w.key("config");
    w.begin_object();
    w.key("utility");
    w.value_string(a.utility);
    w.key("gamma");
    w.value_number(a.gamma);
    w.key("input");
    if (a.input.empty())
        w.value_null();
    else
        w.value_string(a.input);
    w.key("gaussian");
    if (a.gaussian.empty())
        w.value_null();
    else
        w.value_string(a.gaussian);
    w.key("threads");
    w.value_uint(effective_threads());
    w.end_object();
    w.end_object();
}

void run_index(const IndexArgs& a, JsonWriter& w) {
    UtilityFamily fam = parse_utility(a.utility);
    IndexOptions opts = to_options(a.solver);
    std::string certification = certify(fam, opts);

    ReturnSeries series = read_returns_csv(a.input);
    std::vector<double> position = series.values;
    for (double& v : position) v -= a.benchmark_rate;
    EmpiricalDistribution dist = from_samples(position);
    Moments mom = moments(dist);
    IndexValue v = acceptability_index(fam, dist, opts);

    w.begin_object();
    emit_index_core(w, v);
    w.key("utility");
    w.value_string(fam.spec_string());
    w.key("benchmark_rate");
    w.value_number(a.benchmark_rate);
    w.key("n");
    w.value_uint(dist.size());
    w.key("mean");
    w.value_number(mom.mean);
    w.key("min");
    w.value_number(mom.min);
    w.key("certification");
    w.value_string(certification);
    w.key("command");
    w.value_string("index");
    w.key("config");
    w.begin_object();
    w.key("utility");
    w.value_string(a.utility);
    w.key("input");
    w.value_string(a.input);
    w.key("benchmark_rate");
    w.value_number(a.benchmark_rate);
    echo_solver_flags(w, a.solver);
    w.key("threads");
    w.value_uint(effective_threads());
    w.end_object();
    w.end_object();
}

void run_perf(const PerfArgs& a, JsonWriter& w) {
    UtilityFamily fam = parse_utility(a.utility);
    IndexOptions opts = to_options(a.solver);
    std::string certification = certify(fam, opts);

    ReturnSeries series = read_returns_csv(a.input);
    StrategyCandidate cand{"input", from_samples(series.values)};
    IndexValue v = finite_horizon_index(fam, cand, a.benchmark, opts);

    w.begin_object();
    emit_index_core(w, v);
    w.key("utility");
    w.value_string(fam.spec_string());
    w.key("benchmark");
    w.value_number(a.benchmark);
    w.key("n");
    w.value_uint(cand.terminal_log_growth.size());
    w.key("certification");
    w.value_string(certification);
    w.key("command");
    w.value_string("perf");
    w.key("config");
    w.begin_object();
    w.key("utility");
    w.value_string(a.utility);
    w.key("input");
    w.value_string(a.input);
    w.key("benchmark");
    w.value_number(a.benchmark);
    echo_solver_flags(w, a.solver);
    w.key("threads");
    w.value_uint(effective_threads());
    w.end_object();
    w.end_object();
}

void run_simulate(const SimulateArgs& a, JsonWriter& w) {
    if (a.n == 0) throw std::runtime_error("simulate: --n must be positive");
    PathModelSpec spec = build_model(a.model);
    ReturnSeries series = simulate(spec, a.n, a.seed);
    if (!a.out_path.empty()) write_returns_csv(a.out_path, series);

    EmpiricalDistribution law = from_samples(series.values);
    Moments mom = moments(law);
    double max_v = *std::max_element(series.values.begin(), series.values.end());

    w.begin_object();
    w.key("model");
    w.value_string(spec_string(spec));
    w.key("n");
    w.value_uint(a.n);
    w.key("seed");
    w.value_uint(a.seed);
    w.key("mean");
    w.value_number(mom.mean);
    w.key("variance");
    w.value_number(mom.variance);
    w.key("min");
    w.value_number(mom.min);
    w.key("max");
    w.value_number(max_v);
    w.key("out");
    if (a.out_path.empty())
        w.value_null();
    else
        w.value_string(a.out_path);
    w.key("command");
    w.value_string("simulate");
    w.key("config");
    w.begin_object();
    w.key("model");
    w.value_string(spec_string(spec));
    w.key("n");
    w.value_uint(a.n);
    w.key("seed");
    w.value_uint(a.seed);
    w.key("out");
    if (a.out_path.empty())
        w.value_null();
    else
        w.value_string(a.out_path);
    w.key("threads");
    w.value_uint(effective_threads());
    w.end_object();
    w.end_object();
}

void run_longrun(const LongrunArgs& a, JsonWriter& w) {
    UtilityFamily fam = parse_utility(a.utility);
    IndexOptions opts = to_options(a.solver);
    std::string certification = certify(fam, opts);
    PathModelSpec spec = build_model(a.model);
    std::vector<std::size_t> grid = parse_tgrid(a.tgrid);

    LongRunMethod method;
    if (a.method == "mc")
        method = LongRunMethod::monte_carlo;
    else if (a.method == "exact")
        method = LongRunMethod::exact_gaussian;
    else
        throw std::runtime_error("--method: expected 'mc' or 'exact', got '" + a.method + "'");

    LongRunReport rep = longrun_trajectory(fam, spec, a.lambda, grid, a.seed, a.paths, method, opts);

    w.begin_object();
    w.key("regime");
    w.value_string(regime_name(rep.regime));
    w.key("liminf");
    w.value_number(rep.liminf_estimate);
    w.key("tgrid");
    w.begin_array();
    for (std::size_t t : rep.T_grid) w.value_uint(t);
    w.end_array();
    w.key("alpha");
    w.begin_array();
    for (const IndexValue& v : rep.alpha_values) {
        if (v.kind == IndexValue::Kind::zero)
            w.value_int(0);
        else
            w.value_number(v.value);
    }
    w.end_array();
    w.key("slope");
    if (rep.fit.n_points >= 2)
        w.value_number(rep.fit.slope);
    else
        w.value_null();
    w.key("slope_se");
    if (rep.fit.n_points >= 2)
        w.value_number(rep.fit.se);
    else
        w.value_null();
    w.key("fit_points");
    w.value_int(rep.fit.n_points);
    w.key("method");
    w.value_string(a.method);
    w.key("utility");
    w.value_string(fam.spec_string());
    w.key("model");
    w.value_string(spec_string(spec));
    w.key("lambda");
    w.value_number(a.lambda);
    w.key("certification");
    w.value_string(certification);
    w.key("command");
    w.value_string("longrun");
    w.key("config");
    w.begin_object();
    w.key("utility");
    w.value_string(a.utility);
    w.key("model");
    w.value_string(spec_string(spec));
    w.key("lambda");
    w.value_number(a.lambda);
    w.key("tgrid");
    w.value_string(a.tgrid);
    w.key("paths");
    w.value_uint(a.paths);
    w.key("seed");
    w.value_uint(a.seed);
    w.key("method");
    w.value_string(a.method);
    echo_solver_flags(w, a.solver);
    w.key("threads");
    w.value_uint(effective_threads());
    w.end_object();
    w.end_object();
}

void run_regularity(const RegularityArgs& a, JsonWriter& w) {
    UtilityFamily fam = parse_utility(a.utility);
    RegularityReport rep = check_scale_aversion_regularity(
        fam, default_gamma_grid(), default_x_grid(), default_regularity_tol());

    w.begin_object();
    w.key("verdict");
    w.value_string(rep.verdict == RegularityReport::Verdict::regular_on_grid ? "regular_on_grid"
                                                                             : "violated");
    w.key("witness");
    if (rep.witness) {
        w.begin_object();
        w.key("gamma_low");
        w.value_number(rep.witness->gamma_low);
        w.key("gamma_high");
        w.value_number(rep.witness->gamma_high);
        w.key("x");
        w.value_number(rep.witness->x);
        w.key("a_low");
        w.value_number(rep.witness->a_low);
        w.key("a_high");
        w.value_number(rep.witness->a_high);
        w.end_object();
    } else {
        w.value_null();
    }
    w.key("utility");
    w.value_string(fam.spec_string());
    w.key("gamma_grid");
    emit_grid_axis(w, rep.gamma_grid);
    w.key("x_grid");
    emit_grid_axis(w, rep.x_grid);
    w.key("tol");
    w.value_number(rep.tol);
    w.key("command");
    w.value_string("regularity");
    w.key("config");
    w.begin_object();
    w.key("utility");
    w.value_string(a.utility);
    w.key("threads");
    w.value_uint(effective_threads());
    w.end_object();
    w.end_object();
}

void run_duality(const DualityArgs& a, JsonWriter& w) {
    PathModelSpec spec = IidGaussianSpec{a.m, a.sigma};
    validate(spec);
    DualityResult res = duality_check(spec, a.lambda, a.seed, a.paths, a.T);
    double closed_form = a.sigma > 0.0 && a.m > a.lambda
                             ? 2.0 * (a.m - a.lambda) / (a.sigma * a.sigma)
                             : 0.0;

    w.begin_object();
    w.key("lhs");
    w.value_number(res.lhs);
    w.key("rhs");
    w.value_number(res.rhs);
    w.key("abs_diff");
    w.value_number(std::fabs(res.lhs - res.rhs));
    w.key("closed_form");
    w.value_number(closed_form);
    w.key("command");
    w.value_string("duality");
    w.key("config");
    w.begin_object();
    w.key("m");
    w.value_number(a.m);
    w.key("sigma");
    w.value_number(a.sigma);
    w.key("lambda");
    w.value_number(a.lambda);
    w.key("T");
    w.value_uint(a.T);
    w.key("paths");
    w.value_uint(a.paths);
    w.key("seed");
    w.value_uint(a.seed);
    w.key("threads");
    w.value_uint(effective_threads());
    w.end_object();
    w.end_object();
}

void run_maximize(const MaximizeArgs& a, JsonWriter& w) {
    UtilityFamily fam = parse_utility(a.utility);
    IndexOptions opts = to_options(a.solver);
    std::string certification = certify(fam, opts);

    std::vector<CandidateArg> specs;
    for (const std::string& c : a.candidates) specs.push_back(parse_candidate(c));
    std::vector<StrategyCandidate> candidates;
    for (const CandidateArg& c : specs) {
        ReturnSeries series = read_returns_csv(c.path);
        candidates.push_back({c.label, from_samples(series.values)});
    }
    Ranking rank = maximize_over_strategies(fam, candidates, a.benchmark, opts);

    w.begin_object();
    w.key("best");
    w.value_string(rank.best);
    w.key("ranking");
    w.begin_array();
    for (const auto& [label, v] : rank.ranking) {
        w.begin_object();
        w.key("label");
        w.value_string(label);
        w.key("alpha");
        if (v.kind == IndexValue::Kind::zero)
            w.value_int(0);
        else
            w.value_number(v.value);
        w.key("diagnostic");
        w.value_string(diagnostic_name(v.diagnostic));
        w.end_object();
    }
    w.end_array();
    w.key("benchmark");
    w.value_number(a.benchmark);
    w.key("utility");
    w.value_string(fam.spec_string());
    w.key("certification");
    w.value_string(certification);
    w.key("command");
    w.value_string("maximize");
    w.key("config");
    w.begin_object();
    w.key("utility");
    w.value_string(a.utility);
    w.key("benchmark");
    w.value_number(a.benchmark);
    w.key("candidates");
    w.begin_array();
    for (const CandidateArg& c : specs) {
        w.begin_object();
        w.key("label");
        w.value_string(c.label);
        w.key("input");
        w.value_string(c.path);
        w.end_object();
    }
    w.end_array();
    echo_solver_flags(w, a.solver);
    w.key("threads");
    w.value_uint(effective_threads());
    w.end_object();
    w.end_object();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scaled-utility certainty equivalents, acceptability indices, and "
                 "benchmarked long-run performance",
                 "uai"};
    app.require_subcommand(1);

    CeArgs ce_args;
    CLI::App* ce = app.add_subcommand("ce", "Certainty equivalent mu_gamma of a sampled or Gaussian law");
    ce->add_option("--utility", ce_args.utility, "Utility family id")->required();
    ce->add_option("--gamma", ce_args.gamma, "Risk-aversion scale, > 0")->required();
    ce->add_option("--input", ce_args.input, "CSV of outcome samples");
    ce->add_option("--gaussian", ce_args.gaussian, "'mean,sigma' closed form (exponential only)");

    IndexArgs index_args;
    CLI::App* index_cmd = app.add_subcommand("index", "Acceptability index of a sampled position");
    index_cmd->add_option("--utility", index_args.utility, "Utility family id");
    index_cmd->add_option("--input", index_args.input, "CSV of outcome samples")->required();
    index_cmd->add_option("--benchmark-rate", index_args.benchmark_rate,
                          "Per-sample benchmark subtracted before indexing");
    add_solver_flags(index_cmd, index_args.solver);

    PerfArgs perf_args;
    CLI::App* perf_cmd = app.add_subcommand("perf", "Benchmarked finite-horizon index of terminal log growth");
    perf_cmd->add_option("--utility", perf_args.utility, "Utility family id");
    perf_cmd->add_option("--input", perf_args.input, "CSV of terminal log-growth samples")->required();
    perf_cmd->add_option("--benchmark", perf_args.benchmark, "Benchmark log growth (lambda * T)");
    add_solver_flags(perf_cmd, perf_args.solver);

    SimulateArgs sim_args;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Simulate one return path and write it as CSV");
    add_model_flags(sim_cmd, sim_args.model);
    sim_cmd->add_option("--n", sim_args.n, "Number of steps")->required();
    sim_cmd->add_option("--seed", sim_args.seed, "RNG seed");
    sim_cmd->add_option("--out", sim_args.out_path, "Output CSV path");

    LongrunArgs long_args;
    CLI::App* long_cmd = app.add_subcommand("longrun", "Index trajectory of benchmarked growth over a horizon grid");
    long_cmd->add_option("--utility", long_args.utility, "Utility family id");
    add_model_flags(long_cmd, long_args.model);
    long_cmd->add_option("--lambda", long_args.lambda, "Benchmark growth rate");
    long_cmd->add_option("--tgrid", long_args.tgrid, "Horizon grid 'start:stop:xFACTOR' or comma list");
    long_cmd->add_option("--paths", long_args.paths, "Monte Carlo paths");
    long_cmd->add_option("--seed", long_args.seed, "RNG seed");
    long_cmd->add_option("--method", long_args.method, "'mc' or 'exact' (Gaussian closed form)");
    add_solver_flags(long_cmd, long_args.solver);

    RegularityArgs reg_args;
    CLI::App* reg_cmd = app.add_subcommand("regularity", "Grid certificate of scale-aversion regularity");
    reg_cmd->add_option("--utility", reg_args.utility, "Utility family id")->required();

    DualityArgs dual_args;
    CLI::App* dual_cmd = app.add_subcommand("duality", "Long-run index vs risk-sensitive-rate inversion");
    dual_cmd->add_option("--m", dual_args.m, "Per-step mean log return");
    dual_cmd->add_option("--sigma", dual_args.sigma, "Per-step volatility");
    dual_cmd->add_option("--lambda", dual_args.lambda, "Benchmark growth rate");
    dual_cmd->add_option("--T", dual_args.T, "Horizon for the long-run side");
    dual_cmd->add_option("--paths", dual_args.paths, "Monte Carlo paths");
    dual_cmd->add_option("--seed", dual_args.seed, "RNG seed");

    MaximizeArgs max_args;
    CLI::App* max_cmd = app.add_subcommand("maximize", "Rank candidate strategies by benchmarked index");
    max_cmd->add_option("--utility", max_args.utility, "Utility family id");
    max_cmd->add_option("--benchmark", max_args.benchmark, "Benchmark log growth (lambda * T)");
    max_cmd->add_option("--candidate", max_args.candidates, "LABEL=PATH, repeatable")
        ->required()
        ->take_all();
    add_solver_flags(max_cmd, max_args.solver);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    std::string command;
    std::ostringstream doc;
    JsonWriter w(doc);
    try {
        if (app.got_subcommand(ce)) {
            command = "ce";
            run_ce(ce_args, w);
        } else if (app.got_subcommand(index_cmd)) {
            command = "index";
            run_index(index_args, w);
        } else if (app.got_subcommand(perf_cmd)) {
            command = "perf";
            run_perf(perf_args, w);
        } else if (app.got_subcommand(sim_cmd)) {
            command = "simulate";
            run_simulate(sim_args, w);
        } else if (app.got_subcommand(long_cmd)) {
            command = "longrun";
            run_longrun(long_args, w);
        } else if (app.got_subcommand(reg_cmd)) {
            command = "regularity";
            run_regularity(reg_args, w);
        } else if (app.got_subcommand(dual_cmd)) {
            command = "duality";
            run_duality(dual_args, w);
        } else if (app.got_subcommand(max_cmd)) {
            command = "maximize";
            run_maximize(max_args, w);
        } else {
            err << "usage error: no command given\n";
            return 2;
        }
    } catch (const std::exception& e) {
        std::ostringstream edoc;
        JsonWriter ew(edoc);
        ew.begin_object();
        ew.key("error");
        ew.begin_object();
        ew.key("command");
        ew.value_string(command);
        ew.key("message");
        ew.value_string(e.what());
        ew.end_object();
        ew.end_object();
        out << edoc.str() << "\n";
        return 1;
    }
    out << doc.str() << "\n";
    return 0;
}

} // namespace uai::cli
