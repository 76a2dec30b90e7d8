#include "uai/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uai {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> outcomes,
                                             std::vector<double> probabilities) {
    if (outcomes.size() != probabilities.size())
        throw std::invalid_argument("EmpiricalDistribution: outcome/probability length mismatch");
    if (outcomes.empty())
        throw std::invalid_argument("EmpiricalDistribution: empty support");
    for (double x : outcomes)
        if (!std::isfinite(x))
            throw std::invalid_argument("EmpiricalDistribution: outcomes must be finite");
    // Neumaier-compensated total: a naive sum's own rounding grows with the
    // sample count and would trip the gate on large equal-weight samples.
    double total = 0.0, comp = 0.0;
    for (double p : probabilities) {
        if (!(std::isfinite(p) && p >= 0.0))
            throw std::invalid_argument("EmpiricalDistribution: probabilities must be finite and >= 0");
        const double t = total + p;
        if (std::fabs(total) >= std::fabs(p))
            comp += (total - t) + p;
        else
            comp += (p - t) + total;
        total = t;
    }
    total += comp;
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("EmpiricalDistribution: probabilities must sum to 1 (within 1e-12)");

    // Canonical form: sort pairs by (outcome, probability), then merge equal
    // outcomes.  Sorting by probability as tie-break makes the merged sums
    // independent of the input permutation, bit for bit.
    std::vector<std::size_t> idx(outcomes.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (outcomes[a] != outcomes[b]) return outcomes[a] < outcomes[b];
        return probabilities[a] < probabilities[b];
    });

    outcomes_.reserve(outcomes.size());
    probabilities_.reserve(outcomes.size());
    for (std::size_t k : idx) {
        if (!outcomes_.empty() && outcomes_.back() == outcomes[k]) {
            probabilities_.back() += probabilities[k];
        } else {
            outcomes_.push_back(outcomes[k]);
            probabilities_.push_back(probabilities[k]);
        }
    }
}

double EmpiricalDistribution::min_outcome() const {
    for (std::size_t i = 0; i < outcomes_.size(); ++i)
        if (probabilities_[i] > 0.0) return outcomes_[i];
    throw std::logic_error("EmpiricalDistribution: no outcome with positive probability");
}

double EmpiricalDistribution::max_outcome() const {
    for (std::size_t i = outcomes_.size(); i-- > 0;)
        if (probabilities_[i] > 0.0) return outcomes_[i];
    throw std::logic_error("EmpiricalDistribution: no outcome with positive probability");
}

EmpiricalDistribution EmpiricalDistribution::shifted(double c) const {
    if (!std::isfinite(c))
        throw std::invalid_argument("shifted: shift must be finite");
    std::vector<double> xs(outcomes_);
    for (double& x : xs) x += c;
    return EmpiricalDistribution(std::move(xs), probabilities_);
}

EmpiricalDistribution from_samples(const std::vector<double>& values) {
    if (values.empty())
        throw std::invalid_argument("from_samples: empty sample");
    const double w = 1.0 / static_cast<double>(values.size());
    return EmpiricalDistribution(values, std::vector<double>(values.size(), w));
}

EmpiricalDistribution scale(const EmpiricalDistribution& d, double lambda) {
    if (!(std::isfinite(lambda) && lambda > 0.0))
        throw std::invalid_argument("scale: lambda must be finite and > 0");
    std::vector<double> xs(d.outcomes());
    for (double& x : xs) x *= lambda;
    return EmpiricalDistribution(std::move(xs), d.probabilities());
}

Moments moments(const EmpiricalDistribution& d) {
    Moments m;
    const auto& xs = d.outcomes();
    const auto& ps = d.probabilities();
    double mean = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) mean += ps[i] * xs[i];
    double var = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dev = xs[i] - mean;
        var += ps[i] * dev * dev;
    }
    m.mean = mean;
    m.variance = var;
    m.min = d.min_outcome();
    return m;
}

namespace {

// E[(t - X)^+] for a sorted discrete law.
double lower_partial(const EmpiricalDistribution& d, double t) {
    const auto& xs = d.outcomes();
    const auto& ps = d.probabilities();
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size() && xs[i] < t; ++i)
        acc += ps[i] * (t - xs[i]);
    return acc;
}

} // namespace

bool ssd_dominates(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                   const std::vector<double>& grid) {
    if (grid.empty())
        throw std::invalid_argument("ssd_dominates: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            throw std::invalid_argument("ssd_dominates: grid must be finite");
        if (i > 0 && !(grid[i] >= grid[i - 1]))
            throw std::invalid_argument("ssd_dominates: grid must be sorted ascending");
    }
    const double lo = std::min(a.min_outcome(), b.min_outcome());
    const double hi = std::max(a.max_outcome(), b.max_outcome());
    if (grid.front() > lo || grid.back() < hi)
        throw std::invalid_argument("ssd_dominates: grid must cover both supports");

    for (double t : grid)
        if (lower_partial(a, t) > lower_partial(b, t) + 1e-12)
            return false;
    return true;
}

std::vector<double> benchmarked_growth(const ReturnSeries& series, double lambda_rate) {
    if (!std::isfinite(lambda_rate))
        throw std::invalid_argument("benchmarked_growth: lambda must be finite");
    if (series.values.empty())
        throw std::invalid_argument("benchmarked_growth: empty series");
    std::vector<double> out(series.values.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (!std::isfinite(series.values[i]))
            throw std::invalid_argument("benchmarked_growth: series values must be finite");
        acc += series.values[i] - lambda_rate;
        out[i] = acc;
    }
    return out;
}

} // namespace uai
