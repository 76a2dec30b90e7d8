#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace uai {

// Finite discrete law: sorted distinct outcomes with matching probabilities
// that sum to one.  Construction canonicalises its input (sorts, merges
// duplicate outcomes), so two inputs that are permutations of each other
// produce bitwise-identical objects.
class EmpiricalDistribution {
public:
    EmpiricalDistribution(std::vector<double> outcomes, std::vector<double> probabilities);

    const std::vector<double>& outcomes() const { return outcomes_; }
    const std::vector<double>& probabilities() const { return probabilities_; }
    std::size_t size() const { return outcomes_.size(); }

    // Essential bounds: extremes over outcomes carrying positive probability.
    double min_outcome() const;
    double max_outcome() const;

    EmpiricalDistribution shifted(double c) const;

private:
    std::vector<double> outcomes_;
    std::vector<double> probabilities_;
};

// Equal-weight law from raw draws (duplicates merge, weights accumulate).
EmpiricalDistribution from_samples(const std::vector<double>& values);

// Law of lambda * X; lambda must be positive and finite.
EmpiricalDistribution scale(const EmpiricalDistribution& d, double lambda);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    double min = 0.0;
};

Moments moments(const EmpiricalDistribution& d);

// Second-order stochastic dominance via integrated CDFs: true iff
// E[(t - A)^+] <= E[(t - B)^+] at every grid point.  The grid must be sorted
// and cover the supports of both laws.
bool ssd_dominates(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                   const std::vector<double>& grid);

// Ordered series of per-period returns (log returns throughout the engine).
struct ReturnSeries {
    std::vector<double> values;
    std::string step_label = "1";
    std::optional<std::string> origin;
};

// Benchmark-adjusted cumulative log growth: partial sums of (r_t - lambda).
std::vector<double> benchmarked_growth(const ReturnSeries& series, double lambda_rate);

} // namespace uai
