#pragma once

#include <vector>

#include "uai/certainty.hpp"
#include "uai/sample.hpp"
#include "uai/utility.hpp"

namespace uai {

struct IndexOptions {
    double gamma_min = 1e-8;
    double gamma_cap = 1e8;
    double tol_rel = 1e-8;
    // The index is only meaningful for scale-aversion regular families.
    // exponential, power_like, modified_exponential (and affine wrappers over
    // them) ship as regular; any other bounded family must be certified on a
    // grid first, which the caller asserts with this flag.
    bool regularity_certified = false;
};

// Acceptability index alpha(X) = sup{gamma > 0 : mu_gamma(X) <= 0}.
struct IndexValue {
    enum class Kind { zero, finite, infinite };
    enum class Diagnostic { expectation_negative, nonneg_position, root_found, cap_exceeded };

    Kind kind = Kind::zero;
    // 0 for kind zero, +inf for kind infinite, the root for kind finite.
    double value = 0.0;
    double gamma_lo = 0.0;
    double gamma_hi = 0.0;
    int evaluations = 0;
    Diagnostic diagnostic = Diagnostic::expectation_negative;
};

// Solver: exact classification first (nonnegative position -> infinite;
// nonpositive mean -> zero), then geometric bracket expansion from gamma_min
// and monotone bisection on the predicate mu_gamma <= 0, resolving ties
// upward because the index is a supremum.
IndexValue acceptability_index(const UtilityFamily& family, const EmpiricalDistribution& dist,
                               const IndexOptions& opts = {});

// Independent grid-scan reference: largest grid gamma that is acceptable.
// Test plumbing, not a production path.
IndexValue index_grid_oracle(const UtilityFamily& family, const EmpiricalDistribution& dist,
                             const std::vector<double>& gamma_grid);

// Strict order under the classification zero < finite(value) < infinite.
bool index_less(const IndexValue& a, const IndexValue& b);

// True for the families that ship with a regularity proof (exponential,
// power_like, modified_exponential, affine wrappers over those).
bool is_shipped_regular(const UtilityFamily& family);

const char* diagnostic_name(IndexValue::Diagnostic d);
const char* kind_name(IndexValue::Kind k);

} // namespace uai
