#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "mgrsc/pce.hpp"

namespace mgrsc {

// Variance decomposition of a fitted surrogate: every retained nonconstant
// term contributes its squared coefficient to the subset of variables its
// exponents touch.
struct SobolReport {
    std::vector<std::string> variables;
    Eigen::VectorXd first_order;  // S_i: exact support {i}
    Eigen::VectorXd total_order;  // S_i^T: all terms with alpha_i != 0
    double model_variance = 0.0;  // sum of squared nonconstant coefficients
};

// Share of model variance carried by terms whose support is exactly the
// subset `u` (0-based variable indices). Throws
// SolverError("ZERO_VARIANCE") when the model has no nonconstant terms.
double sobol_index(const PceModel& model, const std::vector<int>& u);

SobolReport sobol_report(const PceModel& model);

struct DominanceResult {
    std::vector<int> variables;  // 0-based, descending index value order
    double covered = 0.0;        // sum of their indices
    bool shortfall = false;      // requested threshold not reachable
};

// Shortest prefix of the descending ranking whose sum reaches `threshold`
// (ties broken by ascending variable index). When even the full ranking
// falls short (interaction mass), every variable is returned with the
// shortfall flag set.
DominanceResult rank_dominant(const SobolReport& report, double threshold,
                              bool use_total_order = false);

}  // namespace mgrsc
