#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include "mgrsc/network.hpp"
#include "mgrsc/powerflow.hpp"
#include "mgrsc/rsc_cpf.hpp"

// Independent reference implementations the unit and acceptance tests check
// the library against. Everything here favours obviousness over speed.
namespace oracle {

// Backward/forward sweep power flow for radial networks, rooted at the slack
// bus (fixed at 1 per-unit, zero angle). A completely different algorithm
// from the library's Newton iteration.
struct SweepResult {
    Eigen::VectorXcd v;  // complex bus voltage, network bus order
    bool converged = false;
    int iterations = 0;
};
SweepResult radial_sweep(const mgrsc::Network& net, const mgrsc::Injections& inj,
                         double tol = 1e-12, int max_iter = 1000);

// Exhaustive continuation: the largest multiple of `step` in [0, max_lambda]
// whose power flow converges and satisfies every security limit, scanning
// upward from zero. Returns -1 when even lambda = 0 is infeasible.
double grid_max_lambda(const mgrsc::Network& net, const mgrsc::OperatingPoint& op, double step,
                       double max_lambda);

// Ishigami benchmark function and its closed-form variance decomposition.
double ishigami(double x1, double x2, double x3, double a = 7.0, double b = 0.1);
struct IshigamiAnalytic {
    double mean = 0.0;
    double variance = 0.0;
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s13 = 0.0;
};
IshigamiAnalytic ishigami_analytic(double a = 7.0, double b = 0.1);

// Closed-form raw moments and summary statistics.
double gaussian_raw_moment(int k);                      // standard normal
double uniform_raw_moment(int k, double lo, double hi);
double weibull_mean(double shape, double scale);
double weibull_variance(double shape, double scale);
double beta_mean(double a, double b, double lo, double hi);

}  // namespace oracle
