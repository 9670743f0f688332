#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "mgrsc/stochastic.hpp"

namespace mgrsc {

// Exponent vector over the input variables; entry i is the univariate degree
// of variable i in the product basis term.
using MultiIndex = std::vector<int>;

// All multi-indices with 1-norm <= degree, in graded lexicographic order
// (ascending total degree, then descending lexicographic within a grade):
// D=2, q=2 -> (0,0),(1,0),(0,1),(2,0),(1,1),(0,2). Count is C(D+q, q).
std::vector<MultiIndex> build_truncation(int dim, int degree);

// Coefficients (ascending power, length degree+1) of the degree-`degree`
// orthonormal polynomial of variable `var` under the measure described by its
// raw moments: the monic solution of the Hankel moment system, normalized to
// unit norm. Throws SolverError("ILL_CONDITIONED_MOMENTS") when the Hankel
// matrix condition exceeds 1e12, naming the variable and degree.
Eigen::VectorXd univariate_basis(const MomentTable& moments, int var, int degree,
                                 const std::string& var_name = "");

struct PceOptions {
    int degree = 2;
    bool prune = true;
    double prune_eps = 1e-8;  // drop terms with |c|^2 < eps * total |c|^2, refit
    double hankel_cond_limit = 1e12;
    double design_cond_limit = 1e12;
};

struct PceDiagnostics {
    double loo_error = 0.0;       // leave-one-out error relative to response variance
    double condition = 0.0;       // design-matrix condition number (final fit)
    int full_terms = 0;           // truncation size before pruning
    int retained_terms = 0;
    std::vector<std::string> warnings;
};

// Fitted sparse polynomial-chaos surrogate. Immutable; safe to share across
// threads.
class PceModel {
public:
    int dim() const { return static_cast<int>(standardization_.mean.size()); }
    int degree() const { return degree_; }
    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<MultiIndex>& indices() const { return indices_; }
    const Eigen::VectorXd& coefficients() const { return coefficients_; }
    const Standardization& standardization() const { return standardization_; }
    const MomentTable& moments() const { return moments_; }
    const PceDiagnostics& diagnostics() const { return diagnostics_; }

    // c0: the surrogate's expectation under the fitted measure.
    double mean() const { return coefficients_[0]; }
    // Sum of squared nonconstant coefficients: the surrogate's variance under
    // basis orthonormality.
    double variance() const;

    // Basis term value Psi_alpha at an already-standardized row.
    double eval_basis(const MultiIndex& alpha, const Eigen::RowVectorXd& x_std) const;

    // Surrogate evaluation on raw (physical-unit) rows; standardization is
    // applied internally.
    double evaluate(const Eigen::RowVectorXd& raw_row) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& raw_data) const;
    // Checks that the sample columns carry the same variable ids.
    Eigen::VectorXd predict(const SampleSet& samples) const;

    nlohmann::ordered_json to_json() const;
    static PceModel from_json(const nlohmann::json& doc);

    void save(const std::string& path) const;
    static PceModel load(const std::string& path);

private:
    friend PceModel fit_pce(const SampleSet&, const Eigen::VectorXd&, const PceOptions&);

    int degree_ = 0;
    std::vector<std::string> variables_;       // per input column
    Standardization standardization_;
    MomentTable moments_;                      // standardized-space, order 2q
    std::vector<Eigen::VectorXd> basis_;       // basis_[var * (q+1) + d], empty if degenerate
    std::vector<MultiIndex> indices_;          // retained, graded lex subsequence
    Eigen::VectorXd coefficients_;
    PceDiagnostics diagnostics_;
};

// Ordinary-least-squares fit on the 1-norm truncated basis with optional
// pruning and refit. Throws SolverError("UNDERDETERMINED") when the training
// count does not exceed the basis size and SolverError("RANK_DEFICIENT") when
// the design matrix is numerically rank-deficient.
PceModel fit_pce(const SampleSet& samples, const Eigen::VectorXd& responses,
                 const PceOptions& opts = {});

}  // namespace mgrsc
