#include "mgrsc/pce.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mgrsc/errors.hpp"

namespace mgrsc {
namespace {

void enumerate_grade(int dim, int grade, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (pos == dim - 1) {
        cur[static_cast<size_t>(pos)] = grade;
        out.push_back(cur);
        return;
    }
    for (int a = grade; a >= 0; --a) {
        cur[static_cast<size_t>(pos)] = a;
        enumerate_grade(dim, grade - a, pos + 1, cur, out);
    }
}

double polyval(const Eigen::VectorXd& coeffs_ascending, double x) {
    double acc = 0.0;
    for (Eigen::Index k = coeffs_ascending.size() - 1; k >= 0; --k)
        acc = acc * x + coeffs_ascending[k];
    return acc;
}

struct OlsFit {
    Eigen::VectorXd coeffs;
    double condition = 0.0;
    double loo_error = 0.0;
};

OlsFit solve_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double cond_limit) {
    const Eigen::Index n = design.rows(), m = design.cols();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv[0], smin = sv[m - 1];
    if (!(smin > 0.0) || smax / smin > cond_limit)
        throw SolverError("RANK_DEFICIENT",
                          "design matrix is numerically rank-deficient (condition " +
                              std::to_string(smin > 0.0 ? smax / smin
                                                        : std::numeric_limits<double>::infinity()) +
                              ")");
    OlsFit fit;
    fit.condition = smax / smin;
    fit.coeffs = svd.solve(y);

    // Leave-one-out error from the hat-matrix diagonal h_n = ||U row n||²,
    // relative to the response variance.
    const Eigen::MatrixXd& u = svd.matrixU();
    const Eigen::VectorXd residual = y - design * fit.coeffs;
    const double y_mean = y.mean();
    const double denom = (y.array() - y_mean).square().sum();
    if (denom <= 0.0) {
        fit.loo_error = 0.0;
        return fit;
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = u.row(i).squaredNorm();
        const double d = std::max(1.0 - h, 1e-12);
        acc += (residual[i] / d) * (residual[i] / d);
    }
    fit.loo_error = acc / denom;
    return fit;
}

}  // namespace

std::vector<MultiIndex> build_truncation(int dim, int degree) {
    if (dim < 1) throw ValidationError("build_truncation: dim must be >= 1");
    if (degree < 0) throw ValidationError("build_truncation: degree must be >= 0");
    std::vector<MultiIndex> out;
    MultiIndex cur(static_cast<size_t>(dim), 0);
    for (int g = 0; g <= degree; ++g) enumerate_grade(dim, g, 0, cur, out);
    return out;
}

Eigen::VectorXd univariate_basis(const MomentTable& moments, int var, int degree,
                                 const std::string& var_name) {
    if (var < 0 || var >= moments.dim())
        throw ValidationError("univariate_basis: variable index out of range");
    const std::string label = var_name.empty() ? "variable " + std::to_string(var)
                                               : "variable '" + var_name + "'";
    if (moments.degenerate[static_cast<size_t>(var)])
        throw ValidationError("univariate_basis: " + label + " is degenerate (zero variance)");
    if (degree < 0) throw ValidationError("univariate_basis: degree must be >= 0");
    if (moments.max_order() < 2 * degree)
        throw ValidationError("univariate_basis: " + label + " needs moments to order " +
                              std::to_string(2 * degree));

    Eigen::VectorXd monic(degree + 1);
    if (degree == 0) {
        monic[0] = 1.0;
    } else {
        // Hankel moment system: the monic degree-d polynomial orthogonal to
        // 1, x, ..., x^(d-1) under the empirical measure.
        Eigen::MatrixXd h(degree, degree);
        Eigen::VectorXd rhs(degree);
        for (int j = 0; j < degree; ++j) {
            for (int k = 0; k < degree; ++k) h(j, k) = moments.mu(j + k, var);
            rhs[j] = -moments.mu(j + degree, var);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double smax = svd.singularValues()[0];
        const double smin = svd.singularValues()[degree - 1];
        if (!(smin > 0.0) || smax / smin > 1e12)
            throw SolverError("ILL_CONDITIONED_MOMENTS",
                              "Hankel moment matrix for " + label + " at degree " +
                                  std::to_string(degree) + " has condition beyond 1e12");
        monic.head(degree) = svd.solve(rhs);
        monic[degree] = 1.0;
    }

    double norm_sq = 0.0;
    for (int j = 0; j <= degree; ++j)
        for (int k = 0; k <= degree; ++k) norm_sq += monic[j] * monic[k] * moments.mu(j + k, var);
    if (!(norm_sq > 0.0))
        throw SolverError("ILL_CONDITIONED_MOMENTS",
                          "moment table of " + label + " gives nonpositive norm at degree " +
                              std::to_string(degree));
    return monic / std::sqrt(norm_sq);
}

double PceModel::variance() const {
    double acc = 0.0;
    for (size_t m = 0; m < indices_.size(); ++m) {
        const MultiIndex& a = indices_[m];
        if (std::any_of(a.begin(), a.end(), [](int v) { return v != 0; }))
            acc += coefficients_[static_cast<Eigen::Index>(m)] *
                   coefficients_[static_cast<Eigen::Index>(m)];
    }
    return acc;
}

double PceModel::eval_basis(const MultiIndex& alpha, const Eigen::RowVectorXd& x_std) const {
    if (alpha.size() != static_cast<size_t>(dim()) || x_std.size() != dim())
        throw ValidationError("eval_basis: dimension mismatch");
    double prod = 1.0;
    for (int i = 0; i < dim(); ++i) {
        const int d = alpha[static_cast<size_t>(i)];
        if (d == 0) continue;
        const Eigen::VectorXd& poly = basis_[static_cast<size_t>(i * (degree_ + 1) + d)];
        if (poly.size() == 0)
            throw ValidationError("eval_basis: nonzero exponent on degenerate variable " +
                                  variables_[static_cast<size_t>(i)]);
        prod *= polyval(poly, x_std[i]);
    }
    return prod;
}

double PceModel::evaluate(const Eigen::RowVectorXd& raw_row) const {
    Eigen::MatrixXd row = raw_row;
    return predict(row)[0];
}

Eigen::VectorXd PceModel::predict(const Eigen::MatrixXd& raw_data) const {
    if (raw_data.cols() != dim())
        throw ValidationError("predict: sample dimension does not match model");
    const Eigen::MatrixXd x = apply_standardization(standardization_, raw_data);
    const int q1 = degree_ + 1;

    Eigen::VectorXd out(x.rows());
    std::vector<double> vals(static_cast<size_t>(dim() * q1), 1.0);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (int i = 0; i < dim(); ++i)
            for (int d = 1; d <= degree_; ++d) {
                const Eigen::VectorXd& poly = basis_[static_cast<size_t>(i * q1 + d)];
                vals[static_cast<size_t>(i * q1 + d)] =
                    poly.size() == 0 ? 0.0 : polyval(poly, x(r, i));
            }
        double acc = 0.0;
        for (size_t m = 0; m < indices_.size(); ++m) {
            double prod = 1.0;
            const MultiIndex& a = indices_[m];
            for (int i = 0; i < dim(); ++i)
                if (a[static_cast<size_t>(i)] != 0)
                    prod *= vals[static_cast<size_t>(i * q1 + a[static_cast<size_t>(i)])];
            acc += coefficients_[static_cast<Eigen::Index>(m)] * prod;
        }
        out[r] = acc;
    }
    return out;
}

Eigen::VectorXd PceModel::predict(const SampleSet& samples) const {
    validate_sample_set(samples);
    if (samples.device_ids != variables_)
        throw ValidationError("sample columns do not match the model's variables");
    return predict(samples.data);
}

PceModel fit_pce(const SampleSet& samples, const Eigen::VectorXd& responses,
                 const PceOptions& opts) {
    validate_sample_set(samples);
    if (responses.size() != samples.n())
        throw ValidationError("fit_pce: response count does not match sample rows");
    if (!responses.allFinite()) throw ValidationError("fit_pce: responses contain NaN/inf");
    if (opts.degree < 0) throw ValidationError("fit_pce: degree must be >= 0");

    const int q = opts.degree;
    const int q1 = q + 1;
    PceModel model;
    model.degree_ = q;
    model.variables_ = samples.device_ids;
    model.standardization_ = fit_standardization(samples.data);
    const Eigen::MatrixXd x = apply_standardization(model.standardization_, samples.data);
    model.moments_ = raw_moments(x, 2 * q);

    std::vector<int> active;
    for (int i = 0; i < model.moments_.dim(); ++i)
        if (!model.moments_.degenerate[static_cast<size_t>(i)]) active.push_back(i);
    for (size_t i = 0; i < model.standardization_.degenerate.size(); ++i)
        if (model.standardization_.degenerate[i])
            model.diagnostics_.warnings.push_back("variable '" + model.variables_[i] +
                                                  "' is constant; excluded from the basis");

    model.basis_.assign(static_cast<size_t>(model.dim() * q1), Eigen::VectorXd());
    for (int i : active)
        for (int d = 0; d <= q; ++d)
            model.basis_[static_cast<size_t>(i * q1 + d)] = univariate_basis(
                model.moments_, i, d, model.variables_[static_cast<size_t>(i)]);

    // Truncation over the active variables only, mapped back to full width.
    std::vector<MultiIndex> indices;
    if (active.empty()) {
        indices.push_back(MultiIndex(static_cast<size_t>(model.dim()), 0));
    } else {
        for (const MultiIndex& reduced :
             build_truncation(static_cast<int>(active.size()), q)) {
            MultiIndex full(static_cast<size_t>(model.dim()), 0);
            for (size_t k = 0; k < active.size(); ++k)
                full[static_cast<size_t>(active[k])] = reduced[k];
            indices.push_back(std::move(full));
        }
    }

    const int n = samples.n();
    const int m_full = static_cast<int>(indices.size());
    model.diagnostics_.full_terms = m_full;
    if (n <= m_full)
        throw SolverError("UNDERDETERMINED",
                          "training sample (" + std::to_string(n) +
                              ") must exceed the basis size (" + std::to_string(m_full) +
                              "); raise n0 or lower the degree");
    if (n < 2 * m_full)
        model.diagnostics_.warnings.push_back(
            "training sample (" + std::to_string(n) + ") is below twice the basis size (" +
            std::to_string(m_full) + "); coefficients may be noisy");

    auto build_design = [&](const std::vector<MultiIndex>& idx) {
        Eigen::MatrixXd design(n, static_cast<Eigen::Index>(idx.size()));
        std::vector<double> vals(static_cast<size_t>(model.dim() * q1), 1.0);
        for (int r = 0; r < n; ++r) {
            for (int i : active)
                for (int d = 1; d <= q; ++d)
                    vals[static_cast<size_t>(i * q1 + d)] =
                        polyval(model.basis_[static_cast<size_t>(i * q1 + d)], x(r, i));
            for (size_t m = 0; m < idx.size(); ++m) {
                double prod = 1.0;
                for (int i : active)
                    if (idx[m][static_cast<size_t>(i)] != 0)
                        prod *= vals[static_cast<size_t>(i * q1 + idx[m][static_cast<size_t>(i)])];
                design(r, static_cast<Eigen::Index>(m)) = prod;
            }
        }
        return design;
    };

    OlsFit fit = solve_ols(build_design(indices), responses, opts.design_cond_limit);

    if (opts.prune && m_full > 1) {
        const double total = fit.coeffs.squaredNorm();
        std::vector<MultiIndex> kept;
        for (size_t m = 0; m < indices.size(); ++m) {
            const bool is_constant = std::all_of(indices[m].begin(), indices[m].end(),
                                                 [](int v) { return v == 0; });
            const double c = fit.coeffs[static_cast<Eigen::Index>(m)];
            if (is_constant || c * c >= opts.prune_eps * total) kept.push_back(indices[m]);
        }
        if (kept.size() < indices.size()) {
            indices = std::move(kept);
            fit = solve_ols(build_design(indices), responses, opts.design_cond_limit);
        }
    }

    model.indices_ = std::move(indices);
    model.coefficients_ = std::move(fit.coeffs);
    model.diagnostics_.retained_terms = static_cast<int>(model.indices_.size());
    model.diagnostics_.condition = fit.condition;
    model.diagnostics_.loo_error = fit.loo_error;
    return model;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

nlohmann::ordered_json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr, const std::string& ctx) {
    if (!arr.is_array()) throw ValidationError(ctx + ": expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw ValidationError(ctx + ": expected numbers");
        v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
}

constexpr const char* kModelFormat = "mgrsc-pce-model";
constexpr int kModelVersion = 1;

}  // namespace

nlohmann::ordered_json PceModel::to_json() const {
    nlohmann::ordered_json doc;
    doc["format"] = kModelFormat;
    doc["version"] = kModelVersion;
    doc["degree"] = degree_;
    doc["variables"] = variables_;

    nlohmann::ordered_json std_doc;
    std_doc["mean"] = vector_to_json(standardization_.mean);
    std_doc["scale"] = vector_to_json(standardization_.scale);
    std_doc["degenerate"] = standardization_.degenerate;
    doc["standardization"] = std_doc;

    nlohmann::ordered_json mom;
    mom["source"] =
        moments_.source == MomentTable::Source::EMPIRICAL ? "empirical" : "analytic";
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < moments_.mu.rows(); ++k)
        rows.push_back(vector_to_json(moments_.mu.row(k).transpose()));
    mom["mu"] = rows;
    mom["degenerate"] = moments_.degenerate;
    doc["moments"] = mom;

    nlohmann::ordered_json basis = nlohmann::ordered_json::array();
    for (int i = 0; i < dim(); ++i) {
        for (int d = 0; d <= degree_; ++d) {
            const Eigen::VectorXd& poly = basis_[static_cast<size_t>(i * (degree_ + 1) + d)];
            if (poly.size() == 0) continue;
            nlohmann::ordered_json entry;
            entry["var"] = i;
            entry["degree"] = d;
            entry["coeffs"] = vector_to_json(poly);
            basis.push_back(entry);
        }
    }
    doc["basis"] = basis;

    doc["indices"] = indices_;
    doc["coefficients"] = vector_to_json(coefficients_);

    nlohmann::ordered_json diag;
    diag["loo_error"] = diagnostics_.loo_error;
    diag["condition"] = diagnostics_.condition;
    diag["full_terms"] = diagnostics_.full_terms;
    diag["retained_terms"] = diagnostics_.retained_terms;
    diag["warnings"] = diagnostics_.warnings;
    doc["diagnostics"] = diag;
    return doc;
}

PceModel PceModel::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("format", "") != kModelFormat)
        throw ValidationError("not a PCE model document");
    if (doc.value("version", -1) != kModelVersion)
        throw ValidationError("unsupported PCE model version");

    PceModel m;
    m.degree_ = doc.at("degree").get<int>();
    m.variables_ = doc.at("variables").get<std::vector<std::string>>();
    const int dim = static_cast<int>(m.variables_.size());

    const nlohmann::json& jstd = doc.at("standardization");
    m.standardization_.mean = vector_from_json(jstd.at("mean"), "standardization.mean");
    m.standardization_.scale = vector_from_json(jstd.at("scale"), "standardization.scale");
    m.standardization_.degenerate = jstd.at("degenerate").get<std::vector<bool>>();
    if (m.standardization_.dim() != dim ||
        m.standardization_.degenerate.size() != static_cast<size_t>(dim))
        throw ValidationError("PCE model: standardization dimension mismatch");

    const nlohmann::json& jmom = doc.at("moments");
    const nlohmann::json& rows = jmom.at("mu");
    m.moments_.mu.resize(static_cast<Eigen::Index>(rows.size()), dim);
    for (size_t k = 0; k < rows.size(); ++k)
        m.moments_.mu.row(static_cast<Eigen::Index>(k)) =
            vector_from_json(rows[k], "moments.mu").transpose();
    m.moments_.degenerate = jmom.at("degenerate").get<std::vector<bool>>();
    m.moments_.source = jmom.value("source", "empirical") == "analytic"
                            ? MomentTable::Source::ANALYTIC
                            : MomentTable::Source::EMPIRICAL;

    m.basis_.assign(static_cast<size_t>(dim * (m.degree_ + 1)), Eigen::VectorXd());
    for (const nlohmann::json& entry : doc.at("basis")) {
        const int var = entry.at("var").get<int>();
        const int d = entry.at("degree").get<int>();
        if (var < 0 || var >= dim || d < 0 || d > m.degree_)
            throw ValidationError("PCE model: basis entry out of range");
        m.basis_[static_cast<size_t>(var * (m.degree_ + 1) + d)] =
            vector_from_json(entry.at("coeffs"), "basis.coeffs");
    }

    m.indices_ = doc.at("indices").get<std::vector<MultiIndex>>();
    m.coefficients_ = vector_from_json(doc.at("coefficients"), "coefficients");
    if (m.indices_.size() != static_cast<size_t>(m.coefficients_.size()))
        throw ValidationError("PCE model: index/coefficient count mismatch");
    for (const MultiIndex& a : m.indices_)
        if (a.size() != static_cast<size_t>(dim))
            throw ValidationError("PCE model: index width mismatch");

    if (auto it = doc.find("diagnostics"); it != doc.end()) {
        m.diagnostics_.loo_error = it->value("loo_error", 0.0);
        m.diagnostics_.condition = it->value("condition", 0.0);
        m.diagnostics_.full_terms = it->value("full_terms", 0);
        m.diagnostics_.retained_terms = it->value("retained_terms", 0);
        m.diagnostics_.warnings = it->value("warnings", std::vector<std::string>{});
    }
    return m;
}

void PceModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write model file: " + path);
    out << to_json().dump(2) << "\n";
}

PceModel PceModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("model file " + path + " is not valid JSON: " + e.what());
    }
    return from_json(doc);
}

}  // namespace mgrsc
