#include "mgrsc/sensitivity.hpp"

#include <algorithm>
#include <numeric>

#include "mgrsc/errors.hpp"

namespace mgrsc {
namespace {

bool is_constant(const MultiIndex& a) {
    return std::all_of(a.begin(), a.end(), [](int v) { return v == 0; });
}

double total_variance_or_throw(const PceModel& model) {
    const double v = model.variance();
    if (!(v > 0.0))
        throw SolverError("ZERO_VARIANCE",
                          "Sobol' indices are undefined for an all-constant surrogate");
    return v;
}

}  // namespace

double sobol_index(const PceModel& model, const std::vector<int>& u) {
    if (u.empty()) throw ValidationError("sobol_index: subset must be nonempty");
    std::vector<bool> in_u(static_cast<size_t>(model.dim()), false);
    for (int v : u) {
        if (v < 0 || v >= model.dim())
            throw ValidationError("sobol_index: variable index out of range");
        in_u[static_cast<size_t>(v)] = true;
    }
    const double total = total_variance_or_throw(model);

    double acc = 0.0;
    for (size_t m = 0; m < model.indices().size(); ++m) {
        const MultiIndex& a = model.indices()[m];
        if (is_constant(a)) continue;
        bool support_is_u = true;
        for (int i = 0; i < model.dim(); ++i) {
            const bool touched = a[static_cast<size_t>(i)] != 0;
            if (touched != in_u[static_cast<size_t>(i)]) {
                support_is_u = false;
                break;
            }
        }
        if (support_is_u) {
            const double c = model.coefficients()[static_cast<Eigen::Index>(m)];
            acc += c * c;
        }
    }
    return acc / total;
}

SobolReport sobol_report(const PceModel& model) {
    const double total = total_variance_or_throw(model);
    SobolReport rep;
    rep.variables = model.variables();
    rep.model_variance = total;
    rep.first_order = Eigen::VectorXd::Zero(model.dim());
    rep.total_order = Eigen::VectorXd::Zero(model.dim());

    for (size_t m = 0; m < model.indices().size(); ++m) {
        const MultiIndex& a = model.indices()[m];
        if (is_constant(a)) continue;
        const double c = model.coefficients()[static_cast<Eigen::Index>(m)];
        const double share = c * c / total;
        int touched = 0, last = -1;
        for (int i = 0; i < model.dim(); ++i) {
            if (a[static_cast<size_t>(i)] != 0) {
                ++touched;
                last = i;
                rep.total_order[i] += share;
            }
        }
        if (touched == 1) rep.first_order[last] += share;
    }
    return rep;
}

DominanceResult rank_dominant(const SobolReport& report, double threshold,
                              bool use_total_order) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw ValidationError("rank_dominant: threshold must be in (0, 1]");
    const Eigen::VectorXd& s = use_total_order ? report.total_order : report.first_order;

    std::vector<int> order(static_cast<size_t>(s.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (s[a] != s[b]) return s[a] > s[b];
        return a < b;
    });

    DominanceResult res;
    for (int v : order) {
        res.variables.push_back(v);
        res.covered += s[v];
        if (res.covered >= threshold - 1e-12) return res;
    }
    res.shortfall = true;
    return res;
}

}  // namespace mgrsc
