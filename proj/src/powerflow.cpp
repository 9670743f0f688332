#include "mgrsc/powerflow.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "mgrsc/errors.hpp"

namespace mgrsc {
namespace {

Eigen::MatrixXcd build_ybus(const Network& net) {
    const int n = net.bus_count();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (const Branch& br : net.branches()) {
        const int i = net.bus_index(br.from_bus);
        const int j = net.bus_index(br.to_bus);
        const std::complex<double> ys = 1.0 / std::complex<double>(br.r, br.x);
        y(i, i) += ys;
        y(j, j) += ys;
        y(i, j) -= ys;
        y(j, i) -= ys;
    }
    return y;
}

Eigen::VectorXcd complex_voltages(const Eigen::VectorXd& theta, const Eigen::VectorXd& v) {
    Eigen::VectorXcd vc(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        vc[i] = std::polar(v[i], theta[i]);
    return vc;
}

}  // namespace

PowerFlowSolver::PowerFlowSolver(const Network& net, PowerFlowOptions opts)
    : net_(&net), opts_(opts), ybus_(build_ybus(net)) {
    if (opts_.tol <= 0.0) throw ValidationError("power flow tolerance must be positive");
    if (opts_.max_iter < 1) throw ValidationError("power flow max_iter must be at least 1");
    for (int i = 0; i < net.bus_count(); ++i) {
        if (net.buses()[i].kind == BusKind::PV)
            throw ValidationError("PV-type buses are not supported; fix reactive output via the "
                                  "device power factor instead");
        if (i != net.slack_index()) free_.push_back(i);
    }
}

Eigen::VectorXd PowerFlowSolver::mismatch(const Injections& inj, const Eigen::VectorXd& theta,
                                          const Eigen::VectorXd& v) const {
    const Eigen::VectorXcd vc = complex_voltages(theta, v);
    const Eigen::VectorXcd s = vc.cwiseProduct((ybus_ * vc).conjugate());
    const int m = static_cast<int>(free_.size());
    Eigen::VectorXd f(2 * m);
    for (int k = 0; k < m; ++k) {
        const int i = free_[k];
        f[k] = inj.p[i] - s[i].real();
        f[m + k] = inj.q[i] - s[i].imag();
    }
    return f;
}

Eigen::MatrixXd PowerFlowSolver::jacobian(const Eigen::VectorXd& theta,
                                          const Eigen::VectorXd& v) const {
    // With M_ij = V_i * conj(Y_ij * V_j), the injected power is S_i = sum_j
    // M_ij and the polar-coordinate partial derivatives of (P, Q) are short
    // expressions in Re(M), Im(M) — see any power-flow text.
    const Eigen::VectorXcd vc = complex_voltages(theta, v);
    const int n = net_->bus_count();
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = vc[i] * std::conj(ybus_(i, j) * vc[j]);

    const int mm = static_cast<int>(free_.size());
    Eigen::MatrixXd jac(2 * mm, 2 * mm);
    for (int a = 0; a < mm; ++a) {
        const int i = free_[a];
        const std::complex<double> s_i = m.row(i).sum();
        const double p_i = s_i.real(), q_i = s_i.imag();
        const double g_ii = ybus_(i, i).real(), b_ii = ybus_(i, i).imag();
        for (int b = 0; b < mm; ++b) {
            const int j = free_[b];
            if (i == j) {
                jac(a, b) = -q_i - b_ii * v[i] * v[i];              // dP/dtheta
                jac(a, mm + b) = p_i / v[i] + g_ii * v[i];          // dP/dV
                jac(mm + a, b) = p_i - g_ii * v[i] * v[i];          // dQ/dtheta
                jac(mm + a, mm + b) = q_i / v[i] - b_ii * v[i];     // dQ/dV
            } else {
                jac(a, b) = m(i, j).imag();
                jac(a, mm + b) = m(i, j).real() / v[j];
                jac(mm + a, b) = -m(i, j).real();
                jac(mm + a, mm + b) = m(i, j).imag() / v[j];
            }
        }
    }
    return jac;
}

PowerFlowState PowerFlowSolver::solve(const Injections& inj) const {
    PowerFlowState flat;
    flat.theta = Eigen::VectorXd::Zero(net_->bus_count());
    flat.v = Eigen::VectorXd::Ones(net_->bus_count());
    return solve(inj, flat);
}

PowerFlowState PowerFlowSolver::solve(const Injections& inj, const PowerFlowState& warm) const {
    const int n = net_->bus_count();
    if (inj.p.size() != n || inj.q.size() != n)
        throw ValidationError("injection vectors do not match bus count");
    if (warm.theta.size() != n || warm.v.size() != n)
        throw ValidationError("warm-start state does not match bus count");

    PowerFlowState st;
    st.theta = warm.theta;
    st.v = warm.v;
    st.theta[net_->slack_index()] = 0.0;
    st.v[net_->slack_index()] = 1.0;

    const int m = static_cast<int>(free_.size());
    for (int it = 0; it < opts_.max_iter; ++it) {
        const Eigen::VectorXd f = mismatch(inj, st.theta, st.v);
        st.max_mismatch = f.lpNorm<Eigen::Infinity>();
        st.iterations = it;
        if (st.max_mismatch <= opts_.tol) {
            st.converged = true;
            return st;
        }
        const Eigen::MatrixXd jac = jacobian(st.theta, st.v);
        const Eigen::VectorXd dx = jac.partialPivLu().solve(f);
        if (!dx.allFinite())
            throw SolverError("SINGULAR_JACOBIAN",
                              "power flow Jacobian is singular at iteration " + std::to_string(it));
        for (int k = 0; k < m; ++k) {
            st.theta[free_[k]] += dx[k];
            st.v[free_[k]] += dx[m + k];
        }
        if (st.v.minCoeff() <= 0.0) {
            // Voltage collapsed through zero: report non-convergence rather
            // than continuing in an unphysical region.
            st.converged = false;
            st.iterations = it + 1;
            return st;
        }
    }
    st.converged = false;
    st.max_mismatch = mismatch(inj, st.theta, st.v).lpNorm<Eigen::Infinity>();
    st.iterations = opts_.max_iter;
    return st;
}

std::complex<double> PowerFlowSolver::bus_injection(const PowerFlowState& state,
                                                    int bus_index) const {
    const Eigen::VectorXcd vc = complex_voltages(state.theta, state.v);
    const std::complex<double> current = (ybus_.row(bus_index) * vc).value();
    return vc[bus_index] * std::conj(current);
}

PowerFlowState solve_power_flow(const Network& net, const Injections& inj, PowerFlowOptions opts) {
    return PowerFlowSolver(net, opts).solve(inj);
}

Eigen::VectorXd branch_currents(const Network& net, const PowerFlowState& state) {
    if (!state.converged)
        throw SolverError("UNCONVERGED_STATE",
                          "branch currents requested for an unconverged power flow state");
    Eigen::VectorXd out(static_cast<Eigen::Index>(net.branches().size()));
    Eigen::Index k = 0;
    for (const Branch& br : net.branches()) {
        const int i = net.bus_index(br.from_bus);
        const int j = net.bus_index(br.to_bus);
        const std::complex<double> vi = std::polar(state.v[i], state.theta[i]);
        const std::complex<double> vj = std::polar(state.v[j], state.theta[j]);
        out[k++] = std::abs((vi - vj) / std::complex<double>(br.r, br.x));
    }
    return out;
}

}  // namespace mgrsc
