#pragma once

#include <complex>
#include <utility>

#include <Eigen/Core>

#include "mgrsc/network.hpp"

namespace mgrsc {

// Per-bus net complex injections in per-unit (generation minus load at each
// bus). The slack entry is ignored by the solver; the slack bus balances.
struct Injections {
    Eigen::VectorXd p;
    Eigen::VectorXd q;
};

struct PowerFlowOptions {
    double tol = 1e-8;  // infinity norm of the power mismatch, per-unit
    int max_iter = 30;
};

struct PowerFlowState {
    Eigen::VectorXd theta;  // voltage angle per bus, rad
    Eigen::VectorXd v;      // voltage magnitude per bus, per-unit
    bool converged = false;
    int iterations = 0;
    double max_mismatch = 0.0;
};

// Full-Jacobian polar Newton-Raphson solver. Every non-slack bus is treated
// as PQ (generator reactive output is fixed by its power factor at injection
// assembly time); the single slack bus holds V = 1, theta = 0.
//
// The solver keeps a reference to the network: the Network must outlive the
// solver. A solver instance is immutable after construction and safe to share
// across threads.
class PowerFlowSolver {
public:
    explicit PowerFlowSolver(const Network& net, PowerFlowOptions opts = {});

    // Flat start (V = 1, theta = 0).
    PowerFlowState solve(const Injections& inj) const;
    // Warm start from a previous state (e.g. the neighbouring continuation
    // step).
    PowerFlowState solve(const Injections& inj, const PowerFlowState& warm) const;

    // Net complex injection realized at bus `bus` by the state (used to read
    // back what the slack picked up).
    std::complex<double> bus_injection(const PowerFlowState& state, int bus_index) const;

    // Stacked mismatch [dP; dQ] over non-slack buses, and its analytic
    // Jacobian; exposed so tests can check the Jacobian against finite
    // differences.
    Eigen::VectorXd mismatch(const Injections& inj, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& v) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta, const Eigen::VectorXd& v) const;

    const Eigen::MatrixXcd& ybus() const { return ybus_; }
    const Network& net() const { return *net_; }

private:
    const Network* net_;
    PowerFlowOptions opts_;
    Eigen::MatrixXcd ybus_;
    std::vector<int> free_;  // non-slack bus indices, solver unknown order
};

// One-shot convenience wrapper (builds the admittance matrix each call).
PowerFlowState solve_power_flow(const Network& net, const Injections& inj,
                                PowerFlowOptions opts = {});

// Per-branch series current magnitude in per-unit, from terminal voltages.
// Requires a converged state.
Eigen::VectorXd branch_currents(const Network& net, const PowerFlowState& state);

}  // namespace mgrsc
