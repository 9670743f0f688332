#pragma once

#include <string>
#include <vector>

#include "mgrsc/powerflow.hpp"

namespace mgrsc {

// Base-case injections plus the per-bus generator bookkeeping the security
// checks need. `base` holds the total scheduled net injection at lambda = 0;
// `gen_p`/`gen_q` are the dispatchable-generator shares included in it, so
// the non-generator part (loads, stochastic devices, storage, the scheduled
// interchange) is base minus gen.
struct OperatingPoint {
    Injections base;
    Eigen::VectorXd gen_p;
    Eigen::VectorXd gen_q;
};

enum class BindingKind {
    NONE,        // no limit evaluated (base result placeholder)
    VOLTAGE,     // bus voltage magnitude bound
    THERMAL,     // branch current bound
    GEN_P,       // generator active power bound
    GEN_Q,       // generator reactive power bound
    NOSE,        // power flow stopped converging (collapse point)
    LAMBDA_CAP,  // search cap reached while still feasible
};

const char* binding_kind_name(BindingKind k);

struct Violation {
    BindingKind kind = BindingKind::NONE;
    int index = -1;  // bus index (VOLTAGE), branch index (THERMAL), generator index (GEN_*)
    double value = 0.0;
    double limit = 0.0;
};

// Human-readable label such as "VOLTAGE(bus 18)" or "GEN_P(bus 6)".
std::string binding_label(const Network& net, BindingKind kind, int index);

struct CpfOptions {
    double lambda_tol = 1e-4;   // bisection width on lambda, per-unit
    double max_lambda = 10.0;   // search cap, per-unit
    double pf_tol = 1e-8;       // power flow mismatch tolerance
    int pf_max_iter = 30;
    double initial_step = 0.01;
};

struct RscResult {
    double lambda = 0.0;
    BindingKind binding = BindingKind::NONE;
    int binding_index = -1;
    PowerFlowState state_at_limit;  // last feasible state
    bool capped = false;
};

// Total injections with the ramping increment applied: active generation
// ramps up by lambda * dp_gen while the PCC export (modelled as load) grows
// by lambda * dp_load and reactive load by lambda * dq_load.
Injections injections_at(const Network& net, const OperatingPoint& op, double lambda);

// All violated security limits at a converged state, in a fixed evaluation
// order (bus voltages, branch currents, then generator P and Q limits). The
// slack generator's output is read back from the solved state.
std::vector<Violation> check_limits(const PowerFlowSolver& solver, const OperatingPoint& op,
                                    const PowerFlowState& state, double lambda);

// Maximum lambda for which the network stays within every security limit:
// monotone step-doubling followed by bisection to opts.lambda_tol. Throws
// SolverError("INFEASIBLE_BASE") when lambda = 0 itself does not converge or
// violates a limit.
RscResult max_lambda(const PowerFlowSolver& solver, const OperatingPoint& op,
                     const CpfOptions& opts = {});
RscResult max_lambda(const Network& net, const OperatingPoint& op, const CpfOptions& opts = {});

}  // namespace mgrsc
