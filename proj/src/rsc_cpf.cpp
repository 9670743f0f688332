#include "mgrsc/rsc_cpf.hpp"

#include <cmath>
#include <cstdio>

#include "mgrsc/errors.hpp"

namespace mgrsc {
namespace {

// Comparison guard against float noise when a quantity sits exactly on its
// bound (a bound that is met with equality is not a violation).
constexpr double kLimitEps = 1e-12;

struct Probe {
    bool feasible = false;
    bool converged = false;
    std::vector<Violation> violations;
    PowerFlowState state;
};

Probe probe_lambda(const PowerFlowSolver& solver, const OperatingPoint& op, double lambda,
                   const PowerFlowState& warm) {
    Probe pr;
    pr.state = solver.solve(injections_at(solver.net(), op, lambda), warm);
    pr.converged = pr.state.converged;
    if (!pr.converged) return pr;
    pr.violations = check_limits(solver, op, pr.state, lambda);
    pr.feasible = pr.violations.empty();
    return pr;
}

}  // namespace

const char* binding_kind_name(BindingKind k) {
    switch (k) {
        case BindingKind::NONE: return "NONE";
        case BindingKind::VOLTAGE: return "VOLTAGE";
        case BindingKind::THERMAL: return "THERMAL";
        case BindingKind::GEN_P: return "GEN_P";
        case BindingKind::GEN_Q: return "GEN_Q";
        case BindingKind::NOSE: return "NOSE";
        case BindingKind::LAMBDA_CAP: return "LAMBDA_CAP";
    }
    return "NONE";
}

std::string binding_label(const Network& net, BindingKind kind, int index) {
    switch (kind) {
        case BindingKind::VOLTAGE:
            return std::string("VOLTAGE(bus ") + std::to_string(net.buses()[index].id) + ")";
        case BindingKind::THERMAL: {
            const Branch& br = net.branches()[index];
            return "THERMAL(branch " + std::to_string(br.from_bus) + "-" +
                   std::to_string(br.to_bus) + ")";
        }
        case BindingKind::GEN_P:
            return "GEN_P(bus " + std::to_string(net.generators()[index].bus) + ")";
        case BindingKind::GEN_Q:
            return "GEN_Q(bus " + std::to_string(net.generators()[index].bus) + ")";
        default:
            return binding_kind_name(kind);
    }
}

Injections injections_at(const Network& net, const OperatingPoint& op, double lambda) {
    const TransferDirection& dir = net.direction();
    Injections inj;
    inj.p = op.base.p + lambda * (dir.dp_gen - dir.dp_load);
    inj.q = op.base.q - lambda * dir.dq_load;
    return inj;
}

std::vector<Violation> check_limits(const PowerFlowSolver& solver, const OperatingPoint& op,
                                    const PowerFlowState& state, double lambda) {
    const Network& net = solver.net();
    const TransferDirection& dir = net.direction();
    std::vector<Violation> out;

    for (int i = 0; i < net.bus_count(); ++i) {
        const Bus& b = net.buses()[i];
        if (state.v[i] < b.v_min - kLimitEps)
            out.push_back({BindingKind::VOLTAGE, i, state.v[i], b.v_min});
        else if (state.v[i] > b.v_max + kLimitEps)
            out.push_back({BindingKind::VOLTAGE, i, state.v[i], b.v_max});
    }

    const Eigen::VectorXd currents = branch_currents(net, state);
    for (Eigen::Index k = 0; k < currents.size(); ++k) {
        const double i_max = net.branches()[static_cast<size_t>(k)].i_max;
        if (i_max > 0.0 && currents[k] > i_max + kLimitEps)
            out.push_back({BindingKind::THERMAL, static_cast<int>(k), currents[k], i_max});
    }

    for (size_t g = 0; g < net.generators().size(); ++g) {
        const Generator& gen = net.generators()[g];
        const int i = net.bus_index(gen.bus);
        double p_out, q_out;
        if (i == net.slack_index()) {
            // Whatever the slack bus injects beyond its scheduled
            // non-generator part is this generator's output.
            const std::complex<double> s = solver.bus_injection(state, i);
            const double nongen_p = op.base.p[i] - op.gen_p[i] - lambda * dir.dp_load[i];
            const double nongen_q = op.base.q[i] - op.gen_q[i] - lambda * dir.dq_load[i];
            p_out = s.real() - nongen_p;
            q_out = s.imag() - nongen_q;
        } else {
            p_out = op.gen_p[i] + lambda * dir.dp_gen[i];
            q_out = op.gen_q[i];
        }
        if (p_out < gen.p_min - kLimitEps)
            out.push_back({BindingKind::GEN_P, static_cast<int>(g), p_out, gen.p_min});
        else if (p_out > gen.p_max + kLimitEps)
            out.push_back({BindingKind::GEN_P, static_cast<int>(g), p_out, gen.p_max});
        if (q_out < gen.q_min - kLimitEps)
            out.push_back({BindingKind::GEN_Q, static_cast<int>(g), q_out, gen.q_min});
        else if (q_out > gen.q_max + kLimitEps)
            out.push_back({BindingKind::GEN_Q, static_cast<int>(g), q_out, gen.q_max});
    }
    return out;
}

RscResult max_lambda(const PowerFlowSolver& solver, const OperatingPoint& op,
                     const CpfOptions& opts) {
    const Network& net = solver.net();
    if (!net.has_direction())
        throw ValidationError("max_lambda requires a transfer direction on the network");
    if (opts.lambda_tol <= 0.0 || opts.max_lambda <= 0.0 || opts.initial_step <= 0.0)
        throw ValidationError("CPF options must be positive");

    PowerFlowState base_state = solver.solve(injections_at(net, op, 0.0));
    if (!base_state.converged)
        throw SolverError("INFEASIBLE_BASE", "base case power flow did not converge");
    {
        const std::vector<Violation> v0 = check_limits(solver, op, base_state, 0.0);
        if (!v0.empty()) {
            const Violation& v = v0.front();
            char detail[64];
            std::snprintf(detail, sizeof detail, " (value %.6g, limit %.6g)", v.value, v.limit);
            throw SolverError("INFEASIBLE_BASE", "base case violates " +
                                                     binding_label(net, v.kind, v.index) + detail);
        }
    }

    double lo = 0.0;
    PowerFlowState lo_state = base_state;
    double hi = 0.0;
    Probe hi_probe;
    double step = opts.initial_step;
    bool found_infeasible = false;

    while (!found_infeasible) {
        const double cand = std::min(lo + step, opts.max_lambda);
        Probe pr = probe_lambda(solver, op, cand, lo_state);
        if (pr.feasible) {
            lo = cand;
            lo_state = std::move(pr.state);
            if (cand >= opts.max_lambda) {
                RscResult r;
                r.lambda = opts.max_lambda;
                r.binding = BindingKind::LAMBDA_CAP;
                r.state_at_limit = std::move(lo_state);
                r.capped = true;
                return r;
            }
            step *= 2.0;
        } else {
            hi = cand;
            hi_probe = std::move(pr);
            found_infeasible = true;
        }
    }

    while (hi - lo > opts.lambda_tol) {
        const double mid = 0.5 * (lo + hi);
        Probe pr = probe_lambda(solver, op, mid, lo_state);
        if (pr.feasible) {
            lo = mid;
            lo_state = std::move(pr.state);
        } else {
            hi = mid;
            hi_probe = std::move(pr);
        }
    }

    RscResult r;
    r.lambda = lo;
    r.state_at_limit = std::move(lo_state);
    if (!hi_probe.converged) {
        r.binding = BindingKind::NOSE;
        r.binding_index = -1;
    } else {
        r.binding = hi_probe.violations.front().kind;
        r.binding_index = hi_probe.violations.front().index;
    }
    return r;
}

RscResult max_lambda(const Network& net, const OperatingPoint& op, const CpfOptions& opts) {
    PowerFlowSolver solver(net, PowerFlowOptions{opts.pf_tol, opts.pf_max_iter});
    return max_lambda(solver, op, opts);
}

}  // namespace mgrsc
