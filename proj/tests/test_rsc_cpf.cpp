#include <doctest.h>

#include <cmath>

#include "cases.hpp"
#include "mgrsc/errors.hpp"
#include "mgrsc/rsc_cpf.hpp"
#include "oracles.hpp"

using namespace mgrsc;

namespace {

// Base operating point: negated bus loads plus scheduled generator output.
OperatingPoint op_from(const Network& net) {
    const int n = net.bus_count();
    OperatingPoint op;
    op.base.p = Eigen::VectorXd::Zero(n);
    op.base.q = Eigen::VectorXd::Zero(n);
    op.gen_p = Eigen::VectorXd::Zero(n);
    op.gen_q = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        op.base.p[i] = -net.buses()[i].base_load_p;
        op.base.q[i] = -net.buses()[i].base_load_q;
    }
    for (const Generator& g : net.generators()) {
        const int i = net.bus_index(g.bus);
        const double q_set = g.p_set * std::tan(std::acos(g.power_factor));
        op.gen_p[i] += g.p_set;
        op.gen_q[i] += q_set;
        op.base.p[i] += g.p_set;
        op.base.q[i] += q_set;
    }
    return op;
}

void check_against_grid(const Network& net, double expect_min = 0.0) {
    const OperatingPoint op = op_from(net);
    const RscResult res = max_lambda(net, op);
    CHECK(res.lambda > expect_min);
    const double grid = oracle::grid_max_lambda(net, op, 1e-4, 10.0);
    REQUIRE(grid >= 0.0);
    CHECK(std::abs(res.lambda - grid) <= 2e-4);

    // The reported state is feasible at the limit...
    const PowerFlowSolver solver(net);
    CHECK(res.state_at_limit.converged);
    CHECK(check_limits(solver, op, res.state_at_limit, res.lambda).empty());
    // ...and a step of twice the tolerance beyond it is not.
    const double beyond = res.lambda + 2e-4;
    const PowerFlowState probe =
        solver.solve(injections_at(net, op, beyond), res.state_at_limit);
    CHECK((!probe.converged || !check_limits(solver, op, probe, beyond).empty()));
}

}  // namespace

TEST_CASE("injections scale linearly with lambda") {
    const Network net = cases::chain4().build({2});
    const OperatingPoint op = op_from(net);
    const Injections a = injections_at(net, op, 0.3);
    const Injections b = injections_at(net, op, 0.0);
    const TransferDirection& dir = net.direction();
    const Eigen::VectorXd dp = (a.p - b.p) / 0.3;
    CHECK((dp - (dir.dp_gen - dir.dp_load)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("voltage-limited export matches the dense grid oracle") {
    cases::Builder b = cases::chain4();
    b.buses[0].v_min = 0.95;
    b.generators[0].p_max = 5.0;  // keep the slack machine out of the way
    b.generators[0].q_min = -5.0;
    b.generators[0].q_max = 5.0;
    const Network net = b.build({2});
    check_against_grid(net, 0.5);
    const RscResult res = max_lambda(net, op_from(net));
    CHECK(res.binding == BindingKind::VOLTAGE);
    CHECK(binding_label(net, res.binding, res.binding_index) == "VOLTAGE(bus 1)");
    CHECK_FALSE(res.capped);
}

TEST_CASE("thermally limited export matches the dense grid oracle") {
    cases::Builder b = cases::chain4();
    b.branches[0].i_max = 0.5;
    const Network net = b.build({2});
    check_against_grid(net, 0.2);
    const RscResult res = max_lambda(net, op_from(net));
    CHECK(res.binding == BindingKind::THERMAL);
    CHECK(binding_label(net, res.binding, res.binding_index) == "THERMAL(branch 1-2)");
}

TEST_CASE("slack generator P limit binds and matches the grid oracle") {
    cases::Builder b = cases::chain4();
    b.generators[0].p_max = 0.30;
    const Network net = b.build({2});
    check_against_grid(net, 0.1);
    const RscResult res = max_lambda(net, op_from(net));
    CHECK(res.binding == BindingKind::GEN_P);
    CHECK(binding_label(net, res.binding, res.binding_index) == "GEN_P(bus 2)");
    // The slack picks up the export plus base load plus losses, so it binds
    // a little before lambda = p_max - base.
    CHECK(res.lambda < 0.30 - 0.025);
}

TEST_CASE("slack generator Q limit binds and matches the grid oracle") {
    cases::Builder b = cases::chain4();
    b.generators[0].q_max = 0.030;
    const Network net = b.build({2});
    check_against_grid(net, 0.1);
    const RscResult res = max_lambda(net, op_from(net));
    CHECK(res.binding == BindingKind::GEN_Q);
}

TEST_CASE("a non-slack dispatch generator ramps into its P limit analytically") {
    cases::Builder b = cases::chain4();
    b.generators[0].p_min = -1.0;  // slack absorbs the surplus from bus 3
    Generator g3;
    g3.bus = 3;
    g3.p_set = 0.10;
    g3.p_min = 0.0;
    g3.p_max = 0.30;
    g3.q_min = -1.0;
    g3.q_max = 1.0;
    g3.power_factor = 0.95;
    b.generators.push_back(g3);
    const Network net = b.build({2, 3});  // equal halves
    const RscResult res = max_lambda(net, op_from(net));
    // Output p_set + lambda/2 hits 0.30 at lambda = 0.4; no other limit is
    // near, so the answer is pure arithmetic up to the bisection width.
    CHECK(res.binding == BindingKind::GEN_P);
    CHECK(binding_label(net, res.binding, res.binding_index) == "GEN_P(bus 3)");
    CHECK(res.lambda == doctest::Approx(0.4).epsilon(3e-4));
}

TEST_CASE("collapse with no finite limit reports NOSE") {
    cases::Builder b = cases::chain4();
    for (Bus& bus : b.buses) {
        bus.v_min = 0.01;
        bus.v_max = 1.99;
    }
    b.generators[0].p_max = 50.0;
    b.generators[0].q_min = -50.0;
    b.generators[0].q_max = 50.0;
    const Network net = b.build({2});
    const RscResult res = max_lambda(net, op_from(net));
    CHECK(res.binding == BindingKind::NOSE);
    CHECK(res.lambda > 1.0);
    CHECK(res.state_at_limit.converged);
}

TEST_CASE("search cap reports LAMBDA_CAP with capped flag") {
    const Network net = cases::chain4().build({2});
    CpfOptions opts;
    opts.max_lambda = 0.05;
    const RscResult res = max_lambda(net, op_from(net), opts);
    CHECK(res.capped);
    CHECK(res.binding == BindingKind::LAMBDA_CAP);
    CHECK(res.lambda == doctest::Approx(0.05));
}

TEST_CASE("infeasible base case throws a coded error") {
    cases::Builder b = cases::chain4();
    b.buses[3].base_load_p = 0.30;  // deep voltage dip at the far end...
    b.buses[3].v_min = 0.985;       // ...below a floor the base already breaks
    const Network net = b.build({2});
    try {
        max_lambda(net, op_from(net));
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.code() == "INFEASIBLE_BASE");
        CHECK(std::string(e.what()).find("VOLTAGE") != std::string::npos);
    }
}

TEST_CASE("a limit just above the base point yields a small positive lambda") {
    cases::Builder b = cases::chain4();
    const Network probe_net = b.build({2});
    const OperatingPoint op0 = op_from(probe_net);
    const PowerFlowSolver probe(probe_net);
    const PowerFlowState base = probe.solve(injections_at(probe_net, op0, 0.0));
    REQUIRE(base.converged);
    // Pin the PCC voltage floor barely below its base value: the first
    // continuation step (0.01) already violates it, so the answer comes from
    // bisection alone and must still be positive, not an error.
    b.buses[0].v_min = base.v[probe_net.pcc_index()] - 1e-4;
    const Network net = b.build({2});
    const RscResult res = max_lambda(net, op_from(net));
    CHECK(res.lambda > 0.0);
    CHECK(res.lambda < 0.01);
    CHECK(res.binding == BindingKind::VOLTAGE);
}

TEST_CASE("check_limits reports violations in bus, branch, generator order") {
    cases::Builder b = cases::chain4();
    b.buses[3].v_min = 0.999;       // violated: the feeder end sags below this
    b.branches[1].i_max = 1e-4;     // violated: branch 2-3 feeds both loads
    b.generators[0].p_max = 1e-5;   // violated: slack covers load plus losses
    const Network net = b.build({2});
    const OperatingPoint op = op_from(net);
    const PowerFlowSolver solver(net);
    const PowerFlowState st = solver.solve(injections_at(net, op, 0.0));
    REQUIRE(st.converged);
    const std::vector<Violation> v = check_limits(solver, op, st, 0.0);
    REQUIRE(v.size() >= 3);
    CHECK(v[0].kind == BindingKind::VOLTAGE);
    CHECK(v[1].kind == BindingKind::THERMAL);
    CHECK(v[2].kind == BindingKind::GEN_P);
    for (const Violation& viol : v) CHECK(viol.value != viol.limit);
}

TEST_CASE("builtin case at its scheduled base point matches the grid oracle") {
    const Network net = builtin_ieee33();
    OperatingPoint op = op_from(net);
    // A plain feeder night point: no stochastic output, 2.4 MW of import.
    op.base.p[net.pcc_index()] += 0.024;
    const RscResult res = max_lambda(net, op);
    const double grid = oracle::grid_max_lambda(net, op, 1e-4, 10.0);
    CHECK(std::abs(res.lambda - grid) <= 2e-4);
    CHECK(res.lambda > 0.01);
}
