#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "cases.hpp"
#include "mgrsc/enhancement.hpp"
#include "mgrsc/errors.hpp"
#include "mgrsc/network.hpp"
#include "mgrsc/stochastic.hpp"

using namespace mgrsc;

namespace {

// Device list indices in the builtin case: pv1..pv4 = 0..3, wt1..wt4 = 4..7,
// ev1..ev4 = 8..11.
constexpr int kPv1 = 0, kPv2 = 1, kPv3 = 2, kWt1 = 4, kWt4 = 7, kEv4 = 11;

RandomDevice ev_at(int bus, const std::string& id, double rating_pu) {
    RandomDevice d;
    d.id = id;
    d.kind = DeviceKind::EV;
    d.bus = bus;
    d.rating = rating_pu;
    d.power_factor = 1.0;
    return d;
}

BessUnit unit_at(int bus, double p_lim, double capacity, double soc) {
    BessUnit u;
    u.bus = bus;
    u.p_min = -p_lim;
    u.p_max = p_lim;
    u.capacity = capacity;
    u.soc = soc;
    return u;
}

}  // namespace

TEST_CASE("devices on one feeder path group onto the nearest unit") {
    const Network net = builtin_ieee33();

    // pv1 (bus 8) and wt1 (bus 12) sit on the main feeder: one group, served
    // by the unit at bus 10 between them.
    const PlacementResult main_feeder = aggregate_by_branch(net, {kPv1, kWt1});
    REQUIRE(main_feeder.groups.size() == 1);
    CHECK(main_feeder.groups[0].device_indices == std::vector<int>{kPv1, kWt1});
    CHECK_FALSE(main_feeder.groups[0].added_unit);
    CHECK(net.bess_units()[static_cast<size_t>(main_feeder.groups[0].bess_index)].bus == 10);
    CHECK(main_feeder.net.bess_units().size() == net.bess_units().size());

    // pv2 (bus 19) and pv3 (bus 23) live on different laterals: two groups,
    // each with the unit on its own lateral.
    const PlacementResult laterals = aggregate_by_branch(net, {kPv2, kPv3});
    REQUIRE(laterals.groups.size() == 2);
    CHECK(net.bess_units()[static_cast<size_t>(laterals.groups[0].bess_index)].bus == 21);
    CHECK(net.bess_units()[static_cast<size_t>(laterals.groups[1].bess_index)].bus == 24);

    // wt4 (bus 30) and ev4 (bus 32): one group on the long lateral, unit at 31.
    const PlacementResult lateral3 = aggregate_by_branch(net, {kWt4, kEv4});
    REQUIRE(lateral3.groups.size() == 1);
    CHECK(net.bess_units()[static_cast<size_t>(lateral3.groups[0].bess_index)].bus == 31);

    // Duplicates collapse; an empty request places nothing.
    CHECK(aggregate_by_branch(net, {kPv1, kPv1, kWt1}).groups.size() == 1);
    CHECK(aggregate_by_branch(net, {}).groups.empty());
    CHECK_THROWS_AS(aggregate_by_branch(net, {99}), ValidationError);
}

TEST_CASE("equidistant units resolve to the lower unit index") {
    cases::Builder b = cases::chain4();
    b.devices.push_back(ev_at(3, "ev1", 0.01));
    b.bess.push_back(unit_at(4, 0.01, 0.02, 0.01));  // unit 0, one hop below
    b.bess.push_back(unit_at(2, 0.01, 0.02, 0.01));  // unit 1, one hop above
    const Network net = b.build({2});
    const PlacementResult r = aggregate_by_branch(net, {0});
    REQUIRE(r.groups.size() == 1);
    CHECK(r.groups[0].bess_index == 0);
}

TEST_CASE("a feeder with no reachable unit gets a new one at the shallowest bus") {
    cases::Builder plain = cases::chain4();
    plain.devices.push_back(ev_at(4, "ev1", 0.01));
    plain.devices.push_back(ev_at(3, "ev2", 0.01));
    const Network bare = plain.build({2});
    const PlacementResult added = aggregate_by_branch(bare, {0, 1});
    REQUIRE(added.groups.size() == 1);
    CHECK(added.groups[0].added_unit);
    CHECK(added.groups[0].bess_index == 0);
    REQUIRE(added.net.bess_units().size() == 1);
    const BessUnit& u = added.net.bess_units()[0];
    CHECK(u.bus == 3);  // shallowest member bus
    // Default sizing: 6 MW / 12 MWh at half charge (per-unit on 100 MVA).
    CHECK(u.p_max == doctest::Approx(0.06));
    CHECK(u.p_min == doctest::Approx(-0.06));
    CHECK(u.capacity == doctest::Approx(0.12));
    CHECK(u.soc == doctest::Approx(0.06));
    // The input network is untouched.
    CHECK(bare.bess_units().empty());
}

TEST_CASE("new units copy the sizing of the case's first unit") {
    // Existing storage on a side lateral the device cannot reach.
    cases::Builder b = cases::chain4();
    b.buses.push_back(cases::pq_bus(5));
    b.branches.push_back(cases::line(2, 5));
    b.bess.push_back(unit_at(5, 0.015, 0.05, 0.01));
    b.devices.push_back(ev_at(4, "ev1", 0.01));
    const Network net = b.build({2});
    const PlacementResult r = aggregate_by_branch(net, {0});
    REQUIRE(r.groups.size() == 1);
    CHECK(r.groups[0].added_unit);
    CHECK(r.groups[0].bess_index == 1);
    REQUIRE(r.net.bess_units().size() == 2);
    const BessUnit& u = r.net.bess_units()[1];
    CHECK(u.bus == 4);
    CHECK(u.p_max == doctest::Approx(0.015));
    CHECK(u.capacity == doctest::Approx(0.05));
    CHECK(u.soc == doctest::Approx(0.01));
}

TEST_CASE("placement refuses non-radial networks") {
    cases::Builder b = cases::chain4();
    b.branches.push_back(cases::line(2, 4));  // closes a loop
    b.devices.push_back(ev_at(3, "ev1", 0.01));
    const Network net = b.build({2});
    CHECK_THROWS_WITH_AS(aggregate_by_branch(net, {0}), doctest::Contains("radial"),
                         ValidationError);
}

TEST_CASE("the smoothing target restores members to their slot means") {
    cases::Builder b = cases::chain4();
    RandomDevice pv;
    pv.id = "pv1";
    pv.kind = DeviceKind::PV;
    pv.bus = 3;
    pv.rating = 0.02;
    pv.power_factor = 1.0;
    b.devices.push_back(pv);
    b.devices.push_back(ev_at(4, "ev1", 0.01));
    const Network net = b.build({2});
    const std::vector<std::string> cols = {"pv1", "ev1"};
    Eigen::VectorXd means(2);
    means << 0.010, 0.030;  // per-unit output means
    Eigen::RowVectorXd row(2);
    row << 2000.0, 5.0;  // full sun (0.02 pu), 5 MW of charging (0.05 pu)

    // Generation above its mean charges; load above its mean discharges.
    CHECK(smoothing_target(net, {0}, row, cols, means) == doctest::Approx(-0.010));
    CHECK(smoothing_target(net, {1}, row, cols, means) == doctest::Approx(0.020));
    CHECK(smoothing_target(net, {0, 1}, row, cols, means) == doctest::Approx(0.010));
    CHECK(smoothing_target(net, {}, row, cols, means) == 0.0);

    Eigen::VectorXd short_means(1);
    short_means << 0.01;
    CHECK_THROWS_AS(smoothing_target(net, {0}, row, cols, short_means), ValidationError);
    CHECK_THROWS_AS(smoothing_target(net, {0}, row, {"pv9", "ev1"}, means),
                    ValidationError);
}

TEST_CASE("SOC updates are discharge-positive and guarded") {
    const BessUnit u = unit_at(3, 0.06, 0.12, 0.06);
    CHECK(soc_update(u, 0.06, 0.02, 1.0) == doctest::Approx(0.04));
    CHECK(soc_update(u, 0.06, -0.02, 1.0) == doctest::Approx(0.08));
    CHECK(soc_update(u, 0.06, 0.02, 0.5) == doctest::Approx(0.05));
    CHECK(soc_update(u, 0.06, 0.06, 1.0) == doctest::Approx(0.0));
    CHECK(soc_update(u, 0.06, -0.06, 1.0) == doctest::Approx(0.12));
    CHECK_THROWS_AS(soc_update(u, 0.06, 0.07, 1.0), std::logic_error);
    CHECK_THROWS_AS(soc_update(u, 0.06, -0.07, 1.0), std::logic_error);
    CHECK_THROWS_AS(soc_update(u, 0.06, 0.01, 0.0), ValidationError);
}

TEST_CASE("the scheduler carries a worst-case SOC interval across slots") {
    cases::Builder b = cases::chain4();
    b.devices.push_back(ev_at(3, "ev1", 0.06));
    b.bess.push_back(unit_at(3, 0.02, 0.12, 0.06));
    const Network net = b.build({2});

    SampleSet s;
    s.time_slot = "t";
    s.device_ids = {"ev1"};
    s.data.resize(2, 1);
    s.data << 1.0, 5.0;  // MW; outputs 0.01 / 0.05 pu, mean 0.03
    const Eigen::VectorXd means = device_output_means(net, s);
    REQUIRE(means[0] == doctest::Approx(0.03));

    BessScheduler sched(net);
    std::vector<BessAssignment> groups(1);
    groups[0].bess_index = 0;
    groups[0].device_indices = {0};

    // Slot 1: targets -0.02/+0.02 pass the limiter untouched; the worst-case
    // interval widens by the command span.
    const auto s1 = sched.slot_commands(groups, s, means);
    CHECK(s1.commands(0, 0) == doctest::Approx(-0.02));
    CHECK(s1.commands(1, 0) == doctest::Approx(0.02));
    CHECK(s1.soc_lo[0] == doctest::Approx(0.04));
    CHECK(s1.soc_hi[0] == doctest::Approx(0.08));

    const auto s2 = sched.slot_commands(groups, s, means);
    CHECK(s2.soc_lo[0] == doctest::Approx(0.02));
    CHECK(s2.soc_hi[0] == doctest::Approx(0.10));

    const auto s3 = sched.slot_commands(groups, s, means);
    CHECK(s3.soc_lo[0] == doctest::Approx(0.0));
    CHECK(s3.soc_hi[0] == doctest::Approx(0.12));

    // Slot 4: the interval spans the whole capacity, so the limiter pins
    // every command to zero and the interval stops growing.
    const auto s4 = sched.slot_commands(groups, s, means);
    CHECK(s4.commands.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(s4.soc_lo[0] == doctest::Approx(0.0));
    CHECK(s4.soc_hi[0] == doctest::Approx(0.12));

    // Every realized trajectory the schedule admits stays within bounds.
    for (int r0 = 0; r0 < 2; ++r0)
        for (int r1 = 0; r1 < 2; ++r1) {
            double soc = net.bess_units()[0].soc;
            soc = soc_update(net.bess_units()[0], soc, s1.commands(r0, 0), 1.0);
            soc = soc_update(net.bess_units()[0], soc, s2.commands(r1, 0), 1.0);
            CHECK(soc >= 0.0);
            CHECK(soc <= 0.12);
        }
}

TEST_CASE("commands saturate at the unit's power rating") {
    cases::Builder b = cases::chain4();
    b.devices.push_back(ev_at(3, "ev1", 0.10));
    b.bess.push_back(unit_at(3, 0.005, 0.50, 0.25));  // tight power, ample energy
    const Network net = b.build({2});
    SampleSet s;
    s.time_slot = "t";
    s.device_ids = {"ev1"};
    s.data.resize(2, 1);
    s.data << 0.0, 8.0;  // targets -0.04 / +0.04 around the 0.04 mean
    const Eigen::VectorXd means = device_output_means(net, s);
    BessScheduler sched(net);
    std::vector<BessAssignment> groups(1);
    groups[0].bess_index = 0;
    groups[0].device_indices = {0};
    const auto out = sched.slot_commands(groups, s, means);
    CHECK(out.commands(0, 0) == doctest::Approx(-0.005));
    CHECK(out.commands(1, 0) == doctest::Approx(0.005));
}

TEST_CASE("groups sharing a unit merge before the limiter applies") {
    cases::Builder b = cases::chain4();
    b.devices.push_back(ev_at(3, "ev1", 0.01));
    b.devices.push_back(ev_at(4, "ev2", 0.01));
    b.bess.push_back(unit_at(3, 0.02, 0.12, 0.06));
    const Network net = b.build({2});
    SampleSet s;
    s.time_slot = "t";
    s.device_ids = {"ev1", "ev2"};
    s.data.resize(1, 2);
    s.data << 0.7, 0.8;  // 0.007 / 0.008 pu
    Eigen::VectorXd means(2);
    means << 0.003, 0.005;

    BessScheduler sched(net);
    std::vector<BessAssignment> two(2);
    two[0].bess_index = 0;
    two[0].device_indices = {0};
    two[1].bess_index = 0;
    two[1].device_indices = {1};
    const auto out = sched.slot_commands(two, s, means);
    CHECK(out.commands.rows() == 1);
    CHECK(out.commands.cols() == 1);
    CHECK(out.commands(0, 0) == doctest::Approx(0.007));  // (0.004 + 0.003) summed

    std::vector<BessAssignment> bad(1);
    bad[0].bess_index = 5;
    bad[0].device_indices = {0};
    CHECK_THROWS_AS(sched.slot_commands(bad, s, means), ValidationError);
    Eigen::VectorXd wrong(1);
    wrong << 0.003;
    CHECK_THROWS_AS(sched.slot_commands(two, s, wrong), ValidationError);
}

TEST_CASE("constant inputs produce zero commands and a frozen interval") {
    cases::Builder b = cases::chain4();
    b.devices.push_back(ev_at(3, "ev1", 0.01));
    b.bess.push_back(unit_at(3, 0.02, 0.12, 0.06));
    const Network net = b.build({2});
    SampleSet s;
    s.time_slot = "t";
    s.device_ids = {"ev1"};
    s.data = Eigen::MatrixXd::Constant(5, 1, 0.4);
    const Eigen::VectorXd means = device_output_means(net, s);
    BessScheduler sched(net);
    std::vector<BessAssignment> groups(1);
    groups[0].bess_index = 0;
    groups[0].device_indices = {0};
    const auto out = sched.slot_commands(groups, s, means);
    CHECK(out.commands.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(out.soc_lo[0] == doctest::Approx(0.06));
    CHECK(out.soc_hi[0] == doctest::Approx(0.06));
}

TEST_CASE("unassigned units stay silent") {
    cases::Builder b = cases::chain4();
    b.devices.push_back(ev_at(3, "ev1", 0.01));
    b.bess.push_back(unit_at(3, 0.02, 0.12, 0.06));
    b.bess.push_back(unit_at(4, 0.02, 0.12, 0.06));
    const Network net = b.build({2});
    SampleSet s;
    s.time_slot = "t";
    s.device_ids = {"ev1"};
    s.data.resize(2, 1);
    s.data << 1.0, 5.0;
    const Eigen::VectorXd means = device_output_means(net, s);
    BessScheduler sched(net);
    std::vector<BessAssignment> groups(1);
    groups[0].bess_index = 0;
    groups[0].device_indices = {0};
    const auto out = sched.slot_commands(groups, s, means);
    REQUIRE(out.commands.cols() == 2);
    CHECK(out.commands.col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(out.soc_lo[1] == doctest::Approx(0.06));
    CHECK(out.soc_hi[1] == doctest::Approx(0.06));
}
