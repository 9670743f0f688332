#include <doctest.h>

#include <cmath>
#include <fstream>

#include "cases.hpp"
#include "mgrsc/case_io.hpp"
#include "mgrsc/errors.hpp"
#include "mgrsc/network.hpp"

using namespace mgrsc;

TEST_CASE("builtin 33-bus case is well-formed") {
    const Network net = builtin_ieee33();
    CHECK(net.bus_count() == 33);
    CHECK(net.branches().size() == 32);
    CHECK(net.buses()[net.pcc_index()].id == 1);
    CHECK(net.buses()[net.slack_index()].id == 6);
    CHECK(net.generators().size() == 4);
    CHECK(net.bess_units().size() == 4);
    CHECK(net.devices().size() == 12);
    CHECK(net.s_base_mva() == 100.0);
    CHECK(net.v_base_kv() == doctest::Approx(12.66));

    // Total base load of the feeder: 3.715 MW / 2.3 MVAr.
    double p = 0.0, q = 0.0;
    for (const Bus& b : net.buses()) {
        p += b.base_load_p;
        q += b.base_load_q;
    }
    CHECK(p * net.s_base_mva() == doctest::Approx(3.715).epsilon(1e-12));
    CHECK(q * net.s_base_mva() == doctest::Approx(2.300).epsilon(1e-12));

    // First branch: 0.0922 ohm on Zbase = 12.66^2 / 100.
    const double zbase = 12.66 * 12.66 / 100.0;
    CHECK(net.branches()[0].r == doctest::Approx(0.0922 / zbase).epsilon(1e-12));
    CHECK(net.branches()[0].x == doctest::Approx(0.0470 / zbase).epsilon(1e-12));

    CHECK(is_builtin_case("ieee33-modified"));
    CHECK_FALSE(is_builtin_case("ieee14"));
}

TEST_CASE("builtin direction: equal dispatch shares, unit PCC block") {
    const Network net = builtin_ieee33();
    REQUIRE(net.has_direction());
    const TransferDirection& dir = net.direction();
    CHECK(dir.dp_gen.sum() == doctest::Approx(1.0).epsilon(1e-14));
    // Four dispatchable units share equally.
    int touched = 0;
    for (int i = 0; i < net.bus_count(); ++i)
        if (dir.dp_gen[i] != 0.0) {
            ++touched;
            CHECK(dir.dp_gen[i] == doctest::Approx(0.25).epsilon(1e-14));
        }
    CHECK(touched == 4);
    const int pcc = net.pcc_index();
    CHECK(dir.dp_load[pcc] == doctest::Approx(1.0));
    CHECK(dir.dq_load[pcc] == 0.0);
    const double norm = std::hypot(dir.dp_load[pcc], dir.dq_load[pcc]);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("network validation rejects malformed inputs") {
    SUBCASE("duplicate bus id") {
        cases::Builder b = cases::chain3();
        b.buses[2].id = 2;
        CHECK_THROWS_AS(b.build(), ValidationError);
    }
    SUBCASE("branch to unknown bus") {
        cases::Builder b = cases::chain3();
        b.branches[1].to_bus = 9;
        CHECK_THROWS_AS(b.build(), ValidationError);
    }
    SUBCASE("two slack buses") {
        cases::Builder b = cases::chain3();
        b.buses[2].kind = BusKind::SLACK;
        CHECK_THROWS_AS(b.build(), ValidationError);
    }
    SUBCASE("no PCC") {
        cases::Builder b = cases::chain3();
        b.buses[0].kind = BusKind::PQ;
        CHECK_THROWS_AS(b.build(), ValidationError);
    }
    SUBCASE("disconnected bus") {
        cases::Builder b = cases::chain4();
        b.branches.pop_back();
        CHECK_THROWS_AS(b.build(), ValidationError);
    }
    SUBCASE("BESS state of charge above capacity") {
        cases::Builder b = cases::chain3();
        b.bess.push_back({3, -0.01, 0.01, 0.02, 0.05});
        CHECK_THROWS_AS(b.build(), ValidationError);
    }
    SUBCASE("two generators on one bus") {
        cases::Builder b = cases::chain3();
        b.generators.push_back(b.generators[0]);
        CHECK_THROWS_AS(b.build(), ValidationError);
    }
    SUBCASE("generator setpoint outside its band") {
        cases::Builder b = cases::chain3();
        b.generators[0].p_set = 2.0;  // p_max is 1.0
        CHECK_THROWS_AS(b.build(), ValidationError);
    }
    SUBCASE("valid chain builds") { CHECK_NOTHROW(cases::chain4().build({2})); }
}

TEST_CASE("with_direction rejects a non-unit PCC block") {
    const Network net = cases::chain3().build();
    TransferDirection dir;
    dir.dp_gen = Eigen::VectorXd::Zero(3);
    dir.dp_load = Eigen::VectorXd::Zero(3);
    dir.dq_load = Eigen::VectorXd::Zero(3);
    dir.dp_gen[1] = 1.0;
    dir.dp_load[net.pcc_index()] = 0.5;  // norm 0.5, not 1
    CHECK_THROWS_AS(net.with_direction(dir), ValidationError);
    dir.dq_load[net.pcc_index()] = std::sqrt(0.75);
    CHECK_NOTHROW(net.with_direction(dir));
}

TEST_CASE("with_extra_bess appends and keeps everything else") {
    const Network net = cases::chain3().build({2});
    const Network aug = net.with_extra_bess({3, -0.02, 0.02, 0.05, 0.025});
    CHECK(aug.bess_units().size() == net.bess_units().size() + 1);
    CHECK(aug.bess_units().back().bus == 3);
    CHECK(aug.has_direction());
    CHECK(aug.v_base_kv() == net.v_base_kv());
}

TEST_CASE("case JSON round trip preserves the network") {
    const Network net = builtin_ieee33();
    const auto doc = case_to_json(net, "ieee33-modified");
    const Network back = case_from_json(doc);
    CHECK(back.bus_count() == net.bus_count());
    CHECK(back.devices().size() == net.devices().size());
    for (int i = 0; i < net.bus_count(); ++i) {
        CHECK(back.buses()[i].base_load_p == doctest::Approx(net.buses()[i].base_load_p));
        CHECK(back.buses()[i].v_min == doctest::Approx(net.buses()[i].v_min));
    }
    for (std::size_t k = 0; k < net.branches().size(); ++k) {
        CHECK(back.branches()[k].r == doctest::Approx(net.branches()[k].r).epsilon(1e-12));
        CHECK(back.branches()[k].i_max == doctest::Approx(net.branches()[k].i_max).epsilon(1e-12));
    }
    for (std::size_t g = 0; g < net.generators().size(); ++g)
        CHECK(back.generators()[g].p_max == doctest::Approx(net.generators()[g].p_max));
    // Direction survives (same dispatch buses).
    REQUIRE(back.has_direction());
    CHECK((back.direction().dp_gen - net.direction().dp_gen).cwiseAbs().maxCoeff() < 1e-12);
    // A second serialization is byte-identical.
    CHECK(case_to_json(back, "ieee33-modified").dump(2) == doc.dump(2));
}

TEST_CASE("case files load from disk and resolve by name") {
    const auto dir = cases::temp_dir("caseio");
    const std::string path = (dir / "net.json").string();
    save_case_file(builtin_ieee33(), path, "ieee33-modified");
    const Network net = load_case_file(path);
    CHECK(net.bus_count() == 33);
    CHECK(resolve_case("ieee33-modified").bus_count() == 33);
    CHECK(resolve_case(path).bus_count() == 33);
    CHECK_THROWS_AS(resolve_case((dir / "missing.json").string()), ValidationError);
}

TEST_CASE("case parser reports the offending element") {
    const auto doc = case_to_json(builtin_ieee33(), "x");
    SUBCASE("unknown bus kind") {
        auto bad = doc;
        bad["buses"][3]["kind"] = "swing";
        try {
            case_from_json(bad);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("buses[3]") != std::string::npos);
        }
    }
    SUBCASE("missing field") {
        auto bad = doc;
        bad["branches"][5].erase("r_ohm");
        CHECK_THROWS_AS(case_from_json(bad), ValidationError);
    }
    SUBCASE("negative device rating") {
        auto bad = doc;
        bad["random_devices"][0]["rating_mw"] = -1.0;
        CHECK_THROWS_AS(case_from_json(bad), ValidationError);
    }
    SUBCASE("unknown device type") {
        auto bad = doc;
        bad["random_devices"][0]["type"] = "chp";
        CHECK_THROWS_AS(case_from_json(bad), ValidationError);
    }
}
