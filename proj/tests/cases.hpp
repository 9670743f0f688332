#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mgrsc/network.hpp"

// Small hand-made networks shared by the test files.
namespace cases {

struct Builder {
    std::vector<mgrsc::Bus> buses;
    std::vector<mgrsc::Branch> branches;
    std::vector<mgrsc::Generator> generators;
    std::vector<mgrsc::BessUnit> bess;
    std::vector<mgrsc::RandomDevice> devices;
    double s_base = 100.0;
    double v_base = 12.66;

    mgrsc::Network build(const std::vector<int>& dispatch = {}) const {
        mgrsc::Network net(buses, branches, generators, bess, devices, s_base, v_base);
        if (!dispatch.empty())
            return net.with_direction(mgrsc::build_direction(net, dispatch));
        return net;
    }
};

inline mgrsc::Bus pq_bus(int id) {
    mgrsc::Bus bus;
    bus.id = id;
    bus.kind = mgrsc::BusKind::PQ;
    bus.v_min = 0.80;
    bus.v_max = 1.20;
    return bus;
}

inline mgrsc::Branch line(int from, int to, double r = 0.03, double x = 0.05) {
    mgrsc::Branch br;
    br.from_bus = from;
    br.to_bus = to;
    br.r = r;
    br.x = x;
    return br;
}

// 1 (PCC) -- 2 (slack generator) -- 3 -- 4, with mild loads on buses 3 and 4.
// Wide default limits; individual tests tighten the one they exercise.
inline Builder chain4() {
    Builder b;
    for (int i = 1; i <= 4; ++i) {
        mgrsc::Bus bus;
        bus.id = i;
        bus.kind = i == 1 ? mgrsc::BusKind::PCC
                          : (i == 2 ? mgrsc::BusKind::SLACK : mgrsc::BusKind::PQ);
        bus.v_min = 0.80;
        bus.v_max = 1.20;
        b.buses.push_back(bus);
    }
    b.buses[2].base_load_p = 0.010;  // 1 MW
    b.buses[2].base_load_q = 0.004;
    b.buses[3].base_load_p = 0.015;
    b.buses[3].base_load_q = 0.006;
    for (int i = 0; i < 3; ++i) {
        mgrsc::Branch br;
        br.from_bus = i + 1;
        br.to_bus = i + 2;
        br.r = 0.03;
        br.x = 0.05;
        b.branches.push_back(br);
    }
    mgrsc::Generator g;
    g.bus = 2;
    g.p_min = 0.0;
    g.p_max = 1.0;  // 100 MW: effectively unbounded for these tests
    g.q_min = -1.0;
    g.q_max = 1.0;
    b.generators.push_back(g);
    return b;
}

// 1 (PCC) -- 2 (slack generator) -- 3 (load + optional device).
inline Builder chain3() {
    Builder b = chain4();
    b.buses.pop_back();
    b.branches.pop_back();
    return b;
}

// Unique temp directory for tests that write files.
inline std::filesystem::path temp_dir(const std::string& tag) {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / ("mgrsc_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace cases
