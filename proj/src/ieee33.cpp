#include <cmath>

#include "mgrsc/network.hpp"

namespace mgrsc {
namespace {

struct LineRow {
    int from, to;
    double r_ohm, x_ohm;
    double load_p_kw, load_q_kvar;  // load at `to`
};

// Baran-Wu 33-bus feeder: branch impedances and the load at each branch's
// receiving bus. 12.66 kV, total load 3715 kW / 2300 kvar.
constexpr LineRow kLines[32] = {
    {1, 2, 0.0922, 0.0470, 100, 60},   {2, 3, 0.4930, 0.2511, 90, 40},
    {3, 4, 0.3660, 0.1864, 120, 80},   {4, 5, 0.3811, 0.1941, 60, 30},
    {5, 6, 0.8190, 0.7070, 60, 20},    {6, 7, 0.1872, 0.6188, 200, 100},
    {7, 8, 0.7114, 0.2351, 200, 100},  {8, 9, 1.0300, 0.7400, 60, 20},
    {9, 10, 1.0440, 0.7400, 60, 20},   {10, 11, 0.1966, 0.0650, 45, 30},
    {11, 12, 0.3744, 0.1238, 60, 35},  {12, 13, 1.4680, 1.1550, 60, 35},
    {13, 14, 0.5416, 0.7129, 120, 80}, {14, 15, 0.5910, 0.5260, 60, 10},
    {15, 16, 0.7463, 0.5450, 60, 20},  {16, 17, 1.2890, 1.7210, 60, 20},
    {17, 18, 0.7320, 0.5740, 90, 40},  {2, 19, 0.1640, 0.1565, 90, 40},
    {19, 20, 1.5042, 1.3554, 90, 40},  {20, 21, 0.4095, 0.4784, 90, 40},
    {21, 22, 0.7089, 0.9373, 90, 40},  {3, 23, 0.4512, 0.3083, 90, 50},
    {23, 24, 0.8980, 0.7091, 420, 200},{24, 25, 0.8960, 0.7011, 420, 200},
    {6, 26, 0.2030, 0.1034, 60, 25},   {26, 27, 0.2842, 0.1447, 60, 25},
    {27, 28, 1.0590, 0.9337, 60, 20},  {28, 29, 0.8042, 0.7006, 120, 70},
    {29, 30, 0.5075, 0.2585, 200, 600},{30, 31, 0.9744, 0.9630, 150, 70},
    {31, 32, 0.3105, 0.3619, 210, 100},{32, 33, 0.3410, 0.5302, 60, 40},
};

constexpr double kSBaseMva = 100.0;
constexpr double kVBaseKv = 12.66;
constexpr double kVMin = 0.90;
constexpr double kVMax = 1.10;

// Device siting is not given in the source network; one PV/WT/EV/DG/BESS
// group is placed on each of the four feeder sections (main 2-18 and the
// laterals at buses 19-22, 23-25, 26-33), with WT2/EV2 adjacent on buses
// 20/21. Edit the exported case file to change the placement.
constexpr int kPvBus[4] = {8, 19, 23, 28};
constexpr int kWtBus[4] = {12, 20, 24, 30};
constexpr int kEvBus[4] = {14, 21, 25, 32};
constexpr int kDgBus[4] = {6, 22, 25, 33};  // DG1 at bus 6 is the slack
constexpr int kBessBus[4] = {10, 21, 24, 31};

}  // namespace

Network builtin_ieee33() {
    const double zbase = kVBaseKv * kVBaseKv / kSBaseMva;

    std::vector<Bus> buses(33);
    for (int i = 0; i < 33; ++i) {
        buses[i].id = i + 1;
        buses[i].kind = BusKind::PQ;
        buses[i].v_min = kVMin;
        buses[i].v_max = kVMax;
    }
    buses[0].kind = BusKind::PCC;
    buses[kDgBus[0] - 1].kind = BusKind::SLACK;

    std::vector<Branch> branches;
    branches.reserve(32);
    for (const LineRow& row : kLines) {
        Branch br;
        br.from_bus = row.from;
        br.to_bus = row.to;
        br.r = row.r_ohm / zbase;
        br.x = row.x_ohm / zbase;
        // Generous ampacities: 0.25 pu on the trunk feeding the PCC, 0.15 pu
        // elsewhere, so thermal limits exist without dominating the margin.
        br.i_max = (row.to <= 6 && row.from <= 6) ? 0.25 : 0.15;
        branches.push_back(br);
        buses[row.to - 1].base_load_p = row.load_p_kw / 1000.0 / kSBaseMva;
        buses[row.to - 1].base_load_q = row.load_q_kvar / 1000.0 / kSBaseMva;
    }

    std::vector<Generator> gens;
    for (int b : kDgBus) {
        Generator g;
        g.bus = b;
        g.p_min = 0.0;
        g.p_max = 6.0 / kSBaseMva;
        g.q_min = -5.0 / kSBaseMva;
        g.q_max = 5.0 / kSBaseMva;
        g.power_factor = 0.93;
        g.dispatchable = true;
        gens.push_back(g);
    }

    std::vector<BessUnit> bess;
    for (int b : kBessBus) {
        BessUnit u;
        u.bus = b;
        u.p_min = -6.0 / kSBaseMva;
        u.p_max = 6.0 / kSBaseMva;
        u.capacity = 12.0 / kSBaseMva;  // per-unit-hours
        u.soc = 6.0 / kSBaseMva;
        bess.push_back(u);
    }

    std::vector<RandomDevice> devices;
    for (int k = 0; k < 4; ++k) {
        RandomDevice pv;
        pv.id = "pv" + std::to_string(k + 1);
        pv.kind = DeviceKind::PV;
        pv.bus = kPvBus[k];
        pv.rating = 2.0 / kSBaseMva;
        pv.power_factor = 1.0;
        devices.push_back(pv);
    }
    for (int k = 0; k < 4; ++k) {
        RandomDevice wt;
        wt.id = "wt" + std::to_string(k + 1);
        wt.kind = DeviceKind::WT;
        wt.bus = kWtBus[k];
        wt.rating = 2.25 / kSBaseMva;
        wt.power_factor = 0.85;
        devices.push_back(wt);
    }
    for (int k = 0; k < 4; ++k) {
        RandomDevice ev;
        ev.id = "ev" + std::to_string(k + 1);
        ev.kind = DeviceKind::EV;
        ev.bus = kEvBus[k];
        ev.rating = 2.0 / kSBaseMva;
        ev.power_factor = 1.0;
        devices.push_back(ev);
    }

    Network net(std::move(buses), std::move(branches), std::move(gens), std::move(bess),
                std::move(devices), kSBaseMva, kVBaseKv);
    return net.with_direction(build_direction(net, {kDgBus[0], kDgBus[1], kDgBus[2], kDgBus[3]}));
}

}  // namespace mgrsc
