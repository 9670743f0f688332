#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mgrsc {

// All electrical quantities are per-unit on the network s_base once loaded;
// case files carry MW/MVAr/ohm and are converted at parse time.

enum class BusKind { PCC, PQ, PV, SLACK };

struct Bus {
    int id = 0;  // 1-based external id
    BusKind kind = BusKind::PQ;
    double base_load_p = 0.0;
    double base_load_q = 0.0;
    double v_min = 0.9;
    double v_max = 1.1;
};

// i_max == 0 means no thermal limit.
struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;
    double x = 0.0;
    double i_max = 0.0;
};

// At most one generator per bus. p_set is the scheduled base-case active
// output; the continuation adds the per-bus ramping increment on top of it.
// Reactive output is fixed at p_set * tan(acos(power_factor)) except at the
// slack bus, whose P and Q both float to balance the network.
struct Generator {
    int bus = 0;
    double p_set = 0.0;
    double p_min = 0.0;
    double p_max = 0.0;
    double q_min = 0.0;
    double q_max = 0.0;
    double power_factor = 1.0;
    bool dispatchable = true;
};

// p_min <= 0 <= p_max; positive command = discharge (injection).
struct BessUnit {
    int bus = 0;
    double p_min = 0.0;
    double p_max = 0.0;
    double capacity = 0.0;  // per-unit-hours
    double soc = 0.0;       // per-unit-hours
};

enum class DeviceKind { PV, WT, EV };

// A stochastic PV plant, wind turbine, or EV charging station. The conversion
// breakpoints default to the values used throughout the test cases.
struct RandomDevice {
    std::string id;
    DeviceKind kind = DeviceKind::PV;
    int bus = 0;
    double rating = 0.0;      // per-unit P at full output
    double power_factor = 1.0;
    double g_set = 150.0;     // W/m^2, PV
    double g_std = 2000.0;    // W/m^2, PV
    double v_in = 4.0;        // m/s, WT
    double v_rated = 25.0;    // m/s, WT
    double v_out = 40.0;      // m/s, WT
};

// Per-bus power-transfer increments; the continuation parameter lambda scales
// these. The PCC block (-dp_load, -dq_load at bus 1) has unit 2-norm.
struct TransferDirection {
    Eigen::VectorXd dp_gen;   // per bus index (0-based)
    Eigen::VectorXd dp_load;
    Eigen::VectorXd dq_load;

    bool empty() const { return dp_gen.size() == 0; }
};

class Network {
public:
    Network(std::vector<Bus> buses, std::vector<Branch> branches,
            std::vector<Generator> generators, std::vector<BessUnit> bess_units,
            std::vector<RandomDevice> devices, double s_base_mva,
            double v_base_kv = 12.66);

    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Branch>& branches() const { return branches_; }
    const std::vector<Generator>& generators() const { return generators_; }
    const std::vector<BessUnit>& bess_units() const { return bess_units_; }
    const std::vector<RandomDevice>& devices() const { return devices_; }
    double s_base_mva() const { return s_base_; }
    double v_base_kv() const { return v_base_kv_; }

    int bus_count() const { return static_cast<int>(buses_.size()); }
    int slack_index() const { return slack_index_; }
    int pcc_index() const { return pcc_index_; }

    // 0-based internal index for an external bus id; throws on unknown id.
    int bus_index(int bus_id) const;

    const TransferDirection& direction() const;
    bool has_direction() const { return direction_.has_value(); }
    Network with_direction(TransferDirection dir) const;

    // Copy with one more BESS unit (used when enhancement sites a new one).
    Network with_extra_bess(const BessUnit& unit) const;

private:
    void validate() const;

    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::vector<Generator> generators_;
    std::vector<BessUnit> bess_units_;
    std::vector<RandomDevice> devices_;
    double s_base_ = 100.0;
    double v_base_kv_ = 12.66;
    int slack_index_ = -1;
    int pcc_index_ = -1;
    std::optional<TransferDirection> direction_;
};

// Builds the standard export direction: every bus in dispatch_buses gets an
// equal active-generation increment summing to 1, and the PCC gets a pure
// active load increment of 1 (so the PCC block is a unit vector and lambda is
// read directly as exported active power in per-unit).
TransferDirection build_direction(const Network& net, const std::vector<int>& dispatch_buses);

// The modified 33-bus microgrid: Baran-Wu line/load data plus four PV, WT and
// EV stations, four diesel units and four BESS spread over the feeders.
Network builtin_ieee33();

// True if `id` names a builtin case rather than a file path.
bool is_builtin_case(const std::string& id);

}  // namespace mgrsc
