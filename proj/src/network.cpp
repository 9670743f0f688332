#include "mgrsc/network.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "mgrsc/errors.hpp"

namespace mgrsc {

Network::Network(std::vector<Bus> buses, std::vector<Branch> branches,
                 std::vector<Generator> generators, std::vector<BessUnit> bess_units,
                 std::vector<RandomDevice> devices, double s_base_mva, double v_base_kv)
    : buses_(std::move(buses)),
      branches_(std::move(branches)),
      generators_(std::move(generators)),
      bess_units_(std::move(bess_units)),
      devices_(std::move(devices)),
      s_base_(s_base_mva),
      v_base_kv_(v_base_kv) {
    validate();
    for (int i = 0; i < bus_count(); ++i) {
        if (buses_[i].kind == BusKind::SLACK) slack_index_ = i;
        if (buses_[i].kind == BusKind::PCC) pcc_index_ = i;
    }
}

int Network::bus_index(int bus_id) const {
    for (int i = 0; i < bus_count(); ++i) {
        if (buses_[i].id == bus_id) return i;
    }
    throw ValidationError("unknown bus id " + std::to_string(bus_id));
}

const TransferDirection& Network::direction() const {
    if (!direction_) throw ValidationError("network has no transfer direction set");
    return *direction_;
}

Network Network::with_direction(TransferDirection dir) const {
    const int n = bus_count();
    if (dir.dp_gen.size() != n || dir.dp_load.size() != n || dir.dq_load.size() != n)
        throw ValidationError("transfer direction dimension does not match bus count");
    const double pcc_norm =
        std::hypot(dir.dp_load[pcc_index_], dir.dq_load[pcc_index_]);
    if (std::abs(pcc_norm - 1.0) > 1e-9)
        throw ValidationError("PCC block of transfer direction must have unit 2-norm");
    Network out = *this;
    out.direction_ = std::move(dir);
    return out;
}

Network Network::with_extra_bess(const BessUnit& unit) const {
    Network out = *this;
    out.bess_units_.push_back(unit);
    if (unit.bus < 1) throw ValidationError("BESS bus id must be positive");
    out.bus_index(unit.bus);  // existence check
    if (unit.p_min > 0.0 || unit.p_max < 0.0)
        throw ValidationError("BESS power limits must satisfy p_min <= 0 <= p_max");
    if (unit.soc < 0.0 || unit.soc > unit.capacity)
        throw ValidationError("BESS state of charge outside [0, capacity]");
    return out;
}

void Network::validate() const {
    if (buses_.empty()) throw ValidationError("network has no buses");
    if (s_base_ <= 0.0) throw ValidationError("s_base_mva must be positive");
    if (v_base_kv_ <= 0.0) throw ValidationError("v_base_kv must be positive");

    std::unordered_set<int> ids;
    int slack_count = 0, pcc_count = 0;
    for (const Bus& b : buses_) {
        if (!ids.insert(b.id).second)
            throw ValidationError("duplicate bus id " + std::to_string(b.id));
        if (b.v_min <= 0.0)
            throw ValidationError("bus " + std::to_string(b.id) + ": v_min must be > 0");
        if (b.v_min >= b.v_max)
            throw ValidationError("bus " + std::to_string(b.id) + ": v_min >= v_max");
        if (b.kind == BusKind::SLACK) ++slack_count;
        if (b.kind == BusKind::PCC) {
            ++pcc_count;
            if (b.id != 1) throw ValidationError("PCC must be bus 1");
        }
    }
    if (slack_count != 1) throw ValidationError("network must have exactly one slack bus");
    if (pcc_count != 1) throw ValidationError("network must have exactly one PCC bus");

    auto require_bus = [&](int id, const std::string& what) {
        if (!ids.count(id)) throw ValidationError(what + " references unknown bus " + std::to_string(id));
    };

    for (std::size_t k = 0; k < branches_.size(); ++k) {
        const Branch& br = branches_[k];
        require_bus(br.from_bus, "branch " + std::to_string(k + 1));
        require_bus(br.to_bus, "branch " + std::to_string(k + 1));
        if (br.from_bus == br.to_bus)
            throw ValidationError("branch " + std::to_string(k + 1) + " is a self-loop");
        if (br.r < 0.0)
            throw ValidationError("branch " + std::to_string(k + 1) + ": r must be >= 0");
        if (br.x == 0.0 && br.r <= 0.0)
            throw ValidationError("branch " + std::to_string(k + 1) + " has zero impedance");
        if (br.i_max < 0.0)
            throw ValidationError("branch " + std::to_string(k + 1) + ": i_max must be >= 0");
    }

    std::unordered_set<int> gen_buses;
    for (const Generator& g : generators_) {
        require_bus(g.bus, "generator");
        if (!gen_buses.insert(g.bus).second)
            throw ValidationError("more than one generator at bus " + std::to_string(g.bus));
        if (g.p_set < g.p_min || g.p_set > g.p_max)
            throw ValidationError("generator at bus " + std::to_string(g.bus) +
                                  ": p_set outside [p_min, p_max]");
        if (g.p_min > g.p_max)
            throw ValidationError("generator at bus " + std::to_string(g.bus) + ": p_min > p_max");
        if (g.q_min > g.q_max)
            throw ValidationError("generator at bus " + std::to_string(g.bus) + ": q_min > q_max");
        if (g.power_factor <= 0.0 || g.power_factor > 1.0)
            throw ValidationError("generator at bus " + std::to_string(g.bus) +
                                  ": power factor must be in (0, 1]");
    }

    for (const BessUnit& u : bess_units_) {
        require_bus(u.bus, "BESS");
        if (u.p_min > 0.0 || u.p_max < 0.0)
            throw ValidationError("BESS at bus " + std::to_string(u.bus) +
                                  ": limits must satisfy p_min <= 0 <= p_max");
        if (u.capacity < 0.0 || u.soc < 0.0 || u.soc > u.capacity)
            throw ValidationError("BESS at bus " + std::to_string(u.bus) +
                                  ": soc outside [0, capacity]");
    }

    for (const RandomDevice& d : devices_) {
        require_bus(d.bus, "device " + d.id);
        if (d.rating <= 0.0) throw ValidationError("device " + d.id + ": rating must be > 0");
        if (d.power_factor <= 0.0 || d.power_factor > 1.0)
            throw ValidationError("device " + d.id + ": power factor must be in (0, 1]");
        if (d.kind == DeviceKind::PV && !(0.0 < d.g_set && d.g_set < d.g_std))
            throw ValidationError("device " + d.id + ": requires 0 < g_set < g_std");
        if (d.kind == DeviceKind::WT && !(d.v_in < d.v_rated && d.v_rated < d.v_out))
            throw ValidationError("device " + d.id + ": requires v_in < v_rated < v_out");
    }

    // Connectivity over the branch graph.
    std::unordered_map<int, std::vector<int>> adj;
    for (const Branch& br : branches_) {
        adj[br.from_bus].push_back(br.to_bus);
        adj[br.to_bus].push_back(br.from_bus);
    }
    std::unordered_set<int> seen;
    std::vector<int> stack{buses_.front().id};
    seen.insert(buses_.front().id);
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (seen.insert(v).second) stack.push_back(v);
        }
    }
    if (seen.size() != buses_.size()) {
        for (const Bus& b : buses_) {
            if (!seen.count(b.id))
                throw ValidationError("network is disconnected: bus " + std::to_string(b.id) +
                                      " unreachable from bus " + std::to_string(buses_.front().id));
        }
    }
}

TransferDirection build_direction(const Network& net, const std::vector<int>& dispatch_buses) {
    if (dispatch_buses.empty())
        throw ValidationError("build_direction: dispatch set is empty");

    const int n = net.bus_count();
    TransferDirection dir;
    dir.dp_gen = Eigen::VectorXd::Zero(n);
    dir.dp_load = Eigen::VectorXd::Zero(n);
    dir.dq_load = Eigen::VectorXd::Zero(n);

    const double share = 1.0 / static_cast<double>(dispatch_buses.size());
    for (int bus_id : dispatch_buses) {
        const int idx = net.bus_index(bus_id);
        const bool ok = std::any_of(net.generators().begin(), net.generators().end(),
                                    [&](const Generator& g) { return g.bus == bus_id && g.dispatchable; });
        if (!ok)
            throw ValidationError("build_direction: bus " + std::to_string(bus_id) +
                                  " has no dispatchable generator");
        dir.dp_gen[idx] += share;
    }
    // Unit PCC block, pure active export.
    dir.dp_load[net.pcc_index()] = 1.0;
    return dir;
}

bool is_builtin_case(const std::string& id) { return id == "ieee33-modified"; }

}  // namespace mgrsc
