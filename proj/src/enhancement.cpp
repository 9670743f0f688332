#include "mgrsc/enhancement.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "mgrsc/errors.hpp"

namespace mgrsc {
namespace {

// Parent/depth arrays of the radial feeder rooted at the PCC.
struct FeederTree {
    std::vector<int> parent;  // bus index -> parent bus index (-1 at root)
    std::vector<int> depth;
};

FeederTree build_tree(const Network& net) {
    const int n = net.bus_count();
    if (static_cast<int>(net.branches().size()) != n - 1)
        throw ValidationError("BESS placement requires a radial network (branch count " +
                              std::to_string(net.branches().size()) + " != buses-1)");
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (const Branch& br : net.branches()) {
        const int a = net.bus_index(br.from_bus);
        const int b = net.bus_index(br.to_bus);
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    }
    FeederTree t;
    t.parent.assign(static_cast<size_t>(n), -2);
    t.depth.assign(static_cast<size_t>(n), 0);
    std::vector<int> queue{net.pcc_index()};
    t.parent[static_cast<size_t>(net.pcc_index())] = -1;
    for (size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (int v : adj[static_cast<size_t>(u)]) {
            if (t.parent[static_cast<size_t>(v)] != -2) continue;
            t.parent[static_cast<size_t>(v)] = u;
            t.depth[static_cast<size_t>(v)] = t.depth[static_cast<size_t>(u)] + 1;
            queue.push_back(v);
        }
    }
    return t;
}

bool is_ancestor_or_self(const FeederTree& t, int a, int b) {
    // climbs from b; true when a lies on the root path of b
    while (b != -1) {
        if (b == a) return true;
        b = t.parent[static_cast<size_t>(b)];
    }
    return false;
}

bool share_root_path(const FeederTree& t, int a, int b) {
    return is_ancestor_or_self(t, a, b) || is_ancestor_or_self(t, b, a);
}

int tree_distance(const FeederTree& t, int a, int b) {
    int da = t.depth[static_cast<size_t>(a)], db = t.depth[static_cast<size_t>(b)];
    int dist = 0;
    while (da > db) {
        a = t.parent[static_cast<size_t>(a)];
        --da;
        ++dist;
    }
    while (db > da) {
        b = t.parent[static_cast<size_t>(b)];
        --db;
        ++dist;
    }
    while (a != b) {
        a = t.parent[static_cast<size_t>(a)];
        b = t.parent[static_cast<size_t>(b)];
        dist += 2;
    }
    return dist;
}

}  // namespace

PlacementResult aggregate_by_branch(const Network& net,
                                    const std::vector<int>& dominant_devices) {
    std::vector<int> devs;
    for (int d : dominant_devices) {
        if (d < 0 || d >= static_cast<int>(net.devices().size()))
            throw ValidationError("aggregate_by_branch: device index out of range");
        if (std::find(devs.begin(), devs.end(), d) == devs.end()) devs.push_back(d);
    }
    PlacementResult result{net, {}};
    if (devs.empty()) return result;

    const FeederTree tree = build_tree(net);
    auto dev_bus = [&](int d) { return net.bus_index(net.devices()[static_cast<size_t>(d)].bus); };

    // Union devices whose buses lie on one root-to-leaf path.
    std::vector<int> group_of(devs.size());
    for (size_t i = 0; i < devs.size(); ++i) group_of[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int i) {
        while (group_of[static_cast<size_t>(i)] != i) i = group_of[static_cast<size_t>(i)];
        return i;
    };
    for (size_t i = 0; i < devs.size(); ++i)
        for (size_t j = i + 1; j < devs.size(); ++j)
            if (share_root_path(tree, dev_bus(devs[i]), dev_bus(devs[j])))
                group_of[static_cast<size_t>(find(static_cast<int>(j)))] =
                    find(static_cast<int>(i));

    std::map<int, std::vector<int>> groups;  // representative -> device list (ordered)
    for (size_t i = 0; i < devs.size(); ++i)
        groups[find(static_cast<int>(i))].push_back(devs[i]);

    Network augmented = net;
    for (const auto& [rep, members] : groups) {
        BessAssignment assign;
        assign.device_indices = members;

        // Nearest existing unit sharing a root path with any member.
        int best_unit = -1, best_dist = 0;
        for (size_t u = 0; u < net.bess_units().size(); ++u) {
            const int ubus = net.bus_index(net.bess_units()[u].bus);
            int dist = -1;
            for (int d : members) {
                const int mbus = dev_bus(d);
                if (!share_root_path(tree, ubus, mbus)) continue;
                const int h = tree_distance(tree, ubus, mbus);
                if (dist < 0 || h < dist) dist = h;
            }
            if (dist >= 0 && (best_unit < 0 || dist < best_dist)) {
                best_unit = static_cast<int>(u);
                best_dist = dist;
            }
        }

        if (best_unit >= 0) {
            assign.bess_index = best_unit;
        } else {
            // Site a new unit at the group's shallowest bus.
            int site = dev_bus(members.front());
            for (int d : members) {
                const int b = dev_bus(d);
                if (tree.depth[static_cast<size_t>(b)] < tree.depth[static_cast<size_t>(site)] ||
                    (tree.depth[static_cast<size_t>(b)] == tree.depth[static_cast<size_t>(site)] &&
                     net.buses()[static_cast<size_t>(b)].id <
                         net.buses()[static_cast<size_t>(site)].id))
                    site = b;
            }
            BessUnit unit;
            if (!net.bess_units().empty()) {
                unit = net.bess_units().front();
            } else {
                unit.p_min = -0.06;
                unit.p_max = 0.06;
                unit.capacity = 0.12;
                unit.soc = 0.06;
            }
            unit.bus = net.buses()[static_cast<size_t>(site)].id;
            assign.bess_index = static_cast<int>(augmented.bess_units().size());
            assign.added_unit = true;
            augmented = augmented.with_extra_bess(unit);
        }
        result.groups.push_back(std::move(assign));
    }
    result.net = std::move(augmented);
    return result;
}

double smoothing_target(const Network& net, const std::vector<int>& device_indices,
                        const Eigen::RowVectorXd& raw_row,
                        const std::vector<std::string>& column_ids,
                        const Eigen::VectorXd& output_means) {
    if (raw_row.size() != static_cast<Eigen::Index>(column_ids.size()) ||
        output_means.size() != raw_row.size())
        throw ValidationError("smoothing_target: row/means/column dimensions disagree");

    double target = 0.0;
    for (int d : device_indices) {
        const RandomDevice& dev = net.devices()[static_cast<size_t>(d)];
        const auto it = std::find(column_ids.begin(), column_ids.end(), dev.id);
        if (it == column_ids.end())
            throw ValidationError("smoothing_target: no sample column for device " + dev.id);
        const Eigen::Index c = it - column_ids.begin();
        const double p = device_power(raw_row[c], dev, net.s_base_mva());
        if (dev.kind == DeviceKind::EV)
            target += p - output_means[c];  // load above its mean -> discharge
        else
            target += output_means[c] - p;  // generation below its mean -> discharge
    }
    return target;
}

double soc_update(const BessUnit& unit, double soc, double p_command, double dt_hours) {
    if (dt_hours <= 0.0) throw ValidationError("soc_update: dt must be positive");
    const double next = soc - p_command * dt_hours;
    if (next < -1e-12 || next > unit.capacity + 1e-12)
        throw std::logic_error("soc_update: command drives SOC outside [0, capacity]; "
                               "the command limiter should have prevented this");
    return std::clamp(next, 0.0, unit.capacity);
}

BessScheduler::BessScheduler(const Network& net, double dt_hours) : net_(&net), dt_(dt_hours) {
    if (dt_ <= 0.0) throw ValidationError("BessScheduler: dt must be positive");
    const auto& units = net.bess_units();
    soc_lo_.resize(static_cast<Eigen::Index>(units.size()));
    soc_hi_.resize(static_cast<Eigen::Index>(units.size()));
    for (size_t u = 0; u < units.size(); ++u) {
        soc_lo_[static_cast<Eigen::Index>(u)] = units[u].soc;
        soc_hi_[static_cast<Eigen::Index>(u)] = units[u].soc;
    }
}

BessScheduler::SlotSchedule BessScheduler::slot_commands(
    const std::vector<BessAssignment>& groups, const SampleSet& samples,
    const Eigen::VectorXd& output_means) {
    validate_sample_set(samples);
    if (output_means.size() != samples.dim())
        throw ValidationError("slot_commands: means do not match sample columns");
    const auto& units = net_->bess_units();
    const int n = samples.n();
    const Eigen::Index n_units = static_cast<Eigen::Index>(units.size());

    // Merge groups that landed on the same unit so its limits apply to the
    // combined target.
    std::map<int, std::vector<int>> per_unit;
    for (const BessAssignment& g : groups) {
        if (g.bess_index < 0 || g.bess_index >= static_cast<int>(units.size()))
            throw ValidationError("slot_commands: assignment references unknown BESS unit");
        auto& devs = per_unit[g.bess_index];
        devs.insert(devs.end(), g.device_indices.begin(), g.device_indices.end());
    }

    SlotSchedule sched;
    sched.commands = Eigen::MatrixXd::Zero(n, n_units);

    Eigen::VectorXd cmd_min = Eigen::VectorXd::Zero(n_units);
    Eigen::VectorXd cmd_max = Eigen::VectorXd::Zero(n_units);
    for (const auto& [u, devs] : per_unit) {
        const BessUnit& unit = units[static_cast<size_t>(u)];
        // Power window that keeps any SOC in the entering worst-case interval
        // feasible after this slot.
        // Both windows straddle zero: hi_cmd >= 0 (p_max >= 0, soc_lo >= 0)
        // and lo_cmd <= 0, so the clamp below is always well-ordered.
        const double hi_cmd = std::min(unit.p_max, soc_lo_[u] / dt_);
        const double lo_cmd = std::max(unit.p_min, -(unit.capacity - soc_hi_[u]) / dt_);
        for (int r = 0; r < n; ++r) {
            const double target =
                smoothing_target(*net_, devs, samples.data.row(r), samples.device_ids,
                                 output_means);
            const double cmd = std::clamp(target, lo_cmd, hi_cmd);
            sched.commands(r, u) = cmd;
            cmd_min[u] = std::min(cmd_min[u], cmd);
            cmd_max[u] = std::max(cmd_max[u], cmd);
        }
    }

    soc_lo_ = (soc_lo_ - cmd_max * dt_).cwiseMax(0.0);
    soc_hi_ = soc_hi_ - cmd_min * dt_;
    for (Eigen::Index u = 0; u < n_units; ++u)
        soc_hi_[u] = std::min(soc_hi_[u], units[static_cast<size_t>(u)].capacity);
    sched.soc_lo = soc_lo_;
    sched.soc_hi = soc_hi_;
    return sched;
}

}  // namespace mgrsc
