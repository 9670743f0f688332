#pragma once

#include <vector>

#include <Eigen/Core>

#include "mgrsc/stochastic.hpp"

namespace mgrsc {

// One smoothing group: the BESS unit responsible for a set of dominant
// devices that share a root-to-leaf feeder path.
struct BessAssignment {
    int bess_index = -1;              // into the (possibly augmented) network's units
    std::vector<int> device_indices;  // into net.devices()
    bool added_unit = false;          // true when no existing unit sat on the feeder
};

struct PlacementResult {
    Network net;  // input network, plus any newly sited units
    std::vector<BessAssignment> groups;
};

// Groups dominant devices that lie on a common root-to-leaf path of the
// radial feeder (one is on the path from the root to the other) and assigns
// each group the nearest existing BESS on that path; when none exists, a new
// unit is sited at the group's shallowest bus, sized like the case's first
// unit (6 MW / 12 MWh when the case has none).
PlacementResult aggregate_by_branch(const Network& net, const std::vector<int>& dominant_devices);

// Unconstrained smoothing target for a group: restore every member device's
// output to its slot mean (generation deficit is discharged, surplus is
// charged; EV load surplus is discharged). All values per-unit.
double smoothing_target(const Network& net, const std::vector<int>& device_indices,
                        const Eigen::RowVectorXd& raw_row,
                        const std::vector<std::string>& column_ids,
                        const Eigen::VectorXd& output_means);

// One-slot state-of-charge update, discharge-positive. Throws if the result
// leaves [0, capacity] (the command limiter must prevent that).
double soc_update(const BessUnit& unit, double soc, double p_command, double dt_hours);

// Tracks the worst-case SOC interval of every unit across a sequence of
// slots: commands within a slot are limited so that any entering SOC in the
// tracked interval stays feasible, which keeps every realized trajectory
// inside the bounds no matter which realization each slot draws.
class BessScheduler {
public:
    explicit BessScheduler(const Network& net, double dt_hours = 1.0);

    struct SlotSchedule {
        Eigen::MatrixXd commands;  // realizations x units, per-unit, discharge-positive
        Eigen::VectorXd soc_lo;    // worst-case interval after the slot
        Eigen::VectorXd soc_hi;
    };

    // Commands for every realization of one slot. `groups` uses this
    // scheduler's network's unit indexing; unassigned units output 0.
    SlotSchedule slot_commands(const std::vector<BessAssignment>& groups,
                               const SampleSet& samples, const Eigen::VectorXd& output_means);

    const Network& net() const { return *net_; }
    double dt_hours() const { return dt_; }

private:
    const Network* net_;
    double dt_;
    Eigen::VectorXd soc_lo_, soc_hi_;
};

}  // namespace mgrsc
