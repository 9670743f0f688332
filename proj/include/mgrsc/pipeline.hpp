#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mgrsc/distribution.hpp"
#include "mgrsc/enhancement.hpp"
#include "mgrsc/pce.hpp"
#include "mgrsc/rsc_cpf.hpp"
#include "mgrsc/sensitivity.hpp"

namespace mgrsc {

enum class RunMode { ASSESS, SOBOL, ENHANCE, MCS, COMPARE };

RunMode parse_mode(const std::string& name);
const char* mode_name(RunMode mode);

struct RunConfig {
    std::string case_spec = "ieee33-modified";  // builtin id or case JSON path
    std::string samples_dir;                    // CSV ingestion mode
    std::string scenario_path;                  // synthetic sampling mode
    int n0 = 250;      // training sample count
    int ns = 10000;    // surrogate evaluation count
    int q = 2;         // PCE total degree
    double gamma = 0.95;
    double threshold = 0.80;
    bool use_total_order = false;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    RunMode mode = RunMode::ASSESS;
    CpfOptions cpf;
    double pcc_load_mw = 0.0;  // scheduled interchange for CSV slots (synthetic slots carry their own)
    int histogram_bins = 40;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

// One slot's resolved inputs.
struct SlotData {
    SampleSet samples;
    double pcc_load_mw = 0.0;
};

// Synthetic slots from the scenario spec (n = cfg.ns rows each), or CSV
// slots from the samples directory (sorted by file name).
std::vector<SlotData> load_slots(const RunConfig& cfg);

// Per-row CPF solves; `commands` (realizations x units) may be null for no
// storage action. Row range [begin, end). Throws with slot/row context when a
// realization has an infeasible base case.
struct RowSolveResult {
    Eigen::VectorXd lambda;
    std::vector<BindingKind> binding;
    std::vector<int> binding_index;
};
RowSolveResult solve_rows(const PowerFlowSolver& solver, const InjectionAssembler& assembler,
                          const Eigen::MatrixXd& data, const Eigen::MatrixXd* commands,
                          int begin, int end, const CpfOptions& opts, int threads,
                          const std::string& slot_label);

// Train on the first n0 rows, predict on all rows.
struct SlotAssessment {
    std::string slot;
    PceModel model;
    RscDistribution surrogate;
    RowSolveResult training;
    double rsc_conf = 0.0;
    double train_seconds = 0.0;    // CPF solves for the training rows
    double predict_seconds = 0.0;  // surrogate evaluation over all rows
};
SlotAssessment assess_slot(const Network& net, const SlotData& slot, const RunConfig& cfg,
                           const Eigen::MatrixXd* commands = nullptr);

// Direct CPF on every row (the benchmark oracle).
struct McsRun {
    RowSolveResult rows;
    RscDistribution dist;
    double seconds = 0.0;
};
McsRun mcs_slot(const Network& net, const SlotData& slot, const RunConfig& cfg,
                const Eigen::MatrixXd* commands = nullptr);

// Full enhancement pass over all slots: per-slot assessment and dominance
// ranking, one common BESS augmentation, then a sequential smoothing schedule
// (SOC coupled across slots) and post-smoothing re-assessment.
struct SlotEnhancement {
    SlotAssessment pre;
    bool smoothed = false;  // false when the surrogate variance is zero
    SobolReport sobol;      // valid when smoothed
    DominanceResult dominant;
    std::vector<int> dominant_devices;  // device indices on the common network
    std::vector<BessAssignment> groups;
    Eigen::MatrixXd commands;
    Eigen::VectorXd soc_lo, soc_hi;  // worst-case interval after the slot
    SlotAssessment post;
};
struct EnhancementRun {
    Network net;  // common augmented network
    std::vector<SlotEnhancement> slots;
};
EnhancementRun run_enhancement(const Network& net, const std::vector<SlotData>& slots,
                               const RunConfig& cfg);

// Executes cfg.mode end to end and writes per-slot artifacts plus a run
// summary under cfg.out_dir. `log` receives human-readable progress (timing
// lives only there so written artifacts stay byte-identical across reruns).
void run_pipeline(const RunConfig& cfg, std::ostream& log);

}  // namespace mgrsc
