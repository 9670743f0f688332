#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mgrsc/network.hpp"
#include "mgrsc/rsc_cpf.hpp"

namespace mgrsc {

// One time slot's worth of input realizations. Rows are realizations;
// columns are random variables in physical units (W/m² for radiation, m/s
// for wind speed, MW for EV charging power), bound to devices by id.
struct SampleSet {
    Eigen::MatrixXd data;
    std::vector<std::string> device_ids;  // one per column
    std::string time_slot;

    int n() const { return static_cast<int>(data.rows()); }
    int dim() const { return static_cast<int>(data.cols()); }
};

// Throws ValidationError unless rows >= 1, all entries finite, and the
// column count matches the declared ids.
void validate_sample_set(const SampleSet& s);

// Raw moments mu(k, i) = (1/N) sum_n x_{n,i}^k for k = 0..max_order, taken
// directly on the given data. Zero-variance columns are flagged degenerate
// and given the placeholder moments {1, 0, 0, ...}.
struct MomentTable {
    enum class Source { EMPIRICAL, ANALYTIC };
    Eigen::MatrixXd mu;  // (max_order+1) x D
    std::vector<bool> degenerate;
    Source source = Source::EMPIRICAL;

    int max_order() const { return static_cast<int>(mu.rows()) - 1; }
    int dim() const { return static_cast<int>(mu.cols()); }
};

MomentTable raw_moments(const Eigen::MatrixXd& data, int max_order);

// Per-column affine map to zero mean and unit (population) variance, fitted
// once on the training sample and reapplied to every later sample. Degenerate
// columns keep scale 1 and are flagged.
struct Standardization {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
    std::vector<bool> degenerate;

    int dim() const { return static_cast<int>(mean.size()); }
};

Standardization fit_standardization(const Eigen::MatrixXd& data);
Eigen::MatrixXd apply_standardization(const Standardization& s, const Eigen::MatrixXd& data);

// Conversion curves from weather to per-unit active power. Negative inputs
// are rejected.
double pv_power(double radiation_wm2, const RandomDevice& dev);
double wt_power(double speed_ms, const RandomDevice& dev);
// Dispatch on device kind; EV values are charging power in MW (converted to
// per-unit consumption by the caller's sign convention).
double device_power(double raw_value, const RandomDevice& dev, double s_base_mva);

// Precomputes the static part of the injection pattern (base loads,
// scheduled generator outputs, scheduled PCC interchange) and binds sample
// columns to devices, so per-realization assembly in the Monte Carlo loop is
// a cheap add. pcc_load_p (per-unit) models the slot's scheduled export
// (positive = the microgrid sends power to the PCC) as extra load on bus 1.
class InjectionAssembler {
public:
    InjectionAssembler(const Network& net, const std::vector<std::string>& column_ids,
                       double pcc_load_p = 0.0);

    // `bess_commands` is per BESS unit (positive = discharge), aligned with
    // net.bess_units(); pass an empty vector for all-zero commands.
    OperatingPoint assemble(const Eigen::Ref<const Eigen::RowVectorXd>& raw_row,
                            const Eigen::Ref<const Eigen::VectorXd>& bess_commands) const;
    OperatingPoint assemble(const Eigen::Ref<const Eigen::RowVectorXd>& raw_row) const;

    const Network& net() const { return *net_; }

private:
    const Network* net_;
    std::vector<int> col_device_;  // device index per sample column
    OperatingPoint static_part_;
};

// Spec-level convenience matching the documented operation: base loads plus
// one realization's device outputs plus optional BESS commands.
Injections assemble_injections(const Network& net, const SampleSet& samples, int row,
                               const Eigen::VectorXd& bess_commands, double pcc_load_p = 0.0);

// Per-column sample means of the converted per-unit device outputs
// (generation for PV/WT, consumption for EV); used by the smoothing target.
Eigen::VectorXd device_output_means(const Network& net, const SampleSet& samples);

// ---------------------------------------------------------------------------
// Synthetic sample generation.

// One per-device marginal distribution. Kinds and parameters:
//   beta:        shape a, b, scaled to [lo, hi]            (radiation)
//   weibull:     shape a (=k), scale b (=lambda)           (wind speed)
//   trunc_normal: mean a, std b, truncated to [lo, hi]     (EV power)
//   constant:    fixed value a                             (degenerate paths)
struct DeviceDistribution {
    std::string device_id;
    enum class Kind { BETA, WEIBULL, TRUNC_NORMAL, CONSTANT } kind = Kind::CONSTANT;
    double a = 0.0;
    double b = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct SlotSpec {
    std::string slot;            // label, also the per-slot output directory name
    double pcc_load_mw = 0.0;    // scheduled PCC interchange for the slot
    std::vector<DeviceDistribution> devices;
};

// Parses the synthetic-scenario JSON: {"slots": [{"slot": "...",
// "pcc_load_mw": ..., "devices": [{"id": ..., "dist": "beta", ...}]}]}.
std::vector<SlotSpec> load_slot_specs(const std::string& path);
std::vector<SlotSpec> parse_slot_specs(const std::string& json_text);

// Deterministic sampling: one RNG stream per (seed, slot, column), so the
// first rows of a larger draw coincide with a smaller draw.
SampleSet synth_samples(const SlotSpec& spec, int n, std::uint64_t seed);

// Reads one `<slot>.csv` file: header row of device ids, one realization per
// row, physical units.
SampleSet ingest_csv(const std::string& path, const std::string& slot_label);

}  // namespace mgrsc
