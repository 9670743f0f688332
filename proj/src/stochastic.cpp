#include "mgrsc/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "mgrsc/errors.hpp"
#include "mgrsc/rng.hpp"

namespace mgrsc {
namespace {

double tan_phi(double power_factor) { return std::tan(std::acos(power_factor)); }

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void validate_sample_set(const SampleSet& s) {
    if (s.data.rows() < 1) throw ValidationError("sample set '" + s.time_slot + "' has no rows");
    if (static_cast<size_t>(s.data.cols()) != s.device_ids.size())
        throw ValidationError("sample set '" + s.time_slot + "': column count " +
                              std::to_string(s.data.cols()) + " does not match " +
                              std::to_string(s.device_ids.size()) + " declared devices");
    if (!s.data.allFinite())
        throw ValidationError("sample set '" + s.time_slot + "' contains NaN or infinite entries");
}

MomentTable raw_moments(const Eigen::MatrixXd& data, int max_order) {
    if (max_order < 0) throw ValidationError("raw_moments: max_order must be >= 0");
    const Eigen::Index n = data.rows(), d = data.cols();
    if (n < max_order + 1)
        throw ValidationError("raw_moments: need at least " + std::to_string(max_order + 1) +
                              " samples for order " + std::to_string(max_order));

    MomentTable t;
    t.mu = Eigen::MatrixXd::Zero(max_order + 1, d);
    t.degenerate.assign(static_cast<size_t>(d), false);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double mean = data.col(j).mean();
        const double var = (data.col(j).array() - mean).square().sum() / static_cast<double>(n);
        if (std::sqrt(var) < 1e-12 * std::max(1.0, std::abs(mean))) {
            t.degenerate[static_cast<size_t>(j)] = true;
            t.mu(0, j) = 1.0;  // placeholder moments of a point mass at 0
            continue;
        }
        Eigen::ArrayXd pow = Eigen::ArrayXd::Ones(n);
        t.mu(0, j) = 1.0;
        for (int k = 1; k <= max_order; ++k) {
            pow *= data.col(j).array();
            t.mu(k, j) = pow.sum() / static_cast<double>(n);
        }
    }
    return t;
}

Standardization fit_standardization(const Eigen::MatrixXd& data) {
    if (data.rows() < 1) throw ValidationError("standardization requires at least one sample");
    const Eigen::Index n = data.rows(), d = data.cols();
    Standardization s;
    s.mean.resize(d);
    s.scale.resize(d);
    s.degenerate.assign(static_cast<size_t>(d), false);
    for (Eigen::Index j = 0; j < d; ++j) {
        s.mean[j] = data.col(j).mean();
        const double var =
            (data.col(j).array() - s.mean[j]).square().sum() / static_cast<double>(n);
        const double sd = std::sqrt(var);
        if (sd < 1e-12 * std::max(1.0, std::abs(s.mean[j]))) {
            s.degenerate[static_cast<size_t>(j)] = true;
            s.scale[j] = 1.0;
        } else {
            s.scale[j] = sd;
        }
    }
    return s;
}

Eigen::MatrixXd apply_standardization(const Standardization& s, const Eigen::MatrixXd& data) {
    if (data.cols() != s.mean.size())
        throw ValidationError("standardization dimension does not match data");
    Eigen::MatrixXd out = data;
    out.rowwise() -= s.mean.transpose();
    out *= s.scale.cwiseInverse().asDiagonal();
    return out;
}

double pv_power(double radiation_wm2, const RandomDevice& dev) {
    if (radiation_wm2 < 0.0)
        throw ValidationError("device " + dev.id + ": negative radiation sample");
    if (radiation_wm2 < dev.g_set) return 0.0;
    if (radiation_wm2 <= dev.g_std) return dev.rating * radiation_wm2 / dev.g_std;
    return dev.rating;
}

double wt_power(double speed_ms, const RandomDevice& dev) {
    if (speed_ms < 0.0) throw ValidationError("device " + dev.id + ": negative wind speed sample");
    if (speed_ms < dev.v_in) return 0.0;
    if (speed_ms <= dev.v_rated) {
        const double c3 = std::pow(speed_ms, 3) - std::pow(dev.v_in, 3);
        const double r3 = std::pow(dev.v_rated, 3) - std::pow(dev.v_in, 3);
        return dev.rating * c3 / r3;
    }
    if (speed_ms <= dev.v_out) return dev.rating;
    return 0.0;
}

double device_power(double raw_value, const RandomDevice& dev, double s_base_mva) {
    switch (dev.kind) {
        case DeviceKind::PV: return pv_power(raw_value, dev);
        case DeviceKind::WT: return wt_power(raw_value, dev);
        case DeviceKind::EV:
            if (raw_value < 0.0)
                throw ValidationError("device " + dev.id + ": negative EV charging power");
            return raw_value / s_base_mva;
    }
    return 0.0;
}

InjectionAssembler::InjectionAssembler(const Network& net,
                                       const std::vector<std::string>& column_ids,
                                       double pcc_load_p)
    : net_(&net) {
    const auto& devices = net.devices();
    if (column_ids.size() != devices.size())
        throw ValidationError("sample set has " + std::to_string(column_ids.size()) +
                              " columns but the case declares " + std::to_string(devices.size()) +
                              " random devices");
    std::unordered_map<std::string, int> by_id;
    for (size_t k = 0; k < devices.size(); ++k) by_id[devices[k].id] = static_cast<int>(k);
    std::vector<bool> used(devices.size(), false);
    for (const std::string& id : column_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw ValidationError("sample column '" + id + "' does not match any case device");
        if (used[static_cast<size_t>(it->second)])
            throw ValidationError("sample column '" + id + "' appears more than once");
        used[static_cast<size_t>(it->second)] = true;
        col_device_.push_back(it->second);
    }

    const int n = net.bus_count();
    static_part_.base.p = Eigen::VectorXd::Zero(n);
    static_part_.base.q = Eigen::VectorXd::Zero(n);
    static_part_.gen_p = Eigen::VectorXd::Zero(n);
    static_part_.gen_q = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        static_part_.base.p[i] = -net.buses()[i].base_load_p;
        static_part_.base.q[i] = -net.buses()[i].base_load_q;
    }
    for (const Generator& g : net.generators()) {
        const int i = net.bus_index(g.bus);
        const double q_set = g.p_set * tan_phi(g.power_factor);
        static_part_.gen_p[i] += g.p_set;
        static_part_.gen_q[i] += q_set;
        static_part_.base.p[i] += g.p_set;
        static_part_.base.q[i] += q_set;
    }
    static_part_.base.p[net.pcc_index()] -= pcc_load_p;
}

OperatingPoint InjectionAssembler::assemble(
    const Eigen::Ref<const Eigen::RowVectorXd>& raw_row) const {
    return assemble(raw_row, Eigen::VectorXd());
}

OperatingPoint InjectionAssembler::assemble(
    const Eigen::Ref<const Eigen::RowVectorXd>& raw_row,
    const Eigen::Ref<const Eigen::VectorXd>& bess_commands) const {
    if (raw_row.size() != static_cast<Eigen::Index>(col_device_.size()))
        throw ValidationError("sample row dimension does not match bound columns");
    if (bess_commands.size() != 0 &&
        bess_commands.size() != static_cast<Eigen::Index>(net_->bess_units().size()))
        throw ValidationError("BESS command vector does not match the number of BESS units");

    OperatingPoint op = static_part_;
    for (Eigen::Index c = 0; c < raw_row.size(); ++c) {
        const RandomDevice& dev = net_->devices()[static_cast<size_t>(col_device_[c])];
        const int i = net_->bus_index(dev.bus);
        const double p = device_power(raw_row[c], dev, net_->s_base_mva());
        const double q = p * tan_phi(dev.power_factor);
        if (dev.kind == DeviceKind::EV) {
            op.base.p[i] -= p;
            op.base.q[i] -= q;
        } else {
            op.base.p[i] += p;
            op.base.q[i] += q;
        }
    }
    for (Eigen::Index k = 0; k < bess_commands.size(); ++k) {
        const int i = net_->bus_index(net_->bess_units()[static_cast<size_t>(k)].bus);
        op.base.p[i] += bess_commands[k];
    }
    return op;
}

Injections assemble_injections(const Network& net, const SampleSet& samples, int row,
                               const Eigen::VectorXd& bess_commands, double pcc_load_p) {
    validate_sample_set(samples);
    if (row < 0 || row >= samples.n())
        throw ValidationError("sample row index out of range");
    InjectionAssembler asmb(net, samples.device_ids, pcc_load_p);
    return asmb.assemble(samples.data.row(row), bess_commands).base;
}

Eigen::VectorXd device_output_means(const Network& net, const SampleSet& samples) {
    validate_sample_set(samples);
    InjectionAssembler asmb(net, samples.device_ids);  // validates the binding
    std::unordered_map<std::string, const RandomDevice*> by_id;
    for (const RandomDevice& d : net.devices()) by_id[d.id] = &d;
    Eigen::VectorXd means = Eigen::VectorXd::Zero(samples.dim());
    for (int c = 0; c < samples.dim(); ++c) {
        const RandomDevice& dev = *by_id.at(samples.device_ids[static_cast<size_t>(c)]);
        double acc = 0.0;
        for (int r = 0; r < samples.n(); ++r)
            acc += device_power(samples.data(r, c), dev, net.s_base_mva());
        means[c] = acc / samples.n();
    }
    return means;
}

// ---------------------------------------------------------------------------
// Synthetic sampling.

namespace {

void validate_distribution(const DeviceDistribution& d) {
    switch (d.kind) {
        case DeviceDistribution::Kind::BETA:
            if (d.a <= 0.0 || d.b <= 0.0)
                throw ValidationError("device " + d.device_id + ": beta shapes must be > 0");
            if (!(d.lo < d.hi))
                throw ValidationError("device " + d.device_id + ": beta range requires lo < hi");
            break;
        case DeviceDistribution::Kind::WEIBULL:
            if (d.a <= 0.0 || d.b <= 0.0)
                throw ValidationError("device " + d.device_id +
                                      ": weibull shape and scale must be > 0");
            break;
        case DeviceDistribution::Kind::TRUNC_NORMAL:
            if (d.b <= 0.0)
                throw ValidationError("device " + d.device_id + ": trunc_normal std must be > 0");
            if (!(d.lo < d.hi))
                throw ValidationError("device " + d.device_id +
                                      ": trunc_normal range requires lo < hi");
            break;
        case DeviceDistribution::Kind::CONSTANT:
            break;
    }
}

double draw(const DeviceDistribution& d, Rng& rng) {
    switch (d.kind) {
        case DeviceDistribution::Kind::BETA: return d.lo + (d.hi - d.lo) * rng.beta(d.a, d.b);
        case DeviceDistribution::Kind::WEIBULL: return rng.weibull(d.a, d.b);
        case DeviceDistribution::Kind::TRUNC_NORMAL:
            return rng.truncated_normal(d.a, d.b, d.lo, d.hi);
        case DeviceDistribution::Kind::CONSTANT: return d.a;
    }
    return 0.0;
}

DeviceDistribution parse_distribution(const nlohmann::json& jd, const std::string& ctx) {
    auto str = [&](const char* key) {
        auto it = jd.find(key);
        if (it == jd.end() || !it->is_string())
            throw ValidationError(ctx + ": missing string key '" + key + "'");
        return it->get<std::string>();
    };
    auto num = [&](const char* key) {
        auto it = jd.find(key);
        if (it == jd.end() || !it->is_number())
            throw ValidationError(ctx + ": missing numeric key '" + key + "'");
        return it->get<double>();
    };

    DeviceDistribution d;
    d.device_id = str("id");
    const std::string kind = str("dist");
    if (kind == "beta") {
        d.kind = DeviceDistribution::Kind::BETA;
        d.a = num("alpha");
        d.b = num("beta");
        d.lo = num("lo");
        d.hi = num("hi");
    } else if (kind == "weibull") {
        d.kind = DeviceDistribution::Kind::WEIBULL;
        d.a = num("shape");
        d.b = num("scale");
    } else if (kind == "trunc_normal") {
        d.kind = DeviceDistribution::Kind::TRUNC_NORMAL;
        d.a = num("mean");
        d.b = num("std");
        d.lo = num("lo");
        d.hi = num("hi");
    } else if (kind == "constant") {
        d.kind = DeviceDistribution::Kind::CONSTANT;
        d.a = num("value");
    } else {
        throw ValidationError(ctx + ": unknown distribution '" + kind + "'");
    }
    validate_distribution(d);
    return d;
}

}  // namespace

std::vector<SlotSpec> parse_slot_specs(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("scenario spec is not valid JSON: ") + e.what());
    }
    auto slots_it = doc.find("slots");
    if (!doc.is_object() || slots_it == doc.end() || !slots_it->is_array() || slots_it->empty())
        throw ValidationError("scenario spec must contain a non-empty 'slots' array");

    std::vector<SlotSpec> out;
    for (size_t i = 0; i < slots_it->size(); ++i) {
        const std::string ctx = "slots[" + std::to_string(i) + "]";
        const nlohmann::json& js = (*slots_it)[i];
        SlotSpec spec;
        auto name_it = js.find("slot");
        if (name_it == js.end() || !name_it->is_string() || name_it->get<std::string>().empty())
            throw ValidationError(ctx + ": missing non-empty 'slot' label");
        spec.slot = name_it->get<std::string>();
        spec.pcc_load_mw = js.value("pcc_load_mw", 0.0);
        auto dev_it = js.find("devices");
        if (dev_it == js.end() || !dev_it->is_array() || dev_it->empty())
            throw ValidationError(ctx + ": missing non-empty 'devices' array");
        for (size_t k = 0; k < dev_it->size(); ++k)
            spec.devices.push_back(
                parse_distribution((*dev_it)[k], ctx + ".devices[" + std::to_string(k) + "]"));
        out.push_back(std::move(spec));
    }
    for (size_t i = 0; i < out.size(); ++i)
        for (size_t j = i + 1; j < out.size(); ++j)
            if (out[i].slot == out[j].slot)
                throw ValidationError("duplicate slot label '" + out[i].slot + "'");
    return out;
}

std::vector<SlotSpec> load_slot_specs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario spec: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_slot_specs(buf.str());
}

SampleSet synth_samples(const SlotSpec& spec, int n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("synth_samples: n must be >= 1");
    if (spec.devices.empty()) throw ValidationError("synth_samples: slot has no devices");

    SampleSet s;
    s.time_slot = spec.slot;
    s.data.resize(n, static_cast<Eigen::Index>(spec.devices.size()));
    for (size_t c = 0; c < spec.devices.size(); ++c) {
        const DeviceDistribution& d = spec.devices[c];
        validate_distribution(d);
        s.device_ids.push_back(d.device_id);
        Rng rng = Rng::split(seed, spec.slot, static_cast<std::uint64_t>(c));
        for (int r = 0; r < n; ++r) s.data(r, static_cast<Eigen::Index>(c)) = draw(d, rng);
    }
    validate_sample_set(s);
    return s;
}

SampleSet ingest_csv(const std::string& path, const std::string& slot_label) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open samples file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ValidationError("samples file " + path + " is empty");
    SampleSet s;
    s.time_slot = slot_label;
    {
        std::stringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) {
            const std::string id = trim(cell);
            if (id.empty())
                throw ValidationError("samples file " + path + ": empty device id in header");
            s.device_ids.push_back(id);
        }
    }
    if (s.device_ids.empty())
        throw ValidationError("samples file " + path + ": header has no device ids");

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                size_t used = 0;
                const std::string t = trim(cell);
                row.push_back(std::stod(t, &used));
                if (used != t.size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw ValidationError("samples file " + path + " line " +
                                      std::to_string(line_no) + ": '" + trim(cell) +
                                      "' is not a number");
            }
        }
        if (row.size() != s.device_ids.size())
            throw ValidationError("samples file " + path + " line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(s.device_ids.size()) +
                                  " values, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError("samples file " + path + " has no data rows");

    s.data.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(s.device_ids.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c)
            s.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    validate_sample_set(s);
    return s;
}

}  // namespace mgrsc
