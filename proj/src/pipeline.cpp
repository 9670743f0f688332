#include "mgrsc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mgrsc/case_io.hpp"
#include "mgrsc/errors.hpp"
#include "mgrsc/parallel.hpp"

namespace mgrsc {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

RunMode parse_mode(const std::string& name) {
    if (name == "assess") return RunMode::ASSESS;
    if (name == "sobol") return RunMode::SOBOL;
    if (name == "enhance") return RunMode::ENHANCE;
    if (name == "mcs") return RunMode::MCS;
    if (name == "compare") return RunMode::COMPARE;
    throw ValidationError("unknown mode '" + name +
                          "' (choices: assess, sobol, enhance, mcs, compare)");
}

const char* mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::ASSESS: return "assess";
        case RunMode::SOBOL: return "sobol";
        case RunMode::ENHANCE: return "enhance";
        case RunMode::MCS: return "mcs";
        case RunMode::COMPARE: return "compare";
    }
    return "?";
}

void RunConfig::validate() const {
    if (case_spec.empty()) throw ValidationError("--case must not be empty");
    if (n0 < 1) throw ValidationError("--n0 must be at least 1");
    if (ns < n0) throw ValidationError("--ns must be at least --n0");
    if (q < 0) throw ValidationError("--q must be non-negative");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("--gamma must lie in (0, 1)");
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw ValidationError("--threshold must lie in (0, 1]");
    if (out_dir.empty()) throw ValidationError("--out must not be empty");
    if (histogram_bins < 1) throw ValidationError("--bins must be at least 1");
    if (threads < 0) throw ValidationError("--threads must be non-negative");
    if (!(cpf.lambda_tol > 0.0)) throw ValidationError("--lambda-tol must be positive");
    if (!(cpf.max_lambda > 0.0)) throw ValidationError("--max-lambda must be positive");
    if (!(cpf.initial_step > 0.0)) throw ValidationError("CPF initial step must be positive");
    if (!(cpf.pf_tol > 0.0)) throw ValidationError("--pf-tol must be positive");
    if (cpf.pf_max_iter < 1) throw ValidationError("power flow iteration cap must be at least 1");
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::chrono::steady_clock::time_point now() { return std::chrono::steady_clock::now(); }

// Fixed decimal formatting keeps every CSV byte-identical across reruns.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw ValidationError("failed writing " + path.string());
}

void write_json(const fs::path& path, const ordered_json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

std::string distribution_csv(const RscDistribution& dist) {
    std::string s = "value_pu,cdf\n";
    const auto& v = dist.values();
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        s += fmt(v[i]) + "," + fmt(static_cast<double>(i + 1) / n) + "\n";
    return s;
}

std::string histogram_csv(const Histogram& h) {
    std::string s = "bin_lo_pu,bin_hi_pu,count\n";
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
        s += fmt(h.edges[b]) + "," + fmt(h.edges[b + 1]) + "," + std::to_string(h.counts[b]) +
             "\n";
    return s;
}

std::string sobol_csv(const SobolReport& r) {
    std::string s = "variable,first_order,total_order\n";
    for (std::size_t i = 0; i < r.variables.size(); ++i)
        s += r.variables[i] + "," + fmt(r.first_order[static_cast<int>(i)]) + "," +
             fmt(r.total_order[static_cast<int>(i)]) + "\n";
    return s;
}

ordered_json binding_counts(const Network& net, const RowSolveResult& rows) {
    std::map<std::string, int> counts;
    for (std::size_t i = 0; i < rows.binding.size(); ++i)
        ++counts[binding_label(net, rows.binding[i], rows.binding_index[i])];
    ordered_json j = ordered_json::object();
    for (const auto& [label, count] : counts) j[label] = count;
    return j;
}

ordered_json dist_block(const RscDistribution& d, double s_base) {
    ordered_json j;
    j["n"] = d.n();
    j["mean_mw"] = d.mean() * s_base;
    j["std_mw"] = std::sqrt(d.variance()) * s_base;
    j["min_mw"] = d.min() * s_base;
    j["max_mw"] = d.max() * s_base;
    return j;
}

// Writes <stem>distribution.csv / <stem>histogram.csv / <stem>model.json for
// one assessment and returns its summary block.
ordered_json write_assessment(const fs::path& dir, const Network& net, const SlotAssessment& a,
                              const RunConfig& cfg, const std::string& stem) {
    write_text(dir / (stem + "distribution.csv"), distribution_csv(a.surrogate));
    write_text(dir / (stem + "histogram.csv"),
               histogram_csv(histogram(a.surrogate, cfg.histogram_bins)));
    a.model.save((dir / (stem + "model.json")).string());
    ordered_json j;
    j["rsc_confidence_mw"] = a.rsc_conf * net.s_base_mva();
    j["rsc_confidence_pu"] = a.rsc_conf;
    j["surrogate"] = dist_block(a.surrogate, net.s_base_mva());
    const PceDiagnostics& d = a.model.diagnostics();
    ordered_json fit;
    fit["loo_error"] = d.loo_error;
    fit["condition"] = d.condition;
    fit["full_terms"] = d.full_terms;
    fit["retained_terms"] = d.retained_terms;
    fit["warnings"] = d.warnings;
    j["fit"] = fit;
    j["training_bindings"] = binding_counts(net, a.training);
    return j;
}

void log_assessment(std::ostream& log, const Network& net, const SlotAssessment& a,
                    const RunConfig& cfg, const char* tag) {
    log << "[" << a.slot << "] " << tag << ": " << cfg.n0 << " training solves in "
        << a.train_seconds << " s; " << a.model.diagnostics().retained_terms << "/"
        << a.model.diagnostics().full_terms << " terms, LOO " << a.model.diagnostics().loo_error
        << "; RSC@" << cfg.gamma << " = " << a.rsc_conf * net.s_base_mva() << " MW\n";
}

std::string checked_slot_label(const std::string& label) {
    if (label.empty()) throw ValidationError("slot labels must not be empty");
    for (char c : label) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        if (!ok)
            throw ValidationError("slot label '" + label +
                                  "' contains characters unfit for a directory name");
    }
    if (label == "." || label == "..")
        throw ValidationError("slot label '" + label + "' is not a usable directory name");
    return label;
}

}  // namespace

std::vector<SlotData> load_slots(const RunConfig& cfg) {
    if (!cfg.scenario_path.empty() && !cfg.samples_dir.empty())
        throw ValidationError("give either --scenario or --samples-dir, not both");
    std::vector<SlotData> slots;
    if (!cfg.scenario_path.empty()) {
        for (const SlotSpec& spec : load_slot_specs(cfg.scenario_path)) {
            checked_slot_label(spec.slot);
            slots.push_back({synth_samples(spec, cfg.ns, cfg.seed), spec.pcc_load_mw});
        }
    } else if (!cfg.samples_dir.empty()) {
        if (!fs::is_directory(cfg.samples_dir))
            throw ValidationError("--samples-dir: not a directory: " + cfg.samples_dir);
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(cfg.samples_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw ValidationError("--samples-dir: no .csv sample files in " + cfg.samples_dir);
        for (const fs::path& f : files) {
            const std::string label = checked_slot_label(f.stem().string());
            slots.push_back({ingest_csv(f.string(), label), cfg.pcc_load_mw});
        }
    } else {
        throw ValidationError("either --scenario or --samples-dir is required");
    }
    return slots;
}

RowSolveResult solve_rows(const PowerFlowSolver& solver, const InjectionAssembler& assembler,
                          const Eigen::MatrixXd& data, const Eigen::MatrixXd* commands,
                          int begin, int end, const CpfOptions& opts, int threads,
                          const std::string& slot_label) {
    const int count = end - begin;
    RowSolveResult out;
    out.lambda.resize(count);
    out.binding.assign(count, BindingKind::NONE);
    out.binding_index.assign(count, -1);
    parallel_for(
        static_cast<std::size_t>(count),
        [&](std::size_t k) {
            const int row = begin + static_cast<int>(k);
            const OperatingPoint op =
                commands ? assembler.assemble(data.row(row), commands->row(row).transpose())
                         : assembler.assemble(data.row(row));
            try {
                const RscResult r = max_lambda(solver, op, opts);
                out.lambda[static_cast<int>(k)] = r.lambda;
                out.binding[k] = r.binding;
                out.binding_index[k] = r.binding_index;
            } catch (const SolverError& e) {
                throw SolverError(e.code(), "slot '" + slot_label + "' realization " +
                                                std::to_string(row) + ": " + e.what());
            }
        },
        static_cast<unsigned>(threads));
    return out;
}

SlotAssessment assess_slot(const Network& net, const SlotData& slot, const RunConfig& cfg,
                           const Eigen::MatrixXd* commands) {
    validate_sample_set(slot.samples);
    const int n = slot.samples.n();
    if (n < cfg.n0)
        throw ValidationError("slot '" + slot.samples.time_slot + "': " + std::to_string(n) +
                              " realizations but the training size --n0 is " +
                              std::to_string(cfg.n0));
    if (commands && commands->rows() != n)
        throw ValidationError("slot '" + slot.samples.time_slot +
                              "': storage command rows do not match the realizations");
    const InjectionAssembler assembler(net, slot.samples.device_ids,
                                       slot.pcc_load_mw / net.s_base_mva());
    const PowerFlowSolver solver(net, PowerFlowOptions{cfg.cpf.pf_tol, cfg.cpf.pf_max_iter});

    SlotAssessment out;
    out.slot = slot.samples.time_slot;

    auto t0 = now();
    out.training = solve_rows(solver, assembler, slot.samples.data, commands, 0, cfg.n0, cfg.cpf,
                              cfg.threads, out.slot);
    out.train_seconds = seconds_since(t0);

    SampleSet train;
    train.data = slot.samples.data.topRows(cfg.n0);
    train.device_ids = slot.samples.device_ids;
    train.time_slot = slot.samples.time_slot;
    PceOptions popts;
    popts.degree = cfg.q;
    out.model = fit_pce(train, out.training.lambda, popts);

    t0 = now();
    const Eigen::VectorXd pred = out.model.predict(slot.samples.data);
    out.predict_seconds = seconds_since(t0);
    out.surrogate = RscDistribution(std::vector<double>(pred.data(), pred.data() + pred.size()),
                                    RscDistribution::Provenance::PCE_SURROGATE);
    out.rsc_conf = confidence_rsc(out.surrogate, cfg.gamma);
    return out;
}

McsRun mcs_slot(const Network& net, const SlotData& slot, const RunConfig& cfg,
                const Eigen::MatrixXd* commands) {
    validate_sample_set(slot.samples);
    const int n = slot.samples.n();
    if (commands && commands->rows() != n)
        throw ValidationError("slot '" + slot.samples.time_slot +
                              "': storage command rows do not match the realizations");
    const InjectionAssembler assembler(net, slot.samples.device_ids,
                                       slot.pcc_load_mw / net.s_base_mva());
    const PowerFlowSolver solver(net, PowerFlowOptions{cfg.cpf.pf_tol, cfg.cpf.pf_max_iter});

    McsRun out;
    auto t0 = now();
    out.rows = solve_rows(solver, assembler, slot.samples.data, commands, 0, n, cfg.cpf,
                          cfg.threads, slot.samples.time_slot);
    out.seconds = seconds_since(t0);
    out.dist = RscDistribution(
        std::vector<double>(out.rows.lambda.data(), out.rows.lambda.data() + n),
        RscDistribution::Provenance::MCS_ORACLE);
    return out;
}

EnhancementRun run_enhancement(const Network& base, const std::vector<SlotData>& slots,
                               const RunConfig& cfg) {
    // Device id -> index on the base network (augmentation never reorders
    // devices, so the indices stay valid on the common network).
    std::map<std::string, int> device_index;
    for (std::size_t i = 0; i < base.devices().size(); ++i)
        device_index[base.devices()[i].id] = static_cast<int>(i);

    // Pass 1: assess every slot on the base network, rank the dominant
    // inputs, and collect the union of new storage sites (deduplicated by
    // bus) so one common augmented network serves the whole horizon.
    struct Pass1 {
        SlotAssessment pre;
        bool smoothed = false;
        SobolReport sobol;
        DominanceResult dominant;
        std::vector<int> dominant_devices;
        std::optional<PlacementResult> placement;
    };
    std::vector<Pass1> pass1;
    std::vector<BessUnit> added;
    std::map<int, int> added_by_bus;
    for (const SlotData& slot : slots) {
        Pass1 p;
        p.pre = assess_slot(base, slot, cfg);
        p.smoothed = p.pre.model.variance() > 0.0;
        if (p.smoothed) {
            p.sobol = sobol_report(p.pre.model);
            p.dominant = rank_dominant(p.sobol, cfg.threshold, cfg.use_total_order);
            for (int v : p.dominant.variables) {
                const std::string& id = p.pre.model.variables()[v];
                const auto it = device_index.find(id);
                if (it == device_index.end())
                    throw ValidationError("dominant variable '" + id +
                                          "' is not a device on the network");
                p.dominant_devices.push_back(it->second);
            }
            p.placement = aggregate_by_branch(base, p.dominant_devices);
            for (const BessAssignment& g : p.placement->groups) {
                if (!g.added_unit) continue;
                const BessUnit& u = p.placement->net.bess_units()[g.bess_index];
                if (added_by_bus.emplace(u.bus, static_cast<int>(added.size())).second)
                    added.push_back(u);
            }
        }
        pass1.push_back(std::move(p));
    }

    EnhancementRun run{base, {}};
    for (const BessUnit& u : added) run.net = run.net.with_extra_bess(u);
    const int base_units = static_cast<int>(base.bess_units().size());

    // Pass 2: schedule the slots in order (the worst-case state-of-charge
    // interval carries across slots) and re-assess with the commands applied.
    BessScheduler scheduler(run.net);
    for (std::size_t i = 0; i < slots.size(); ++i) {
        Pass1& p = pass1[i];
        SlotEnhancement e;
        e.pre = std::move(p.pre);
        e.smoothed = p.smoothed;
        e.sobol = std::move(p.sobol);
        e.dominant = std::move(p.dominant);
        e.dominant_devices = std::move(p.dominant_devices);
        if (e.smoothed) {
            e.groups.reserve(p.placement->groups.size());
            for (const BessAssignment& g : p.placement->groups) {
                BessAssignment common = g;
                if (g.added_unit) {
                    const int bus = p.placement->net.bess_units()[g.bess_index].bus;
                    common.bess_index = base_units + added_by_bus.at(bus);
                }
                e.groups.push_back(std::move(common));
            }
        }
        const Eigen::VectorXd means = device_output_means(run.net, slots[i].samples);
        const BessScheduler::SlotSchedule schedule =
            scheduler.slot_commands(e.groups, slots[i].samples, means);
        e.commands = schedule.commands;
        e.soc_lo = schedule.soc_lo;
        e.soc_hi = schedule.soc_hi;
        e.post = e.smoothed ? assess_slot(run.net, slots[i], cfg, &e.commands) : e.pre;
        run.slots.push_back(std::move(e));
    }
    return run;
}

void run_pipeline(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const Network net = resolve_case(cfg.case_spec);
    if (!net.has_direction())
        throw ValidationError("case '" + cfg.case_spec + "' defines no ramping direction");
    const double s_base = net.s_base_mva();
    const std::vector<SlotData> slots = load_slots(cfg);
    fs::create_directories(cfg.out_dir);

    ordered_json run;
    run["mode"] = mode_name(cfg.mode);
    run["case"] = cfg.case_spec;
    run["n0"] = cfg.n0;
    run["ns"] = cfg.ns;
    run["degree"] = cfg.q;
    run["gamma"] = cfg.gamma;
    run["threshold"] = cfg.threshold;
    run["seed"] = cfg.seed;
    run["lambda_tol"] = cfg.cpf.lambda_tol;
    ordered_json slot_rollup = ordered_json::array();

    const auto slot_dir = [&](const std::string& label) {
        const fs::path dir = fs::path(cfg.out_dir) / label;
        fs::create_directories(dir);
        return dir;
    };

    switch (cfg.mode) {
        case RunMode::ASSESS:
        case RunMode::SOBOL: {
            for (const SlotData& slot : slots) {
                const SlotAssessment a = assess_slot(net, slot, cfg);
                const fs::path dir = slot_dir(a.slot);
                ordered_json sj;
                sj["slot"] = a.slot;
                sj.update(write_assessment(dir, net, a, cfg, ""));
                ordered_json roll;
                roll["slot"] = a.slot;
                roll["rsc_confidence_mw"] = a.rsc_conf * s_base;
                roll["mean_mw"] = a.surrogate.mean() * s_base;
                log_assessment(log, net, a, cfg, "assess");
                if (cfg.mode == RunMode::SOBOL) {
                    const SobolReport report = sobol_report(a.model);
                    const DominanceResult dom =
                        rank_dominant(report, cfg.threshold, cfg.use_total_order);
                    write_text(dir / "sobol.csv", sobol_csv(report));
                    ordered_json dj;
                    dj["ranking"] = cfg.use_total_order ? "total_order" : "first_order";
                    dj["threshold"] = cfg.threshold;
                    ordered_json ids = ordered_json::array();
                    for (int v : dom.variables) ids.push_back(report.variables[v]);
                    dj["variables"] = ids;
                    dj["covered"] = dom.covered;
                    dj["shortfall"] = dom.shortfall;
                    sj["dominant"] = dj;
                    roll["dominant"] = ids;
                    log << "[" << a.slot << "] dominant inputs cover " << dom.covered << ": ";
                    for (std::size_t k = 0; k < ids.size(); ++k)
                        log << (k ? ", " : "") << ids[k].get<std::string>();
                    log << (dom.shortfall ? " (threshold not reachable)" : "") << "\n";
                }
                write_json(dir / "summary.json", sj);
                slot_rollup.push_back(roll);
            }
            break;
        }
        case RunMode::MCS: {
            for (const SlotData& slot : slots) {
                const McsRun m = mcs_slot(net, slot, cfg);
                const fs::path dir = slot_dir(slot.samples.time_slot);
                write_text(dir / "mcs_distribution.csv", distribution_csv(m.dist));
                write_text(dir / "mcs_histogram.csv",
                           histogram_csv(histogram(m.dist, cfg.histogram_bins)));
                ordered_json sj;
                sj["slot"] = slot.samples.time_slot;
                sj["rsc_confidence_mw"] = confidence_rsc(m.dist, cfg.gamma) * s_base;
                sj["mcs"] = dist_block(m.dist, s_base);
                sj["bindings"] = binding_counts(net, m.rows);
                write_json(dir / "summary.json", sj);
                ordered_json roll;
                roll["slot"] = slot.samples.time_slot;
                roll["rsc_confidence_mw"] = sj["rsc_confidence_mw"];
                roll["mean_mw"] = m.dist.mean() * s_base;
                slot_rollup.push_back(roll);
                log << "[" << slot.samples.time_slot << "] mcs: " << m.dist.n() << " solves in "
                    << m.seconds << " s; RSC@" << cfg.gamma << " = "
                    << confidence_rsc(m.dist, cfg.gamma) * s_base << " MW\n";
            }
            break;
        }
        case RunMode::COMPARE: {
            for (const SlotData& slot : slots) {
                const SlotAssessment a = assess_slot(net, slot, cfg);
                const McsRun m = mcs_slot(net, slot, cfg);
                const double ks = ks_statistic(a.surrogate, m.dist);
                const fs::path dir = slot_dir(a.slot);
                ordered_json sj;
                sj["slot"] = a.slot;
                sj.update(write_assessment(dir, net, a, cfg, ""));
                write_text(dir / "mcs_distribution.csv", distribution_csv(m.dist));
                sj["mcs"] = dist_block(m.dist, s_base);
                sj["mcs"]["rsc_confidence_mw"] = confidence_rsc(m.dist, cfg.gamma) * s_base;
                sj["ks_statistic"] = ks;
                write_json(dir / "summary.json", sj);
                ordered_json roll;
                roll["slot"] = a.slot;
                roll["rsc_confidence_mw"] = a.rsc_conf * s_base;
                roll["mcs_rsc_confidence_mw"] = confidence_rsc(m.dist, cfg.gamma) * s_base;
                roll["ks_statistic"] = ks;
                slot_rollup.push_back(roll);
                log_assessment(log, net, a, cfg, "assess");
                const double eval_speedup =
                    a.predict_seconds > 0.0 ? m.seconds / a.predict_seconds : 0.0;
                const double end_to_end = a.train_seconds + a.predict_seconds;
                log << "[" << a.slot << "] mcs: " << m.dist.n() << " solves in " << m.seconds
                    << " s; surrogate eval " << a.predict_seconds << " s (x" << eval_speedup
                    << "), end-to-end " << end_to_end << " s; KS = " << ks << "\n";
            }
            break;
        }
        case RunMode::ENHANCE: {
            const EnhancementRun er = run_enhancement(net, slots, cfg);
            std::string schedule =
                "slot,bess_bus,command_mean_mw,command_min_mw,command_max_mw,"
                "soc_lo_mwh,soc_hi_mwh\n";
            for (std::size_t i = 0; i < er.slots.size(); ++i) {
                const SlotEnhancement& e = er.slots[i];
                const fs::path dir = slot_dir(e.pre.slot);
                ordered_json sj;
                sj["slot"] = e.pre.slot;
                sj["smoothed"] = e.smoothed;
                sj["pre"] = write_assessment(dir, net, e.pre, cfg, "pre_");
                if (e.smoothed) {
                    write_text(dir / "sobol.csv", sobol_csv(e.sobol));
                    ordered_json dj;
                    dj["ranking"] = cfg.use_total_order ? "total_order" : "first_order";
                    dj["threshold"] = cfg.threshold;
                    ordered_json ids = ordered_json::array();
                    for (int v : e.dominant.variables)
                        ids.push_back(e.pre.model.variables()[v]);
                    dj["variables"] = ids;
                    dj["covered"] = e.dominant.covered;
                    dj["shortfall"] = e.dominant.shortfall;
                    sj["dominant"] = dj;
                    ordered_json groups = ordered_json::array();
                    for (const BessAssignment& g : e.groups) {
                        ordered_json gj;
                        gj["bess_bus"] = er.net.bess_units()[g.bess_index].bus;
                        gj["added_unit"] = g.added_unit;
                        ordered_json devs = ordered_json::array();
                        for (int d : g.device_indices)
                            devs.push_back(er.net.devices()[d].id);
                        gj["devices"] = devs;
                        groups.push_back(gj);
                    }
                    sj["groups"] = groups;
                    sj["post"] = write_assessment(dir, er.net, e.post, cfg, "post_");
                } else {
                    sj["post"] = sj["pre"];
                }
                const double pre_mw = e.pre.rsc_conf * s_base;
                const double post_mw = e.post.rsc_conf * s_base;
                sj["rsc_increment_mw"] = post_mw - pre_mw;
                write_json(dir / "summary.json", sj);

                for (int u = 0; u < e.commands.cols(); ++u) {
                    const Eigen::VectorXd col = e.commands.col(u);
                    schedule += e.pre.slot + "," +
                                std::to_string(er.net.bess_units()[u].bus) + "," +
                                fmt(col.mean() * s_base) + "," + fmt(col.minCoeff() * s_base) +
                                "," + fmt(col.maxCoeff() * s_base) + "," +
                                fmt(e.soc_lo[u] * s_base) + "," + fmt(e.soc_hi[u] * s_base) +
                                "\n";
                }

                ordered_json roll;
                roll["slot"] = e.pre.slot;
                roll["pre_rsc_confidence_mw"] = pre_mw;
                roll["post_rsc_confidence_mw"] = post_mw;
                roll["rsc_increment_mw"] = post_mw - pre_mw;
                slot_rollup.push_back(roll);
                log_assessment(log, net, e.pre, cfg, "pre");
                if (e.smoothed) log_assessment(log, er.net, e.post, cfg, "post");
                log << "[" << e.pre.slot << "] RSC@" << cfg.gamma << " increment = "
                    << post_mw - pre_mw << " MW\n";
            }
            write_text(fs::path(cfg.out_dir) / "schedule.csv", schedule);
            if (er.net.bess_units().size() > net.bess_units().size())
                save_case_file(er.net, (fs::path(cfg.out_dir) / "case_enhanced.json").string(),
                               "enhanced");
            break;
        }
    }

    run["slots"] = slot_rollup;
    write_json(fs::path(cfg.out_dir) / "summary.json", run);
}

}  // namespace mgrsc
