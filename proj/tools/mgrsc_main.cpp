#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mgrsc/errors.hpp"
#include "mgrsc/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "mgrsc - probabilistic ramping support capability of a microgrid at its grid "
        "interconnection, via a moment-based sparse polynomial-chaos surrogate"};
    app.get_formatter()->column_width(34);

    mgrsc::RunConfig cfg;
    std::string mode = "assess";
    app.add_option("--case", cfg.case_spec, "Builtin case id or path to a case JSON file")
        ->capture_default_str();
    app.add_option("--scenario", cfg.scenario_path,
                   "Scenario JSON describing per-slot input distributions (synthetic sampling)");
    app.add_option("--samples-dir", cfg.samples_dir,
                   "Directory of <slot>.csv files with measured input realizations");
    app.add_option("--mode", mode, "assess | sobol | enhance | mcs | compare")
        ->capture_default_str();
    app.add_option("--n0", cfg.n0, "Training realizations for the surrogate fit")
        ->capture_default_str();
    app.add_option("--ns", cfg.ns, "Evaluation realizations per slot (synthetic sampling)")
        ->capture_default_str();
    app.add_option("--q", cfg.q, "Total polynomial degree of the surrogate")
        ->capture_default_str();
    app.add_option("--gamma", cfg.gamma, "Confidence level of the reported capability")
        ->capture_default_str();
    app.add_option("--threshold", cfg.threshold,
                   "Cumulative variance share that defines the dominant inputs")
        ->capture_default_str();
    app.add_flag("--total-order", cfg.use_total_order,
                 "Rank dominant inputs by total-order instead of first-order indices");
    app.add_option("--seed", cfg.seed, "Sampling seed (synthetic mode)")->capture_default_str();
    app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    app.add_option("--lambda-tol", cfg.cpf.lambda_tol,
                   "Bisection width on the continuation parameter, per-unit")
        ->capture_default_str();
    app.add_option("--max-lambda", cfg.cpf.max_lambda, "Continuation search cap, per-unit")
        ->capture_default_str();
    app.add_option("--pf-tol", cfg.cpf.pf_tol, "Power-flow mismatch tolerance, per-unit")
        ->capture_default_str();
    app.add_option("--pcc-load-mw", cfg.pcc_load_mw,
                   "Scheduled interconnection export applied to CSV slots, MW")
        ->capture_default_str();
    app.add_option("--bins", cfg.histogram_bins, "Histogram bin count")->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? mgrsc::kExitOk : mgrsc::kExitValidation;
    }

    try {
        cfg.mode = mgrsc::parse_mode(mode);
        mgrsc::run_pipeline(cfg, std::cout);
    } catch (const mgrsc::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mgrsc::kExitValidation;
    } catch (const mgrsc::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return mgrsc::kExitSolver;
    }
    return mgrsc::kExitOk;
}
