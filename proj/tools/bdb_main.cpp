// Command-line front end: simulate, bin, fit, eval, sweep, bias, calibrate.
// All randomness flows through --seed; every command re-run with identical
// flags and seed produces byte-identical outputs. Exit codes: 0 success,
// 2 infeasible precision bound, 1 input/usage errors.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdb/binning.hpp"
#include "bdb/boundary.hpp"
#include "bdb/dataset.hpp"
#include "bdb/io_util.hpp"
#include "bdb/metrics.hpp"
#include "bdb/simulate.hpp"
#include "bdb/theory.hpp"

namespace {

using bdb::format_double;
using json = nlohmann::json;

constexpr const char* kEnvPrefix = "BDB_";

std::string env_name(std::string flag) {
    for (char& c : flag) c = c == '-' ? '_' : static_cast<char>(::toupper(c));
    return kEnvPrefix + flag;
}

// adds an option whose value can also come from the BDB_* environment
template <typename T>
CLI::Option* opt(CLI::App* app, const std::string& flag, T& value, const std::string& desc) {
    auto* o = app->add_option("--" + flag, value, desc);
    o->envname(env_name(flag));
    return o;
}

struct CommonConfig {
    std::string binning = "equi-weight";
    int k = 3;
    int l = 500;
    uint64_t seed = 0;
    bool dump_config = false;
};

void add_common(CLI::App* cmd, CommonConfig& cfg) {
    opt(cmd, "binning", cfg.binning, "binning scheme: equi-weight | equi-span");
    opt(cmd, "k", cfg.k, "number of uncertainty levels");
    opt(cmd, "l", cfg.l, "number of score bins per level");
    opt(cmd, "seed", cfg.seed, "seed for all randomness");
    cmd->add_flag("--dump-config", cfg.dump_config, "echo the fully-resolved configuration");
}

void maybe_dump(const CommonConfig& cfg, const char* command, const json& extra) {
    if (!cfg.dump_config) return;
    json doc = extra;
    doc["command"] = command;
    doc["binning"] = cfg.binning;
    doc["k"] = cfg.k;
    doc["l"] = cfg.l;
    doc["seed"] = cfg.seed;
    std::printf("%s\n", doc.dump(2).c_str());
}

bdb::BinGrid build_grid(const bdb::Dataset& d, const CommonConfig& cfg) {
    const auto scheme = bdb::binning_scheme_from_string(cfg.binning);
    return scheme == bdb::BinningScheme::EquiWeight ? bdb::fit_equi_weight(d, cfg.k, cfg.l)
                                                    : bdb::fit_equi_span(d, cfg.k, cfg.l);
}

// ST thresholds raw scores, so nested equi-weight grids are rebinned into a
// single score-only quantile level first.
bdb::BinGrid grid_for_algorithm(const bdb::Dataset& d, const CommonConfig& cfg,
                                bdb::Algorithm algo) {
    const auto scheme = bdb::binning_scheme_from_string(cfg.binning);
    if (algo == bdb::Algorithm::St && scheme == bdb::BinningScheme::EquiWeight && cfg.k > 1)
        return bdb::fit_equi_weight(d, 1, cfg.l);
    return build_grid(d, cfg);
}

bdb::BoundarySolution run_solver(const bdb::BinGrid& grid, bdb::Algorithm algo, double sigma) {
    switch (algo) {
        case bdb::Algorithm::St: return bdb::solve_st(grid, sigma);
        case bdb::Algorithm::Gmt: return bdb::solve_gmt(grid, sigma);
        case bdb::Algorithm::Mist: return bdb::solve_mist(grid, sigma);
        case bdb::Algorithm::EwDpmt: return bdb::solve_ew_dpmt(grid, sigma).solution;
        case bdb::Algorithm::VwDpmt: return bdb::solve_vw_dpmt(grid, sigma);
    }
    throw std::logic_error("unreachable");
}

std::string thresholds_field(const std::vector<int>& thresholds) {
    std::string s;
    for (size_t i = 0; i < thresholds.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(thresholds[i]);
    }
    return s;
}

int cmd_simulate(const bdb::GeneratorConfig& gen, const std::string& out_train,
                 const std::string& out_test, const std::string& out_truth) {
    const bdb::SimulationResult sim = bdb::generate(gen);
    bdb::save_csv(sim.train, out_train);
    bdb::save_csv(sim.test, out_test);
    bdb::write_truth_csv(sim.truth, out_truth);
    std::printf("simulate: %lld regions -> %lld train, %lld test samples\n",
                gen.n_regions, sim.train.size(), sim.test.size());
    return 0;
}

int cmd_bin(const std::string& input, const CommonConfig& cfg, const std::string& out_partitioner,
            const std::string& out_grid) {
    const bdb::Dataset d = bdb::load_csv(input);
    const bdb::BinGrid grid = build_grid(d, cfg);
    bdb::atomic_write_file(out_partitioner, grid.partitioner.to_json() + "\n");
    if (!out_grid.empty()) {
        std::string csv = "i,j,p,n\n";
        for (int i = 1; i <= grid.levels; ++i)
            for (int j = 1; j <= grid.score_bins; ++j)
                csv += std::to_string(i) + ',' + std::to_string(j) + ',' +
                       std::to_string(grid.p(i, j)) + ',' + std::to_string(grid.n(i, j)) + '\n';
        bdb::atomic_write_file(out_grid, csv);
    }
    std::printf("bin: %d x %d grid over %lld samples (%lld positives)\n", grid.levels,
                grid.score_bins, grid.samples_total(), grid.positives_total());
    return 0;
}

int cmd_fit(const std::string& input, const CommonConfig& cfg, const std::string& algo_name,
            double sigma, bool prune, const std::string& out) {
    const bdb::Algorithm algo = bdb::algorithm_from_string(algo_name);
    const bdb::Dataset d = bdb::load_csv(input);
    const bdb::BinGrid grid = grid_for_algorithm(d, cfg, algo);
    bdb::BoundarySolution sol = run_solver(grid, algo, sigma);
    if (prune && sol.feasible) {
        const auto pruned = bdb::prune_chp(grid, sigma, sol.thresholds);
        if (pruned != sol.thresholds) {
            const auto ev = bdb::evaluate(grid, pruned);
            sol.thresholds = pruned;
            sol.tp = ev.tp;
            sol.selected_n = ev.selected_n;
            sol.precision_fit = ev.precision;
            sol.recall_fit = ev.recall;
            sol.empty_region = ev.empty_region;
        }
    }
    bdb::atomic_write_file(out, bdb::boundary_to_json(sol, grid.partitioner) + "\n");
    std::printf("fit: algo=%s sigma=%s feasible=%s\n", sol.algorithm.c_str(),
                format_double(sigma).c_str(), sol.feasible ? "yes" : "no");
    std::printf("fit: tp=%lld selected=%lld precision=%s%s recall=%s\n", sol.tp, sol.selected_n,
                format_double(sol.precision_fit).c_str(),
                sol.empty_region ? " (empty region)" : "",
                format_double(sol.recall_fit).c_str());
    if (!sol.feasible) {
        std::fprintf(stderr, "fit: no boundary attains precision >= %s\n",
                     format_double(sigma).c_str());
        return 2;
    }
    return 0;
}

int cmd_eval(const std::string& boundary_path, const std::string& input, const std::string& out) {
    const bdb::SavedBoundary sb = bdb::boundary_from_json(bdb::read_file(boundary_path));
    const bdb::Dataset d = bdb::load_csv(input);
    const bdb::ConfusionResult res = bdb::test_eval(sb, d);
    std::printf("eval: tp=%lld fp=%lld fn=%lld precision=%s%s recall=%s\n", res.tp, res.fp,
                res.fn, format_double(res.precision).c_str(),
                res.empty_region ? " (empty region)" : "", format_double(res.recall).c_str());
    if (!out.empty()) {
        json doc;
        doc["tp"] = res.tp;
        doc["fp"] = res.fp;
        doc["fn"] = res.fn;
        doc["precision"] = res.precision;
        doc["recall"] = res.recall;
        doc["empty_region"] = res.empty_region;
        bdb::atomic_write_file(out, doc.dump(2) + "\n");
    }
    return 0;
}

int cmd_sweep(const std::string& input, const CommonConfig& cfg, const std::string& algo_name,
              std::vector<double> sigmas, const std::string& out) {
    const bdb::Algorithm algo = bdb::algorithm_from_string(algo_name);
    const bdb::Dataset d = bdb::load_csv(input);
    const bdb::BinGrid grid = grid_for_algorithm(d, cfg, algo);
    const std::vector<bdb::PRPoint> points = bdb::pr_sweep(grid, algo, sigmas);
    std::string csv = "sigma,m_or_cut,precision,recall,feasible,thresholds\n";
    for (size_t t = 0; t < points.size(); ++t) {
        const bdb::PRPoint& pt = points[t];
        csv += format_double(sigmas[t]) + ',' + std::to_string(pt.m_or_cut) + ',' +
               format_double(pt.precision) + ',' + format_double(pt.recall) + ',' +
               (pt.feasible ? "1" : "0") + ',' + thresholds_field(pt.thresholds) + '\n';
    }
    bdb::atomic_write_file(out, csv);
    std::printf("sweep: %zu operating points written\n", points.size());
    return 0;
}

int cmd_bias(const bdb::TheoryParams& base, const std::vector<double>& gammas, int s_points,
             const std::string& out) {
    if (s_points < 2) throw CLI::ValidationError("--s-points must be >= 2");
    std::string csv = "s,gamma,tau,expected_positivity\n";
    for (double gamma : gammas) {
        bdb::TheoryParams p = base;
        p.gamma = gamma;
        const auto [lo, hi] = bdb::valid_score_range(p.omega, p.gamma);
        std::vector<double> s_grid(s_points);
        for (int t = 0; t < s_points; ++t)
            s_grid[t] = lo + (hi - lo) * static_cast<double>(t) / (s_points - 1);
        s_grid.front() = lo;
        s_grid.back() = hi;  // avoid one-ulp overshoot past the range ends
        for (const bdb::BiasCurveRow& row : bdb::bias_curve(p, s_grid))
            csv += format_double(row.s_model) + ',' + format_double(gamma) + ',' +
                   format_double(p.tau) + ',' + format_double(row.expected_positivity) + '\n';
    }
    bdb::atomic_write_file(out, csv);
    std::printf("bias: %zu curves written\n", gammas.size());
    return 0;
}

int cmd_calibrate(const std::string& hold_path, const std::string& test_path,
                  const CommonConfig& cfg, int ist_l, const std::string& out) {
    const bdb::Dataset hold = bdb::load_csv(hold_path);
    const bdb::Dataset test = bdb::load_csv(test_path);
    const bdb::BinGrid grid = build_grid(hold, cfg);
    const auto scheme = bdb::binning_scheme_from_string(cfg.binning);
    const bdb::BinGrid ist_grid = scheme == bdb::BinningScheme::EquiWeight
                                      ? bdb::fit_equi_weight(hold, 1, ist_l > 0 ? ist_l : cfg.l)
                                      : grid;
    const bdb::CalibrationReport report = bdb::calibration_report(grid, ist_grid, test);
    std::string csv = "j,ece_mist,ece_ist,cum_ece_mist,cum_ece_ist,count\n";
    for (const bdb::CalibrationRow& row : report.rows)
        csv += std::to_string(row.j) + ',' + format_double(row.ece_mist) + ',' +
               format_double(row.ece_ist) + ',' + format_double(row.cum_ece_mist) + ',' +
               format_double(row.cum_ece_ist) + ',' + std::to_string(row.count) + '\n';
    bdb::atomic_write_file(out, csv);
    std::printf("calibrate: %zu score bins reported\n", report.rows.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recall-maximizing decision boundaries over score x uncertainty bins"};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic labeled data");
    bdb::GeneratorConfig gen;
    std::string out_train = "train.csv", out_test = "test.csv", out_truth = "truth.csv";
    opt(sim_cmd, "regions", gen.n_regions, "number of regions")->required();
    opt(sim_cmd, "train-per-region", gen.samples_per_region_train,
        "train pool size per region (before undersampling)")->required();
    opt(sim_cmd, "train-per-region-max", gen.samples_per_region_train_max,
        "upper bound for per-region pool sizes (0 = constant pools)");
    opt(sim_cmd, "test-per-region", gen.samples_per_region_test, "test samples per region")
        ->required();
    opt(sim_cmd, "beta1-t", gen.beta1_true, "global prior positive pseudo-count");
    opt(sim_cmd, "beta0-t", gen.beta0_true, "global prior negative pseudo-count");
    opt(sim_cmd, "beta1-p", gen.beta1_model, "model prior positive pseudo-count");
    opt(sim_cmd, "beta0-p", gen.beta0_model, "model prior negative pseudo-count");
    opt(sim_cmd, "tau", gen.tau, "negative undersampling factor");
    opt(sim_cmd, "seed", gen.seed, "seed for all randomness");
    opt(sim_cmd, "out-train", out_train, "train CSV path");
    opt(sim_cmd, "out-test", out_test, "test CSV path");
    opt(sim_cmd, "out-truth", out_truth, "per-region truth CSV path");
    bool sim_dump = false;
    sim_cmd->add_flag("--dump-config", sim_dump, "echo the fully-resolved configuration");

    // bin
    auto* bin_cmd = app.add_subcommand("bin", "fit a partitioner and write it as JSON");
    CommonConfig bin_cfg;
    std::string bin_input, bin_out = "partitioner.json", bin_grid_out;
    opt(bin_cmd, "input", bin_input, "labeled CSV")->required();
    add_common(bin_cmd, bin_cfg);
    opt(bin_cmd, "out", bin_out, "partitioner JSON path");
    opt(bin_cmd, "out-grid", bin_grid_out, "optional per-bin count CSV");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit a decision boundary on hold-out data");
    CommonConfig fit_cfg;
    std::string fit_input, fit_algo = "ew-dpmt", fit_out = "boundary.json";
    double fit_sigma = 0.9;
    bool fit_prune = false;
    opt(fit_cmd, "input", fit_input, "hold-out CSV")->required();
    add_common(fit_cmd, fit_cfg);
    opt(fit_cmd, "algo", fit_algo, "st | gmt | mist | ew-dpmt | vw-dpmt");
    opt(fit_cmd, "sigma", fit_sigma, "precision bound in (0,1]");
    fit_cmd->add_flag("--prune", fit_prune,
                      "tighten the boundary with the contiguous high-precision suffix");
    opt(fit_cmd, "out", fit_out, "boundary JSON path");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "apply a boundary JSON to a test CSV");
    std::string eval_boundary, eval_input, eval_out;
    opt(eval_cmd, "boundary", eval_boundary, "boundary JSON path")->required();
    opt(eval_cmd, "input", eval_input, "test CSV")->required();
    opt(eval_cmd, "out", eval_out, "optional metrics JSON path");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "PR points across precision bounds");
    CommonConfig sweep_cfg;
    std::string sweep_input, sweep_algo = "ew-dpmt", sweep_out = "pr.csv";
    std::vector<double> sweep_sigmas;
    opt(sweep_cmd, "input", sweep_input, "hold-out CSV")->required();
    add_common(sweep_cmd, sweep_cfg);
    opt(sweep_cmd, "algo", sweep_algo, "st | gmt | mist | ew-dpmt | vw-dpmt");
    sweep_cmd->add_option("--sigmas", sweep_sigmas, "precision bounds in (0,1]")
        ->required()
        ->delimiter(',')
        ->envname(env_name("sigmas"));
    opt(sweep_cmd, "out", sweep_out, "PR CSV path");

    // bias
    auto* bias_cmd = app.add_subcommand("bias", "theory curves: expected positivity vs score");
    bdb::TheoryParams bias_params;
    std::vector<double> bias_gammas{0.1, 1.0, 5.0};
    int bias_points = 100;
    std::string bias_out = "bias.csv";
    opt(bias_cmd, "omega", bias_params.omega, "model-prior positive fraction");
    opt(bias_cmd, "xi", bias_params.xi, "global-prior positive fraction");
    opt(bias_cmd, "nu", bias_params.nu, "global:model prior ratio");
    opt(bias_cmd, "tau", bias_params.tau, "negative undersampling factor");
    opt(bias_cmd, "n-evidence", bias_params.n_evidence, "evidence mass");
    bias_cmd->add_option("--gammas", bias_gammas, "model-prior:evidence ratios")
        ->delimiter(',')
        ->envname(env_name("gammas"));
    opt(bias_cmd, "s-points", bias_points, "scores per curve");
    opt(bias_cmd, "out", bias_out, "curve CSV path");

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "ECE table: per-level vs score-only isotonic");
    CommonConfig cal_cfg;
    std::string cal_hold, cal_test, cal_out = "ece.csv";
    int cal_ist_l = 0;
    opt(cal_cmd, "hold", cal_hold, "hold-out CSV (calibrations are fitted here)")->required();
    opt(cal_cmd, "test", cal_test, "test CSV (errors are measured here)")->required();
    add_common(cal_cmd, cal_cfg);
    opt(cal_cmd, "ist-l", cal_ist_l, "score bins for the score-only baseline (default: --l)");
    opt(cal_cmd, "out", cal_out, "ECE CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim_cmd->parsed()) {
            if (sim_dump) {
                json doc;
                doc["command"] = "simulate";
                doc["regions"] = gen.n_regions;
                doc["train_per_region"] = gen.samples_per_region_train;
                doc["test_per_region"] = gen.samples_per_region_test;
                doc["beta1_t"] = gen.beta1_true;
                doc["beta0_t"] = gen.beta0_true;
                doc["beta1_p"] = gen.beta1_model;
                doc["beta0_p"] = gen.beta0_model;
                doc["tau"] = gen.tau;
                doc["seed"] = gen.seed;
                std::printf("%s\n", doc.dump(2).c_str());
            }
            return cmd_simulate(gen, out_train, out_test, out_truth);
        }
        if (bin_cmd->parsed()) {
            maybe_dump(bin_cfg, "bin", {{"input", bin_input}, {"out", bin_out}});
            return cmd_bin(bin_input, bin_cfg, bin_out, bin_grid_out);
        }
        if (fit_cmd->parsed()) {
            maybe_dump(fit_cfg, "fit",
                       {{"input", fit_input}, {"algo", fit_algo}, {"sigma", fit_sigma},
                        {"prune", fit_prune}, {"out", fit_out}});
            if (!(fit_sigma > 0.0) || fit_sigma > 1.0)
                throw CLI::ValidationError("--sigma must lie in (0,1]");
            return cmd_fit(fit_input, fit_cfg, fit_algo, fit_sigma, fit_prune, fit_out);
        }
        if (eval_cmd->parsed()) return cmd_eval(eval_boundary, eval_input, eval_out);
        if (sweep_cmd->parsed()) {
            maybe_dump(sweep_cfg, "sweep",
                       {{"input", sweep_input}, {"algo", sweep_algo}, {"sigmas", sweep_sigmas},
                        {"out", sweep_out}});
            return cmd_sweep(sweep_input, sweep_cfg, sweep_algo, sweep_sigmas, sweep_out);
        }
        if (bias_cmd->parsed()) {
            bias_params.gamma = bias_gammas.empty() ? 0.0 : bias_gammas.front();
            return cmd_bias(bias_params, bias_gammas, bias_points, bias_out);
        }
        if (cal_cmd->parsed()) {
            maybe_dump(cal_cfg, "calibrate",
                       {{"hold", cal_hold}, {"test", cal_test}, {"ist_l", cal_ist_l},
                        {"out", cal_out}});
            return cmd_calibrate(cal_hold, cal_test, cal_cfg, cal_ist_l, cal_out);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
