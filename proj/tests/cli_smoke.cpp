// End-to-end checks of the CLI surface: exit codes, file contracts, and the
// fit/eval consistency loop. argv[1] is the CLI binary path.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "bdb/dataset.hpp"
#include "bdb/io_util.hpp"
#include "bdb/rng.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int g_failures = 0;
std::string g_cli;
fs::path g_dir;

void expect(bool ok, const std::string& what) {
    std::printf("cli %s: %s\n", ok ? "ok  " : "FAIL", what.c_str());
    if (!ok) ++g_failures;
}

int run(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + g_cli + " " + args + " >" +
                            (g_dir / "stdout.txt").string() + " 2>" +
                            (g_dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string in_dir(const std::string& name) { return (g_dir / name).string(); }

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_smoke <bdb-binary>\n");
        return 2;
    }
    g_cli = argv[1];
    g_dir = fs::current_path() / "cli_smoke_tmp";
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);

    expect(run("simulate --regions 2000 --train-per-region 10 --train-per-region-max 80 "
               "--test-per-region 25 --beta1-t 0.5 --beta0-t 1.5 --tau 3 --seed 5 "
               "--out-train " + in_dir("train.csv") + " --out-test " + in_dir("test.csv") +
               " --out-truth " + in_dir("truth.csv")) == 0,
           "simulate exits 0");
    expect(fs::exists(in_dir("test.csv")) && fs::exists(in_dir("truth.csv")),
           "simulate writes datasets");

    // fit at a feasible bound: boundary JSON must honor the solver contract
    expect(run("fit --input " + in_dir("test.csv") +
               " --algo ew-dpmt --binning equi-weight --k 3 --l 50 --sigma 0.8 --out " +
               in_dir("boundary.json")) == 0,
           "fit exits 0 at a feasible sigma");
    const json boundary = json::parse(bdb::read_file(in_dir("boundary.json")));
    expect(boundary.at("algorithm") == "ew-dpmt" && boundary.at("feasible").get<bool>(),
           "boundary JSON carries the algorithm and feasibility");
    expect(boundary.at("precision_fit").get<double>() >= 0.8 - 1e-9,
           "precision_fit honors the bound");
    expect(boundary.at("thresholds").size() == 3 && boundary.contains("partitioner"),
           "boundary JSON carries thresholds and partitioner");

    // eval on the fitting set reproduces the fit metrics (tie-free scores so
    // re-assignment reproduces the fitted grid exactly)
    {
        bdb::Rng rng(904, 0);
        bdb::save_csv(bdb::testsupport::random_dataset(rng, 4000), in_dir("smooth.csv"));
    }
    expect(run("fit --input " + in_dir("smooth.csv") +
               " --algo ew-dpmt --binning equi-weight --k 3 --l 40 --sigma 0.35 --out " +
               in_dir("smooth_boundary.json")) == 0,
           "fit exits 0 on tie-free data");
    expect(run("eval --boundary " + in_dir("smooth_boundary.json") + " --input " +
               in_dir("smooth.csv") + " --out " + in_dir("eval.json")) == 0,
           "eval exits 0");
    const json smooth_boundary = json::parse(bdb::read_file(in_dir("smooth_boundary.json")));
    const json eval_doc = json::parse(bdb::read_file(in_dir("eval.json")));
    expect(eval_doc.at("tp").get<long long>() == smooth_boundary.at("tp").get<long long>(),
           "eval on the fitting set matches the fit tp");
    expect(std::abs(eval_doc.at("recall").get<double>() -
                    smooth_boundary.at("recall_fit").get<double>()) < 1e-12,
           "eval on the fitting set matches the fit recall");

    // infeasible bound: sigma 1.0 with no pure bin must exit 2
    expect(run("fit --input " + in_dir("test.csv") +
               " --algo gmt --binning equi-weight --k 3 --l 50 --sigma 1.0 --out " +
               in_dir("infeasible.json")) == 2,
           "fit exits 2 on an infeasible sigma");

    // usage errors exit 1
    expect(run("fit --input " + in_dir("test.csv") + " --algo nonsense --sigma 0.5 --out " +
               in_dir("x.json")) == 1,
           "unknown algorithm exits 1");
    expect(run("fit --input " + in_dir("missing.csv") + " --algo gmt --sigma 0.5 --out " +
               in_dir("x.json")) == 1,
           "missing input exits 1");
    expect(run("fit --input " + in_dir("test.csv") +
               " --algo ew-dpmt --binning equi-span --k 3 --l 50 --sigma 0.5 --out " +
               in_dir("x.json")) == 1,
           "ew-dpmt on an equi-span grid exits 1");

    // sweep: one row per sigma plus header
    expect(run("sweep --input " + in_dir("test.csv") +
               " --algo ew-dpmt --binning equi-weight --k 3 --l 50 "
               "--sigmas 0.5,0.6,0.7,0.8 --out " + in_dir("pr.csv")) == 0,
           "sweep exits 0");
    {
        const std::string pr = bdb::read_file(in_dir("pr.csv"));
        const long lines = std::count(pr.begin(), pr.end(), '\n');
        expect(lines == 5, "sweep writes 4 points");
    }

    // bias: gammas x s-points rows plus header
    expect(run("bias --omega 0.5 --xi 0.25 --nu 2 --tau 3 --n-evidence 40 --gammas 0.1,1,5 "
               "--s-points 20 --out " + in_dir("bias.csv")) == 0,
           "bias exits 0");
    {
        const std::string csv = bdb::read_file(in_dir("bias.csv"));
        const long lines = std::count(csv.begin(), csv.end(), '\n');
        expect(lines == 1 + 3 * 20, "bias writes one row per (gamma, s)");
        expect(csv.rfind("s,gamma,tau,expected_positivity\n", 0) == 0, "bias CSV header");
    }

    // calibrate: one row per score bin
    expect(run("calibrate --hold " + in_dir("test.csv") + " --test " + in_dir("train.csv") +
               " --binning equi-weight --k 3 --l 40 --out " + in_dir("ece.csv")) == 0,
           "calibrate exits 0");
    {
        const std::string csv = bdb::read_file(in_dir("ece.csv"));
        expect(std::count(csv.begin(), csv.end(), '\n') == 41, "calibrate writes L rows");
        expect(csv.rfind("j,ece_mist,ece_ist,cum_ece_mist,cum_ece_ist,count\n", 0) == 0,
               "calibrate CSV header");
    }

    // bin + partitioner JSON
    expect(run("bin --input " + in_dir("test.csv") + " --binning equi-span --k 4 --l 10 --out " +
               in_dir("part.json")) == 0,
           "bin exits 0");
    const json part = json::parse(bdb::read_file(in_dir("part.json")));
    expect(part.at("scheme") == "equi-span" && part.at("version") == 1,
           "partitioner JSON is versioned");

    // --dump-config echoes the resolved configuration
    expect(run("fit --input " + in_dir("test.csv") +
               " --algo mist --binning equi-weight --k 3 --l 50 --sigma 0.6 --dump-config "
               "--out " + in_dir("y.json")) == 0 &&
               bdb::read_file(in_dir("stdout.txt")).find("\"algo\": \"mist\"") !=
                   std::string::npos,
           "--dump-config echoes the resolved RunConfig");

    // BDB_* environment variables stand in for flags
    expect(run("fit --input " + in_dir("test.csv") +
               " --algo gmt --binning equi-weight --k 3 --l 50 --out " + in_dir("z.json"),
               "BDB_SIGMA=1.0 ") == 2,
           "BDB_SIGMA environment override reaches the solver");

    if (g_failures == 0) {
        fs::remove_all(g_dir);
        std::printf("cli smoke: all checks passed\n");
        return 0;
    }
    std::printf("cli smoke: %d check(s) failed\n", g_failures);
    return 1;
}
