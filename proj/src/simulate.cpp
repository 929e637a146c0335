#include "bdb/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bdb/io_util.hpp"
#include "bdb/rng.hpp"
#include "bdb/theory.hpp"

namespace bdb {
namespace {

int edge_bin(const std::vector<double>& edges, double v) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return static_cast<int>(it - edges.begin()) + 1;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (n_regions < 1) throw std::invalid_argument("GeneratorConfig: n_regions must be >= 1");
    if (samples_per_region_train < 1 || samples_per_region_test < 1)
        throw std::invalid_argument("GeneratorConfig: per-region sample counts must be >= 1");
    if (samples_per_region_train_max != 0 &&
        samples_per_region_train_max < samples_per_region_train)
        throw std::invalid_argument(
            "GeneratorConfig: samples_per_region_train_max must be 0 or >= samples_per_region_train");
    if (!(beta1_true > 0.0) || !(beta0_true > 0.0))
        throw std::invalid_argument("GeneratorConfig: global Beta prior parameters must be > 0");
    if (!(beta1_model > 0.0) || !(beta0_model > 0.0))
        throw std::invalid_argument("GeneratorConfig: model prior parameters must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("GeneratorConfig: tau must be > 0");
}

SimulationResult generate(const GeneratorConfig& cfg) {
    cfg.validate();
    SimulationResult out;
    out.truth.reserve(cfg.n_regions);
    std::vector<Sample> train;
    std::vector<Sample> test;
    train.reserve(cfg.n_regions * cfg.samples_per_region_train / 2);
    test.reserve(cfg.n_regions * cfg.samples_per_region_test);

    const double prior_mass = cfg.beta1_model + cfg.beta0_model;

    for (long long r = 0; r < cfg.n_regions; ++r) {
        Rng rng(cfg.seed, static_cast<uint64_t>(r));
        const double s_true = rng.beta(cfg.beta1_true, cfg.beta0_true);

        // train pool: Bernoulli labels, then the majority class is thinned
        long long pool = cfg.samples_per_region_train;
        if (cfg.samples_per_region_train_max > pool)
            pool += static_cast<long long>(
                rng.uniform_below(cfg.samples_per_region_train_max - pool + 1));
        const long long pool_pos = rng.binomial(pool, s_true);
        long long kept_pos = pool_pos;
        long long kept_neg = pool - pool_pos;
        if (cfg.tau > 1.0)
            kept_neg = rng.binomial(pool - pool_pos, 1.0 / cfg.tau);
        else if (cfg.tau < 1.0)
            kept_pos = rng.binomial(pool_pos, cfg.tau);
        const long long evidence = kept_pos + kept_neg;

        const double score = (cfg.beta1_model + static_cast<double>(kept_pos)) /
                             (prior_mass + static_cast<double>(evidence));
        const double uncertainty =
            beta_entropy({cfg.beta1_model + static_cast<double>(kept_pos),
                          cfg.beta0_model + static_cast<double>(kept_neg)});

        const long long test_pos = rng.binomial(cfg.samples_per_region_test, s_true);

        RegionTruth row;
        row.region = r;
        row.s_true = s_true;
        row.s_train = evidence > 0
                          ? static_cast<double>(kept_pos) / static_cast<double>(evidence)
                          : std::numeric_limits<double>::quiet_NaN();
        row.s_test = static_cast<double>(test_pos) /
                     static_cast<double>(cfg.samples_per_region_test);
        row.gamma = evidence > 0 ? prior_mass / static_cast<double>(evidence)
                                 : std::numeric_limits<double>::infinity();
        row.score = score;
        row.uncertainty = uncertainty;
        row.n_evidence = evidence;
        out.truth.push_back(row);

        for (long long t = 0; t < kept_pos; ++t) train.push_back({score, uncertainty, 1});
        for (long long t = 0; t < kept_neg; ++t) train.push_back({score, uncertainty, 0});
        for (long long t = 0; t < test_pos; ++t) test.push_back({score, uncertainty, 1});
        for (long long t = 0; t < cfg.samples_per_region_test - test_pos; ++t)
            test.push_back({score, uncertainty, 0});
    }

    out.train = Dataset(std::move(train));
    out.test = Dataset(std::move(test));
    return out;
}

void write_truth_csv(const std::vector<RegionTruth>& truth, const std::string& path) {
    std::string csv = "region,s_true,s_train,s_test,gamma,score,uncertainty,n_evidence\n";
    for (const RegionTruth& row : truth) {
        csv += std::to_string(row.region);
        csv += ',';
        csv += format_double(row.s_true);
        csv += ',';
        csv += format_double(row.s_train);
        csv += ',';
        csv += format_double(row.s_test);
        csv += ',';
        csv += format_double(row.gamma);
        csv += ',';
        csv += format_double(row.score);
        csv += ',';
        csv += format_double(row.uncertainty);
        csv += ',';
        csv += std::to_string(row.n_evidence);
        csv += '\n';
    }
    atomic_write_file(path, csv);
}

std::vector<StratumStat> conditional_positivity(const std::vector<RegionTruth>& truth,
                                                StratifyAxis axis,
                                                const std::vector<double>& x_edges,
                                                const std::vector<double>& gamma_edges) {
    for (size_t t = 1; t < x_edges.size(); ++t)
        if (!(x_edges[t] > x_edges[t - 1]))
            throw std::invalid_argument("conditional_positivity: x edges not ascending");
    for (size_t t = 1; t < gamma_edges.size(); ++t)
        if (!(gamma_edges[t] > gamma_edges[t - 1]))
            throw std::invalid_argument("conditional_positivity: gamma edges not ascending");

    const int nx = static_cast<int>(x_edges.size()) + 1;
    const int ng = gamma_edges.empty() ? 1 : static_cast<int>(gamma_edges.size()) + 1;
    const bool stratify_gamma = !gamma_edges.empty();

    std::vector<long long> count(nx * ng, 0);
    std::vector<double> sum(nx * ng, 0.0);
    std::vector<double> sum_sq(nx * ng, 0.0);

    for (const RegionTruth& row : truth) {
        const double x = axis == StratifyAxis::Score ? row.score : row.s_train;
        if (std::isnan(x)) continue;
        if (stratify_gamma && !std::isfinite(row.gamma)) continue;
        const int xb = edge_bin(x_edges, x) - 1;
        const int gb = stratify_gamma ? edge_bin(gamma_edges, row.gamma) - 1 : 0;
        const int cell = xb * ng + gb;
        count[cell] += 1;
        sum[cell] += row.s_test;
        sum_sq[cell] += row.s_test * row.s_test;
    }

    std::vector<StratumStat> table;
    table.reserve(nx * ng);
    for (int xb = 0; xb < nx; ++xb) {
        for (int gb = 0; gb < ng; ++gb) {
            const int cell = xb * ng + gb;
            StratumStat st;
            st.x_bin = xb + 1;
            st.gamma_bin = stratify_gamma ? gb + 1 : 0;
            st.count = count[cell];
            if (st.count == 0) {
                st.mean_s_test = std::numeric_limits<double>::quiet_NaN();
                st.stderr_s_test = std::numeric_limits<double>::quiet_NaN();
            } else {
                st.mean_s_test = sum[cell] / static_cast<double>(st.count);
                if (st.count < 2) {
                    st.stderr_s_test = std::numeric_limits<double>::quiet_NaN();
                } else {
                    const double var =
                        (sum_sq[cell] - sum[cell] * st.mean_s_test) /
                        static_cast<double>(st.count - 1);
                    st.stderr_s_test = std::sqrt(std::max(var, 0.0) /
                                                 static_cast<double>(st.count));
                }
            }
            table.push_back(st);
        }
    }
    return table;
}

}  // namespace bdb
