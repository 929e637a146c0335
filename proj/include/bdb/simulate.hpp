#pragma once
// Synthetic region generator: per discrete region, a Beta-prior true
// positivity rate, Bernoulli labels, negative-class undersampling in train,
// and posterior-style (score, uncertainty) from the kept train counts.
// Regions use independent counter-based RNG substreams, so generation order
// cannot change the output.

#include <cstdint>
#include <string>
#include <vector>

#include "bdb/dataset.hpp"

namespace bdb {

struct GeneratorConfig {
    long long n_regions = 0;
    long long samples_per_region_train = 0;  // pre-undersampling pool size
    // when > samples_per_region_train, each region draws its pool size
    // uniformly from [samples_per_region_train, samples_per_region_train_max],
    // decoupling evidence (and so gamma) from the region's positivity
    long long samples_per_region_train_max = 0;
    long long samples_per_region_test = 0;
    double beta1_true = 1.0;   // global Beta prior over true positivity
    double beta0_true = 1.0;
    double beta1_model = 1.0;  // model prior pseudo-counts (both > 0)
    double beta0_model = 1.0;
    double tau = 1.0;          // >1 thins negatives at rate 1/tau; <1 thins positives at rate tau
    uint64_t seed = 0;

    void validate() const;
};

struct RegionTruth {
    long long region = 0;
    double s_true = 0.0;
    double s_train = 0.0;     // NaN when the region kept no train samples
    double s_test = 0.0;
    double gamma = 0.0;       // model priors : kept evidence; +inf when no evidence
    double score = 0.0;
    double uncertainty = 0.0;
    long long n_evidence = 0; // kept train samples
};

struct SimulationResult {
    Dataset train;
    Dataset test;
    std::vector<RegionTruth> truth;
};

SimulationResult generate(const GeneratorConfig& cfg);

// CSV header: region,s_true,s_train,s_test,gamma,score,uncertainty,n_evidence
void write_truth_csv(const std::vector<RegionTruth>& truth, const std::string& path);

enum class StratifyAxis { Score, TrainPositivity };

struct StratumStat {
    int x_bin = 0;      // 1-based index along the chosen axis
    int gamma_bin = 0;  // 1-based; 0 when no gamma stratification requested
    long long count = 0;
    double mean_s_test = 0.0;    // NaN when count == 0
    double stderr_s_test = 0.0;  // NaN when count < 2
};

// Empirical mean test positivity per stratum. Edges follow the binning
// interval convention (half-open, clamped). Regions with infinite gamma are
// excluded whenever gamma edges are supplied.
std::vector<StratumStat> conditional_positivity(const std::vector<RegionTruth>& truth,
                                                StratifyAxis axis,
                                                const std::vector<double>& x_edges,
                                                const std::vector<double>& gamma_edges);

}  // namespace bdb
