#pragma once
// Decision boundaries over a BinGrid. A boundary is one score threshold per
// uncertainty level, b(i) in [0..L]; the positive region is every bin with
// score index j > b(i), so b(i) = L selects nothing at level i.

#include <string>
#include <vector>

#include "bdb/binning.hpp"

namespace bdb {

enum class Algorithm { St, Gmt, Mist, EwDpmt, VwDpmt };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct EvalResult {
    long long tp = 0;
    long long selected_n = 0;
    double precision = 1.0;  // 1.0 by convention when the region is empty
    double recall = 0.0;
    bool empty_region = true;
};

struct BoundarySolution {
    std::string algorithm;
    double sigma = 0.0;
    std::vector<int> thresholds;  // K entries in [0..L]
    long long tp = 0;
    long long selected_n = 0;
    double precision_fit = 1.0;
    double recall_fit = 0.0;
    bool empty_region = true;
    bool feasible = false;  // non-empty region meeting the precision bound
};

struct PRPoint {
    long long m_or_cut = 0;  // bins in the positive region (EW-DPMT) or samples
    double precision = 1.0;
    double recall = 0.0;
    bool feasible = false;
    std::vector<int> thresholds;
};

// tp/selected_n >= sigma with a small absolute slack so exact-ratio bounds
// (16/20 against sigma = 0.8) are not lost to binary rounding of sigma*n.
// Every solver and the brute-force oracle share this predicate.
bool precision_feasible(long long tp, long long selected_n, double sigma);

EvalResult evaluate(const BinGrid& grid, const std::vector<int>& thresholds);

// Single threshold on score alone. The grid must have shared score edges
// (equi-span, or K = 1); nested equi-weight grids need a fresh score-only
// rebinning first (see fit_equi_weight with K = 1). Thresholds are returned
// replicated across the grid's levels.
BoundarySolution solve_st(const BinGrid& grid, double sigma);

// Independent greedy threshold per level: largest suffix positive count
// whose own suffix precision meets the bound.
BoundarySolution solve_gmt(const BinGrid& grid, double sigma);

// Per-level isotonic recalibration, then one global cut on calibrated rates:
// bins ranked by calibrated rate descending (ties: lower level, then higher
// score index) are accumulated while the running precision holds the bound.
BoundarySolution solve_mist(const BinGrid& grid, double sigma);

// Exact DP over (level, positive-bin budget) for equi-weight grids. Grids
// with max-min bin size <= 1 are accepted; the precision check then uses the
// candidate boundary's exact selected count rather than m*N/(K*L).
// Also returns the full budget-to-recall table, i.e. the whole PR curve.
struct EwDpmtResult {
    BoundarySolution solution;
    std::vector<PRPoint> pr_table;  // one entry per bin budget m = 0..K*L
    bool approximate_equi_weight = false;  // bin sizes differed (by at most 1)
};
EwDpmtResult solve_ew_dpmt(const BinGrid& grid, double sigma);

// Exact pseudo-polynomial DP over (level, selected-sample budget) with sparse
// states; handles arbitrary bin sizes.
BoundarySolution solve_vw_dpmt(const BinGrid& grid, double sigma);

// Tightens a boundary by including, per level, the contiguous suffix of bins
// whose individual positivity meets the bound. Never lowers tp and never
// breaks a bound the input satisfied.
std::vector<int> prune_chp(const BinGrid& grid, double sigma, std::vector<int> thresholds);

// One solution per sigma; EW-DPMT reuses a single DP table across the sweep.
std::vector<PRPoint> pr_sweep(const BinGrid& grid, Algorithm algorithm,
                              const std::vector<double>& sigmas);

// Exhaustive oracle over all (L+1)^K boundaries; ties broken by fewer
// selected samples, then lexicographically smallest thresholds. Throws if the
// state space exceeds 1e7.
BoundarySolution brute_force_optimum(const BinGrid& grid, double sigma);

struct SavedBoundary {
    BoundarySolution solution;
    Partitioner partitioner;
};

// {algorithm, sigma, thresholds, tp, selected_n, precision_fit, recall_fit,
//  partitioner} — a boundary fitted on hold-out data, applicable to test CSVs.
std::string boundary_to_json(const BoundarySolution& solution, const Partitioner& partitioner);
SavedBoundary boundary_from_json(const std::string& text);

}  // namespace bdb
