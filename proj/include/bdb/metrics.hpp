#pragma once
// Held-out evaluation of saved boundaries, plus per-score-bin and cumulative
// calibration error for the per-level (MIST) and score-only (IST) isotonic
// calibrations.

#include <vector>

#include "bdb/boundary.hpp"
#include "bdb/dataset.hpp"

namespace bdb {

struct ConfusionResult {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    double precision = 1.0;  // flagged 1.0 when nothing is selected
    double recall = 0.0;
    bool empty_region = true;
};

// Applies a fitted boundary to unseen samples via its own partitioner.
ConfusionResult test_eval(const SavedBoundary& boundary, const Dataset& test);

// One grid-assigned sample with its calibrated score.
struct CalSample {
    int level = 0;      // 1-based uncertainty level
    int score_bin = 0;  // 1-based score bin
    double calibrated = 0.0;
    int label = 0;
};

// Mean over populated uncertainty levels of |mean(calibrated - label)| in
// score column j; empty bins are skipped and the average renormalized.
// Throws when every bin of the column is empty.
double ece_at_j(const std::vector<CalSample>& samples, int levels, int j);

// Flat average of per-bin calibration errors over all populated bins with
// score index > j.
double cumulative_ece(const std::vector<CalSample>& samples, int levels, int score_bins, int j);

// Score-only isotonic baseline: one PAVA fit over the column aggregates of a
// grid with shared score edges; returns the calibrated rate per score bin.
std::vector<double> ist_baseline(const BinGrid& grid);

struct CalibrationRow {
    int j = 0;
    double ece_mist = 0.0;
    double ece_ist = 0.0;
    double cum_ece_mist = 0.0;
    double cum_ece_ist = 0.0;
    long long count = 0;
};

struct CalibrationReport {
    std::vector<CalibrationRow> rows;  // one per score column of the main grid
};

// Fits MIST rates on hold_grid (per level) and IST rates on ist_grid (shared
// score edges, typically a K=1 rebinning of the same hold-out data), then
// scores the test samples with both and reports ECE per main-grid column.
// NaN entries mark columns with no populated bin.
CalibrationReport calibration_report(const BinGrid& hold_grid, const BinGrid& ist_grid,
                                     const Dataset& test);

}  // namespace bdb
