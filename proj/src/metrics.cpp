#include "bdb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bdb/isotonic.hpp"

namespace bdb {
namespace {

struct BinResiduals {
    std::vector<double> residual_sum;  // [K][L] flattened, calibrated - label
    std::vector<long long> count;
    int levels = 0;
    int score_bins = 0;

    double cell_error(int i, int j) const {  // 0-based; NaN when empty
        const int cell = i * score_bins + j;
        if (count[cell] == 0) return std::numeric_limits<double>::quiet_NaN();
        return std::abs(residual_sum[cell] / static_cast<double>(count[cell]));
    }
};

BinResiduals accumulate(const std::vector<CalSample>& samples, int levels, int score_bins) {
    BinResiduals acc;
    acc.levels = levels;
    acc.score_bins = score_bins;
    acc.residual_sum.assign(static_cast<size_t>(levels) * score_bins, 0.0);
    acc.count.assign(static_cast<size_t>(levels) * score_bins, 0);
    for (const CalSample& s : samples) {
        if (s.level < 1 || s.level > levels || s.score_bin < 1 || s.score_bin > score_bins)
            throw std::invalid_argument("calibration sample outside the grid");
        const int cell = (s.level - 1) * score_bins + (s.score_bin - 1);
        acc.residual_sum[cell] += s.calibrated - s.label;
        acc.count[cell] += 1;
    }
    return acc;
}

}  // namespace

ConfusionResult test_eval(const SavedBoundary& boundary, const Dataset& test) {
    const Partitioner& part = boundary.partitioner;
    const std::vector<int>& b = boundary.solution.thresholds;
    if (static_cast<int>(b.size()) != part.levels())
        throw std::invalid_argument("test_eval: thresholds length differs from the partitioner");
    ConfusionResult res;
    for (const Sample& s : test.samples()) {
        const auto [i, j] = part.assign(s.score, s.uncertainty);
        const bool selected = j > b[i - 1];
        if (selected && s.label == 1) ++res.tp;
        else if (selected && s.label == 0) ++res.fp;
        else if (!selected && s.label == 1) ++res.fn;
    }
    const long long selected_n = res.tp + res.fp;
    res.empty_region = selected_n == 0;
    res.precision = res.empty_region
                        ? 1.0
                        : static_cast<double>(res.tp) / static_cast<double>(selected_n);
    const long long positives = res.tp + res.fn;
    res.recall = positives > 0 ? static_cast<double>(res.tp) / static_cast<double>(positives)
                               : 1.0;
    return res;
}

double ece_at_j(const std::vector<CalSample>& samples, int levels, int j) {
    if (j < 1) throw std::invalid_argument("ece_at_j: j must be >= 1");
    int score_bins = j;
    for (const CalSample& s : samples) score_bins = std::max(score_bins, s.score_bin);
    const BinResiduals acc = accumulate(samples, levels, score_bins);
    double sum = 0.0;
    int populated = 0;
    for (int i = 0; i < levels; ++i) {
        const double ce = acc.cell_error(i, j - 1);
        if (std::isnan(ce)) continue;
        sum += ce;
        ++populated;
    }
    if (populated == 0)
        throw std::invalid_argument("ece_at_j: no populated bin in score column " +
                                    std::to_string(j));
    return sum / populated;
}

double cumulative_ece(const std::vector<CalSample>& samples, int levels, int score_bins, int j) {
    if (j < 0 || j > score_bins) throw std::invalid_argument("cumulative_ece: j out of range");
    const BinResiduals acc = accumulate(samples, levels, score_bins);
    double sum = 0.0;
    int populated = 0;
    for (int i = 0; i < levels; ++i) {
        for (int col = j; col < score_bins; ++col) {
            const double ce = acc.cell_error(i, col);
            if (std::isnan(ce)) continue;
            sum += ce;
            ++populated;
        }
    }
    return populated > 0 ? sum / populated : std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> ist_baseline(const BinGrid& grid) {
    if (grid.has_partitioner && !grid.partitioner.shared_score_edges())
        throw std::invalid_argument(
            "ist_baseline: score edges differ per uncertainty level; rebin scores into a "
            "single level first");
    std::vector<long long> p(grid.score_bins, 0), n(grid.score_bins, 0);
    for (int i = 0; i < grid.levels; ++i)
        for (int j = 0; j < grid.score_bins; ++j) {
            p[j] += grid.pos[i][j];
            n[j] += grid.tot[i][j];
        }
    return calibrate_level(p, n).rates;
}

CalibrationReport calibration_report(const BinGrid& hold_grid, const BinGrid& ist_grid,
                                     const Dataset& test) {
    if (!hold_grid.has_partitioner || !ist_grid.has_partitioner)
        throw std::invalid_argument("calibration_report: grids must carry partitioners");

    std::vector<std::vector<double>> mist_rates(hold_grid.levels);
    for (int i = 0; i < hold_grid.levels; ++i)
        mist_rates[i] = calibrate_level(hold_grid.pos[i], hold_grid.tot[i]).rates;
    const std::vector<double> ist_rates = ist_baseline(ist_grid);

    std::vector<CalSample> mist_samples, ist_samples;
    mist_samples.reserve(test.size());
    ist_samples.reserve(test.size());
    for (const Sample& s : test.samples()) {
        const auto [i, j] = hold_grid.partitioner.assign(s.score, s.uncertainty);
        const int ist_bin = ist_grid.partitioner.assign(s.score, s.uncertainty).second;
        mist_samples.push_back({i, j, mist_rates[i - 1][j - 1], s.label});
        ist_samples.push_back({i, j, ist_rates[ist_bin - 1], s.label});
    }

    const BinResiduals mist_acc = accumulate(mist_samples, hold_grid.levels, hold_grid.score_bins);
    const BinResiduals ist_acc = accumulate(ist_samples, hold_grid.levels, hold_grid.score_bins);

    auto column_ece = [&](const BinResiduals& acc, int j) {
        double sum = 0.0;
        int populated = 0;
        for (int i = 0; i < acc.levels; ++i) {
            const double ce = acc.cell_error(i, j);
            if (std::isnan(ce)) continue;
            sum += ce;
            ++populated;
        }
        return populated > 0 ? sum / populated : std::numeric_limits<double>::quiet_NaN();
    };
    auto cumulative = [&](const BinResiduals& acc, int j) {
        double sum = 0.0;
        int populated = 0;
        for (int i = 0; i < acc.levels; ++i)
            for (int col = j; col < acc.score_bins; ++col) {
                const double ce = acc.cell_error(i, col);
                if (std::isnan(ce)) continue;
                sum += ce;
                ++populated;
            }
        return populated > 0 ? sum / populated : std::numeric_limits<double>::quiet_NaN();
    };

    CalibrationReport report;
    report.rows.reserve(hold_grid.score_bins);
    for (int j = 1; j <= hold_grid.score_bins; ++j) {
        CalibrationRow row;
        row.j = j;
        row.ece_mist = column_ece(mist_acc, j - 1);
        row.ece_ist = column_ece(ist_acc, j - 1);
        row.cum_ece_mist = cumulative(mist_acc, j - 1);
        row.cum_ece_ist = cumulative(ist_acc, j - 1);
        long long count = 0;
        for (int i = 0; i < hold_grid.levels; ++i)
            count += mist_acc.count[i * hold_grid.score_bins + (j - 1)];
        row.count = count;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace bdb
