#pragma once
// Weighted L2 isotonic regression via pool-adjacent-violators, linear time.

#include <vector>

namespace bdb {

struct WeightedSequence {
    std::vector<double> values;
    std::vector<double> weights;  // strictly positive, same length as values
};

// Non-decreasing sequence minimizing sum_t w_t * (y_t - f_t)^2. Every output
// entry is the weighted mean of its pooled block.
std::vector<double> pava(const WeightedSequence& seq);

struct CalibratedLevel {
    std::vector<double> rates;  // length L, non-decreasing
    bool all_empty = false;     // no populated bin; rates are all zero
};

// Isotonic fit of per-bin positivity y_j = p_j/n_j with weights n_j. Bins
// with n_j = 0 are excluded from the fit and inherit the fitted value of the
// nearest populated lower bin (0 if none exists).
CalibratedLevel calibrate_level(const std::vector<long long>& bin_positives,
                                const std::vector<long long>& bin_totals);

}  // namespace bdb
