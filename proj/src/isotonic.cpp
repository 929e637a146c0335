#include "bdb/isotonic.hpp"

#include <stdexcept>

namespace bdb {

std::vector<double> pava(const WeightedSequence& seq) {
    const size_t n = seq.values.size();
    if (n == 0) throw std::invalid_argument("pava: empty sequence");
    if (seq.weights.size() != n)
        throw std::invalid_argument("pava: values/weights length mismatch");

    struct Block {
        double weight;
        double weighted_sum;
        size_t count;
        double mean() const { return weighted_sum / weight; }
    };
    std::vector<Block> blocks;
    blocks.reserve(n);
    for (size_t t = 0; t < n; ++t) {
        if (!(seq.weights[t] > 0.0))
            throw std::invalid_argument("pava: weights must be strictly positive");
        blocks.push_back({seq.weights[t], seq.weights[t] * seq.values[t], 1});
        while (blocks.size() >= 2 &&
               blocks[blocks.size() - 1].mean() < blocks[blocks.size() - 2].mean()) {
            Block top = blocks.back();
            blocks.pop_back();
            blocks.back().weight += top.weight;
            blocks.back().weighted_sum += top.weighted_sum;
            blocks.back().count += top.count;
        }
    }

    std::vector<double> fitted;
    fitted.reserve(n);
    for (const Block& b : blocks) fitted.insert(fitted.end(), b.count, b.mean());
    return fitted;
}

CalibratedLevel calibrate_level(const std::vector<long long>& bin_positives,
                                const std::vector<long long>& bin_totals) {
    const size_t l = bin_positives.size();
    if (bin_totals.size() != l)
        throw std::invalid_argument("calibrate_level: length mismatch");

    WeightedSequence populated;
    for (size_t j = 0; j < l; ++j) {
        if (bin_totals[j] < 0 || bin_positives[j] < 0 || bin_positives[j] > bin_totals[j])
            throw std::invalid_argument("calibrate_level: need 0 <= p <= n per bin");
        if (bin_totals[j] == 0) continue;
        populated.values.push_back(static_cast<double>(bin_positives[j]) /
                                   static_cast<double>(bin_totals[j]));
        populated.weights.push_back(static_cast<double>(bin_totals[j]));
    }

    CalibratedLevel out;
    out.rates.assign(l, 0.0);
    if (populated.values.empty()) {
        out.all_empty = true;
        return out;
    }
    const std::vector<double> fitted = pava(populated);
    size_t next = 0;
    double last = 0.0;
    for (size_t j = 0; j < l; ++j) {
        if (bin_totals[j] > 0) last = fitted[next++];
        out.rates[j] = last;
    }
    return out;
}

}  // namespace bdb
