#pragma once
// K x L partition of the score x uncertainty plane plus per-bin counts.
//
// Interval convention: half-open [a, b), final interval closed; a value equal
// to an interior edge lands in the higher bin. Values outside the fitted
// range clamp to the edge bins, so boundaries fitted on one dataset can be
// applied to unseen data.

#include <string>
#include <utility>
#include <vector>

#include "bdb/dataset.hpp"

namespace bdb {

enum class BinningScheme { EquiWeight, EquiSpan };

std::string to_string(BinningScheme s);
BinningScheme binning_scheme_from_string(const std::string& s);

class Partitioner {
public:
    Partitioner() = default;
    // score_edges holds one list per level for equi-weight, or a single shared
    // list for equi-span. Each list must be strictly ascending.
    Partitioner(BinningScheme scheme, int levels, int score_bins,
                std::vector<double> uncertainty_edges,
                std::vector<std::vector<double>> score_edges,
                bool degenerate_uncertainty = false, bool degenerate_score = false);

    int levels() const { return levels_; }
    int score_bins() const { return score_bins_; }
    BinningScheme scheme() const { return scheme_; }
    bool shared_score_edges() const { return score_edges_.size() == 1; }
    bool degenerate_uncertainty() const { return degenerate_uncertainty_; }
    bool degenerate_score() const { return degenerate_score_; }
    const std::vector<double>& uncertainty_edges() const { return uncertainty_edges_; }
    const std::vector<std::vector<double>>& score_edges() const { return score_edges_; }

    int level_of(double uncertainty) const;          // 1-based
    int score_bin_of(double score, int level) const;  // 1-based
    std::pair<int, int> assign(double score, double uncertainty) const;

    // Versioned JSON document:
    // {version, scheme, K, L, uncertainty_edges, score_edges, ...}
    std::string to_json() const;
    static Partitioner from_json(const std::string& text);

private:
    BinningScheme scheme_ = BinningScheme::EquiWeight;
    int levels_ = 0;
    int score_bins_ = 0;
    std::vector<double> uncertainty_edges_;            // levels-1 ascending values
    std::vector<std::vector<double>> score_edges_;     // per level, or one shared list
    bool degenerate_uncertainty_ = false;
    bool degenerate_score_ = false;
};

struct BinGrid {
    int levels = 0;      // K
    int score_bins = 0;  // L
    std::vector<std::vector<long long>> pos;    // positives per bin, [K][L]
    std::vector<std::vector<long long>> tot;    // samples per bin, [K][L]
    Partitioner partitioner;
    bool has_partitioner = false;

    long long p(int i, int j) const { return pos[i - 1][j - 1]; }  // 1-based
    long long n(int i, int j) const { return tot[i - 1][j - 1]; }
    long long positives_total() const;
    long long samples_total() const;
    long long max_bin_size() const;
    long long min_bin_size() const;

    // Synthetic grid from raw count matrices (tests, collapsed grids).
    static BinGrid from_counts(std::vector<std::vector<long long>> positives,
                               std::vector<std::vector<long long>> totals);
};

// Nested quantile binning: K uncertainty quantiles, then L score quantiles
// local to each level. Quantile cuts are by rank after a stable sort on
// (value, original index), so heavy ties still give equal-count bins; the
// remainder goes to the lower-index bins. Requires K*L <= d.size().
BinGrid fit_equi_weight(const Dataset& d, int levels, int score_bins);

// Equal-width intervals over the observed value ranges; bins may be empty.
// A degenerate axis (max == min) collapses to one bin and is flagged.
BinGrid fit_equi_span(const Dataset& d, int levels, int score_bins);

// Counts for a dataset pushed through an existing partitioner.
BinGrid aggregate(const Dataset& d, const Partitioner& part);

}  // namespace bdb
