#include "bdb/binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace bdb {
namespace {

using json = nlohmann::json;

// first bin index (1-based) whose interval contains v: count of edges <= v,
// plus one. Half-open intervals with the last one closed fall out of this.
int bin_index(const std::vector<double>& edges, double v) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return static_cast<int>(it - edges.begin()) + 1;
}

// Rank cut points for splitting `count` items into `parts` blocks, earlier
// blocks taking the remainder.
std::vector<long long> block_starts(long long count, int parts) {
    std::vector<long long> starts(parts + 1, 0);
    const long long base = count / parts;
    const long long rem = count % parts;
    for (int t = 1; t <= parts; ++t)
        starts[t] = starts[t - 1] + base + (t <= rem ? 1 : 0);
    return starts;
}

// Strictly ascending edges from rank-cut candidate values via nextafter bumps.
void make_strictly_ascending(std::vector<double>& edges) {
    for (size_t t = 1; t < edges.size(); ++t) {
        if (!(edges[t] > edges[t - 1]))
            edges[t] = std::nextafter(edges[t - 1], std::numeric_limits<double>::infinity());
    }
}

}  // namespace

std::string to_string(BinningScheme s) {
    return s == BinningScheme::EquiWeight ? "equi-weight" : "equi-span";
}

BinningScheme binning_scheme_from_string(const std::string& s) {
    if (s == "equi-weight") return BinningScheme::EquiWeight;
    if (s == "equi-span") return BinningScheme::EquiSpan;
    throw std::invalid_argument("unknown binning scheme: " + s);
}

Partitioner::Partitioner(BinningScheme scheme, int levels, int score_bins,
                         std::vector<double> uncertainty_edges,
                         std::vector<std::vector<double>> score_edges,
                         bool degenerate_uncertainty, bool degenerate_score)
    : scheme_(scheme),
      levels_(levels),
      score_bins_(score_bins),
      uncertainty_edges_(std::move(uncertainty_edges)),
      score_edges_(std::move(score_edges)),
      degenerate_uncertainty_(degenerate_uncertainty),
      degenerate_score_(degenerate_score) {
    if (levels_ < 1 || score_bins_ < 1)
        throw std::invalid_argument("Partitioner: K and L must be >= 1");
    if (static_cast<int>(uncertainty_edges_.size()) != levels_ - 1)
        throw std::invalid_argument("Partitioner: expected K-1 uncertainty edges");
    if (score_edges_.size() != 1 && static_cast<int>(score_edges_.size()) != levels_)
        throw std::invalid_argument("Partitioner: expected 1 or K score edge lists");
    auto check_ascending = [](const std::vector<double>& e, const char* what) {
        for (size_t t = 1; t < e.size(); ++t)
            if (!(e[t] > e[t - 1]))
                throw std::invalid_argument(std::string("Partitioner: ") + what +
                                            " edges not strictly ascending");
    };
    check_ascending(uncertainty_edges_, "uncertainty");
    for (const auto& list : score_edges_) {
        if (static_cast<int>(list.size()) != score_bins_ - 1)
            throw std::invalid_argument("Partitioner: expected L-1 score edges per list");
        check_ascending(list, "score");
    }
}

int Partitioner::level_of(double uncertainty) const {
    return bin_index(uncertainty_edges_, uncertainty);
}

int Partitioner::score_bin_of(double score, int level) const {
    const auto& edges = shared_score_edges() ? score_edges_[0] : score_edges_[level - 1];
    return bin_index(edges, score);
}

std::pair<int, int> Partitioner::assign(double score, double uncertainty) const {
    const int i = level_of(uncertainty);
    return {i, score_bin_of(score, i)};
}

std::string Partitioner::to_json() const {
    json doc;
    doc["version"] = 1;
    doc["scheme"] = to_string(scheme_);
    doc["K"] = levels_;
    doc["L"] = score_bins_;
    doc["uncertainty_edges"] = uncertainty_edges_;
    doc["score_edges"] = score_edges_;
    doc["degenerate_uncertainty"] = degenerate_uncertainty_;
    doc["degenerate_score"] = degenerate_score_;
    return doc.dump(2);
}

Partitioner Partitioner::from_json(const std::string& text) {
    json doc = json::parse(text);
    if (doc.at("version").get<int>() != 1)
        throw std::invalid_argument("partitioner JSON: unsupported version");
    return Partitioner(binning_scheme_from_string(doc.at("scheme").get<std::string>()),
                       doc.at("K").get<int>(), doc.at("L").get<int>(),
                       doc.at("uncertainty_edges").get<std::vector<double>>(),
                       doc.at("score_edges").get<std::vector<std::vector<double>>>(),
                       doc.value("degenerate_uncertainty", false),
                       doc.value("degenerate_score", false));
}

long long BinGrid::positives_total() const {
    long long s = 0;
    for (const auto& row : pos) s += std::accumulate(row.begin(), row.end(), 0LL);
    return s;
}

long long BinGrid::samples_total() const {
    long long s = 0;
    for (const auto& row : tot) s += std::accumulate(row.begin(), row.end(), 0LL);
    return s;
}

long long BinGrid::max_bin_size() const {
    long long m = std::numeric_limits<long long>::min();
    for (const auto& row : tot)
        for (long long v : row) m = std::max(m, v);
    return m;
}

long long BinGrid::min_bin_size() const {
    long long m = std::numeric_limits<long long>::max();
    for (const auto& row : tot)
        for (long long v : row) m = std::min(m, v);
    return m;
}

BinGrid BinGrid::from_counts(std::vector<std::vector<long long>> positives,
                             std::vector<std::vector<long long>> totals) {
    BinGrid g;
    g.levels = static_cast<int>(positives.size());
    if (g.levels == 0 || positives.size() != totals.size())
        throw std::invalid_argument("from_counts: shape mismatch");
    g.score_bins = static_cast<int>(positives[0].size());
    for (int i = 0; i < g.levels; ++i) {
        if (static_cast<int>(positives[i].size()) != g.score_bins ||
            static_cast<int>(totals[i].size()) != g.score_bins)
            throw std::invalid_argument("from_counts: ragged rows");
        for (int j = 0; j < g.score_bins; ++j)
            if (positives[i][j] < 0 || positives[i][j] > totals[i][j])
                throw std::invalid_argument("from_counts: need 0 <= p <= n per bin");
    }
    g.pos = std::move(positives);
    g.tot = std::move(totals);
    return g;
}

BinGrid fit_equi_weight(const Dataset& d, int levels, int score_bins) {
    if (d.empty()) throw std::invalid_argument("fit_equi_weight: empty dataset");
    if (levels < 1 || score_bins < 1)
        throw std::invalid_argument("fit_equi_weight: K and L must be >= 1");
    const long long n = d.size();
    if (static_cast<long long>(levels) * score_bins > n)
        throw std::invalid_argument("fit_equi_weight: K*L exceeds dataset size");

    // ties broken by original index so cuts are deterministic
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (d[a].uncertainty != d[b].uncertainty) return d[a].uncertainty < d[b].uncertainty;
        return a < b;
    });

    const auto level_start = block_starts(n, levels);
    std::vector<double> u_edges(levels - 1);
    for (int t = 1; t < levels; ++t) u_edges[t - 1] = d[order[level_start[t]]].uncertainty;
    make_strictly_ascending(u_edges);

    BinGrid grid;
    grid.levels = levels;
    grid.score_bins = score_bins;
    grid.pos.assign(levels, std::vector<long long>(score_bins, 0));
    grid.tot.assign(levels, std::vector<long long>(score_bins, 0));
    std::vector<std::vector<double>> s_edges(levels);

    for (int i = 0; i < levels; ++i) {
        const long long lo = level_start[i];
        const long long hi = level_start[i + 1];
        std::vector<size_t> level_order(order.begin() + lo, order.begin() + hi);
        std::sort(level_order.begin(), level_order.end(), [&](size_t a, size_t b) {
            if (d[a].score != d[b].score) return d[a].score < d[b].score;
            return a < b;
        });
        const auto bin_start = block_starts(hi - lo, score_bins);
        std::vector<double> edges(score_bins - 1);
        for (int t = 1; t < score_bins; ++t) edges[t - 1] = d[level_order[bin_start[t]]].score;
        make_strictly_ascending(edges);
        s_edges[i] = std::move(edges);
        for (int j = 0; j < score_bins; ++j) {
            for (long long r = bin_start[j]; r < bin_start[j + 1]; ++r) {
                grid.tot[i][j] += 1;
                grid.pos[i][j] += d[level_order[r]].label;
            }
        }
    }

    grid.partitioner = Partitioner(BinningScheme::EquiWeight, levels, score_bins,
                                   std::move(u_edges), std::move(s_edges));
    grid.has_partitioner = true;
    return grid;
}

BinGrid fit_equi_span(const Dataset& d, int levels, int score_bins) {
    if (d.empty()) throw std::invalid_argument("fit_equi_span: empty dataset");
    if (levels < 1 || score_bins < 1)
        throw std::invalid_argument("fit_equi_span: K and L must be >= 1");

    double u_min = d[0].uncertainty, u_max = d[0].uncertainty;
    double s_min = d[0].score, s_max = d[0].score;
    for (const Sample& s : d.samples()) {
        u_min = std::min(u_min, s.uncertainty);
        u_max = std::max(u_max, s.uncertainty);
        s_min = std::min(s_min, s.score);
        s_max = std::max(s_max, s.score);
    }

    auto span_edges = [](double lo, double hi, int parts) {
        std::vector<double> edges(parts - 1);
        for (int t = 1; t < parts; ++t)
            edges[t - 1] = lo + (hi - lo) * static_cast<double>(t) / parts;
        return edges;
    };

    const bool degenerate_u = !(u_max > u_min);
    const bool degenerate_s = !(s_max > s_min);
    const int k = degenerate_u ? 1 : levels;
    const int l = degenerate_s ? 1 : score_bins;
    std::vector<double> u_edges = degenerate_u ? std::vector<double>{} : span_edges(u_min, u_max, k);
    std::vector<std::vector<double>> s_edges{degenerate_s ? std::vector<double>{}
                                                          : span_edges(s_min, s_max, l)};

    Partitioner part(BinningScheme::EquiSpan, k, l, std::move(u_edges), std::move(s_edges),
                     degenerate_u, degenerate_s);
    return aggregate(d, part);
}

BinGrid aggregate(const Dataset& d, const Partitioner& part) {
    BinGrid grid;
    grid.levels = part.levels();
    grid.score_bins = part.score_bins();
    grid.pos.assign(grid.levels, std::vector<long long>(grid.score_bins, 0));
    grid.tot.assign(grid.levels, std::vector<long long>(grid.score_bins, 0));
    for (const Sample& s : d.samples()) {
        const auto [i, j] = part.assign(s.score, s.uncertainty);
        grid.tot[i - 1][j - 1] += 1;
        grid.pos[i - 1][j - 1] += s.label;
    }
    grid.partitioner = part;
    grid.has_partitioner = true;
    return grid;
}

}  // namespace bdb
