#include "bdb/boundary.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "bdb/isotonic.hpp"

namespace bdb {
namespace {

using json = nlohmann::json;

// pi[i][j] / nu[i][j]: positives / totals in the j highest score bins of
// level i (0-based i; j = 0..L).
struct SuffixSums {
    std::vector<std::vector<long long>> pi;
    std::vector<std::vector<long long>> nu;
};

SuffixSums suffix_sums(const BinGrid& grid) {
    SuffixSums s;
    s.pi.assign(grid.levels, std::vector<long long>(grid.score_bins + 1, 0));
    s.nu.assign(grid.levels, std::vector<long long>(grid.score_bins + 1, 0));
    for (int i = 0; i < grid.levels; ++i) {
        for (int j = 1; j <= grid.score_bins; ++j) {
            s.pi[i][j] = s.pi[i][j - 1] + grid.pos[i][grid.score_bins - j];
            s.nu[i][j] = s.nu[i][j - 1] + grid.tot[i][grid.score_bins - j];
        }
    }
    return s;
}

void check_thresholds(const BinGrid& grid, const std::vector<int>& thresholds) {
    if (static_cast<int>(thresholds.size()) != grid.levels)
        throw std::invalid_argument("thresholds: expected one entry per uncertainty level");
    for (int b : thresholds)
        if (b < 0 || b > grid.score_bins)
            throw std::invalid_argument("thresholds: entries must lie in [0..L]");
}

BoundarySolution make_solution(const BinGrid& grid, std::vector<int> thresholds,
                               const char* algorithm, double sigma) {
    BoundarySolution sol;
    sol.algorithm = algorithm;
    sol.sigma = sigma;
    const EvalResult ev = evaluate(grid, thresholds);
    sol.thresholds = std::move(thresholds);
    sol.tp = ev.tp;
    sol.selected_n = ev.selected_n;
    sol.precision_fit = ev.precision;
    sol.recall_fit = ev.recall;
    sol.empty_region = ev.empty_region;
    sol.feasible = !ev.empty_region && precision_feasible(ev.tp, ev.selected_n, sigma);
    return sol;
}

BoundarySolution infeasible_solution(const BinGrid& grid, const char* algorithm, double sigma) {
    return make_solution(grid, std::vector<int>(grid.levels, grid.score_bins), algorithm, sigma);
}

// Shared table behind solve_ew_dpmt and the EW-DPMT sweep. R[i][m] is the
// maximum positive count using exactly m bins from levels 1..i; -1 marks
// unreachable states. Ties in the inner argmax take the smallest j.
struct EwTable {
    int levels = 0;
    int score_bins = 0;
    long long total_samples = 0;
    std::vector<std::vector<long long>> best_tp;  // [K+1][K*L+1]
    std::vector<std::vector<int>> choice;
    SuffixSums sums;

    std::vector<int> reconstruct(int m, long long* selected_n) const {
        std::vector<int> thresholds(levels, score_bins);
        long long sel = 0;
        int budget = m;
        for (int i = levels; i >= 1; --i) {
            const int j = choice[i][budget];
            thresholds[i - 1] = score_bins - j;
            sel += sums.nu[i - 1][j];
            budget -= j;
        }
        if (selected_n) *selected_n = sel;
        return thresholds;
    }
};

EwTable build_ew_table(const BinGrid& grid) {
    if (grid.max_bin_size() - grid.min_bin_size() > 1)
        throw std::invalid_argument(
            "solve_ew_dpmt: bin sizes differ by more than 1; use solve_vw_dpmt");
    EwTable t;
    t.levels = grid.levels;
    t.score_bins = grid.score_bins;
    t.total_samples = grid.samples_total();
    t.sums = suffix_sums(grid);
    const int k = grid.levels;
    const int l = grid.score_bins;
    t.best_tp.assign(k + 1, std::vector<long long>(k * l + 1, -1));
    t.choice.assign(k + 1, std::vector<int>(k * l + 1, -1));
    for (int m = 0; m <= l; ++m) {
        t.best_tp[1][m] = t.sums.pi[0][m];
        t.choice[1][m] = m;
    }
    for (int i = 2; i <= k; ++i) {
        for (int m = 0; m <= i * l; ++m) {
            const int j_lo = std::max(0, m - (i - 1) * l);
            const int j_hi = std::min(l, m);
            long long best = -1;
            int best_j = -1;
            for (int j = j_lo; j <= j_hi; ++j) {
                const long long prev = t.best_tp[i - 1][m - j];
                if (prev < 0) continue;
                const long long cand = t.sums.pi[i - 1][j] + prev;
                if (cand > best) {
                    best = cand;
                    best_j = j;
                }
            }
            t.best_tp[i][m] = best;
            t.choice[i][m] = best_j;
        }
    }
    return t;
}

PRPoint ew_point(const EwTable& t, const BinGrid& grid, int m, double sigma) {
    PRPoint pt;
    pt.m_or_cut = m;
    long long selected_n = 0;
    pt.thresholds = t.reconstruct(m, &selected_n);
    const long long tp = t.best_tp[t.levels][m];
    const long long p0 = grid.positives_total();
    pt.precision = selected_n > 0
                       ? static_cast<double>(tp) / static_cast<double>(selected_n)
                       : 1.0;
    pt.recall = p0 > 0 ? static_cast<double>(tp) / static_cast<double>(p0) : 1.0;
    pt.feasible = m >= 1 && precision_feasible(tp, selected_n, sigma);
    return pt;
}

// sigma-optimal budget: maximum tp among feasible m >= 1; ties take the
// largest m (the full grid at sigma = 0). -1 when nothing qualifies.
int ew_pick_budget(const EwTable& t, double sigma) {
    const int k = t.levels;
    const int l = t.score_bins;
    long long best_tp = -1;
    int best_m = -1;
    for (int m = 1; m <= k * l; ++m) {
        long long selected_n = 0;
        t.reconstruct(m, &selected_n);
        const long long tp = t.best_tp[k][m];
        if (!precision_feasible(tp, selected_n, sigma)) continue;
        if (tp >= best_tp) {
            best_tp = tp;
            best_m = m;
        }
    }
    return best_m;
}

struct RankedBin {
    double rate;
    int level;      // 0-based
    int score_bin;  // 0-based
};

// MIST rank order: calibrated rate descending; ties lower level first, then
// higher score index first (keeps each level's selection a suffix).
std::vector<RankedBin> mist_rank(const BinGrid& grid, std::vector<std::vector<double>>* rates_out) {
    std::vector<RankedBin> ranked;
    ranked.reserve(static_cast<size_t>(grid.levels) * grid.score_bins);
    if (rates_out) rates_out->assign(grid.levels, {});
    for (int i = 0; i < grid.levels; ++i) {
        CalibratedLevel cal = calibrate_level(grid.pos[i], grid.tot[i]);
        if (rates_out) (*rates_out)[i] = cal.rates;
        for (int j = 0; j < grid.score_bins; ++j)
            ranked.push_back({cal.rates[j], i, j});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedBin& a, const RankedBin& b) {
        if (a.rate != b.rate) return a.rate > b.rate;
        if (a.level != b.level) return a.level < b.level;
        return a.score_bin > b.score_bin;
    });
    return ranked;
}

}  // namespace

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::St: return "st";
        case Algorithm::Gmt: return "gmt";
        case Algorithm::Mist: return "mist";
        case Algorithm::EwDpmt: return "ew-dpmt";
        case Algorithm::VwDpmt: return "vw-dpmt";
    }
    throw std::logic_error("unreachable");
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "st") return Algorithm::St;
    if (s == "gmt") return Algorithm::Gmt;
    if (s == "mist") return Algorithm::Mist;
    if (s == "ew-dpmt") return Algorithm::EwDpmt;
    if (s == "vw-dpmt") return Algorithm::VwDpmt;
    throw std::invalid_argument("unknown algorithm: " + s);
}

bool precision_feasible(long long tp, long long selected_n, double sigma) {
    if (selected_n == 0) return true;
    return static_cast<double>(tp) + 1e-9 >= sigma * static_cast<double>(selected_n);
}

EvalResult evaluate(const BinGrid& grid, const std::vector<int>& thresholds) {
    check_thresholds(grid, thresholds);
    EvalResult ev;
    for (int i = 0; i < grid.levels; ++i) {
        for (int j = thresholds[i]; j < grid.score_bins; ++j) {
            ev.tp += grid.pos[i][j];
            ev.selected_n += grid.tot[i][j];
        }
    }
    const long long p0 = grid.positives_total();
    ev.empty_region = ev.selected_n == 0;
    ev.precision = ev.empty_region
                       ? 1.0
                       : static_cast<double>(ev.tp) / static_cast<double>(ev.selected_n);
    ev.recall = p0 > 0 ? static_cast<double>(ev.tp) / static_cast<double>(p0) : 1.0;
    return ev;
}

BoundarySolution solve_gmt(const BinGrid& grid, double sigma) {
    const SuffixSums s = suffix_sums(grid);
    std::vector<int> thresholds(grid.levels, grid.score_bins);
    for (int i = 0; i < grid.levels; ++i) {
        long long best_pi = 0;
        int best_j = 0;
        for (int j = 1; j <= grid.score_bins; ++j) {
            if (!precision_feasible(s.pi[i][j], s.nu[i][j], sigma)) continue;
            if (s.pi[i][j] > best_pi) {
                best_pi = s.pi[i][j];
                best_j = j;
            }
        }
        thresholds[i] = grid.score_bins - best_j;
    }
    return make_solution(grid, std::move(thresholds), "gmt", sigma);
}

BoundarySolution solve_st(const BinGrid& grid, double sigma) {
    if (grid.has_partitioner && !grid.partitioner.shared_score_edges())
        throw std::invalid_argument(
            "solve_st: score edges differ per uncertainty level; rebin scores into a "
            "single level (equi-weight K=1) and fit on that grid");
    std::vector<long long> p(grid.score_bins, 0), n(grid.score_bins, 0);
    for (int i = 0; i < grid.levels; ++i)
        for (int j = 0; j < grid.score_bins; ++j) {
            p[j] += grid.pos[i][j];
            n[j] += grid.tot[i][j];
        }
    BinGrid collapsed = BinGrid::from_counts({p}, {n});
    BoundarySolution one = solve_gmt(collapsed, sigma);
    BoundarySolution sol =
        make_solution(grid, std::vector<int>(grid.levels, one.thresholds[0]), "st", sigma);
    return sol;
}

BoundarySolution solve_mist(const BinGrid& grid, double sigma) {
    const std::vector<RankedBin> ranked = mist_rank(grid, nullptr);
    std::vector<int> taken(grid.levels, 0);
    long long cum_tp = 0, cum_n = 0;
    for (const RankedBin& bin : ranked) {
        const long long tp = cum_tp + grid.pos[bin.level][bin.score_bin];
        const long long n = cum_n + grid.tot[bin.level][bin.score_bin];
        if (!precision_feasible(tp, n, sigma)) break;
        cum_tp = tp;
        cum_n = n;
        taken[bin.level] += 1;
    }
    std::vector<int> thresholds(grid.levels);
    for (int i = 0; i < grid.levels; ++i) thresholds[i] = grid.score_bins - taken[i];
    return make_solution(grid, std::move(thresholds), "mist", sigma);
}

EwDpmtResult solve_ew_dpmt(const BinGrid& grid, double sigma) {
    const EwTable t = build_ew_table(grid);
    EwDpmtResult result;
    result.approximate_equi_weight = grid.max_bin_size() != grid.min_bin_size();
    result.pr_table.reserve(t.levels * t.score_bins + 1);
    for (int m = 0; m <= t.levels * t.score_bins; ++m)
        result.pr_table.push_back(ew_point(t, grid, m, sigma));
    const int best_m = ew_pick_budget(t, sigma);
    result.solution = best_m < 0
                          ? infeasible_solution(grid, "ew-dpmt", sigma)
                          : make_solution(grid, t.reconstruct(best_m, nullptr), "ew-dpmt", sigma);
    return result;
}

BoundarySolution solve_vw_dpmt(const BinGrid& grid, double sigma) {
    const SuffixSums s = suffix_sums(grid);
    const int k = grid.levels;
    const int l = grid.score_bins;

    struct State {
        long long tp;
        int j;             // bins taken from this level
        long long prev_m;  // budget key at the previous level
    };
    // per level: selected-sample budget -> best partial solution. The kept
    // state per key is the max under (tp desc, thresholds prefix lex asc), a
    // total order, so the hash maps stay deterministic.
    std::vector<std::unordered_map<long long, State>> layers(k);

    auto prefix_of = [&](int level, long long m) {
        std::vector<int> prefix(level + 1);
        for (int i = level; i >= 0; --i) {
            const State& st = layers[i].at(m);
            prefix[i] = l - st.j;
            m = st.prev_m;
        }
        return prefix;
    };

    auto offer = [&](int level, long long m, const State& cand) {
        auto [it, inserted] = layers[level].try_emplace(m, cand);
        if (inserted) return;
        if (cand.tp < it->second.tp) return;
        if (cand.tp > it->second.tp) {
            it->second = cand;
            return;
        }
        const std::vector<int> existing = prefix_of(level, m);
        const State saved = it->second;
        it->second = cand;
        const std::vector<int> candidate = prefix_of(level, m);
        if (existing <= candidate) it->second = saved;
    };

    for (int j = 0; j <= l; ++j) offer(0, s.nu[0][j], {s.pi[0][j], j, 0});
    for (int i = 1; i < k; ++i) {
        std::vector<long long> keys;
        keys.reserve(layers[i - 1].size());
        for (const auto& [m_prev, st] : layers[i - 1]) keys.push_back(m_prev);
        std::sort(keys.begin(), keys.end());
        for (long long m_prev : keys) {
            const State st = layers[i - 1].at(m_prev);
            for (int j = 0; j <= l; ++j)
                offer(i, m_prev + s.nu[i][j], {st.tp + s.pi[i][j], j, m_prev});
        }
    }

    std::vector<long long> budgets;
    budgets.reserve(layers[k - 1].size());
    for (const auto& [m, st] : layers[k - 1]) budgets.push_back(m);
    std::sort(budgets.begin(), budgets.end());
    long long best_tp = -1;
    long long best_m = -1;
    for (long long m : budgets) {
        if (m == 0) continue;
        const State& st = layers[k - 1].at(m);
        if (!precision_feasible(st.tp, m, sigma)) continue;
        if (st.tp > best_tp) {
            best_tp = st.tp;
            best_m = m;
        }
    }
    if (best_m < 0) return infeasible_solution(grid, "vw-dpmt", sigma);
    return make_solution(grid, prefix_of(k - 1, best_m), "vw-dpmt", sigma);
}

std::vector<int> prune_chp(const BinGrid& grid, double sigma, std::vector<int> thresholds) {
    check_thresholds(grid, thresholds);
    for (int i = 0; i < grid.levels; ++i) {
        int b_chp = 0;
        for (int j = grid.score_bins; j >= 1; --j) {
            if (!precision_feasible(grid.pos[i][j - 1], grid.tot[i][j - 1], sigma)) {
                b_chp = j;
                break;
            }
        }
        thresholds[i] = std::min(thresholds[i], b_chp);
    }
    return thresholds;
}

std::vector<PRPoint> pr_sweep(const BinGrid& grid, Algorithm algorithm,
                              const std::vector<double>& sigmas) {
    for (double sigma : sigmas)
        if (!(sigma > 0.0) || sigma > 1.0)
            throw std::invalid_argument("pr_sweep: sigma values must lie in (0,1]");
    std::vector<PRPoint> points;
    points.reserve(sigmas.size());
    if (algorithm == Algorithm::EwDpmt) {
        const EwTable t = build_ew_table(grid);
        for (double sigma : sigmas) {
            const int m = ew_pick_budget(t, sigma);
            if (m < 0) {
                PRPoint pt;
                pt.thresholds.assign(grid.levels, grid.score_bins);
                pt.recall = 0.0;
                points.push_back(std::move(pt));
            } else {
                points.push_back(ew_point(t, grid, m, sigma));
            }
        }
        return points;
    }
    for (double sigma : sigmas) {
        BoundarySolution sol;
        switch (algorithm) {
            case Algorithm::St: sol = solve_st(grid, sigma); break;
            case Algorithm::Gmt: sol = solve_gmt(grid, sigma); break;
            case Algorithm::Mist: sol = solve_mist(grid, sigma); break;
            case Algorithm::VwDpmt: sol = solve_vw_dpmt(grid, sigma); break;
            case Algorithm::EwDpmt: break;  // handled above
        }
        PRPoint pt;
        pt.m_or_cut = sol.selected_n;
        pt.precision = sol.precision_fit;
        pt.recall = sol.recall_fit;
        pt.feasible = sol.feasible;
        pt.thresholds = sol.thresholds;
        points.push_back(std::move(pt));
    }
    return points;
}

BoundarySolution brute_force_optimum(const BinGrid& grid, double sigma) {
    const int k = grid.levels;
    const int l = grid.score_bins;
    double states = 1.0;
    for (int i = 0; i < k; ++i) states *= l + 1;
    if (states > 1e7)
        throw std::invalid_argument("brute_force_optimum: state space exceeds 1e7");

    const SuffixSums s = suffix_sums(grid);
    std::vector<int> taken(k, 0);  // bins taken per level = L - b(i)
    std::vector<int> best_taken(k, 0);
    long long best_tp = 0;
    long long best_sel = 0;
    bool have_best = false;

    auto thresholds_of = [&](const std::vector<int>& tk) {
        std::vector<int> thresholds(k);
        for (int i = 0; i < k; ++i) thresholds[i] = l - tk[i];
        return thresholds;
    };

    for (;;) {
        long long tp = 0, sel = 0;
        for (int i = 0; i < k; ++i) {
            tp += s.pi[i][taken[i]];
            sel += s.nu[i][taken[i]];
        }
        if (sel == 0 || precision_feasible(tp, sel, sigma)) {
            bool better = !have_best;
            if (have_best) {
                if (tp != best_tp) better = tp > best_tp;
                else if (sel != best_sel) better = sel < best_sel;
                else better = thresholds_of(taken) < thresholds_of(best_taken);
            }
            if (better) {
                best_tp = tp;
                best_sel = sel;
                best_taken = taken;
                have_best = true;
            }
        }
        int pos = 0;
        while (pos < k && taken[pos] == l) taken[pos++] = 0;
        if (pos == k) break;
        ++taken[pos];
    }
    return make_solution(grid, thresholds_of(best_taken), "brute-force", sigma);
}

std::string boundary_to_json(const BoundarySolution& solution, const Partitioner& partitioner) {
    json doc;
    doc["version"] = 1;
    doc["algorithm"] = solution.algorithm;
    doc["sigma"] = solution.sigma;
    doc["thresholds"] = solution.thresholds;
    doc["tp"] = solution.tp;
    doc["selected_n"] = solution.selected_n;
    doc["precision_fit"] = solution.precision_fit;
    doc["recall_fit"] = solution.recall_fit;
    doc["empty_region"] = solution.empty_region;
    doc["feasible"] = solution.feasible;
    doc["partitioner"] = json::parse(partitioner.to_json());
    return doc.dump(2);
}

SavedBoundary boundary_from_json(const std::string& text) {
    json doc = json::parse(text);
    if (doc.at("version").get<int>() != 1)
        throw std::invalid_argument("boundary JSON: unsupported version");
    SavedBoundary sb;
    sb.solution.algorithm = doc.at("algorithm").get<std::string>();
    sb.solution.sigma = doc.at("sigma").get<double>();
    sb.solution.thresholds = doc.at("thresholds").get<std::vector<int>>();
    sb.solution.tp = doc.at("tp").get<long long>();
    sb.solution.selected_n = doc.at("selected_n").get<long long>();
    sb.solution.precision_fit = doc.at("precision_fit").get<double>();
    sb.solution.recall_fit = doc.at("recall_fit").get<double>();
    sb.solution.empty_region = doc.value("empty_region", sb.solution.selected_n == 0);
    sb.solution.feasible = doc.value("feasible", false);
    sb.partitioner = Partitioner::from_json(doc.at("partitioner").dump());
    const int k = sb.partitioner.levels();
    const int l = sb.partitioner.score_bins();
    if (static_cast<int>(sb.solution.thresholds.size()) != k)
        throw std::invalid_argument("boundary JSON: thresholds length differs from K");
    for (int b : sb.solution.thresholds)
        if (b < 0 || b > l) throw std::invalid_argument("boundary JSON: threshold out of [0..L]");
    return sb;
}

}  // namespace bdb
