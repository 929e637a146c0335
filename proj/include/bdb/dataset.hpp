#pragma once
// Labeled (score, uncertainty, label) samples and their CSV form.
// Immutable after construction; safe for concurrent reads.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bdb {

struct Sample {
    double score = 0.0;        // positive-class model score in [0,1]
    double uncertainty = 0.0;  // unbounded, e.g. differential entropy (may be negative)
    int label = 0;             // 0 or 1; kept integral so positive counts stay exact
};

class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Sample> samples);

    const std::vector<Sample>& samples() const { return samples_; }
    long long size() const { return static_cast<long long>(samples_.size()); }
    long long positives() const { return positives_; }
    bool empty() const { return samples_.empty(); }
    const Sample& operator[](size_t i) const { return samples_[i]; }

private:
    std::vector<Sample> samples_;
    long long positives_ = 0;
};

// CSV, UTF-8, header "score,uncertainty,label", LF or CRLF endings.
// Malformed rows are reported with their 1-based line number; a file with a
// header but no rows is an error ("empty dataset").
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& d, const std::string& path);

// Parses CSV text directly (load_csv is this plus file reading).
Dataset parse_csv(const std::string& text);
std::string to_csv(const Dataset& d);

// Disjoint shuffled partition into (hold, test). Fractions must be positive
// and sum to 1. Deterministic for a fixed seed.
std::pair<Dataset, Dataset> split(const Dataset& d, double hold_fraction,
                                  double test_fraction, uint64_t seed);

}  // namespace bdb
