#include "bdb/dataset.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "bdb/io_util.hpp"
#include "bdb/rng.hpp"

namespace bdb {
namespace {

void validate_sample(const Sample& s, const std::string& where) {
    if (std::isnan(s.score) || s.score < 0.0 || s.score > 1.0)
        throw std::invalid_argument(where + ": score out of [0,1]");
    if (!std::isfinite(s.uncertainty))
        throw std::invalid_argument(where + ": uncertainty not finite");
    if (s.label != 0 && s.label != 1)
        throw std::invalid_argument(where + ": label not in {0,1}");
}

double parse_real(std::string_view field, const std::string& where) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::runtime_error(where + ": cannot parse number '" + std::string(field) + "'");
    return value;
}

}  // namespace

Dataset::Dataset(std::vector<Sample> samples) : samples_(std::move(samples)) {
    for (size_t i = 0; i < samples_.size(); ++i) {
        validate_sample(samples_[i], "sample " + std::to_string(i));
        positives_ += samples_[i].label;
    }
}

Dataset parse_csv(const std::string& text) {
    std::vector<Sample> samples;
    size_t pos = 0;
    long long line_no = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line(text.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);
        if (!saw_header) {
            if (line != "score,uncertainty,label")
                throw std::runtime_error(where + ": expected header 'score,uncertainty,label'");
            saw_header = true;
            continue;
        }
        const size_t c1 = line.find(',');
        const size_t c2 = c1 == std::string_view::npos ? std::string_view::npos : line.find(',', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
            line.find(',', c2 + 1) != std::string_view::npos)
            throw std::runtime_error(where + ": expected 3 comma-separated fields");
        Sample s;
        s.score = parse_real(line.substr(0, c1), where);
        s.uncertainty = parse_real(line.substr(c1 + 1, c2 - c1 - 1), where);
        const double label = parse_real(line.substr(c2 + 1), where);
        if (label != 0.0 && label != 1.0)
            throw std::runtime_error(where + ": label not in {0,1}");
        s.label = static_cast<int>(label);
        if (std::isnan(s.score) || s.score < 0.0 || s.score > 1.0)
            throw std::runtime_error(where + ": score out of [0,1]");
        if (!std::isfinite(s.uncertainty))
            throw std::runtime_error(where + ": uncertainty not finite");
        samples.push_back(s);
    }
    if (!saw_header) throw std::runtime_error("missing header 'score,uncertainty,label'");
    if (samples.empty()) throw std::runtime_error("empty dataset");
    return Dataset(std::move(samples));
}

std::string to_csv(const Dataset& d) {
    std::string out = "score,uncertainty,label\n";
    for (const Sample& s : d.samples()) {
        out += format_double(s.score);
        out += ',';
        out += format_double(s.uncertainty);
        out += ',';
        out += s.label ? '1' : '0';
        out += '\n';
    }
    return out;
}

Dataset load_csv(const std::string& path) { return parse_csv(read_file(path)); }

void save_csv(const Dataset& d, const std::string& path) { atomic_write_file(path, to_csv(d)); }

std::pair<Dataset, Dataset> split(const Dataset& d, double hold_fraction,
                                  double test_fraction, uint64_t seed) {
    if (!(hold_fraction > 0.0) || !(test_fraction > 0.0) ||
        std::abs(hold_fraction + test_fraction - 1.0) > 1e-9)
        throw std::invalid_argument("split: fractions must be positive and sum to 1");
    const long long n = d.size();
    std::vector<size_t> order(n);
    for (long long i = 0; i < n; ++i) order[i] = static_cast<size_t>(i);
    // stream id far above any plausible region-substream index
    Rng rng(seed, /*stream=*/0xD15C000000005911ull);
    for (long long i = n - 1; i > 0; --i) {
        const uint64_t j = rng.uniform_below(static_cast<uint64_t>(i) + 1);
        std::swap(order[i], order[j]);
    }
    long long hold_n = std::llround(hold_fraction * static_cast<double>(n));
    if (hold_n < 0) hold_n = 0;
    if (hold_n > n) hold_n = n;
    std::vector<Sample> hold, test;
    hold.reserve(hold_n);
    test.reserve(n - hold_n);
    for (long long i = 0; i < n; ++i) {
        const Sample& s = d[order[i]];
        (i < hold_n ? hold : test).push_back(s);
    }
    return {Dataset(std::move(hold)), Dataset(std::move(test))};
}

}  // namespace bdb
