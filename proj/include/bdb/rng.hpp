#pragma once
// Counter-based PRNG (Philox4x32-10) with derived samplers. Counter-based
// generation gives independent per-stream substreams from one seed, so
// parallel or out-of-order generation cannot change the draws.

#include <array>
#include <cmath>
#include <cstdint>

namespace bdb {

// One 10-round Philox4x32 block. key = {k0, k1}, counter = 4x32 bits.
inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                          std::array<uint32_t, 2> key) {
    constexpr uint32_t kMul0 = 0xD2511F53u;
    constexpr uint32_t kMul1 = 0xCD9E8D57u;
    constexpr uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const uint64_t prod0 = static_cast<uint64_t>(kMul0) * ctr[0];
        const uint64_t prod1 = static_cast<uint64_t>(kMul1) * ctr[2];
        const uint32_t hi0 = static_cast<uint32_t>(prod0 >> 32);
        const uint32_t lo0 = static_cast<uint32_t>(prod0);
        const uint32_t hi1 = static_cast<uint32_t>(prod1 >> 32);
        const uint32_t lo1 = static_cast<uint32_t>(prod1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0)
        : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
          stream_{static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)} {}

    uint64_t next_u64() {
        if (buf_pos_ >= 2) refill();
        const uint64_t lo = buf_[2 * buf_pos_];
        const uint64_t hi = buf_[2 * buf_pos_ + 1];
        ++buf_pos_;
        return (hi << 32) | lo;
    }

    // uniform on [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }

    uint64_t uniform_below(uint64_t bound) { return bound ? next_u64() % bound : 0; }

    bool bernoulli(double p) { return uniform() < p; }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    // Marsaglia-Tsang; shape boost for shape < 1
    double gamma(double shape) {
        if (shape < 1.0)
            return gamma(shape + 1.0) * std::pow(uniform_pos(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            const double x = normal();
            const double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            const double v = t * t * t;
            const double u = uniform_pos();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    long long binomial(long long n, double p) {
        long long hits = 0;
        for (long long i = 0; i < n; ++i) hits += bernoulli(p);
        return hits;
    }

private:
    void refill() {
        buf_ = philox4x32({stream_[0], stream_[1], block_lo_, block_hi_}, key_);
        if (++block_lo_ == 0) ++block_hi_;
        buf_pos_ = 0;
    }

    std::array<uint32_t, 2> key_;
    std::array<uint32_t, 2> stream_;
    uint32_t block_lo_ = 0;
    uint32_t block_hi_ = 0;
    std::array<uint32_t, 4> buf_{};
    int buf_pos_ = 2;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace bdb
