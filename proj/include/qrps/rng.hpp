#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace qrps {

// Deterministic generator (xoshiro-style splitmix64 core). Substreams are
// derived from a root seed plus an integer path, so that parameter draws,
// codebook entries, channel outcomes, and decoder sampling each consume an
// independent stream and can be re-run in isolation.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Index in [0, n).
    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

    // Sample an index from a pmf by CDF scan; the last cell absorbs rounding.
    int sample(const std::vector<double>& pmf) {
        const double u = uniform();
        double acc = 0.0;
        for (size_t i = 0; i + 1 < pmf.size(); ++i) {
            acc += pmf[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(pmf.size()) - 1;
    }

    double gaussian() {
        // Box-Muller, one value per call (the pair's second half is dropped
        // to keep the stream position independent of call parity).
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    uint64_t state_;
};

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Substream at seed/path[0]/path[1]/...; documented paths live next to
// their consumers.
inline Rng substream(uint64_t seed, std::initializer_list<uint64_t> path) {
    uint64_t s = seed;
    for (uint64_t p : path) s = mix_seed(s, p);
    return Rng(s);
}

}  // namespace qrps
