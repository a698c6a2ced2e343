#pragma once

// Splittable deterministic generator. Contract: every randomized case derives
// its own stream as split(master_seed, case_name), so results do not depend
// on execution order or thread count.

#include <cstdint>
#include <string_view>

namespace cmt {

class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    // uniform in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // uniform integer in [0,n)
    uint64_t below(uint64_t n) { return next() % n; }
    // small signed integer in [-m,m]
    long long small_int(long long m) { return (long long)(below(2 * m + 1)) - m; }

private:
    uint64_t state_;
};

inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) { h ^= (unsigned char)c; h *= 0x100000001b3ULL; }
    return h;
}

inline SplitMix64 split(uint64_t master, std::string_view name) {
    return SplitMix64(master ^ fnv1a(name));
}

} // namespace cmt
