#pragma once

#include <cstdint>

namespace critlat {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based generator: the variate for (key, a, b) is a pure function of
// its inputs, so any stream position can be regenerated without replay.
inline std::uint64_t hash3(std::uint64_t key, std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(mix64(key) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

inline double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

inline double uniform_at(std::uint64_t key, std::uint64_t a, std::uint64_t b) { return to_unit(hash3(key, a, b)); }

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) { return hash3(seed, stream, 0x5eedULL); }

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key, std::uint64_t stream = 0) : key_(derive_seed(key, stream)) {}
    std::uint64_t next_u64() { return hash3(key_, ctr_++, 0); }
    double uniform() { return to_unit(next_u64()); }
    // unbiased integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        for (;;) {
            std::uint64_t x = next_u64();
            if (x < limit) return x % n;
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace critlat
