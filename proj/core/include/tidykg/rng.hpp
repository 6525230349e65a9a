#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace tidykg {

// Deterministic generator with explicit, portable output mappings.
// std:: distributions are implementation-defined, so everything that feeds
// reproducible artifacts (game generation, parameter init, action sampling)
// goes through this class instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // Warm up so that small consecutive seeds decorrelate.
        next_u64();
        next_u64();
    }

    // splitmix64 step.
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n). Unbiased via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_below(n)); }

    bool coin() { return (next_u64() & 1u) != 0; }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[index(items.size())];
    }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[index(i)]);
        }
    }

    // Stable derivation of sub-stream seeds (run/episode/rollout style).
    static std::uint64_t derive(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (std::uint64_t v : {a, b, c}) {
            h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
            h ^= h >> 33;
        }
        return h;
    }

private:
    std::uint64_t state_;
};

}  // namespace tidykg
