#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace shiftprobe {

// FNV-1a, used for content hashes (prompt text, files, run manifests).
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

// splitmix64: tiny, seedable, stable across platforms. Every randomized
// component derives its stream from (seed, key) so results are independent
// of batch composition.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Stream for a named entity, e.g. (global seed, example id).
    static Rng for_key(std::uint64_t seed, std::string_view key) {
        return Rng(seed ^ fnv1a64(key) ^ 0x9e3779b97f4a7c15ull);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
    }

    // Uniform in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

}  // namespace shiftprobe
