// Counter-based pseudo-random streams.
//
// Every stream is a (key, counter) pair; draw i of a stream is
// mix64(key + GOLDEN * i) where mix64 is the splitmix64 finalizer. Streams
// split by deriving a child key from (key, purpose), so independent
// consumers (per node, per subject, per epoch) get decorrelated streams
// whose output does not depend on scheduling order.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "t1q/core.hpp"

namespace t1q {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream() : key_(0) {}
    explicit RngStream(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

    // Independent substream; deterministic in (this stream's key, purpose).
    RngStream child(std::uint64_t purpose) const {
        RngStream s;
        s.key_ = mix64(key_ ^ mix64(purpose + kGolden));
        return s;
    }
    RngStream child(std::string_view purpose) const { return child(fnv1a(purpose)); }

    std::uint64_t next_u64() { return mix64(key_ + kGolden * ++ctr_); }

    // Uniform on (0, 1]; never 0, so it is safe under log().
    double next_u01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
    }

    // Uniform on [lo, hi).
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * (next_u01() - 0x1p-53);
    }

    // Integer uniform on [0, n). Modulo bias is irrelevant at our n.
    std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

    // Standard normal via Box-Muller (one value per pair of uniforms).
    double next_normal() {
        const double u = next_u01();
        const double v = next_u01();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
    }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

// Seeded Fisher-Yates; stable across platforms, unlike std::shuffle.
template <typename T>
void shuffle(std::vector<T>& v, RngStream& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace t1q
