// Core scalar type, error type, and small shared utilities.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace t1q {

// Precision of the numeric core. Tests assume double.
#ifdef T1Q_SINGLE_PRECISION
using Real = float;
#else
using Real = double;
#endif

// Data/validation errors raised by the toolkit. Programmer errors
// (bad arguments to low-level math) use std::domain_error etc.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// FNV-1a, used to derive rng stream keys from string ids.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a_bytes(const void* data, std::size_t n) {
    std::uint64_t h = 1469598103934665603ull;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

// Runs fn(begin, end) on contiguous chunks of [0, n). threads <= 1 runs
// inline. Work items must be independent: results may not depend on the
// chunking, so any thread count produces identical output.
inline void parallel_for(std::int64_t n, int threads,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n < 2) {
        fn(0, n);
        return;
    }
    const int nt = static_cast<int>(std::min<std::int64_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::int64_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const std::int64_t b = t * chunk;
        const std::int64_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace t1q
