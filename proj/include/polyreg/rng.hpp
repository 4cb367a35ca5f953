#pragma once

#include <cstdint>
#include <random>

#include "polyreg/special.hpp"

namespace polyreg {

// splitmix64 finalizer; used to derive independent stream seeds from a base
// seed plus identifying integers (time index, stream tag).  Mixing through a
// finalizer keeps streams decorrelated without any shared state.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(base ^ 0x6a09e667f3bcc908ULL) + mix64(a) + 3 * mix64(b));
}

// Deterministic random source.  All randomness in the library flows through
// this wrapper so that results are reproducible bit for bit across platforms:
// mt19937_64 is fully specified by the standard, uniforms take the top 53
// bits, and gaussians go through the inverse normal CDF rather than any
// distribution class with unspecified algorithm.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on the open interval (0,1); never returns 0 or 1, so the value
    // is safe to pass through quantile transforms.
    double uniform01() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
    }

    double gaussian() { return normal_quantile(uniform01()); }

    // Uniform index in [0, n).  Modulo bias is irrelevant at the sizes used
    // here; determinism is what matters.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(gen_() % n);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace polyreg
