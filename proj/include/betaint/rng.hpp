#pragma once

#include <cstdint>
#include <random>

namespace betaint {

using Rng = std::mt19937_64;

// splitmix64, used to whiten (seed, stream id) pairs into engine seeds so
// that substreams derived from neighbouring ids are statistically unrelated.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic substream: same (seed, stream) always yields the same engine.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(stream + 0x6a09e667f3bcc909ULL));
    return Rng(s);
}

inline double draw_normal(Rng& rng, double stddev = 1.0) {
    std::normal_distribution<double> d(0.0, stddev);
    return d(rng);
}

inline double draw_uniform(Rng& rng) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    return d(rng);
}

inline double draw_gamma(Rng& rng, double shape, double rate) {
    std::gamma_distribution<double> d(shape, 1.0 / rate);
    return d(rng);
}

inline double draw_beta(Rng& rng, double a, double b) {
    double x = draw_gamma(rng, a, 1.0);
    double y = draw_gamma(rng, b, 1.0);
    return x / (x + y);
}

}  // namespace betaint
