#ifndef FLOWCAST_TEST_HELPERS_HPP
#define FLOWCAST_TEST_HELPERS_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "flowcast/rng.hpp"

namespace testutil {

inline std::vector<double> seeded_uniform(std::uint64_t seed, std::size_t n,
                                          double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = lo + (hi - lo) * flowcast::uniform01(rng);
    return out;
}

inline std::vector<double> random_walk(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    double x = 0.0;
    for (auto& v : out) {
        x += flowcast::uniform01(rng) - 0.5;
        v = x;
    }
    return out;
}

// sin(2*pi*8*t/n) + 0.5*sin(2*pi*t/n): one fast tone, one slow tone.
inline std::vector<double> two_tone(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double phase = 2.0 * M_PI * static_cast<double>(t) / static_cast<double>(n);
        out[t] = std::sin(8.0 * phase) + 0.5 * std::sin(phase);
    }
    return out;
}

inline std::vector<double> fast_tone(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = std::sin(2.0 * M_PI * 8.0 * static_cast<double>(t) / static_cast<double>(n));
    }
    return out;
}

inline std::vector<double> slow_tone(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = 0.5 * std::sin(2.0 * M_PI * static_cast<double>(t) / static_cast<double>(n));
    }
    return out;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b,
                      std::size_t begin, std::size_t end) {
    const double n = static_cast<double>(end - begin);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

// Correlation over the interior 80% of samples.
inline double interior_pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    return pearson(a, b, n / 10, n - n / 10);
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace testutil

#endif  // FLOWCAST_TEST_HELPERS_HPP
