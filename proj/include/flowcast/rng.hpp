// Seedable, platform-independent random primitives. std::mt19937_64 has a
// fully specified output sequence, but the standard distributions do not,
// so the samplers here are hand-rolled to keep results reproducible across
// standard libraries.

#ifndef FLOWCAST_RNG_HPP
#define FLOWCAST_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace flowcast {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Order-independent sub-seed for work unit `index` under a base seed.
inline std::uint64_t sub_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 1));
}

inline std::uint64_t sub_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return sub_seed(sub_seed(base, a), b);
}

// Uniform double in [0, 1) with 53 bits of precision.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n) via the Lemire multiply-shift reduction.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const auto x = rng();
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(n)) >> 64);
}

// Box-Muller standard normal; one value per call, cached pair.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(rng_);
        double u2 = uniform01(rng_);
        while (u1 <= 0.0) u1 = uniform01(rng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::vector<double> sequence(std::size_t n) {
        std::vector<double> out(n);
        for (auto& v : out) v = (*this)();
        return out;
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace flowcast

#endif  // FLOWCAST_RNG_HPP
