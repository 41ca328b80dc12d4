#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowcast/extrema.hpp"
#include "helpers.hpp"

using namespace flowcast;

namespace {

// Exhaustive neighbor-comparison oracle for plateau-free inputs.
ExtremaSet brute_force_extrema(const std::vector<double>& v) {
    ExtremaSet out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] > v[i + 1]) out.maxima.push_back({i, v[i]});
        if (v[i] < v[i - 1] && v[i] < v[i + 1]) out.minima.push_back({i, v[i]});
    }
    return out;
}

bool same_extrema(const ExtremaSet& a, const ExtremaSet& b) {
    auto eq = [](const std::vector<Extremum>& x, const std::vector<Extremum>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i].index != y[i].index || x[i].value != y[i].value) return false;
        }
        return true;
    };
    return eq(a.maxima, b.maxima) && eq(a.minima, b.minima);
}

}  // namespace

TEST_CASE("triangle wave extrema") {
    const auto ex = find_extrema(std::vector<double>{0, 1, 0, -1, 0});
    REQUIRE(ex.maxima.size() == 1);
    REQUIRE(ex.minima.size() == 1);
    CHECK(ex.maxima[0].index == 1);
    CHECK(ex.maxima[0].value == 1.0);
    CHECK(ex.minima[0].index == 3);
    CHECK(ex.minima[0].value == -1.0);
}

TEST_CASE("monotone has no interior extrema") {
    const auto ex = find_extrema(std::vector<double>{1, 2, 3, 4, 5});
    CHECK(ex.maxima.empty());
    CHECK(ex.minima.empty());
}

TEST_CASE("matches brute-force scan on seeded noise") {
    const auto v = testutil::seeded_uniform(0, 64);
    CHECK(same_extrema(find_extrema(v), brute_force_extrema(v)));
    for (std::uint64_t seed = 1; seed < 20; ++seed) {
        const auto u = testutil::seeded_uniform(seed, 256, -1.0, 1.0);
        CHECK(same_extrema(find_extrema(u), brute_force_extrema(u)));
    }
}

TEST_CASE("negating the series swaps maxima and minima") {
    const auto v = testutil::seeded_uniform(7, 128, -1.0, 1.0);
    auto neg = v;
    for (auto& x : neg) x = -x;
    const auto a = find_extrema(v);
    const auto b = find_extrema(neg);
    REQUIRE(a.maxima.size() == b.minima.size());
    REQUIRE(a.minima.size() == b.maxima.size());
    for (std::size_t i = 0; i < a.maxima.size(); ++i) {
        CHECK(a.maxima[i].index == b.minima[i].index);
    }
}

TEST_CASE("plateau contributes its middle index") {
    SUBCASE("even-length run uses the lower middle") {
        const auto ex = find_extrema(std::vector<double>{0, 1, 1, 0});
        REQUIRE(ex.maxima.size() == 1);
        CHECK(ex.maxima[0].index == 1);
    }
    SUBCASE("odd-length run uses the exact middle") {
        const auto ex = find_extrema(std::vector<double>{0, 1, 1, 1, 0});
        REQUIRE(ex.maxima.size() == 1);
        CHECK(ex.maxima[0].index == 2);
    }
    SUBCASE("plateau minima") {
        const auto ex = find_extrema(std::vector<double>{2, -1, -1, 3, 2});
        REQUIRE(ex.minima.size() == 1);
        CHECK(ex.minima[0].index == 1);
        REQUIRE(ex.maxima.size() == 1);
        CHECK(ex.maxima[0].index == 3);
    }
    SUBCASE("plateau touching an endpoint is not interior") {
        const auto ex = find_extrema(std::vector<double>{1, 0, 0});
        CHECK(ex.minima.empty());
        CHECK(ex.maxima.empty());
    }
    SUBCASE("saddle plateau is not an extremum") {
        const auto ex = find_extrema(std::vector<double>{0, 1, 1, 2});
        CHECK(ex.maxima.empty());
        CHECK(ex.minima.empty());
    }
}

TEST_CASE("too short series throws") {
    CHECK_THROWS_AS(find_extrema(std::vector<double>{1, 2}), SeriesTooShort);
}

TEST_CASE("zero crossings: alternating signs") {
    CHECK(count_zero_crossings({1, -1, 1, -1}) == 3);
}

TEST_CASE("zero crossings: zero-run collapses to one crossing") {
    CHECK(count_zero_crossings({1, 0, -1}) == 1);
    CHECK(count_zero_crossings({1, 0, 0, -1}) == 1);
    CHECK(count_zero_crossings({1, 0, 1}) == 0);
    CHECK(count_zero_crossings({0, 0, 0}) == 0);
    CHECK(count_zero_crossings({0, 1, 2}) == 0);
}

TEST_CASE("zero crossings of a sampled sinusoid match the analytic root count") {
    // sin(2*pi*2*(t - 0.25)/64) over t = 0..63: roots of the continuous
    // signal at t = 16k + 0.25 for k = 0..3, all strictly inside the sample
    // range, so four sign changes are visible (one per half-period; the
    // start point itself is not a crossing).
    std::vector<double> v(64);
    for (std::size_t t = 0; t < 64; ++t) {
        v[t] = std::sin(2.0 * M_PI * 2.0 * (static_cast<double>(t) - 0.25) / 64.0);
    }
    CHECK(count_zero_crossings(v) == 4);
}
