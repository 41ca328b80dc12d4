#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flowcast/emd.hpp"
#include "helpers.hpp"

using namespace flowcast;

TEST_CASE("envelopes of a pure tone hug +/- the amplitude") {
    const auto v = testutil::fast_tone(512);
    SiftConfig config;
    const auto env = build_envelopes(v, find_extrema(v), config);
    for (std::size_t t = 128; t < 384; ++t) {
        CHECK(std::abs(env.upper[t] - 1.0) < 0.05);
        CHECK(std::abs(env.lower[t] + 1.0) < 0.05);
        CHECK(std::abs(env.mean[t]) < 0.05);
    }
}

TEST_CASE("two equal maxima knots give a constant upper envelope") {
    std::vector<double> v(11, 0.0);
    v[5] = 2.0;
    v[3] = -1.0;
    ExtremaSet extrema;
    extrema.maxima = {{5, 2.0}};
    extrema.minima = {{3, -1.0}};
    SiftConfig config;
    config.spline_kind = SplineKind::LinearFallback;
    const auto env = build_envelopes(v, extrema, config);
    for (double u : env.upper) CHECK(u == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("insufficient extrema is an error") {
    std::vector<double> v{1, 2, 3, 4, 5};
    SiftConfig config;
    CHECK_THROWS_AS(build_envelopes(v, find_extrema(v), config), InsufficientExtrema);
    CHECK_THROWS_AS(sift_once(v, config), InsufficientExtrema);
}

TEST_CASE("sift subtracts the mean envelope") {
    SiftConfig config;

    SUBCASE("zero mean envelope keeps the input") {
        const std::vector<double> v{0, 1, 0, -1, 0, 1, 0, -1, 0};
        const auto out = sift_once(v, config);
        for (std::size_t t = 0; t < v.size(); ++t) {
            CHECK(out[t] == doctest::Approx(v[t]).epsilon(1e-12));
        }
    }

    SUBCASE("output equals input minus the envelope mean elementwise") {
        const auto v = testutil::two_tone(256);
        const auto env = build_envelopes(v, find_extrema(v), config);
        const auto out = sift_once(v, config);
        for (std::size_t t = 0; t < v.size(); ++t) {
            CHECK(out[t] == doctest::Approx(v[t] - env.mean[t]).epsilon(1e-15));
        }
    }

    SUBCASE("a pure tone barely moves") {
        const auto v = testutil::fast_tone(512);
        const auto out = sift_once(v, config);
        for (std::size_t t = 128; t < 384; ++t) {
            CHECK(std::abs(out[t] - v[t]) < 0.05);
        }
    }
}

TEST_CASE("is_imf") {
    SiftConfig config;

    SUBCASE("pure tone passes") {
        const auto check = is_imf(testutil::fast_tone(512), config);
        CHECK(check.accepted);
        CHECK(check.count_ok);
        CHECK(check.mean_ok);
    }

    SUBCASE("monotone ramp fails the mean rule") {
        std::vector<double> ramp(64);
        for (std::size_t t = 0; t < 64; ++t) ramp[t] = -1.0 + 2.0 * static_cast<double>(t) / 63.0;
        const auto check = is_imf(ramp, config);
        CHECK(check.count_ok);  // 0 extrema vs 1 crossing
        CHECK_FALSE(check.mean_ok);
        CHECK_FALSE(check.accepted);
    }

    SUBCASE("offset tone fails the mean rule") {
        auto v = testutil::fast_tone(512);
        for (auto& x : v) x += 0.3;
        const auto check = is_imf(v, config);
        CHECK_FALSE(check.accepted);
        CHECK(check.max_mean_abs > 0.05 * check.range);
    }
}

TEST_CASE("emd: monotone input stops immediately") {
    const auto d = emd(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}, SiftConfig{});
    CHECK(d.imfs.empty());
    REQUIRE(d.residue.size() == 8);
    for (std::size_t t = 0; t < 8; ++t) CHECK(d.residue[t] == doctest::Approx(t + 1.0));
}

TEST_CASE("emd separates the two-tone signal") {
    const auto v = testutil::two_tone(512);
    const auto d = emd(v, SiftConfig{});
    REQUIRE(d.imfs.size() == 2);
    CHECK(testutil::interior_pearson(d.imfs[0], testutil::fast_tone(512)) > 0.95);
    CHECK(testutil::interior_pearson(d.imfs[1], testutil::slow_tone(512)) > 0.95);
}

TEST_CASE("emd reconstructs the input exactly") {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        const auto v = testutil::random_walk(seed, 256);
        const auto d = emd(v, SiftConfig{});
        const double bound = 1e-9 * std::max(1.0, testutil::max_abs(v));
        CHECK(d.reconstruction_error(v) <= bound);
    }
}

TEST_CASE("accepted IMFs satisfy the defining conditions") {
    const auto v = testutil::seeded_uniform(11, 512, -1.0, 1.0);
    SiftConfig config;
    const auto d = emd(v, config);
    REQUIRE(!d.imfs.empty());
    for (std::size_t m = 0; m < d.imfs.size(); ++m) {
        if (d.imf_info[m].force_accepted) continue;
        const auto check = is_imf(d.imfs[m], config);
        CHECK(check.accepted);
    }
}

TEST_CASE("emd is deterministic") {
    const auto v = testutil::seeded_uniform(5, 300, 0.0, 10.0);
    const auto a = emd(v, SiftConfig{});
    const auto b = emd(v, SiftConfig{});
    REQUIRE(a.imfs.size() == b.imfs.size());
    for (std::size_t m = 0; m < a.imfs.size(); ++m) {
        for (std::size_t t = 0; t < a.imfs[m].size(); ++t) {
            CHECK(a.imfs[m][t] == b.imfs[m][t]);
        }
    }
    for (std::size_t t = 0; t < a.residue.size(); ++t) CHECK(a.residue[t] == b.residue[t]);
}

TEST_CASE("emd rejects too-short input") {
    CHECK_THROWS_AS(emd(std::vector<double>{1, 2, 3}, SiftConfig{}), SeriesTooShort);
}
