#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "freqq/acf.hpp"
#include "freqq/error.hpp"
#include "oracles.hpp"

using namespace freqq;

TEST_CASE("lag zero is exactly one") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        const FrequencySeries s(oracle::random_series(rng, 50 + rng() % 3000), 1.0);
        for (auto method : {AcfMethod::Direct, AcfMethod::Fft})
            for (auto est : {AcfEstimator::Biased, AcfEstimator::Unbiased})
                CHECK(autocorrelation(s, 20, {est, method}).values[0] == 1.0);
    }
}

TEST_CASE("matches the brute-force double loop") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 20 + rng() % 481;
        const auto v = oracle::random_series(rng, n);
        const std::size_t lags = 1 + rng() % (n - 1);
        for (bool unbiased : {false, true}) {
            const auto expect = oracle::acf(v, lags, unbiased);
            for (auto method : {AcfMethod::Direct, AcfMethod::Fft}) {
                const auto got = autocorrelation(FrequencySeries(v, 1.0), lags,
                                                 {unbiased ? AcfEstimator::Unbiased : AcfEstimator::Biased, method});
                REQUIRE(got.values.size() == lags + 1);
                const double tol = method == AcfMethod::Direct ? 1e-12 : 1e-9;
                for (std::size_t k = 0; k <= lags; ++k) CHECK(std::abs(got.values[k] - expect[k]) <= tol);
            }
        }
    }
}

TEST_CASE("direct and FFT agree on a full-size window") {
    std::mt19937_64 rng(3);
    const FrequencySeries s(oracle::random_series(rng, 10000), 1.0);
    const auto d = autocorrelation(s, 3600, {AcfEstimator::Biased, AcfMethod::Direct});
    const auto f = autocorrelation(s, 3600, {AcfEstimator::Biased, AcfMethod::Fft});
    double worst = 0.0;
    for (std::size_t k = 0; k <= 3600; ++k) worst = std::max(worst, std::abs(d.values[k] - f.values[k]));
    CHECK(worst <= 1e-9);
    CHECK(resolve_method(AcfMethod::Auto, 3600) == AcfMethod::Fft);
    CHECK(resolve_method(AcfMethod::Auto, 100) == AcfMethod::Direct);
}

TEST_CASE("affine invariance") {
    std::mt19937_64 rng(4);
    const auto v = oracle::random_series(rng, 2000);
    const auto base = autocorrelation(FrequencySeries(v, 1.0), 1500);
    for (double a : {-3.0, 0.5, 1e3}) {
        std::vector<double> w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = a * v[i] + 7.0;
        const auto t = autocorrelation(FrequencySeries(w, 1.0), 1500);
        for (std::size_t k = 0; k <= 1500; ++k) CHECK(std::abs(t.values[k] - base.values[k]) <= 1e-9);
    }
}

TEST_CASE("white noise stays inside the large-sample bound") {
    const std::size_t n = 10000;
    const double bound = 4.0 / std::sqrt(static_cast<double>(n));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(50.0, 0.01);
        std::vector<double> v(n);
        for (auto& x : v) x = g(rng);
        const auto r = autocorrelation(FrequencySeries(v, 1.0), 100);
        int inside = 0;
        for (std::size_t k = 1; k <= 100; ++k) inside += std::abs(r.values[k]) < bound;
        CHECK(inside >= 95);
    }
}

TEST_CASE("alternating series") {
    for (std::size_t n : {10u, 100u, 2000u}) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = i % 2 == 0 ? 50.05 : 49.95;
        const auto r = autocorrelation(FrequencySeries(v, 1.0), 1);
        const double nn = static_cast<double>(n);
        CHECK(r.values[1] == doctest::Approx(-(nn - 1) / nn).epsilon(1e-12));
    }
}

TEST_CASE("biased estimate is bounded by one") {
    std::mt19937_64 rng(6);
    const auto r = autocorrelation(FrequencySeries(oracle::random_series(rng, 3000), 1.0), 2999);
    for (double x : r.values) CHECK(std::abs(x) <= 1.0);
}

TEST_CASE("errors") {
    try {
        (void)autocorrelation(FrequencySeries(std::vector<double>(100, 50.0), 1.0), 10);
        FAIL("expected VarianceZero");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VarianceZero);
    }
    const FrequencySeries s({50.0, 50.1, 50.0, 49.9}, 1.0);
    try {
        (void)autocorrelation(s, 4);
        FAIL("expected LagTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LagTooLarge);
    }
    CHECK_THROWS_AS((void)autocorrelation(s, 0), Error);
}

TEST_CASE("csv format") {
    AcfCurve c;
    c.dt = 1.0;
    c.values = {1.0, 0.5};
    CHECK(acf_to_csv(c) == "lag_s,acf\n0,1.000000\n1,0.500000");

    std::mt19937_64 rng(7);
    const auto r = autocorrelation(FrequencySeries(oracle::random_series(rng, 5000), 1.0), 3600);
    const auto text = acf_to_csv(r);
    std::size_t lines = 0;
    for (char ch : text) lines += ch == '\n';
    CHECK(lines == 3601);

    const auto back = parse_acf_csv(text);
    CHECK(back.values.size() == 3601);
    CHECK(back.dt == 1.0);
    for (std::size_t k = 0; k <= 3600; ++k) CHECK(std::abs(back.values[k] - r.values[k]) <= 5e-7);
    CHECK_THROWS_AS((void)parse_acf_csv("lag_s,acf\n1,1.0\n2,0.5"), Error);
}
