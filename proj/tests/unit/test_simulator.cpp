#include <cmath>
#include <vector>

#include "doctest.h"
#include "freqq/error.hpp"
#include "freqq/simulator.hpp"

using namespace freqq;

namespace {

SimScenario quiet(double minutes) {
    SimScenario s;
    s.name = "test";
    s.gov_t = 0.5;
    s.duration_s = minutes * 60.0;
    return s;
}

std::vector<double> deviation_pu(const FrequencySeries& f) {
    std::vector<double> out;
    for (double x : f.values()) out.push_back(x / f.nominal_hz() - 1.0);
    return out;
}

double peak(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// RK4 on the noise-free two-state model, sampled every second.
std::vector<double> reference(const SimScenario& s, double h) {
    auto load = [&](double t) {
        double r = 0.0;
        for (const auto& seg : s.ramps) {
            r += seg.slope_pu_per_s * (std::clamp(t, seg.start_s, seg.end_s) - seg.start_s);
        }
        return r;
    };
    auto rhs = [&](double t, double df, double pm, double& ddf, double& dpm) {
        ddf = (pm - load(t) - s.damping * df) / s.inertia_2h;
        dpm = (-pm - df / s.droop_r) / s.gov_t;
    };
    const auto per_out = static_cast<std::size_t>(std::llround(s.out_dt_s / h));
    const auto n = static_cast<std::size_t>(s.duration_s / s.out_dt_s);
    std::vector<double> out{0.0};
    double df = 0.0;
    double pm = 0.0;
    std::size_t step = 0;
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < per_out; ++j, ++step) {
            const double t = static_cast<double>(step) * h;
            double k1f, k1p, k2f, k2p, k3f, k3p, k4f, k4p;
            rhs(t, df, pm, k1f, k1p);
            rhs(t + h / 2, df + h / 2 * k1f, pm + h / 2 * k1p, k2f, k2p);
            rhs(t + h / 2, df + h / 2 * k2f, pm + h / 2 * k2p, k3f, k3p);
            rhs(t + h, df + h * k3f, pm + h * k3p, k4f, k4p);
            df += h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
            pm += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
        }
        out.push_back(df);
    }
    return out;
}

}  // namespace

TEST_CASE("no forcing gives a constant trace") {
    const auto f = simulate(quiet(30));
    CHECK(f.size() == 1800);
    for (double x : f.values()) CHECK(x == 50.0);
}

TEST_CASE("sustained ramp settles at the droop offset") {
    auto s = quiet(20);
    s.ramps = {{0.0, 10.0, 1e-3}};
    const auto dev = deviation_pu(simulate(s));
    const double r = 1e-2;
    const double offset = -s.droop_r * r / (1.0 + s.droop_r * s.damping);
    CHECK(dev.back() == doctest::Approx(offset).epsilon(1e-6));

    const auto ref = reference(s, 1e-3);
    REQUIRE(ref.size() == dev.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < dev.size(); ++i) worst = std::max(worst, std::abs(dev[i] - ref[i]));
    CHECK(worst < 0.01 * std::abs(offset));
    CHECK(ref.back() == doctest::Approx(offset).epsilon(1e-6));
}

TEST_CASE("response is linear in the ramp slope") {
    auto a = quiet(10);
    a.ramps = {{10.0, 70.0, 1e-5}};
    auto b = a;
    b.ramps[0].slope_pu_per_s *= 2;
    const double pa = peak(deviation_pu(simulate(a)));
    const double pb = peak(deviation_pu(simulate(b)));
    CHECK(pa > 0.0);
    CHECK(std::abs(pb / pa - 2.0) < 0.02);
}

TEST_CASE("halving the step barely moves the trace") {
    auto a = quiet(10);
    a.ramps = {{10.0, 70.0, 1e-5}, {200.0, 260.0, -1e-5}};
    auto b = a;
    b.step_s = a.step_s / 2;
    const auto da = deviation_pu(simulate(a));
    const auto db = deviation_pu(simulate(b));
    REQUIRE(da.size() == db.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) worst = std::max(worst, std::abs(da[i] - db[i]));
    CHECK(worst < 1e-6);
}

TEST_CASE("OU stationary variance") {
    const double theta = 0.1;
    const double sigma = 0.01;
    const double h = 0.01;
    OrnsteinUhlenbeck ou(theta, sigma);
    NormalStream normals(7, kLoadNoiseStream);
    double sum = 0.0;
    double sum_sq = 0.0;
    const int n = 86400;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 100; ++j) ou.step(h, normals.next());
        sum += ou.value();
        sum_sq += ou.value() * ou.value();
    }
    const double var = sum_sq / n - (sum / n) * (sum / n);
    const double expect = sigma * sigma / (2 * theta);
    CHECK(std::abs(var / expect - 1.0) < 0.1);
}

TEST_CASE("normal stream") {
    NormalStream a(1, 0);
    NormalStream b(1, 0);
    NormalStream c(1, 1);
    double mean = 0.0;
    double sq = 0.0;
    bool differs = false;
    for (int i = 0; i < 100000; ++i) {
        const double x = a.next();
        CHECK(x == b.next());
        differs |= x != c.next();
        mean += x;
        sq += x * x;
    }
    CHECK(differs);
    CHECK(std::abs(mean / 1e5) < 0.02);
    CHECK(std::abs(sq / 1e5 - 1.0) < 0.02);
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("determinism") {
    auto s = builtin_scenario("high_noise_low_ramps");
    s.duration_s = 3600;
    s.seed = 42;
    const auto a = simulate(s);
    CHECK(a == simulate(s));
    s.seed = 43;
    CHECK_FALSE(a == simulate(s));
}

TEST_CASE("built-in scenarios") {
    const auto names = builtin_scenario_names();
    REQUIRE(names.size() == 2);
    const auto lo = builtin_scenario("low_noise_high_ramps");
    const auto hi = builtin_scenario("high_noise_low_ramps");
    CHECK(lo.ou_sigma < hi.ou_sigma);
    CHECK(std::abs(lo.ramps.at(0).slope_pu_per_s) > std::abs(hi.ramps.at(0).slope_pu_per_s));
    CHECK(lo.duration_s == 86400.0);
    CHECK(lo.out_dt_s == 1.0);
    auto same = hi;
    same.name = lo.name;
    same.ou_sigma = lo.ou_sigma;
    same.ramps = lo.ramps;
    CHECK(same == lo);
    try {
        (void)builtin_scenario("bogus");
        FAIL("expected UnknownScenario");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownScenario);
    }
    CHECK(scenario_from_json(scenario_to_json(lo)) == lo);
}

TEST_CASE("ramp profile") {
    SimScenario s = quiet(1);
    s.ramps = {{0.0, 900.0, 5e-5}, {900.0, 1800.0, -5e-5}};
    CHECK(ramp_load(s, 450.0) == doctest::Approx(0.0225));
    CHECK(ramp_load(s, 900.0) == doctest::Approx(0.045));
    CHECK(ramp_load(s, 1800.0) == doctest::Approx(0.0).epsilon(1e-12));
    s.ramps = {{0.0, 10.0, 1e-3}};
    CHECK(ramp_load(s, 100.0) == doctest::Approx(0.01));
    s.ramp_period_s = 20.0;
    CHECK(ramp_load(s, 25.0) == doctest::Approx(0.015));
}

TEST_CASE("validation and blow-up") {
    auto s = quiet(1);
    s.droop_r = 0.0;
    CHECK_THROWS_AS((void)simulate(s), Error);
    s = quiet(1);
    s.out_dt_s = 0.015;
    CHECK_THROWS_AS((void)simulate(s), Error);
    s = quiet(10);
    s.ramps = {{0.0, 600.0, 1.0}};
    try {
        (void)simulate(s);
        FAIL("expected NumericalBlowup");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NumericalBlowup);
    }
}
