// Plain reference implementations used as test oracles. Deliberately naive:
// straight loops, no compensation, no shared code with the library.
#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& v) {
    long double s = 0;
    for (double x : v) s += x;
    return static_cast<double>(s / v.size());
}

inline double pstd(const std::vector<double>& v) {
    const long double m = mean(v);
    long double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return static_cast<double>(std::sqrt(ss / v.size()));
}

inline std::vector<double> rocof(const std::vector<double>& f, std::size_t tau, double dt) {
    std::vector<double> out;
    for (std::size_t t = tau; t < f.size(); ++t) out.push_back((f[t] - f[t - tau]) / (tau * dt));
    return out;
}

inline std::vector<double> rocof_prime(const std::vector<double>& f, std::size_t tau, std::size_t dtau, double dt) {
    const auto r = rocof(f, tau, dt);
    std::vector<double> out;
    for (std::size_t t = dtau; t < r.size(); ++t) out.push_back((r[t] - r[t - dtau]) / (dtau * dt));
    return out;
}

inline double minutes_outside(const std::vector<double>& f, double dt, double center, double band_mhz) {
    std::size_t n = 0;
    for (double x : f) {
        if (std::abs(x - center) > band_mhz / 1000.0) ++n;
    }
    return n * dt / 60.0;
}

inline std::vector<double> acf(const std::vector<double>& f, std::size_t max_lag, bool unbiased = false) {
    const std::size_t n = f.size();
    const long double m = mean(f);
    std::vector<long double> c(max_lag + 1, 0.0L);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        for (std::size_t t = 0; t + k < n; ++t) c[k] += (f[t] - m) * (f[t + k] - m);
        c[k] /= unbiased ? static_cast<long double>(n - k) : static_cast<long double>(n);
    }
    std::vector<double> r(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) r[k] = static_cast<double>(c[k] / c[0]);
    return r;
}

inline double model(double u1, double af, double as, double w, double theta) {
    return u1 * std::exp(-af * theta) + (1 - u1) * std::exp(-as * theta) * std::cos(w * theta);
}

inline std::vector<double> random_series(std::mt19937_64& rng, std::size_t n, double sd = 0.05) {
    std::normal_distribution<double> noise(0.0, sd);
    std::vector<double> v(n);
    double x = 0.0;
    for (auto& f : v) {
        x = 0.9 * x + noise(rng);
        f = 50.0 + x;
    }
    return v;
}

inline double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace oracle
