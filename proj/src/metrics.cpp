#include "freqq/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "freqq/error.hpp"

namespace freqq {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace

BandPolicy::BandPolicy(double band_mhz_, double center_hz_) : band_mhz(band_mhz_), center_hz(center_hz_) {
    if (!(band_mhz > 0.0) || !std::isfinite(band_mhz)) {
        throw Error(ErrorCode::InvalidArgument, "band half-width must be positive");
    }
    if (!(center_hz > 0.0) || !std::isfinite(center_hz)) {
        throw Error(ErrorCode::InvalidArgument, "band center must be positive");
    }
}

double mean(std::span<const double> values) {
    if (values.empty()) {
        throw Error(ErrorCode::SeriesTooShort, "mean of an empty sample");
    }
    // Shifting by the first sample keeps the sum small for values sitting near 50 Hz.
    const double shift = values.front();
    CompensatedSum sum;
    for (double v : values) {
        sum.add(v - shift);
    }
    return shift + sum.value() / static_cast<double>(values.size());
}

double population_std_dev(std::span<const double> values) {
    const double mu = mean(values);
    CompensatedSum sum;
    for (double v : values) {
        const double d = v - mu;
        sum.add(d * d);
    }
    return std::sqrt(sum.value() / static_cast<double>(values.size()));
}

double std_dev_frequency(const FrequencySeries& series) {
    return population_std_dev(series.values());
}

DerivedSeries rocof_series(const FrequencySeries& series, std::size_t tau_samples) {
    const auto n = series.size();
    if (tau_samples < 1 || n <= tau_samples) {
        throw Error(ErrorCode::SeriesTooShort,
                    fmt::format("RoCoF needs N > tau >= 1 (N = {}, tau = {})", n, tau_samples));
    }
    const auto f = series.values();
    const double interval = static_cast<double>(tau_samples) * series.dt();
    DerivedSeries out(n - tau_samples);
    for (std::size_t t = tau_samples; t < n; ++t) {
        out[t - tau_samples] = (f[t] - f[t - tau_samples]) / interval;
    }
    return out;
}

DerivedSeries rocof_prime_series(const FrequencySeries& series, std::size_t tau_samples, std::size_t dtau_samples) {
    const auto n = series.size();
    if (tau_samples < 1 || dtau_samples < 1 || n <= tau_samples + dtau_samples) {
        throw Error(ErrorCode::SeriesTooShort,
                    fmt::format("RoCoF' needs N > tau + dtau (N = {}, tau = {}, dtau = {})", n, tau_samples,
                                dtau_samples));
    }
    const auto rocof = rocof_series(series, tau_samples);
    const double interval = static_cast<double>(dtau_samples) * series.dt();
    DerivedSeries out(rocof.size() - dtau_samples);
    for (std::size_t t = dtau_samples; t < rocof.size(); ++t) {
        out[t - dtau_samples] = (rocof[t] - rocof[t - dtau_samples]) / interval;
    }
    return out;
}

double std_dev_rocof(const FrequencySeries& series, std::size_t tau_samples) {
    return population_std_dev(rocof_series(series, tau_samples));
}

double std_dev_rocof_prime(const FrequencySeries& series, std::size_t tau_samples, std::size_t dtau_samples) {
    return population_std_dev(rocof_prime_series(series, tau_samples, dtau_samples));
}

double minutes_outside_band(const FrequencySeries& series, const BandPolicy& policy) {
    const double half_width_hz = policy.band_mhz / 1000.0;
    std::size_t outside = 0;
    for (double f : series.values()) {
        if (std::abs(f - policy.center_hz) > half_width_hz) {
            ++outside;
        }
    }
    return static_cast<double>(outside) * series.dt() / 60.0;
}

MetricsReport compute_report(const FrequencySeries& series, std::span<const BandPolicy> bands) {
    if (series.size() < 3) {
        throw Error(ErrorCode::SeriesTooShort,
                    fmt::format("metrics need at least 3 samples, got {}", series.size()));
    }
    MetricsReport report;
    report.mean_f = mean(series.values());
    report.sigma_f = std_dev_frequency(series);
    report.sigma_rocof = std_dev_rocof(series, 1);
    report.sigma_rocof_prime = std_dev_rocof_prime(series, 1, 1);
    report.n_samples = series.size();
    report.tau_s = series.dt();
    report.dtau_s = series.dt();
    report.minutes_outside.reserve(bands.size());
    for (const auto& band : bands) {
        report.minutes_outside.push_back({band.band_mhz, band.center_hz, minutes_outside_band(series, band)});
    }
    return report;
}

MetricsReport compute_report(const FrequencySeries& series, const BandPolicy& band) {
    return compute_report(series, std::span<const BandPolicy>(&band, 1));
}

}  // namespace freqq
