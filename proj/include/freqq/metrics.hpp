#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "freqq/series.hpp"

namespace freqq {

/// RoCoF (Hz/s) or RoCoF' (Hz/s^2) samples at the source sample period.
using DerivedSeries = std::vector<double>;

struct BandPolicy {
    double band_mhz = 200.0;  ///< half-width of the allowed band
    double center_hz = kDefaultNominalHz;

    BandPolicy() = default;
    BandPolicy(double band_mhz_, double center_hz_);
};

struct BandMinutes {
    double band_mhz = 0.0;
    double center_hz = 0.0;
    double minutes = 0.0;

    friend bool operator==(const BandMinutes&, const BandMinutes&) = default;
};

struct MetricsReport {
    double sigma_f = 0.0;            ///< Hz
    double sigma_rocof = 0.0;        ///< Hz/s
    double sigma_rocof_prime = 0.0;  ///< Hz/s^2
    std::vector<BandMinutes> minutes_outside;
    double mean_f = 0.0;
    std::size_t n_samples = 0;
    double tau_s = 0.0;
    double dtau_s = 0.0;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Compensated mean (Neumaier summation about the first sample).
[[nodiscard]] double mean(std::span<const double> values);

/// Population standard deviation (divisor = values.size()), two-pass and compensated.
[[nodiscard]] double population_std_dev(std::span<const double> values);

/// sigma_f: population standard deviation of the frequency samples.
[[nodiscard]] double std_dev_frequency(const FrequencySeries& series);

/// (f[t] - f[t - tau]) / (tau * dt); length N - tau. Throws SeriesTooShort unless N > tau >= 1.
[[nodiscard]] DerivedSeries rocof_series(const FrequencySeries& series, std::size_t tau_samples = 1);

/// Difference of RoCoF over dtau samples, divided by dtau * dt; length N - tau - dtau.
[[nodiscard]] DerivedSeries rocof_prime_series(const FrequencySeries& series, std::size_t tau_samples = 1,
                                               std::size_t dtau_samples = 1);

/// Population standard deviation over the N - 1 RoCoF samples.
[[nodiscard]] double std_dev_rocof(const FrequencySeries& series, std::size_t tau_samples = 1);

/// Population standard deviation over the N - 2 RoCoF' samples (tau = dtau = 1 sample by default).
[[nodiscard]] double std_dev_rocof_prime(const FrequencySeries& series, std::size_t tau_samples = 1,
                                         std::size_t dtau_samples = 1);

/// Time spent strictly outside center +/- band, in minutes. A sample on the edge is inside.
[[nodiscard]] double minutes_outside_band(const FrequencySeries& series, const BandPolicy& policy);

/// All scalar metrics with tau = dtau = 1 sample. Requires N >= 3.
[[nodiscard]] MetricsReport compute_report(const FrequencySeries& series, std::span<const BandPolicy> bands);
[[nodiscard]] MetricsReport compute_report(const FrequencySeries& series, const BandPolicy& band);

}  // namespace freqq
