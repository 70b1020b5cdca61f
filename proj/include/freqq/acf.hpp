#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "freqq/series.hpp"

namespace freqq {

enum class AcfEstimator {
    Biased,    ///< divisor N at every lag
    Unbiased,  ///< divisor N - k
};

enum class AcfMethod {
    Auto,    ///< direct for max_lag <= kDirectLagLimit, FFT above
    Direct,
    Fft,
};

inline constexpr std::size_t kDirectLagLimit = 1024;
inline constexpr std::size_t kDefaultMaxLag = 3600;

/// Normalized autocorrelation R(k * dt), k = 0..L. values[0] == 1 exactly.
struct AcfCurve {
    double dt = 1.0;
    std::vector<double> values;
    std::size_t n_source = 0;

    [[nodiscard]] std::size_t max_lag() const noexcept { return values.empty() ? 0 : values.size() - 1; }
    [[nodiscard]] double lag_seconds(std::size_t k) const noexcept { return static_cast<double>(k) * dt; }

    friend bool operator==(const AcfCurve&, const AcfCurve&) = default;
};

struct AcfOptions {
    AcfEstimator estimator = AcfEstimator::Biased;
    AcfMethod method = AcfMethod::Auto;
};

[[nodiscard]] std::string_view to_string(AcfEstimator estimator) noexcept;
[[nodiscard]] std::string_view to_string(AcfMethod method) noexcept;

/// Method actually used for a given lag count under `requested`.
[[nodiscard]] AcfMethod resolve_method(AcfMethod requested, std::size_t max_lag) noexcept;

/**
 * Sample autocorrelation of a frequency series.
 *
 *   R(k) = [ (1/N) sum_{t=0}^{N-k-1} (f_t - mean)(f_{t+k} - mean) ] / c0
 *
 * with c0 the lag-0 autocovariance. Throws VarianceZero for a constant series
 * and LagTooLarge unless 1 <= max_lag < N.
 */
[[nodiscard]] AcfCurve autocorrelation(const FrequencySeries& series, std::size_t max_lag,
                                       const AcfOptions& options = {});

/// `lag_s,acf` header, one row per lag, 6 decimals, no trailing newline.
[[nodiscard]] std::string acf_to_csv(const AcfCurve& curve);

/// Reads acf_to_csv output back. Lags must start at 0 and be uniform; n_source is set to the row count.
[[nodiscard]] AcfCurve parse_acf_csv(std::string_view text);

}  // namespace freqq
