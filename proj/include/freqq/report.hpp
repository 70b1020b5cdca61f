#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freqq/acf.hpp"
#include "freqq/error.hpp"
#include "freqq/fitmodel.hpp"
#include "freqq/metrics.hpp"
#include "freqq/series.hpp"

namespace freqq {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kDefaultWindowLength = 10000;

struct AnalysisOptions {
    std::size_t window_offset = 0;
    /// nullopt: up to kDefaultWindowLength samples, clamped to what the series holds.
    /// A value is used as given and must fit.
    std::optional<std::size_t> window_length = kDefaultWindowLength;
    bool clamp_window = true;
    std::vector<double> bands_mhz = {100.0, 200.0};
    std::size_t max_lag = kDefaultMaxLag;
    AcfOptions acf;
    FitConfig fit;
    /// Samples inserted by gap filling at ingest, carried into the provenance.
    std::size_t filled_samples = 0;
};

/// Outcome of one pipeline stage; a failed stage does not discard earlier ones.
struct StageStatus {
    bool ok = true;
    std::optional<ErrorCode> error;
    std::string message;

    static StageStatus success() { return {}; }
    static StageStatus failure(const Error& e) { return {false, e.code(), e.what()}; }

    friend bool operator==(const StageStatus&, const StageStatus&) = default;
};

struct Provenance {
    std::size_t source_samples = 0;
    std::size_t window_offset = 0;
    std::size_t window_length = 0;
    double dt_s = 0.0;
    double nominal_hz = 0.0;
    std::size_t tau_samples = 1;
    std::size_t dtau_samples = 1;
    std::size_t max_lag = 0;
    std::string acf_estimator;
    std::string acf_method;
    std::string fit_config_digest;
    std::string fit_config;
    std::size_t filled_samples = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct AnalysisBundle {
    std::string label;
    MetricsReport metrics;
    std::optional<AcfFit> fit;
    std::map<double, double> band_minutes;  ///< band_mhz -> minutes
    StageStatus metrics_status;
    StageStatus acf_status;
    StageStatus fit_status;
    Provenance provenance;

    /// First failing stage, if any.
    [[nodiscard]] std::optional<ErrorCode> first_error() const;

    friend bool operator==(const AnalysisBundle&, const AnalysisBundle&) = default;
};

/**
 * Scalar metrics, autocorrelation and model fit for one series window.
 *
 * Throws for invalid options or a window shorter than 8 samples; numerical
 * failures in the ACF or fit stages are recorded in the bundle instead.
 * A fit that does not converge keeps its best-effort parameters and marks
 * fit_status with NoConvergence.
 */
[[nodiscard]] AnalysisBundle analyze(const FrequencySeries& series, const AnalysisOptions& options,
                                     std::string label = {});

/// Aligned text table: label, sigma_f, sigma_RoCoF, sigma_RoCoF', u1, alpha_fast, alpha_slow, omega, then band minutes.
[[nodiscard]] std::string render_table(const std::vector<AnalysisBundle>& bundles);

/// `{"schema_version": 1, "bundles": [...]}`
[[nodiscard]] std::string render_json(const std::vector<AnalysisBundle>& bundles);
[[nodiscard]] std::vector<AnalysisBundle> parse_bundles_json(std::string_view text);

[[nodiscard]] std::string metrics_to_json(const MetricsReport& metrics);
[[nodiscard]] std::string fit_to_json(const AcfFit& fit, const FitConfig& config);
/// One row in table layout: the four parameters with 4 decimals.
[[nodiscard]] std::string fit_to_row(const AcfFit& fit);

/// `lag_s,acf,fitted` rows for plotting, no trailing newline.
[[nodiscard]] std::string fit_curve_csv(const AcfCurve& curve, const AcfFit& fit);

}  // namespace freqq
