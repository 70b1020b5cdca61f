#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace freqq {

inline constexpr double kDefaultNominalHz = 50.0;

/**
 * Uniformly sampled grid-frequency record.
 *
 * Immutable once constructed. The constructor enforces the invariants: at least
 * one sample, every sample finite, dt > 0 and nominal_hz > 0.
 */
class FrequencySeries {
public:
    FrequencySeries(std::vector<double> values, double dt, double start_epoch = 0.0,
                    double nominal_hz = kDefaultNominalHz);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] double start_epoch() const noexcept { return start_epoch_; }
    [[nodiscard]] double nominal_hz() const noexcept { return nominal_hz_; }
    [[nodiscard]] double time_at(std::size_t index) const noexcept {
        return start_epoch_ + static_cast<double>(index) * dt_;
    }

    friend bool operator==(const FrequencySeries&, const FrequencySeries&) = default;

private:
    std::vector<double> values_;
    double dt_;
    double start_epoch_;
    double nominal_hz_;
};

enum class GapPolicy {
    Reject,
    /// Repeat the previous sample across gaps that are whole multiples of dt.
    Hold,
};

struct IngestOptions {
    double nominal_hz = kDefaultNominalHz;
    GapPolicy gap_policy = GapPolicy::Reject;
    /// Used only when the file has a single data row and dt cannot be inferred.
    double fallback_dt = 1.0;
};

struct IngestResult {
    FrequencySeries series;
    std::size_t filled_samples = 0;
};

/// Relative tolerance on inter-sample gaps against the inferred dt.
inline constexpr double kGapRelativeTolerance = 1e-9;

/**
 * Parse a `time_s,frequency_hz` CSV document.
 *
 * dt is inferred from the first two timestamps. Accepts LF or CRLF and an
 * optional UTF-8 BOM; blank lines are skipped. Row numbers in errors are
 * 1-based data rows (the header is not counted).
 */
[[nodiscard]] FrequencySeries parse_csv(std::string_view text, double nominal_hz = kDefaultNominalHz);
[[nodiscard]] IngestResult parse_csv(std::string_view text, const IngestOptions& options);

/// Sub-series [offset, offset + length); start_epoch shifts by offset * dt.
[[nodiscard]] FrequencySeries window(const FrequencySeries& series, std::size_t offset, std::size_t length);

/// Inverse of parse_csv: header plus one `time,frequency` row per sample, 6 decimals, no trailing newline.
[[nodiscard]] std::string series_to_csv(const FrequencySeries& series);

/// Reads a whole file; throws Error(IoError) on failure.
[[nodiscard]] std::string read_text_file(const std::string& path);

}  // namespace freqq
