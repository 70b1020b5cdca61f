#include "freqq/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "freqq/error.hpp"
#include "text_util.hpp"

namespace freqq {

FrequencySeries::FrequencySeries(std::vector<double> values, double dt, double start_epoch, double nominal_hz)
    : values_(std::move(values)), dt_(dt), start_epoch_(start_epoch), nominal_hz_(nominal_hz) {
    if (values_.empty()) {
        throw Error(ErrorCode::EmptyInput, "frequency series has no samples");
    }
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
        throw Error(ErrorCode::InvalidArgument, "sample period must be positive and finite");
    }
    if (!(nominal_hz_ > 0.0) || !std::isfinite(nominal_hz_)) {
        throw Error(ErrorCode::InvalidArgument, "nominal frequency must be positive and finite");
    }
    if (!std::isfinite(start_epoch_)) {
        throw Error(ErrorCode::NonFiniteValue, "start epoch is not finite");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorCode::NonFiniteValue, "frequency sample is not finite", i + 1);
        }
    }
}

namespace {

constexpr std::string_view kHeader = "time_s,frequency_hz";

bool parse_field(std::string_view field, double& out) {
    field = detail::trim(field);
    if (field.empty()) {
        return false;
    }
    if (field.front() == '+') {
        field.remove_prefix(1);
    }
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

IngestResult parse_csv(std::string_view text, const IngestOptions& options) {
    detail::LineReader lines(text);
    std::string_view line;
    bool have_header = false;
    while (lines.next(line)) {
        if (detail::trim(line).empty()) {
            continue;
        }
        if (detail::trim(line) != kHeader) {
            throw Error(ErrorCode::MalformedRow, fmt::format("expected header '{}'", kHeader), 0);
        }
        have_header = true;
        break;
    }
    if (!have_header) {
        throw Error(ErrorCode::EmptyInput, "no header and no data rows");
    }

    std::vector<double> values;
    values.reserve(text.size() / 16);
    double first_time = 0.0;
    double prev_time = 0.0;
    double dt = 0.0;
    std::size_t row = 0;
    std::size_t filled = 0;

    while (lines.next(line)) {
        if (detail::trim(line).empty()) {
            continue;
        }
        ++row;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            throw Error(ErrorCode::MalformedRow, "expected exactly two fields", row);
        }
        double time = 0.0;
        double freq = 0.0;
        if (!parse_field(line.substr(0, comma), time) || !parse_field(line.substr(comma + 1), freq)) {
            throw Error(ErrorCode::MalformedRow, "non-numeric field", row);
        }
        if (!std::isfinite(time) || !std::isfinite(freq)) {
            throw Error(ErrorCode::NonFiniteValue, "non-finite field", row);
        }

        if (row == 1) {
            first_time = time;
        } else {
            const double gap = time - prev_time;
            if (row == 2) {
                if (!(gap > 0.0)) {
                    throw Error(ErrorCode::NonUniformSampling, "timestamps are not strictly increasing", row);
                }
                dt = gap;
            } else if (std::abs(gap - dt) > kGapRelativeTolerance * dt) {
                const double ratio = gap / dt;
                const double whole = std::round(ratio);
                const bool fillable = options.gap_policy == GapPolicy::Hold && whole >= 2.0 &&
                                      std::abs(gap - whole * dt) <= kGapRelativeTolerance * gap;
                if (!fillable) {
                    throw Error(ErrorCode::NonUniformSampling,
                                fmt::format("gap of {} s deviates from sample period {} s", gap, dt), row);
                }
                const auto missing = static_cast<std::size_t>(whole) - 1;
                values.insert(values.end(), missing, values.back());
                filled += missing;
            }
        }
        values.push_back(freq);
        prev_time = time;
    }

    if (values.empty()) {
        throw Error(ErrorCode::EmptyInput, "no data rows");
    }
    if (values.size() == 1) {
        dt = options.fallback_dt;
    }
    return IngestResult{FrequencySeries(std::move(values), dt, first_time, options.nominal_hz), filled};
}

FrequencySeries parse_csv(std::string_view text, double nominal_hz) {
    IngestOptions options;
    options.nominal_hz = nominal_hz;
    return parse_csv(text, options).series;
}

FrequencySeries window(const FrequencySeries& series, std::size_t offset, std::size_t length) {
    if (length == 0 || offset > series.size() || length > series.size() - offset) {
        throw Error(ErrorCode::OutOfRange,
                    fmt::format("window [{}, {}) exceeds series of {} samples", offset, offset + length,
                                series.size()));
    }
    const auto values = series.values();
    std::vector<double> slice(values.begin() + static_cast<std::ptrdiff_t>(offset),
                              values.begin() + static_cast<std::ptrdiff_t>(offset + length));
    return FrequencySeries(std::move(slice), series.dt(), series.time_at(offset), series.nominal_hz());
}

std::string series_to_csv(const FrequencySeries& series) {
    std::string out;
    out.reserve(series.size() * 24 + kHeader.size());
    out.append(kHeader);
    const auto values = series.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.push_back('\n');
        detail::append_trimmed_decimal(out, series.time_at(i));
        out.push_back(',');
        fmt::format_to(std::back_inserter(out), "{:.6f}", values[i]);
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::IoError, fmt::format("failed reading '{}'", path));
    }
    return std::move(buffer).str();
}

}  // namespace freqq
