#include "freqq/error.hpp"

namespace freqq {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyInput: return "empty_input";
        case ErrorCode::NonUniformSampling: return "non_uniform_sampling";
        case ErrorCode::MalformedRow: return "malformed_row";
        case ErrorCode::NonFiniteValue: return "non_finite_value";
        case ErrorCode::OutOfRange: return "out_of_range";
        case ErrorCode::SeriesTooShort: return "series_too_short";
        case ErrorCode::VarianceZero: return "variance_zero";
        case ErrorCode::LagTooLarge: return "lag_too_large";
        case ErrorCode::DegenerateInput: return "degenerate_input";
        case ErrorCode::NoConvergence: return "no_convergence";
        case ErrorCode::UnknownScenario: return "unknown_scenario";
        case ErrorCode::NumericalBlowup: return "numerical_blowup";
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::IoError: return "io_error";
    }
    return "unknown";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept {
    for (int i = 0; i <= static_cast<int>(ErrorCode::IoError); ++i) {
        const auto code = static_cast<ErrorCode>(i);
        if (to_string(code) == name) {
            return code;
        }
    }
    return std::nullopt;
}

bool is_numerical(ErrorCode code) noexcept {
    return code == ErrorCode::VarianceZero || code == ErrorCode::NoConvergence ||
           code == ErrorCode::NumericalBlowup;
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row)
    : std::runtime_error(row ? message + " (row " + std::to_string(*row) + ")" : message),
      code_(code),
      row_(row) {}

}  // namespace freqq
