#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace freqq {

enum class ErrorCode {
    EmptyInput,
    NonUniformSampling,
    MalformedRow,
    NonFiniteValue,
    OutOfRange,
    SeriesTooShort,
    VarianceZero,
    LagTooLarge,
    DegenerateInput,
    NoConvergence,
    UnknownScenario,
    NumericalBlowup,
    InvalidArgument,
    IoError,
};

/// Snake-case name used in `error_code=` diagnostics.
[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;
/// Inverse of to_string; nullopt for unknown names.
[[nodiscard]] std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept;

/// True for failures of the numerics on otherwise valid input (CLI exit 3).
[[nodiscard]] bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row = std::nullopt);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    /// 1-based data row for ingest errors.
    [[nodiscard]] std::optional<std::size_t> row() const noexcept { return row_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> row_;
};

}  // namespace freqq
