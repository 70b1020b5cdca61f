#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freqq/acf.hpp"

namespace freqq {

/**
 * Parameters of the two-term ACF model
 *
 *   R(theta) = u1 exp(-alpha_fast theta) + (1 - u1) exp(-alpha_slow theta) cos(omega theta)
 *
 * with lags in seconds, rates in 1/s and omega in rad/s.
 */
struct AcfModelParams {
    double u1 = 0.5;
    double alpha_fast = 0.0;
    double alpha_slow = 0.0;
    double omega = 0.0;

    /// Throws InvalidArgument unless u1 in [0, 1], rates and omega >= 0, all finite.
    void validate() const;

    friend bool operator==(const AcfModelParams&, const AcfModelParams&) = default;
};

[[nodiscard]] double model_eval(const AcfModelParams& params, double lag_s) noexcept;

/// Partial derivatives {dR/du1, dR/dalpha_fast, dR/dalpha_slow, dR/domega}.
[[nodiscard]] std::array<double, 4> model_jacobian(const AcfModelParams& params, double lag_s) noexcept;

/// Model sampled on lags 0, dt, ..., (count - 1) dt.
[[nodiscard]] std::vector<double> model_curve(const AcfModelParams& params, double dt, std::size_t count);

struct FitConfig {
    int max_iterations = 200;
    double gradient_tolerance = 1e-10;
    double step_tolerance = 1e-12;
    double damping_init = 1e-3;
    double damping_factor = 10.0;
    /// Damping beyond this means no descent step exists at working precision.
    double damping_max = 1e16;
    /// Fits whose SSE is within this of the best are tied.
    double tie_tolerance = 1e-12;
    std::vector<double> start_u1 = {0.25, 0.5, 0.75};
    std::vector<double> start_alpha_fast = {1e-4, 1e-3, 1e-2};
    std::vector<double> start_alpha_slow = {1e-4, 1e-3, 1e-2};
    std::vector<double> start_omega = {0.0, 1e-3, 5e-3, 0.05};
    /// 0 = hardware concurrency. Does not affect results.
    unsigned threads = 0;

    /// Canonical text of every setting that can change a result.
    [[nodiscard]] std::string canonical() const;
    /// 16 hex digits of FNV-1a over canonical().
    [[nodiscard]] std::string digest() const;

    friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

/// Cartesian product of the start lists, u1 outermost.
[[nodiscard]] std::vector<AcfModelParams> multi_start_grid(const FitConfig& config);

enum class Termination {
    Gradient,       ///< max |J^T r| below gradient_tolerance
    Step,           ///< accepted step below step_tolerance
    Stalled,        ///< damping exceeded damping_max: no decrease at working precision
    MaxIterations,
};

[[nodiscard]] std::string_view to_string(Termination termination) noexcept;
[[nodiscard]] Termination termination_from_string(std::string_view text);

struct AcfFit {
    AcfModelParams params;
    double sse = 0.0;
    double rmse = 0.0;
    std::size_t n_lags = 0;
    std::size_t n_starts = 0;
    bool converged = false;
    int iterations = 0;
    Termination termination = Termination::MaxIterations;

    friend bool operator==(const AcfFit&, const AcfFit&) = default;
};

/**
 * Bounded least-squares fit of the two-term model to an ACF curve.
 *
 * Levenberg-Marquardt runs on u1 = sin^2(s), alpha = a^2, omega = w^2, so the
 * bounds hold by construction and zero is reachable. Every start is run; the
 * lowest-SSE converged run wins, with SSE ties broken by smaller alpha_fast,
 * then smaller omega. If no start converges the best run is returned with
 * converged = false. Throws DegenerateInput for fewer than 8 lags.
 */
[[nodiscard]] AcfFit fit_acf(const AcfCurve& curve, const FitConfig& config = {});
[[nodiscard]] AcfFit fit_acf(const AcfCurve& curve, const FitConfig& config, std::span<const AcfModelParams> starts);

inline constexpr std::size_t kMinFitLags = 8;

}  // namespace freqq
