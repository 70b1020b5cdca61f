#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "freqq/series.hpp"

namespace freqq {

/// Load ramp: slope (pu/s) applied over [start_s, end_s); the load holds its level afterwards.
struct RampSegment {
    double start_s = 0.0;
    double end_s = 0.0;
    double slope_pu_per_s = 0.0;

    friend bool operator==(const RampSegment&, const RampSegment&) = default;
};

/**
 * Aggregated single-bus grid driven by Ornstein-Uhlenbeck load noise plus a
 * piecewise-linear ramp schedule. All dynamics are per unit; Hz appears only
 * in the output series.
 */
struct SimScenario {
    std::string name;
    double inertia_2h = 10.0;  ///< 2H, seconds
    double damping = 1.0;      ///< load damping D, pu
    double droop_r = 0.05;     ///< governor droop R, pu
    double gov_t = 0.5;        ///< governor time constant, seconds
    double ou_theta = 0.0;     ///< mean reversion, 1/s
    double ou_sigma = 0.0;     ///< volatility, pu/sqrt(s)
    std::vector<RampSegment> ramps;
    /// When > 0 the ramp schedule repeats with this period (seconds), each period adding its net change.
    double ramp_period_s = 0.0;
    double f0 = kDefaultNominalHz;
    double step_s = 0.01;
    double out_dt_s = 1.0;
    double duration_s = 86400.0;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument when an invariant is violated.
    void validate() const;

    /// Number of integration steps between output samples.
    [[nodiscard]] std::size_t decimation() const;

    friend bool operator==(const SimScenario&, const SimScenario&) = default;
};

/// Blow-up threshold on |delta f| in per unit.
inline constexpr double kBlowupPu = 0.1;

/// Cumulative ramp load r(t) in pu.
[[nodiscard]] double ramp_load(const SimScenario& scenario, double t_s) noexcept;

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/**
 * Standard normal draws for one named stream.
 *
 * Stream k of seed s is an mt19937_64 seeded with the (k + 1)-th output of
 * SplitMix64 started at s. Uniforms take the top 53 bits; normals come from
 * Box-Muller in pairs (cosine branch first).
 */
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream);
    double next();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline constexpr std::uint64_t kLoadNoiseStream = 0;

/// Euler-Maruyama step of dx = -theta x dt + sigma dW.
class OrnsteinUhlenbeck {
public:
    OrnsteinUhlenbeck(double theta, double sigma, double x0 = 0.0) : theta_(theta), sigma_(sigma), x_(x0) {}
    double step(double h, double normal) noexcept {
        x_ += -theta_ * x_ * h + sigma_ * std::sqrt(h) * normal;
        return x_;
    }
    [[nodiscard]] double value() const noexcept { return x_; }

private:
    double theta_;
    double sigma_;
    double x_;
};

/// Integrates the scenario and returns f(t) = f0 (1 + delta f) every out_dt_s, starting at t = 0.
[[nodiscard]] FrequencySeries simulate(const SimScenario& scenario);

/// Built-in scenarios: "low_noise_high_ramps", "high_noise_low_ramps". Throws UnknownScenario.
[[nodiscard]] SimScenario builtin_scenario(std::string_view name);
[[nodiscard]] std::vector<std::string> builtin_scenario_names();

[[nodiscard]] SimScenario scenario_from_json(std::string_view text);
[[nodiscard]] std::string scenario_to_json(const SimScenario& scenario);

}  // namespace freqq
