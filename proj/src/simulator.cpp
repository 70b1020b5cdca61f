#include "freqq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include "json.hpp"

#include "freqq/error.hpp"

namespace freqq {

namespace {

#include "builtin_scenarios.inc"

void require(bool ok, std::string_view what) {
    if (!ok) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("invalid scenario: {}", what));
    }
}

double ramp_pattern(const std::vector<RampSegment>& ramps, double t) noexcept {
    double r = 0.0;
    for (const auto& seg : ramps) {
        r += seg.slope_pu_per_s * (std::clamp(t, seg.start_s, seg.end_s) - seg.start_s);
    }
    return r;
}

double ramp_net(const std::vector<RampSegment>& ramps) noexcept {
    double net = 0.0;
    for (const auto& seg : ramps) {
        net += seg.slope_pu_per_s * (seg.end_s - seg.start_s);
    }
    return net;
}

// Piecewise-linear form of the ramp schedule over one period (or the whole horizon
// when aperiodic), evaluated by binary search over breakpoints.
class RampProfile {
public:
    explicit RampProfile(const SimScenario& s) : period_(s.ramp_period_s), net_(ramp_net(s.ramps)) {
        for (const auto& seg : s.ramps) {
            knots_.push_back(seg.start_s);
            knots_.push_back(seg.end_s);
        }
        std::sort(knots_.begin(), knots_.end());
        knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());
        for (std::size_t i = 0; i < knots_.size(); ++i) {
            level_.push_back(ramp_pattern(s.ramps, knots_[i]));
            double slope = 0.0;
            if (i + 1 < knots_.size()) {
                const double mid = 0.5 * (knots_[i] + knots_[i + 1]);
                for (const auto& seg : s.ramps) {
                    if (seg.start_s <= mid && mid < seg.end_s) {
                        slope += seg.slope_pu_per_s;
                    }
                }
            }
            slope_.push_back(slope);
        }
    }

    [[nodiscard]] double operator()(double t) const noexcept {
        if (knots_.empty()) {
            return 0.0;
        }
        double offset = 0.0;
        if (period_ > 0.0) {
            const double cycles = std::floor(t / period_);
            offset = cycles * net_;
            t -= cycles * period_;
        }
        if (t <= knots_.front()) {
            return offset;
        }
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
        const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
        return offset + level_[i] + slope_[i] * (t - knots_[i]);
    }

private:
    double period_;
    double net_;
    std::vector<double> knots_;
    std::vector<double> level_;
    std::vector<double> slope_;
};

}  // namespace

void SimScenario::validate() const {
    require(std::isfinite(inertia_2h) && inertia_2h > 0.0, "inertia_2h must be > 0");
    require(std::isfinite(damping) && damping >= 0.0, "damping must be >= 0");
    require(std::isfinite(droop_r) && droop_r > 0.0, "droop_r must be > 0");
    require(std::isfinite(gov_t) && gov_t > 0.0, "gov_t must be > 0");
    require(std::isfinite(ou_theta) && ou_theta >= 0.0, "ou_theta must be >= 0");
    require(std::isfinite(ou_sigma) && ou_sigma >= 0.0, "ou_sigma must be >= 0");
    require(std::isfinite(f0) && f0 > 0.0, "f0 must be > 0");
    require(std::isfinite(step_s) && step_s > 0.0, "step_s must be > 0");
    require(std::isfinite(out_dt_s) && out_dt_s > 0.0, "out_dt_s must be > 0");
    const double ratio = out_dt_s / step_s;
    require(ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio,
            "out_dt_s must be an integer multiple of step_s");
    require(std::isfinite(duration_s) && duration_s >= out_dt_s, "duration_s must be >= out_dt_s");
    require(std::isfinite(ramp_period_s) && ramp_period_s >= 0.0, "ramp_period_s must be >= 0");
    for (const auto& seg : ramps) {
        require(std::isfinite(seg.start_s) && std::isfinite(seg.end_s) && std::isfinite(seg.slope_pu_per_s),
                "ramp fields must be finite");
        require(seg.start_s >= 0.0 && seg.end_s >= seg.start_s, "ramp needs 0 <= start_s <= end_s");
        require(ramp_period_s == 0.0 || seg.end_s <= ramp_period_s, "periodic ramps must end within the period");
    }
}

std::size_t SimScenario::decimation() const {
    return static_cast<std::size_t>(std::llround(out_dt_s / step_s));
}

double ramp_load(const SimScenario& scenario, double t_s) noexcept {
    if (scenario.ramp_period_s > 0.0) {
        const double cycles = std::floor(t_s / scenario.ramp_period_s);
        return cycles * ramp_net(scenario.ramps) +
               ramp_pattern(scenario.ramps, t_s - cycles * scenario.ramp_period_s);
    }
    return ramp_pattern(scenario.ramps, t_s);
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed;
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i <= stream; ++i) {
        out = splitmix64(state);
    }
    return out;
}

}  // namespace

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream) : engine_(stream_seed(seed, stream)) {}

double NormalStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * kScale;        // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

FrequencySeries simulate(const SimScenario& scenario) {
    scenario.validate();
    const std::size_t decimation = scenario.decimation();
    const auto n_out = static_cast<std::size_t>(std::floor(scenario.duration_s / scenario.out_dt_s + 1e-9));
    const double h = scenario.step_s;
    const double inv_2h = 1.0 / scenario.inertia_2h;
    const double inv_r = 1.0 / scenario.droop_r;
    const double inv_tg = 1.0 / scenario.gov_t;
    const bool noisy = scenario.ou_sigma > 0.0;

    const RampProfile ramp(scenario);
    NormalStream normals(scenario.seed, kLoadNoiseStream);
    OrnsteinUhlenbeck load_noise(scenario.ou_theta, scenario.ou_sigma);

    double df = 0.0;  // frequency deviation, pu
    double pm = 0.0;  // mechanical power deviation, pu
    std::vector<double> out;
    out.reserve(n_out);
    out.push_back(scenario.f0);
    std::size_t step = 0;
    for (std::size_t i = 1; i < n_out; ++i) {
        for (std::size_t j = 0; j < decimation; ++j, ++step) {
            const double t = static_cast<double>(step) * h;
            const double load = load_noise.value() + ramp(t);
            const double df_rate = (pm - load - scenario.damping * df) * inv_2h;
            const double pm_rate = (-pm - df * inv_r) * inv_tg;
            if (noisy) {
                load_noise.step(h, normals.next());
            }
            df += h * df_rate;
            pm += h * pm_rate;
        }
        if (!(std::abs(df) <= kBlowupPu)) {
            throw Error(ErrorCode::NumericalBlowup,
                        fmt::format("|delta f| exceeded {} pu at t = {} s", kBlowupPu,
                                    static_cast<double>(step) * h));
        }
        out.push_back(scenario.f0 * (1.0 + df));
    }
    return FrequencySeries(std::move(out), scenario.out_dt_s, 0.0, scenario.f0);
}

SimScenario scenario_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("scenario JSON: {}", e.what()));
    }
    SimScenario s;
    try {
        s.name = j.value("name", std::string{});
        s.inertia_2h = j.at("inertia_2h").get<double>();
        s.damping = j.at("damping").get<double>();
        s.droop_r = j.at("droop_r").get<double>();
        s.gov_t = j.at("gov_t").get<double>();
        s.ou_theta = j.at("ou_theta").get<double>();
        s.ou_sigma = j.at("ou_sigma").get<double>();
        s.ramp_period_s = j.value("ramp_period_s", 0.0);
        s.f0 = j.value("f0", kDefaultNominalHz);
        s.step_s = j.value("step_s", 0.01);
        s.out_dt_s = j.value("out_dt_s", 1.0);
        s.duration_s = j.value("duration_s", 86400.0);
        s.seed = j.value("seed", std::uint64_t{0});
        for (const auto& r : j.value("ramps", nlohmann::json::array())) {
            s.ramps.push_back({r.at("start_s").get<double>(), r.at("end_s").get<double>(),
                               r.at("slope").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("scenario JSON: {}", e.what()));
    }
    s.validate();
    return s;
}

std::string scenario_to_json(const SimScenario& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["inertia_2h"] = s.inertia_2h;
    j["damping"] = s.damping;
    j["droop_r"] = s.droop_r;
    j["gov_t"] = s.gov_t;
    j["ou_theta"] = s.ou_theta;
    j["ou_sigma"] = s.ou_sigma;
    j["ramp_period_s"] = s.ramp_period_s;
    auto ramps = nlohmann::ordered_json::array();
    for (const auto& r : s.ramps) {
        ramps.push_back({{"start_s", r.start_s}, {"end_s", r.end_s}, {"slope", r.slope_pu_per_s}});
    }
    j["ramps"] = std::move(ramps);
    j["f0"] = s.f0;
    j["step_s"] = s.step_s;
    j["out_dt_s"] = s.out_dt_s;
    j["duration_s"] = s.duration_s;
    j["seed"] = s.seed;
    return j.dump(2);
}

std::vector<std::string> builtin_scenario_names() {
    std::vector<std::string> names;
    for (const auto& entry : kBuiltinScenarios) {
        names.emplace_back(entry.name);
    }
    return names;
}

SimScenario builtin_scenario(std::string_view name) {
    for (const auto& entry : kBuiltinScenarios) {
        if (entry.name == name) {
            return scenario_from_json(entry.json);
        }
    }
    throw Error(ErrorCode::UnknownScenario, fmt::format("unknown scenario '{}'", name));
}

}  // namespace freqq
