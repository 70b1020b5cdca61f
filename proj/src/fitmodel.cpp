#include "freqq/fitmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <thread>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "freqq/error.hpp"

namespace freqq {

void AcfModelParams::validate() const {
    const bool finite = std::isfinite(u1) && std::isfinite(alpha_fast) && std::isfinite(alpha_slow) &&
                        std::isfinite(omega);
    if (!finite || u1 < 0.0 || u1 > 1.0 || alpha_fast < 0.0 || alpha_slow < 0.0 || omega < 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("ACF model parameters out of bounds (u1={}, alpha_fast={}, alpha_slow={}, omega={})",
                                u1, alpha_fast, alpha_slow, omega));
    }
}

double model_eval(const AcfModelParams& p, double lag_s) noexcept {
    return p.u1 * std::exp(-p.alpha_fast * lag_s) +
           (1.0 - p.u1) * std::exp(-p.alpha_slow * lag_s) * std::cos(p.omega * lag_s);
}

std::array<double, 4> model_jacobian(const AcfModelParams& p, double lag_s) noexcept {
    const double fast = std::exp(-p.alpha_fast * lag_s);
    const double slow = std::exp(-p.alpha_slow * lag_s);
    const double c = std::cos(p.omega * lag_s);
    const double s = std::sin(p.omega * lag_s);
    return {
        fast - slow * c,
        -lag_s * p.u1 * fast,
        -lag_s * (1.0 - p.u1) * slow * c,
        -lag_s * (1.0 - p.u1) * slow * s,
    };
}

std::vector<double> model_curve(const AcfModelParams& params, double dt, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = model_eval(params, static_cast<double>(k) * dt);
    }
    return out;
}

std::string FitConfig::canonical() const {
    auto join = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += fmt::format("{}{}", i == 0 ? "" : ",", v[i]);
        }
        return s;
    };
    return fmt::format(
        "lm;max_iterations={};gradient_tolerance={};step_tolerance={};damping_init={};damping_factor={};"
        "damping_max={};tie_tolerance={};u1=[{}];alpha_fast=[{}];alpha_slow=[{}];omega=[{}];"
        "transform=sin2,square,square,square;scaling=running_max;weights=uniform",
        max_iterations, gradient_tolerance, step_tolerance, damping_init, damping_factor, damping_max,
        tie_tolerance, join(start_u1), join(start_alpha_fast), join(start_alpha_slow), join(start_omega));
}

std::string FitConfig::digest() const {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", hash);
}

std::vector<AcfModelParams> multi_start_grid(const FitConfig& config) {
    std::vector<AcfModelParams> starts;
    for (double u1 : config.start_u1) {
        for (double af : config.start_alpha_fast) {
            for (double as : config.start_alpha_slow) {
                for (double w : config.start_omega) {
                    starts.push_back({u1, af, as, w});
                }
            }
        }
    }
    return starts;
}

std::string_view to_string(Termination termination) noexcept {
    switch (termination) {
        case Termination::Gradient: return "gradient";
        case Termination::Step: return "step";
        case Termination::Stalled: return "stalled";
        case Termination::MaxIterations: return "max_iterations";
    }
    return "max_iterations";
}

Termination termination_from_string(std::string_view text) {
    for (auto t : {Termination::Gradient, Termination::Step, Termination::Stalled, Termination::MaxIterations}) {
        if (to_string(t) == text) {
            return t;
        }
    }
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown termination '{}'", text));
}

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// Solver coordinates: u1 = sin^2(x0), alpha_fast = x1^2, alpha_slow = x2^2, omega = x3^2.
AcfModelParams to_params(const Vec4& x) {
    const double s = std::sin(x[0]);
    return {s * s, x[1] * x[1], x[2] * x[2], x[3] * x[3]};
}

Vec4 to_solver(const AcfModelParams& p) {
    return {std::asin(std::sqrt(std::clamp(p.u1, 0.0, 1.0))), std::sqrt(p.alpha_fast), std::sqrt(p.alpha_slow),
            std::sqrt(p.omega)};
}

struct NormalEquations {
    double sse = 0.0;
    Mat4 jtj = Mat4::Zero();
    Vec4 jtr = Vec4::Zero();
};

// Residuals on a uniform lag grid. Exponentials and the rotation are advanced by
// multiplication and re-anchored every kAnchor lags to bound drift.
class UniformResiduals {
public:
    UniformResiduals(std::span<const double> target, double dt) : target_(target), dt_(dt) {}

    template <bool WithJacobian>
    NormalEquations evaluate(const Vec4& x) const {
        const auto p = to_params(x);
        const double w = 1.0 - p.u1;
        const Vec4 chain{std::sin(2.0 * x[0]), 2.0 * x[1], 2.0 * x[2], 2.0 * x[3]};
        const double q_fast = std::exp(-p.alpha_fast * dt_);
        const double q_slow = std::exp(-p.alpha_slow * dt_);
        const double rot_c = std::cos(p.omega * dt_);
        const double rot_s = std::sin(p.omega * dt_);

        // Upper triangle of J^T J (row-major 4x4) and J^T r, accumulated as scalars.
        double sse = 0.0;
        double a00 = 0, a01 = 0, a02 = 0, a03 = 0, a11 = 0, a12 = 0, a13 = 0, a22 = 0, a23 = 0, a33 = 0;
        double g0 = 0, g1 = 0, g2 = 0, g3 = 0;
        const double c0 = chain[0];
        const double c1 = -p.u1 * chain[1];
        const double c2 = -w * chain[2];
        const double c3 = -w * chain[3];
        const std::size_t n = target_.size();
        for (std::size_t k0 = 0; k0 < n; k0 += kAnchor) {
            const double theta0 = static_cast<double>(k0) * dt_;
            double fast = std::exp(-p.alpha_fast * theta0);
            double slow = std::exp(-p.alpha_slow * theta0);
            double c = std::cos(p.omega * theta0);
            double s = std::sin(p.omega * theta0);
            const std::size_t k1 = std::min(n, k0 + kAnchor);
            for (std::size_t k = k0; k < k1; ++k) {
                const double sc = slow * c;
                const double r = p.u1 * fast + w * sc - target_[k];
                sse += r * r;
                if constexpr (WithJacobian) {
                    const double theta = static_cast<double>(k) * dt_;
                    const double j0 = (fast - sc) * c0;
                    const double j1 = theta * fast * c1;
                    const double j2 = theta * sc * c2;
                    const double j3 = theta * slow * s * c3;
                    a00 += j0 * j0;
                    a01 += j0 * j1;
                    a02 += j0 * j2;
                    a03 += j0 * j3;
                    a11 += j1 * j1;
                    a12 += j1 * j2;
                    a13 += j1 * j3;
                    a22 += j2 * j2;
                    a23 += j2 * j3;
                    a33 += j3 * j3;
                    g0 += r * j0;
                    g1 += r * j1;
                    g2 += r * j2;
                    g3 += r * j3;
                }
                fast *= q_fast;
                slow *= q_slow;
                const double c_next = c * rot_c - s * rot_s;
                s = s * rot_c + c * rot_s;
                c = c_next;
            }
        }
        NormalEquations ne;
        ne.sse = sse;
        if constexpr (WithJacobian) {
            ne.jtj << a00, a01, a02, a03,
                      a01, a11, a12, a13,
                      a02, a12, a22, a23,
                      a03, a13, a23, a33;
            ne.jtr << g0, g1, g2, g3;
        }
        return ne;
    }

private:
    static constexpr std::size_t kAnchor = 128;
    std::span<const double> target_;
    double dt_;
};

struct RunResult {
    AcfModelParams params;
    double sse = 0.0;
    bool converged = false;
    int iterations = 0;
    Termination termination = Termination::MaxIterations;
};

RunResult levenberg_marquardt(const UniformResiduals& residuals, const AcfModelParams& start,
                              const FitConfig& config) {
    Vec4 x = to_solver(start);
    auto ne = residuals.evaluate<true>(x);
    double lambda = config.damping_init;
    Vec4 scaling = Vec4::Zero();
    RunResult result;

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        result.iterations = iter;
        if (ne.jtr.cwiseAbs().maxCoeff() <= config.gradient_tolerance) {
            result.termination = Termination::Gradient;
            result.converged = true;
            break;
        }
        // Marquardt scaling with the running maximum of each diagonal entry, as in MINPACK.
        scaling = scaling.cwiseMax(ne.jtj.diagonal());
        const double diag_floor = 1e-12 * std::max(scaling.maxCoeff(), 1e-300);
        const Vec4 damping = scaling.cwiseMax(diag_floor);

        bool accepted = false;
        while (!accepted) {
            Mat4 m = ne.jtj;
            m.diagonal() += lambda * damping;
            const Vec4 step = m.ldlt().solve(-ne.jtr);
            const Vec4 candidate = x + step;
            const double sse = step.allFinite() ? residuals.evaluate<false>(candidate).sse : HUGE_VAL;
            if (sse < ne.sse) {
                accepted = true;
                const bool tiny = step.norm() <= config.step_tolerance * (x.norm() + config.step_tolerance);
                x = candidate;
                ne = residuals.evaluate<true>(x);
                lambda = std::max(lambda / config.damping_factor, 1e-300);
                if (tiny) {
                    result.termination = Termination::Step;
                    result.converged = true;
                }
            } else {
                lambda *= config.damping_factor;
                if (lambda > config.damping_max) {
                    break;
                }
            }
        }
        if (result.converged) {
            break;
        }
        if (!accepted) {
            result.termination = Termination::Stalled;
            result.converged = true;
            break;
        }
    }

    result.params = to_params(x);
    result.sse = ne.sse;
    return result;
}

// Strict weak order once SSE ties are resolved by the caller.
bool prefer(const RunResult& a, const RunResult& b) {
    if (a.params.alpha_fast != b.params.alpha_fast) {
        return a.params.alpha_fast < b.params.alpha_fast;
    }
    if (a.params.omega != b.params.omega) {
        return a.params.omega < b.params.omega;
    }
    if (a.params.alpha_slow != b.params.alpha_slow) {
        return a.params.alpha_slow < b.params.alpha_slow;
    }
    if (a.params.u1 != b.params.u1) {
        return a.params.u1 < b.params.u1;
    }
    return a.sse < b.sse;
}

const RunResult& select_best(const std::vector<RunResult>& runs, bool converged_only, double tie_tolerance) {
    double best_sse = HUGE_VAL;
    for (const auto& r : runs) {
        if ((!converged_only || r.converged) && r.sse < best_sse) {
            best_sse = r.sse;
        }
    }
    const RunResult* best = nullptr;
    for (const auto& r : runs) {
        if ((converged_only && !r.converged) || !(r.sse <= best_sse + tie_tolerance)) {
            continue;
        }
        if (best == nullptr || prefer(r, *best)) {
            best = &r;
        }
    }
    return *best;
}

}  // namespace

AcfFit fit_acf(const AcfCurve& curve, const FitConfig& config, std::span<const AcfModelParams> starts) {
    if (curve.values.size() < kMinFitLags) {
        throw Error(ErrorCode::DegenerateInput,
                    fmt::format("fit needs at least {} lags, got {}", kMinFitLags, curve.values.size()));
    }
    if (!(curve.dt > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "ACF lag step must be positive");
    }
    for (double v : curve.values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NonFiniteValue, "ACF curve contains non-finite values");
        }
    }
    if (starts.empty()) {
        throw Error(ErrorCode::InvalidArgument, "multi-start grid is empty");
    }
    for (const auto& s : starts) {
        s.validate();
    }

    const UniformResiduals residuals(curve.values, curve.dt);
    const double omega_period = 2.0 * std::numbers::pi / curve.dt;
    std::vector<RunResult> runs(starts.size());
    unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(starts.size()));
    auto worker = [&](unsigned id) {
        for (std::size_t i = id; i < starts.size(); i += threads) {
            auto run = levenberg_marquardt(residuals, starts[i], config);
            // On a lag grid of step dt, omega is only defined modulo 2 pi / dt and up to
            // sign; every alias has the same SSE, so keep the smallest one.
            double folded = std::fmod(run.params.omega, omega_period);
            folded = std::min(folded, omega_period - folded);
            if (folded != run.params.omega) {
                run.params.omega = folded;
                run.sse = residuals.evaluate<false>(to_solver(run.params)).sse;
            }
            runs[i] = run;
        }
    };
    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned id = 0; id < threads; ++id) {
            pool.emplace_back(worker, id);
        }
    }

    const bool any_converged = std::any_of(runs.begin(), runs.end(), [](const auto& r) { return r.converged; });
    RunResult best = select_best(runs, any_converged, config.tie_tolerance);

    // With omega = 0 both terms are plain exponentials and swapping their labels
    // leaves the curve unchanged; the SSE tie rule then prefers smaller alpha_fast.
    if (best.params.omega == 0.0 && best.params.alpha_slow < best.params.alpha_fast) {
        const AcfModelParams swapped{1.0 - best.params.u1, best.params.alpha_slow, best.params.alpha_fast, 0.0};
        const double sse = residuals.evaluate<false>(to_solver(swapped)).sse;
        if (sse <= best.sse + config.tie_tolerance) {
            best.params = swapped;
            best.sse = sse;
        }
    }

    AcfFit fit;
    fit.params = best.params;
    fit.sse = best.sse;
    fit.n_lags = curve.values.size();
    fit.rmse = std::sqrt(best.sse / static_cast<double>(fit.n_lags));
    fit.n_starts = starts.size();
    fit.converged = best.converged;
    fit.iterations = best.iterations;
    fit.termination = best.termination;
    return fit;
}

AcfFit fit_acf(const AcfCurve& curve, const FitConfig& config) {
    const auto starts = multi_start_grid(config);
    return fit_acf(curve, config, starts);
}

}  // namespace freqq
