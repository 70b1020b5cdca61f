#include "freqq/acf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>

#include <fftw3.h>
#include <fmt/format.h>

#include "freqq/error.hpp"
#include "freqq/metrics.hpp"
#include "text_util.hpp"

namespace freqq {

std::string_view to_string(AcfEstimator estimator) noexcept {
    return estimator == AcfEstimator::Biased ? "biased" : "unbiased";
}

std::string_view to_string(AcfMethod method) noexcept {
    switch (method) {
        case AcfMethod::Auto: return "auto";
        case AcfMethod::Direct: return "direct";
        case AcfMethod::Fft: return "fft";
    }
    return "auto";
}

AcfMethod resolve_method(AcfMethod requested, std::size_t max_lag) noexcept {
    if (requested != AcfMethod::Auto) {
        return requested;
    }
    return max_lag <= kDirectLagLimit ? AcfMethod::Direct : AcfMethod::Fft;
}

namespace {

// The FFTW planner is not reentrant.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

template <typename T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (p == nullptr) {
        throw std::bad_alloc();
    }
    return FftwBuffer<T>(p);
}

class FftwPlan {
public:
    explicit FftwPlan(fftw_plan plan) : plan_(plan) {}
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;
    ~FftwPlan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

// Smallest 2^a 3^b 5^c >= n.
std::size_t fft_size_at_least(std::size_t n) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t p2 = 1; p2 < best; p2 *= 2) {
        for (std::size_t p3 = p2; p3 < best; p3 *= 3) {
            std::size_t p5 = p3;
            while (p5 < n) {
                p5 *= 5;
            }
            best = std::min(best, p5);
            if (p3 >= n) {
                break;
            }
        }
        if (p2 >= n) {
            break;
        }
    }
    return best;
}

// Raw lagged products S(k) = sum_t d_t d_{t+k}, k = 0..max_lag.
std::vector<double> lagged_sums_direct(const std::vector<double>& d, std::size_t max_lag) {
    const auto n = d.size();
    std::vector<double> sums(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) {
            acc += d[t] * d[t + k];
        }
        sums[k] = acc;
    }
    return sums;
}

// Wiener-Khinchin with zero padding to >= 2N so the circular correlation equals the linear one.
std::vector<double> lagged_sums_fft(const std::vector<double>& d, std::size_t max_lag) {
    const auto n = d.size();
    const auto nfft = fft_size_at_least(2 * n);
    const auto nfreq = nfft / 2 + 1;

    auto real = fftw_alloc<double>(nfft);
    auto spectrum = fftw_alloc<fftw_complex>(nfreq);
    std::unique_ptr<FftwPlan> forward;
    std::unique_ptr<FftwPlan> backward;
    {
        std::lock_guard lock(fftw_planner_mutex());
        // FFTW_ESTIMATE keeps plans (and results) reproducible from run to run.
        forward = std::make_unique<FftwPlan>(
            fftw_plan_dft_r2c_1d(static_cast<int>(nfft), real.get(), spectrum.get(), FFTW_ESTIMATE));
        backward = std::make_unique<FftwPlan>(
            fftw_plan_dft_c2r_1d(static_cast<int>(nfft), spectrum.get(), real.get(), FFTW_ESTIMATE));
    }

    std::copy(d.begin(), d.end(), real.get());
    std::fill(real.get() + n, real.get() + nfft, 0.0);
    forward->execute();
    for (std::size_t i = 0; i < nfreq; ++i) {
        const double re = spectrum[i][0];
        const double im = spectrum[i][1];
        spectrum[i][0] = re * re + im * im;
        spectrum[i][1] = 0.0;
    }
    backward->execute();

    std::vector<double> sums(max_lag + 1);
    const double scale = 1.0 / static_cast<double>(nfft);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        sums[k] = real[k] * scale;
    }
    return sums;
}

}  // namespace

AcfCurve autocorrelation(const FrequencySeries& series, std::size_t max_lag, const AcfOptions& options) {
    const auto n = series.size();
    if (n < 2) {
        throw Error(ErrorCode::SeriesTooShort, "autocorrelation needs at least 2 samples");
    }

    const auto f = series.values();
    const double mu = mean(f);
    std::vector<double> d(n);
    double scale = 0.0;
    double energy = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        d[t] = f[t] - mu;
        scale = std::max(scale, std::abs(f[t]));
        energy += d[t] * d[t];
    }
    // Anything below round-off of the mean removal is a constant series.
    const double floor = 1e-14 * scale;
    if (!(energy > static_cast<double>(n) * floor * floor)) {
        throw Error(ErrorCode::VarianceZero, "series has zero variance; autocorrelation is undefined");
    }
    if (max_lag < 1 || max_lag >= n) {
        throw Error(ErrorCode::LagTooLarge, fmt::format("max lag must satisfy 1 <= L < N (L = {}, N = {})",
                                                        max_lag, n));
    }

    const auto sums = resolve_method(options.method, max_lag) == AcfMethod::Direct ? lagged_sums_direct(d, max_lag)
                                                                                   : lagged_sums_fft(d, max_lag);

    AcfCurve curve;
    curve.dt = series.dt();
    curve.n_source = n;
    curve.values.resize(max_lag + 1);
    curve.values[0] = 1.0;
    const double nd = static_cast<double>(n);
    const double c0 = sums[0] / nd;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        const double divisor = options.estimator == AcfEstimator::Biased ? nd : nd - static_cast<double>(k);
        curve.values[k] = (sums[k] / divisor) / c0;
    }
    return curve;
}

std::string acf_to_csv(const AcfCurve& curve) {
    std::string out = "lag_s,acf";
    out.reserve(curve.values.size() * 20);
    for (std::size_t k = 0; k < curve.values.size(); ++k) {
        out.push_back('\n');
        detail::append_trimmed_decimal(out, curve.lag_seconds(k));
        fmt::format_to(std::back_inserter(out), ",{:.6f}", curve.values[k]);
    }
    return out;
}

AcfCurve parse_acf_csv(std::string_view text) {
    detail::LineReader lines(text);
    std::string_view line;
    bool have_header = false;
    while (lines.next(line)) {
        if (detail::trim(line).empty()) {
            continue;
        }
        if (detail::trim(line) != "lag_s,acf") {
            throw Error(ErrorCode::MalformedRow, "expected header 'lag_s,acf'", 0);
        }
        have_header = true;
        break;
    }
    if (!have_header) {
        throw Error(ErrorCode::EmptyInput, "no header and no data rows");
    }

    AcfCurve curve;
    std::vector<double> lags;
    std::size_t row = 0;
    while (lines.next(line)) {
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        ++row;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) {
            throw Error(ErrorCode::MalformedRow, "expected two fields", row);
        }
        double fields[2] = {0.0, 0.0};
        const std::string_view parts[2] = {detail::trim(line.substr(0, comma)), detail::trim(line.substr(comma + 1))};
        for (int i = 0; i < 2; ++i) {
            const auto* last = parts[i].data() + parts[i].size();
            auto [ptr, ec] = std::from_chars(parts[i].data(), last, fields[i]);
            if (parts[i].empty() || ec != std::errc{} || ptr != last) {
                throw Error(ErrorCode::MalformedRow, "non-numeric field", row);
            }
            if (!std::isfinite(fields[i])) {
                throw Error(ErrorCode::NonFiniteValue, "non-finite field", row);
            }
        }
        lags.push_back(fields[0]);
        curve.values.push_back(fields[1]);
    }
    if (curve.values.empty()) {
        throw Error(ErrorCode::EmptyInput, "no data rows");
    }
    if (lags.front() != 0.0) {
        throw Error(ErrorCode::MalformedRow, "first lag must be 0", 1);
    }
    if (lags.size() > 1) {
        curve.dt = lags[1];
        if (!(curve.dt > 0.0)) {
            throw Error(ErrorCode::NonUniformSampling, "lags are not strictly increasing", 2);
        }
        for (std::size_t k = 2; k < lags.size(); ++k) {
            // Lags are written with 6 decimals, so allow for that rounding.
            const double expected = static_cast<double>(k) * curve.dt;
            if (std::abs(lags[k] - expected) > 1e-6 + kGapRelativeTolerance * expected) {
                throw Error(ErrorCode::NonUniformSampling, "lags are not uniformly spaced", k + 1);
            }
        }
    }
    curve.n_source = curve.values.size();
    return curve;
}

}  // namespace freqq
