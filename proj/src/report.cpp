#include "freqq/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "json.hpp"

namespace freqq {

using Json = nlohmann::ordered_json;

std::optional<ErrorCode> AnalysisBundle::first_error() const {
    for (const auto* status : {&metrics_status, &acf_status, &fit_status}) {
        if (!status->ok) {
            return status->error;
        }
    }
    return std::nullopt;
}

AnalysisBundle analyze(const FrequencySeries& series, const AnalysisOptions& options, std::string label) {
    if (options.window_offset >= series.size()) {
        throw Error(ErrorCode::OutOfRange,
                    fmt::format("window offset {} beyond series of {} samples", options.window_offset, series.size()));
    }
    const std::size_t available = series.size() - options.window_offset;
    std::size_t length = options.window_length.value_or(available);
    if (options.clamp_window) {
        length = std::min(length, available);
    }
    const auto win = window(series, options.window_offset, length);
    if (win.size() < kMinFitLags) {
        throw Error(ErrorCode::SeriesTooShort, fmt::format("analysis needs at least {} samples, got {}",
                                                           kMinFitLags, win.size()));
    }

    std::vector<BandPolicy> bands;
    bands.reserve(options.bands_mhz.size());
    for (double b : options.bands_mhz) {
        bands.emplace_back(b, series.nominal_hz());
    }

    AnalysisBundle bundle;
    bundle.label = std::move(label);
    auto& prov = bundle.provenance;
    prov.source_samples = series.size();
    prov.window_offset = options.window_offset;
    prov.window_length = win.size();
    prov.dt_s = win.dt();
    prov.nominal_hz = win.nominal_hz();
    prov.max_lag = options.max_lag;
    prov.acf_estimator = std::string(to_string(options.acf.estimator));
    prov.acf_method = std::string(to_string(resolve_method(options.acf.method, options.max_lag)));
    prov.fit_config_digest = options.fit.digest();
    prov.fit_config = options.fit.canonical();
    prov.filled_samples = options.filled_samples;

    try {
        bundle.metrics = compute_report(win, bands);
        for (const auto& m : bundle.metrics.minutes_outside) {
            bundle.band_minutes[m.band_mhz] = m.minutes;
        }
    } catch (const Error& e) {
        bundle.metrics_status = StageStatus::failure(e);
    }

    std::optional<AcfCurve> curve;
    try {
        curve = autocorrelation(win, options.max_lag, options.acf);
    } catch (const Error& e) {
        bundle.acf_status = StageStatus::failure(e);
        bundle.fit_status = {false, std::nullopt, "skipped: autocorrelation unavailable"};
        return bundle;
    }

    try {
        bundle.fit = fit_acf(*curve, options.fit);
        if (!bundle.fit->converged) {
            bundle.fit_status = {false, ErrorCode::NoConvergence, "no multi-start run converged; best effort kept"};
        }
    } catch (const Error& e) {
        bundle.fit_status = StageStatus::failure(e);
    }
    return bundle;
}

namespace {

std::string band_key(double band_mhz) { return fmt::format("{}", band_mhz); }

double parse_band_key(const std::string& key) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
    if (ec != std::errc{} || ptr != key.data() + key.size()) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("bad band key '{}'", key));
    }
    return v;
}

Json status_json(const StageStatus& s) {
    Json j;
    j["ok"] = s.ok;
    j["error_code"] = s.error ? Json(std::string(to_string(*s.error))) : Json(nullptr);
    j["message"] = s.message;
    return j;
}

StageStatus status_from_json(const Json& j) {
    StageStatus s;
    s.ok = j.at("ok").get<bool>();
    if (!j.at("error_code").is_null()) {
        s.error = error_code_from_string(j.at("error_code").get<std::string>());
        if (!s.error) {
            throw Error(ErrorCode::InvalidArgument, "unknown error_code in bundle JSON");
        }
    }
    s.message = j.at("message").get<std::string>();
    return s;
}

Json metrics_json(const MetricsReport& m) {
    Json j;
    j["sigma_f"] = m.sigma_f;
    j["sigma_rocof"] = m.sigma_rocof;
    j["sigma_rocof_prime"] = m.sigma_rocof_prime;
    auto bands = Json::array();
    for (const auto& b : m.minutes_outside) {
        bands.push_back({{"band_mhz", b.band_mhz}, {"center_hz", b.center_hz}, {"minutes", b.minutes}});
    }
    j["minutes_outside"] = std::move(bands);
    j["mean_f"] = m.mean_f;
    j["n_samples"] = m.n_samples;
    j["tau_s"] = m.tau_s;
    j["dtau_s"] = m.dtau_s;
    return j;
}

MetricsReport metrics_from_json(const Json& j) {
    MetricsReport m;
    m.sigma_f = j.at("sigma_f").get<double>();
    m.sigma_rocof = j.at("sigma_rocof").get<double>();
    m.sigma_rocof_prime = j.at("sigma_rocof_prime").get<double>();
    for (const auto& b : j.at("minutes_outside")) {
        m.minutes_outside.push_back(
            {b.at("band_mhz").get<double>(), b.at("center_hz").get<double>(), b.at("minutes").get<double>()});
    }
    m.mean_f = j.at("mean_f").get<double>();
    m.n_samples = j.at("n_samples").get<std::size_t>();
    m.tau_s = j.at("tau_s").get<double>();
    m.dtau_s = j.at("dtau_s").get<double>();
    return m;
}

Json fit_json(const AcfFit& f) {
    Json j;
    j["params"] = {{"u1", f.params.u1},
                   {"alpha_fast", f.params.alpha_fast},
                   {"alpha_slow", f.params.alpha_slow},
                   {"omega", f.params.omega}};
    j["sse"] = f.sse;
    j["rmse"] = f.rmse;
    j["n_lags"] = f.n_lags;
    j["n_starts"] = f.n_starts;
    j["converged"] = f.converged;
    j["iterations"] = f.iterations;
    j["termination"] = std::string(to_string(f.termination));
    return j;
}

AcfFit fit_from_json(const Json& j) {
    AcfFit f;
    const auto& p = j.at("params");
    f.params = {p.at("u1").get<double>(), p.at("alpha_fast").get<double>(), p.at("alpha_slow").get<double>(),
                p.at("omega").get<double>()};
    f.sse = j.at("sse").get<double>();
    f.rmse = j.at("rmse").get<double>();
    f.n_lags = j.at("n_lags").get<std::size_t>();
    f.n_starts = j.at("n_starts").get<std::size_t>();
    f.converged = j.at("converged").get<bool>();
    f.iterations = j.at("iterations").get<int>();
    f.termination = termination_from_string(j.at("termination").get<std::string>());
    return f;
}

Json provenance_json(const Provenance& p) {
    Json j;
    j["source_samples"] = p.source_samples;
    j["window_offset"] = p.window_offset;
    j["window_length"] = p.window_length;
    j["dt_s"] = p.dt_s;
    j["nominal_hz"] = p.nominal_hz;
    j["tau_samples"] = p.tau_samples;
    j["dtau_samples"] = p.dtau_samples;
    j["max_lag"] = p.max_lag;
    j["acf_estimator"] = p.acf_estimator;
    j["acf_method"] = p.acf_method;
    j["fit_config_digest"] = p.fit_config_digest;
    j["fit_config"] = p.fit_config;
    j["filled_samples"] = p.filled_samples;
    return j;
}

Provenance provenance_from_json(const Json& j) {
    Provenance p;
    p.source_samples = j.at("source_samples").get<std::size_t>();
    p.window_offset = j.at("window_offset").get<std::size_t>();
    p.window_length = j.at("window_length").get<std::size_t>();
    p.dt_s = j.at("dt_s").get<double>();
    p.nominal_hz = j.at("nominal_hz").get<double>();
    p.tau_samples = j.at("tau_samples").get<std::size_t>();
    p.dtau_samples = j.at("dtau_samples").get<std::size_t>();
    p.max_lag = j.at("max_lag").get<std::size_t>();
    p.acf_estimator = j.at("acf_estimator").get<std::string>();
    p.acf_method = j.at("acf_method").get<std::string>();
    p.fit_config_digest = j.at("fit_config_digest").get<std::string>();
    p.fit_config = j.at("fit_config").get<std::string>();
    p.filled_samples = j.at("filled_samples").get<std::size_t>();
    return p;
}

Json bundle_json(const AnalysisBundle& b) {
    Json j;
    j["label"] = b.label;
    j["metrics"] = metrics_json(b.metrics);
    j["fit"] = b.fit ? fit_json(*b.fit) : Json(nullptr);
    Json bands = Json::object();
    for (const auto& [band, minutes] : b.band_minutes) {
        bands[band_key(band)] = minutes;
    }
    j["band_minutes"] = std::move(bands);
    j["status"] = {{"metrics", status_json(b.metrics_status)},
                   {"acf", status_json(b.acf_status)},
                   {"fit", status_json(b.fit_status)}};
    j["provenance"] = provenance_json(b.provenance);
    return j;
}

AnalysisBundle bundle_from_json(const Json& j) {
    AnalysisBundle b;
    b.label = j.at("label").get<std::string>();
    b.metrics = metrics_from_json(j.at("metrics"));
    if (!j.at("fit").is_null()) {
        b.fit = fit_from_json(j.at("fit"));
    }
    for (const auto& [key, value] : j.at("band_minutes").items()) {
        b.band_minutes[parse_band_key(key)] = value.get<double>();
    }
    const auto& status = j.at("status");
    b.metrics_status = status_from_json(status.at("metrics"));
    b.acf_status = status_from_json(status.at("acf"));
    b.fit_status = status_from_json(status.at("fit"));
    b.provenance = provenance_from_json(j.at("provenance"));
    return b;
}

std::string pad(std::string_view s, std::size_t width, bool left) {
    std::string out(s);
    if (out.size() < width) {
        out.insert(left ? out.end() : out.begin(), width - out.size(), ' ');
    }
    return out;
}

}  // namespace

std::string render_json(const std::vector<AnalysisBundle>& bundles) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    auto list = Json::array();
    for (const auto& b : bundles) {
        list.push_back(bundle_json(b));
    }
    doc["bundles"] = std::move(list);
    return doc.dump(2);
}

std::vector<AnalysisBundle> parse_bundles_json(std::string_view text) {
    try {
        const auto doc = Json::parse(text);
        if (doc.at("schema_version").get<int>() != kSchemaVersion) {
            throw Error(ErrorCode::InvalidArgument, "unsupported schema_version");
        }
        std::vector<AnalysisBundle> bundles;
        for (const auto& b : doc.at("bundles")) {
            bundles.push_back(bundle_from_json(b));
        }
        return bundles;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("bundle JSON: {}", e.what()));
    }
}

std::string metrics_to_json(const MetricsReport& metrics) { return metrics_json(metrics).dump(2); }

std::string fit_to_json(const AcfFit& fit, const FitConfig& config) {
    Json j = fit_json(fit);
    j["fit_config_digest"] = config.digest();
    j["fit_config"] = config.canonical();
    return j.dump(2);
}

std::string fit_to_row(const AcfFit& fit) {
    return fmt::format("{:.4f}  {:.4f}  {:.4f}  {:.4f}", fit.params.u1, fit.params.alpha_fast,
                       fit.params.alpha_slow, fit.params.omega);
}

std::string render_table(const std::vector<AnalysisBundle>& bundles) {
    std::vector<double> bands;
    for (const auto& b : bundles) {
        for (const auto& [band, minutes] : b.band_minutes) {
            if (std::find(bands.begin(), bands.end(), band) == bands.end()) {
                bands.push_back(band);
            }
        }
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header = {"System",  "sigma_f (Hz)", "sigma_RoCoF (Hz/s)", "sigma_RoCoF' (Hz/s^2)",
                                       "u1",      "alpha_fast",   "alpha_slow",         "omega"};
    for (double band : bands) {
        header.push_back(fmt::format("min >+-{} mHz", band));
    }
    rows.push_back(header);

    for (const auto& b : bundles) {
        std::vector<std::string> row;
        row.push_back(b.label.empty() ? "-" : b.label);
        if (b.metrics_status.ok) {
            row.push_back(fmt::format("{:.3f}", b.metrics.sigma_f));
            row.push_back(fmt::format("{:.4f}", b.metrics.sigma_rocof));
            row.push_back(fmt::format("{:.4f}", b.metrics.sigma_rocof_prime));
        } else {
            row.insert(row.end(), 3, "-");
        }
        if (b.fit) {
            row.push_back(fmt::format("{:.4f}", b.fit->params.u1));
            row.push_back(fmt::format("{:.4f}", b.fit->params.alpha_fast));
            row.push_back(fmt::format("{:.4f}", b.fit->params.alpha_slow));
            row.push_back(fmt::format("{:.4f}", b.fit->params.omega));
        } else {
            row.insert(row.end(), 4, "-");
        }
        for (double band : bands) {
            const auto it = b.band_minutes.find(band);
            row.push_back(it == b.band_minutes.end() ? "-" : fmt::format("{:.2f}", it->second));
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::string out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::string line;
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c > 0) {
                line += "  ";
            }
            line += pad(rows[r][c], widths[c], c == 0);
        }
        while (!line.empty() && line.back() == ' ') {
            line.pop_back();
        }
        out += line;
        out += '\n';
        if (r == 0) {
            std::size_t total = 0;
            for (auto w : widths) {
                total += w;
            }
            out += std::string(total + 2 * (widths.size() - 1), '-');
            out += '\n';
        }
    }
    return out;
}

std::string fit_curve_csv(const AcfCurve& curve, const AcfFit& fit) {
    std::string out = "lag_s,acf,fitted";
    for (std::size_t k = 0; k < curve.values.size(); ++k) {
        const double lag = curve.lag_seconds(k);
        out += fmt::format("\n{},{:.6f},{:.6f}", lag, curve.values[k], model_eval(fit.params, lag));
    }
    return out;
}

}  // namespace freqq
