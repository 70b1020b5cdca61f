// freqq - grid frequency quality metrics from the command line.
//
//   freqq analyze  <csv>               metrics + ACF fit for one series window
//   freqq acf      <csv> --max-lag L   ACF as lag_s,acf CSV
//   freqq fit      <acf.csv>           fit the two-term ACF model, JSON out
//   freqq simulate --scenario NAME     synthetic frequency trace as CSV
//   freqq report   <csv>...            one table row per input
//
// Exit status: 0 ok, 2 input/validation error, 3 numerical failure.
// Diagnostics go to stderr as `error_code=<name> message=<text>`.

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "freqq/acf.hpp"
#include "freqq/error.hpp"
#include "freqq/fitmodel.hpp"
#include "freqq/report.hpp"
#include "freqq/series.hpp"
#include "freqq/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

int exit_code_for(freqq::ErrorCode code) { return freqq::is_numerical(code) ? kExitNumerical : kExitInput; }

void diagnose(freqq::ErrorCode code, std::string_view message) {
    std::cerr << "error_code=" << freqq::to_string(code) << " message=" << message << '\n';
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text << '\n';
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw freqq::Error(freqq::ErrorCode::IoError, fmt::format("cannot write '{}'", path));
    }
    out << text << '\n';
    if (!out.flush()) {
        throw freqq::Error(freqq::ErrorCode::IoError, fmt::format("failed writing '{}'", path));
    }
}

struct IngestFlags {
    double nominal_hz = freqq::kDefaultNominalHz;
    std::string fill_gaps = "none";

    void add(CLI::App* cmd) {
        cmd->add_option("--nominal-hz", nominal_hz, "Nominal grid frequency in Hz")->capture_default_str();
        cmd->add_option("--fill-gaps", fill_gaps, "Gap policy: none (reject) or hold (repeat previous sample)")
            ->check(CLI::IsMember({"none", "hold"}))
            ->capture_default_str();
    }

    [[nodiscard]] freqq::IngestResult load(const std::string& path) const {
        freqq::IngestOptions options;
        options.nominal_hz = nominal_hz;
        options.gap_policy = fill_gaps == "hold" ? freqq::GapPolicy::Hold : freqq::GapPolicy::Reject;
        return freqq::parse_csv(freqq::read_text_file(path), options);
    }
};

struct AnalysisFlags {
    std::size_t window_offset = 0;
    std::string window_len;
    std::vector<double> bands = {100.0, 200.0};
    std::size_t max_lag = freqq::kDefaultMaxLag;
    bool unbiased = false;
    std::string acf_method = "auto";
    std::string format = "table";

    void add(CLI::App* cmd) {
        cmd->add_option("--window-offset", window_offset, "First sample of the analysis window")
            ->capture_default_str();
        cmd->add_option("--window-len", window_len,
                        "Window length in samples, or 'all' (default: 10000, clamped to the series)");
        cmd->add_option("--bands", bands, "Band half-widths in mHz")->delimiter(',')->capture_default_str();
        cmd->add_option("--max-lag", max_lag, "Largest ACF lag in samples")->capture_default_str();
        cmd->add_flag("--unbiased", unbiased, "Use the N-k divisor for the ACF");
        cmd->add_option("--acf-method", acf_method, "auto, direct or fft")
            ->check(CLI::IsMember({"auto", "direct", "fft"}))
            ->capture_default_str();
        cmd->add_option("--format", format, "table or json")
            ->check(CLI::IsMember({"table", "json"}))
            ->capture_default_str();
    }

    [[nodiscard]] freqq::AnalysisOptions options(std::size_t filled) const {
        freqq::AnalysisOptions o;
        o.window_offset = window_offset;
        if (window_len.empty()) {
            o.window_length = freqq::kDefaultWindowLength;
            o.clamp_window = true;
        } else if (window_len == "all") {
            o.window_length = std::nullopt;
            o.clamp_window = true;
        } else {
            std::size_t pos = 0;
            unsigned long long n = 0;
            try {
                n = std::stoull(window_len, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != window_len.size() || n == 0) {
                throw freqq::Error(freqq::ErrorCode::InvalidArgument,
                                   fmt::format("--window-len must be a positive integer or 'all', got '{}'",
                                               window_len));
            }
            o.window_length = static_cast<std::size_t>(n);
            o.clamp_window = false;
        }
        for (double b : bands) {
            if (!(b > 0.0)) {
                throw freqq::Error(freqq::ErrorCode::InvalidArgument, "--bands values must be positive");
            }
        }
        o.bands_mhz = bands;
        o.max_lag = max_lag;
        o.acf.estimator = unbiased ? freqq::AcfEstimator::Unbiased : freqq::AcfEstimator::Biased;
        o.acf.method = acf_method == "direct" ? freqq::AcfMethod::Direct
                       : acf_method == "fft"  ? freqq::AcfMethod::Fft
                                              : freqq::AcfMethod::Auto;
        o.filled_samples = filled;
        return o;
    }
};

// Prints the bundles and returns the exit status implied by their stage results.
int finish_bundles(const std::vector<freqq::AnalysisBundle>& bundles, const std::string& format,
                   const std::string& output) {
    emit(format == "json" ? freqq::render_json(bundles) : freqq::render_table(bundles), output);
    int status = kExitOk;
    for (const auto& b : bundles) {
        for (const auto* stage : {&b.metrics_status, &b.acf_status, &b.fit_status}) {
            if (!stage->ok && stage->error) {
                diagnose(*stage->error, fmt::format("{}{}", b.label.empty() ? "" : b.label + ": ", stage->message));
                status = std::max(status, exit_code_for(*stage->error));
            }
        }
    }
    return status;
}

std::optional<std::uint64_t> seed_from_env() {
    const char* env = std::getenv("FREQQ_SEED");
    if (env == nullptr || *env == '\0') {
        return std::nullopt;
    }
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(env, &pos);
        if (pos == std::string_view(env).size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw freqq::Error(freqq::ErrorCode::InvalidArgument, fmt::format("FREQQ_SEED is not an integer: '{}'", env));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid frequency quality metrics: sigma_f, RoCoF, RoCoF', ACF and its two-term model fit"};
    app.require_subcommand(1, 1);
    const freqq::FitConfig fit_config;
    app.set_version_flag("--version", fmt::format("freqq {} fit-config {}", FREQQ_VERSION, fit_config.digest()));

    IngestFlags ingest;
    AnalysisFlags analysis;
    std::string output;

    auto* analyze_cmd = app.add_subcommand("analyze", "Metrics and ACF fit for one series");
    std::string analyze_input;
    std::string label;
    analyze_cmd->add_option("csv", analyze_input, "time_s,frequency_hz CSV")->required();
    analyze_cmd->add_option("--label", label, "Row label (default: file name)");
    ingest.add(analyze_cmd);
    analysis.add(analyze_cmd);
    analyze_cmd->add_option("-o,--output", output, "Output file (default: stdout)");

    auto* acf_cmd = app.add_subcommand("acf", "Autocorrelation as CSV");
    std::string acf_input;
    std::size_t acf_max_lag = freqq::kDefaultMaxLag;
    bool acf_unbiased = false;
    std::size_t acf_offset = 0;
    std::optional<std::size_t> acf_len;
    acf_cmd->add_option("csv", acf_input, "time_s,frequency_hz CSV")->required();
    acf_cmd->add_option("--max-lag", acf_max_lag, "Largest lag in samples")->capture_default_str();
    acf_cmd->add_flag("--unbiased", acf_unbiased, "Use the N-k divisor");
    acf_cmd->add_option("--window-offset", acf_offset, "First sample used")->capture_default_str();
    acf_cmd->add_option("--window-len", acf_len, "Samples used (default: all)");
    ingest.add(acf_cmd);
    acf_cmd->add_option("-o,--output", output, "Output file (default: stdout)");

    auto* fit_cmd = app.add_subcommand("fit", "Fit the two-term ACF model to an ACF CSV");
    std::string fit_input;
    std::string emit_curve;
    fit_cmd->add_option("acf_csv", fit_input, "lag_s,acf CSV")->required();
    fit_cmd->add_option("--emit-curve", emit_curve, "Also write lag_s,acf,fitted CSV to this path");
    fit_cmd->add_option("-o,--output", output, "Output file (default: stdout)");

    auto* sim_cmd = app.add_subcommand("simulate", "Synthetic frequency trace from a stochastic scenario");
    std::string scenario_name;
    std::string scenario_file;
    std::uint64_t seed = 0;
    double hours = 24.0;
    auto* name_opt = sim_cmd->add_option("--scenario", scenario_name, "Built-in scenario name");
    auto* file_opt = sim_cmd->add_option("--scenario-file", scenario_file, "Scenario JSON file");
    name_opt->excludes(file_opt);
    sim_cmd->add_option("--seed", seed, "RNG seed (FREQQ_SEED overrides)")->capture_default_str();
    sim_cmd->add_option("--hours", hours, "Simulated duration in hours")->capture_default_str();
    sim_cmd->add_option("-o,--output", output, "Output file (default: stdout)");

    auto* report_cmd = app.add_subcommand("report", "One table row per input series");
    std::vector<std::string> report_inputs;
    std::vector<std::string> labels;
    report_cmd->add_option("csv", report_inputs, "time_s,frequency_hz CSV files")->required();
    report_cmd->add_option("--labels", labels, "Row labels, one per input")->delimiter(',');
    ingest.add(report_cmd);
    analysis.add(report_cmd);
    report_cmd->add_option("-o,--output", output, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        diagnose(freqq::ErrorCode::InvalidArgument, e.what());
        return kExitInput;
    }

    try {
        if (analyze_cmd->parsed()) {
            const auto loaded = ingest.load(analyze_input);
            const auto options = analysis.options(loaded.filled_samples);
            auto bundle = freqq::analyze(loaded.series, options, label.empty() ? analyze_input : label);
            return finish_bundles({bundle}, analysis.format, output);
        }

        if (acf_cmd->parsed()) {
            const auto loaded = ingest.load(acf_input);
            const auto& series = loaded.series;
            if (acf_offset >= series.size()) {
                throw freqq::Error(freqq::ErrorCode::OutOfRange, "--window-offset beyond the series");
            }
            const auto win =
                freqq::window(series, acf_offset, acf_len.value_or(series.size() - acf_offset));
            freqq::AcfOptions options;
            options.estimator = acf_unbiased ? freqq::AcfEstimator::Unbiased : freqq::AcfEstimator::Biased;
            emit(freqq::acf_to_csv(freqq::autocorrelation(win, acf_max_lag, options)), output);
            return kExitOk;
        }

        if (fit_cmd->parsed()) {
            const auto curve = freqq::parse_acf_csv(freqq::read_text_file(fit_input));
            const auto fit = freqq::fit_acf(curve, fit_config);
            emit(freqq::fit_to_json(fit, fit_config), output);
            if (!emit_curve.empty()) {
                emit(freqq::fit_curve_csv(curve, fit), emit_curve);
            }
            if (!fit.converged) {
                diagnose(freqq::ErrorCode::NoConvergence, "no multi-start run converged; best effort reported");
                return kExitNumerical;
            }
            return kExitOk;
        }

        if (sim_cmd->parsed()) {
            freqq::SimScenario scenario;
            if (!scenario_file.empty()) {
                scenario = freqq::scenario_from_json(freqq::read_text_file(scenario_file));
            } else if (!scenario_name.empty()) {
                scenario = freqq::builtin_scenario(scenario_name);
            } else {
                throw freqq::Error(freqq::ErrorCode::InvalidArgument, "one of --scenario or --scenario-file is required");
            }
            if (!(hours > 0.0)) {
                throw freqq::Error(freqq::ErrorCode::InvalidArgument, "--hours must be positive");
            }
            scenario.duration_s = hours * 3600.0;
            scenario.seed = seed_from_env().value_or(seed);
            emit(freqq::series_to_csv(freqq::simulate(scenario)), output);
            return kExitOk;
        }

        if (report_cmd->parsed()) {
            if (!labels.empty() && labels.size() != report_inputs.size()) {
                throw freqq::Error(freqq::ErrorCode::InvalidArgument,
                                   fmt::format("{} labels for {} inputs", labels.size(), report_inputs.size()));
            }
            std::vector<std::future<freqq::AnalysisBundle>> jobs;
            for (std::size_t i = 0; i < report_inputs.size(); ++i) {
                const std::string path = report_inputs[i];
                const std::string row_label = labels.empty() ? path : labels[i];
                jobs.push_back(std::async(std::launch::async, [&, path, row_label] {
                    const auto loaded = ingest.load(path);
                    return freqq::analyze(loaded.series, analysis.options(loaded.filled_samples), row_label);
                }));
            }
            std::vector<freqq::AnalysisBundle> bundles;
            for (auto& job : jobs) {
                bundles.push_back(job.get());
            }
            return finish_bundles(bundles, analysis.format, output);
        }
    } catch (const freqq::Error& e) {
        diagnose(e.code(), e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        diagnose(freqq::ErrorCode::InvalidArgument, e.what());
        return kExitInput;
    }
    return kExitInput;
}
