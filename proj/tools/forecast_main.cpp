#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "tsf/csv.hpp"
#include "tsf/diagnostics.hpp"
#include "tsf/pipeline.hpp"
#include "tsf/report.hpp"
#include "tsf/series.hpp"
#include "tsf/version.hpp"

namespace {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

tsf::ModelSelection parse_models(const std::string& text) {
    tsf::ModelSelection m{false, false, false, false};
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item == "arima") {
            m.arima = true;
        } else if (item == "ses") {
            m.ses = true;
        } else if (item == "hdes") {
            m.hdes = true;
        } else if (item == "ensemble") {
            m.ensemble = true;
        } else if (item == "all") {
            m = tsf::ModelSelection{};
        } else if (!item.empty()) {
            throw ConfigError("unknown model '" + item + "' (expected arima, ses, hdes, ensemble)");
        }
    }
    return m;
}

int parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    int out = 0;
    try {
        out = std::stoi(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

void apply_key(tsf::RunConfig& c, const std::string& key, const std::string& v) {
    if (key == "input") {
        c.input_path = v;
    } else if (key == "train-end") {
        c.train_end_year = parse_int(key, v);
    } else if (key == "horizon") {
        c.horizon = parse_int(key, v);
    } else if (key == "models") {
        c.models = parse_models(v);
    } else if (key == "d-max") {
        c.d_max = parse_int(key, v);
    } else if (key == "fix-d") {
        c.fix_d = parse_int(key, v);
    } else if (key == "p-max") {
        c.p_max = parse_int(key, v);
    } else if (key == "q-max") {
        c.q_max = parse_int(key, v);
    } else if (key == "out") {
        c.output_dir = v;
    } else if (key == "plots") {
        c.emit_plots = parse_bool(key, v);
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(std::stoull(v));
    } else if (key == "adf-trend") {
        c.adf_regression = parse_bool(key, v) ? tsf::AdfRegression::ConstantTrend
                                              : tsf::AdfRegression::Constant;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

// Flat `key = value` file; '#' starts a comment.
void load_config_file(tsf::RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        try {
            apply_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void print_summary(const tsf::PipelineResult& r, const tsf::RunConfig& c) {
    const auto& ev = r.evaluation;
    if (ev.differencing) {
        std::printf("differencing: d = %d\n", ev.differencing->d);
    }
    if (ev.arima) {
        std::printf("ARIMA%s  AIC = %.3f\n", ev.arima->order.to_string().c_str(), ev.arima->aic);
    }
    for (const auto& row : ev.report.rows) {
        std::printf("%-11s %-34s RMSE %s  MAE %s  MAPE %s\n", row.model.c_str(),
                    row.parameters.c_str(), tsf::format_metric(row.rmse).c_str(),
                    tsf::format_metric(row.mae).c_str(),
                    tsf::format_metric(row.mape_percent).c_str());
    }
    if (const auto* f = r.headline_forecast()) {
        std::printf("forecast (%s):", f->source.c_str());
        for (std::size_t h = 0; h < f->values.size(); ++h) {
            std::printf(" %d:%.2f", f->first_year + static_cast<int>(h), f->values[h]);
        }
        std::printf("\n");
    }
    std::printf("output: %s\n", c.output_dir.string().c_str());
}

int run_diagnose(const std::string& input, int d_max, bool trend, std::uint64_t seed,
                 std::size_t replications) {
    tsf::TimeSeries series(0, {0.0});
    try {
        series = tsf::load_csv(input);
    } catch (const tsf::InputError& e) {
        std::cerr << "load: " << e.what() << "\n";
        return tsf::kExitInput;
    }
    std::printf("series %d-%d (%zu obs)\n", series.start_year(), series.end_year(), series.size());
    tsf::AdfOptions adf;
    adf.regression = trend ? tsf::AdfRegression::ConstantTrend : tsf::AdfRegression::Constant;
    for (int d = 0; d <= d_max; ++d) {
        const auto w = tsf::difference_values(series.values(), d);
        try {
            const auto t = tsf::adf_test(w, adf);
            std::printf("ADF d=%d: stat %.4f lags %zu p %s%s\n", d, t.statistic, t.lags_used,
                        t.p_value_text().c_str(), t.reject_at_005 ? " (stationary)" : "");
        } catch (const std::exception& e) {
            std::printf("ADF d=%d: %s\n", d, e.what());
        }
        try {
            const auto k = tsf::kpss_test(w);
            std::printf("KPSS d=%d: stat %.4f p %s\n", d, k.statistic, k.p_value_text().c_str());
        } catch (const std::exception& e) {
            std::printf("KPSS d=%d: %s\n", d, e.what());
        }
    }
    const std::size_t max_lag = std::min<std::size_t>(10, series.size() - 1);
    try {
        const auto acf = tsf::acf(series.values(), max_lag);
        const auto pacf = tsf::pacf(series.values(), max_lag);
        std::printf("lag  acf      pacf\n");
        for (std::size_t k = 0; k < acf.size(); ++k) {
            std::printf("%3zu  %7.4f  %7.4f\n", acf[k].lag, acf[k].value, pacf[k].value);
        }
    } catch (const std::exception& e) {
        std::printf("ACF/PACF: %s\n", e.what());
    }

    // Empirical size of Ljung-Box under Gaussian white noise of the same length.
    const std::size_t n = series.size();
    const std::size_t lags = tsf::default_ljung_box_lags(n);
    const auto gen = [n](std::mt19937_64& rng) {
        std::normal_distribution<double> z;
        std::vector<double> x(n);
        for (auto& v : x) {
            v = z(rng);
        }
        return x;
    };
    const auto rule = [lags](std::span<const double> x) {
        return tsf::ljung_box(x, lags, 0).reject_at_005;
    };
    const double size = tsf::rejection_rate(gen, rule, replications, seed);
    std::printf("Ljung-Box size at 0.05 (n=%zu, lags=%zu, %zu reps, seed %llu): %.4f\n", n, lags,
                replications, static_cast<unsigned long long>(seed), size);
    return tsf::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Annual rate forecasting: ARIMA, exponential smoothing and their ensemble"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Fit, evaluate and forecast; write report files");
    std::string config_file;
    std::string input;
    int train_end = 0;
    int horizon = 0;
    std::string models;
    int fix_d = 0;
    int d_max = 0;
    int p_max = 0;
    int q_max = 0;
    std::string out;
    bool plots = false;
    std::uint64_t seed = 0;
    bool adf_trend = false;
    run->add_option("--config", config_file, "Flat key = value file; flags override it");
    run->add_option("--input", input, "CSV with header year,rate");
    run->add_option("--train-end", train_end, "Last training year (default 2012)");
    run->add_option("--horizon", horizon, "Years to forecast after the last observation (default 9)");
    run->add_option("--models", models, "Comma list of arima,ses,hdes,ensemble (default all)");
    run->add_option("--fix-d", fix_d, "Pin the differencing order");
    run->add_option("--d-max", d_max, "Largest differencing order tried (default 2)");
    run->add_option("--p-max", p_max, "Largest AR order searched (default 3)");
    run->add_option("--q-max", q_max, "Largest MA order searched (default 3)");
    run->add_option("--out", out, "Output directory (default out)");
    run->add_flag("--plots", plots, "Also write SVG plots");
    run->add_option("--seed", seed, "Seed for Monte-Carlo diagnostics");
    run->add_flag("--adf-trend", adf_trend, "Include a linear trend in the ADF regression");

    auto* diag = app.add_subcommand("diagnose", "Stationarity tests and correlograms");
    std::string diag_input;
    int diag_dmax = 2;
    bool diag_trend = false;
    std::uint64_t diag_seed = 20240101;
    std::size_t diag_reps = 2000;
    diag->add_option("--input", diag_input, "CSV with header year,rate")->required();
    diag->add_option("--d-max", diag_dmax, "Largest differencing order tested");
    diag->add_flag("--adf-trend", diag_trend, "Include a linear trend in the ADF regression");
    diag->add_option("--seed", diag_seed, "Base seed of the Ljung-Box size check");
    diag->add_option("--replications", diag_reps, "Replications of the size check");

    app.add_subcommand("version", "Print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : tsf::kExitInput;
    }

    if (app.got_subcommand("version")) {
        std::printf("forecast %s\n", tsf::kVersion);
        return tsf::kExitOk;
    }
    if (app.got_subcommand(diag)) {
        return run_diagnose(diag_input, diag_dmax, diag_trend, diag_seed, diag_reps);
    }

    tsf::RunConfig config;
    try {
        if (!config_file.empty()) {
            load_config_file(config, config_file);
        }
        if (run->count("--input") > 0) config.input_path = input;
        if (run->count("--train-end") > 0) config.train_end_year = train_end;
        if (run->count("--horizon") > 0) config.horizon = horizon;
        if (run->count("--models") > 0) config.models = parse_models(models);
        if (run->count("--fix-d") > 0) config.fix_d = fix_d;
        if (run->count("--d-max") > 0) config.d_max = d_max;
        if (run->count("--p-max") > 0) config.p_max = p_max;
        if (run->count("--q-max") > 0) config.q_max = q_max;
        if (run->count("--out") > 0) config.output_dir = out;
        if (run->count("--plots") > 0) config.emit_plots = plots;
        if (run->count("--seed") > 0) config.seed = seed;
        if (run->count("--adf-trend") > 0) {
            config.adf_regression =
                adf_trend ? tsf::AdfRegression::ConstantTrend : tsf::AdfRegression::Constant;
        }
        if (config.input_path.empty()) {
            throw ConfigError("--input is required");
        }
    } catch (const std::exception& e) {
        std::cerr << "config: " << e.what() << "\n";
        return tsf::kExitInput;
    }

    const auto result = tsf::run_pipeline(config);
    for (const auto& s : result.stages) {
        if (!s.ok) {
            std::cerr << s.stage << ": " << s.message << "\n";
        }
    }
    if (result.series && result.train) {
        print_summary(result, config);
    }
    return result.exit_code;
}
