#include "tsf/pipeline.hpp"

#include <exception>

#include "tsf/csv.hpp"
#include "tsf/report.hpp"

namespace tsf {

void RunConfig::validate() const {
    if (horizon < 1) {
        throw std::invalid_argument("horizon must be at least 1");
    }
    if (p_max < 0 || p_max > 5 || q_max < 0 || q_max > 5) {
        throw std::invalid_argument("p-max and q-max must lie in [0, 5]");
    }
    if (d_max < 0 || d_max > 5) {
        throw std::invalid_argument("d-max must lie in [0, 5]");
    }
    if (fix_d && (*fix_d < 0 || *fix_d > 5)) {
        throw std::invalid_argument("fix-d must lie in [0, 5]");
    }
}

const Forecast* PipelineResult::headline_forecast() const {
    for (const auto& f : final_forecasts) {
        if (f.source.find('+') != std::string::npos) {
            return &f;
        }
    }
    return final_forecasts.empty() ? nullptr : &final_forecasts.front();
}

ResidualDiagnostics diagnose_residuals(const std::string& model, std::span<const double> residuals,
                                       std::size_t fitted_params, bool with_kpss) {
    ResidualDiagnostics d;
    d.model = model;
    d.residual_count = residuals.size();
    auto attempt = [&](const char* name, auto&& fn) {
        try {
            return std::optional<TestResult>(fn());
        } catch (const DegenerateError& e) {
            d.notes.push_back(std::string(name) + ": degenerate variance (" + e.what() + ")");
        } catch (const std::exception& e) {
            d.notes.push_back(std::string(name) + ": " + e.what());
        }
        return std::optional<TestResult>{};
    };
    const std::size_t lags = default_ljung_box_lags(residuals.size());
    d.ljung_box = attempt("Ljung-Box", [&] { return ljung_box(residuals, lags, fitted_params); });
    d.shapiro_wilk = attempt("Shapiro-Wilk", [&] { return shapiro_wilk(residuals); });
    if (with_kpss) {
        d.kpss = attempt("KPSS", [&] { return kpss_test(residuals); });
    }
    return d;
}

namespace {

void fail(PipelineResult& r, const std::string& stage, const std::string& message, int code) {
    r.stages.push_back({stage, false, message});
    if (r.exit_code == kExitOk) {
        r.exit_code = code;
    }
}

std::span<const double> drop_leading(const std::vector<double>& v, std::size_t k) {
    return std::span<const double>(v).subspan(std::min(k, v.size()));
}

}  // namespace

PipelineResult run_analysis(const TimeSeries& series, const RunConfig& config) {
    PipelineResult r;
    r.series = series;
    try {
        auto [train, test] = split_at(series, config.train_end_year);
        r.train = std::move(train);
        r.test = std::move(test);
        r.stages.push_back({"split", true, {}});
    } catch (const std::exception& e) {
        fail(r, "split", e.what(), kExitInput);
        return r;
    }

    // Fitting and holdout evaluation see the training span only.
    EvaluationOptions eo;
    eo.models = config.models;
    eo.fixed_d = config.fix_d;
    eo.d_max = config.d_max;
    eo.p_max = config.p_max;
    eo.q_max = config.q_max;
    eo.adf_regression = config.adf_regression;
    try {
        r.evaluation = evaluate_models(*r.train, *r.test, eo);
    } catch (const std::exception& e) {
        fail(r, "evaluate", e.what(), kExitFit);
        return r;
    }
    if (r.evaluation.report.failures.empty()) {
        r.stages.push_back({"evaluate", true, {}});
    } else {
        for (const auto& f : r.evaluation.report.failures) {
            fail(r, "evaluate", f.model + ": " + f.message, kExitFit);
        }
    }

    const auto& m = config.models;
    const auto& ev = r.evaluation;
    if (ev.arima && (m.arima || m.ensemble)) {
        const auto& a = *ev.arima;
        r.diagnostics.push_back(diagnose_residuals(
            "ARIMA", a.residuals, static_cast<std::size_t>(a.order.p + a.order.q), true));
    }
    if (ev.ses && m.ses) {
        r.diagnostics.push_back(
            diagnose_residuals("SES", drop_leading(ev.ses->residuals, kSesLeadingZeros), 0, false));
    }
    if (ev.hdes && (m.hdes || m.ensemble)) {
        r.diagnostics.push_back(diagnose_residuals(
            "HDES", drop_leading(ev.hdes->residuals, kHdesLeadingZeros), 0, false));
    }
    r.stages.push_back({"diagnostics", true, {}});

    // Out-of-sample horizon: refit the selected specifications on the full series.
    std::optional<Forecast> arima_fc;
    std::optional<Forecast> hdes_fc;
    try {
        if (ev.arima && (m.arima || m.ensemble)) {
            ArimaFitOptions fo;
            fo.include_mean = ev.arima->mean_estimated;
            r.final_arima = arima_fit(series, ev.arima->order, fo);
            arima_fc = arima_forecast(*r.final_arima, series, config.horizon);
            if (m.arima) {
                r.final_forecasts.push_back(*arima_fc);
            }
        }
        if (ev.ses && m.ses) {
            r.final_ses = ses_fit(series);
            r.final_forecasts.push_back(ses_forecast(*r.final_ses, config.horizon));
        }
        if (ev.hdes && (m.hdes || m.ensemble)) {
            r.final_hdes = hdes_fit(series);
            hdes_fc = hdes_forecast(*r.final_hdes, config.horizon);
            if (m.hdes) {
                r.final_forecasts.push_back(*hdes_fc);
            }
        }
        if (m.ensemble && arima_fc && hdes_fc) {
            r.final_forecasts.push_back(average_forecast(*hdes_fc, *arima_fc));
        }
        r.stages.push_back({"forecast", true, {}});
    } catch (const std::exception& e) {
        fail(r, "forecast", e.what(), kExitFit);
    }
    return r;
}

PipelineResult run_pipeline(const RunConfig& config) {
    PipelineResult r;
    try {
        config.validate();
    } catch (const std::exception& e) {
        fail(r, "config", e.what(), kExitInput);
        return r;
    }
    TimeSeries series(0, {0.0});
    try {
        series = load_csv(config.input_path);
        r.stages.push_back({"load", true, {}});
    } catch (const std::exception& e) {
        fail(r, "load", e.what(), kExitInput);
        return r;
    }
    try {
        ensure_writable_dir(config.output_dir);
    } catch (const std::exception& e) {
        fail(r, "output", e.what(), kExitIo);
        return r;
    }

    auto loaded_stage = r.stages;
    r = run_analysis(series, config);
    r.stages.insert(r.stages.begin(), loaded_stage.begin(), loaded_stage.end());
    if (!r.train) {
        return r;
    }

    try {
        emit_report(r, config);
        r.stages.push_back({"report", true, {}});
    } catch (const std::exception& e) {
        fail(r, "report", e.what(), kExitIo);
    }
    if (config.emit_plots) {
        try {
            emit_plots(r, config);
            r.stages.push_back({"plots", true, {}});
        } catch (const IoError& e) {
            fail(r, "plots", e.what(), kExitIo);
        } catch (const std::exception& e) {
            // Plots are optional output; record without failing the run.
            r.stages.push_back({"plots", false, e.what()});
        }
    }
    return r;
}

}  // namespace tsf
