#include "tsf/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "tsf/svg.hpp"
#include "tsf/version.hpp"

namespace tsf {

std::string format_metric(double v) {
    char buf[48];
    if (std::abs(v) < 1.0) {
        std::snprintf(buf, sizeof buf, "%.3f", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.2f", v);
    }
    return buf;
}

namespace {

std::string real(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fixed(double v, int decimals) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string join(std::span<const double> v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += real(v[i]);
    }
    return out;
}

const char* bound_key(PValueBound b) {
    switch (b) {
        case PValueBound::Exact: return "exact";
        case PValueBound::AtLeast: return "at_least";
        case PValueBound::AtMost: return "at_most";
    }
    return "exact";
}

std::string models_text(const ModelSelection& m) {
    std::string s;
    auto add = [&](bool on, const char* name) {
        if (on) {
            s += s.empty() ? "" : ",";
            s += name;
        }
    };
    add(m.arima, "arima");
    add(m.ses, "ses");
    add(m.hdes, "hdes");
    add(m.ensemble, "ensemble");
    return s;
}

// Single-line text for a kv value.
std::string flat(std::string s) {
    for (auto& c : s) {
        if (c == '\n' || c == '\r') {
            c = ' ';
        }
    }
    return s;
}

class KvWriter {
public:
    void put(const std::string& key, const std::string& value) {
        out_ << key << '=' << flat(value) << '\n';
    }
    void put(const std::string& key, double value) { put(key, real(value)); }
    void put(const std::string& key, int value) { put(key, std::to_string(value)); }
    void put(const std::string& key, std::size_t value) { put(key, std::to_string(value)); }
    void put(const std::string& key, bool value) { put(key, std::string(value ? "true" : "false")); }
    void put(const std::string& key, std::span<const double> values) { put(key, join(values)); }
    void put_test(const std::string& prefix, const TestResult& t) {
        put(prefix + ".statistic", t.statistic);
        put(prefix + ".p_value", t.p_value);
        put(prefix + ".p_value_bound", std::string(bound_key(t.bound)));
        put(prefix + ".lags", t.lags_used);
        put(prefix + ".df", t.df);
        put(prefix + ".reject_at_005", t.reject_at_005);
    }
    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

std::string lower_key(std::string s) {
    for (auto& c : s) {
        c = c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

}  // namespace

std::string render_results(const PipelineResult& r, const RunConfig& config) {
    KvWriter kv;
    kv.put("tool.version", std::string(kVersion));
    kv.put("input.file", config.input_path.filename().string());
    if (r.series) {
        kv.put("series.first_year", r.series->start_year());
        kv.put("series.last_year", r.series->end_year());
        kv.put("series.length", r.series->size());
    }
    kv.put("config.train_end_year", config.train_end_year);
    kv.put("config.horizon", config.horizon);
    kv.put("config.models", models_text(config.models));
    kv.put("config.d_max", config.d_max);
    kv.put("config.fix_d", config.fix_d ? std::to_string(*config.fix_d) : std::string("none"));
    kv.put("config.p_max", config.p_max);
    kv.put("config.q_max", config.q_max);
    kv.put("config.seed", std::to_string(config.seed));
    if (r.test) {
        kv.put("split.test_first_year", r.test->start_year());
        kv.put("split.test_last_year", r.test->end_year());
    }

    const auto& ev = r.evaluation;
    if (ev.differencing) {
        kv.put("differencing.d", ev.differencing->d);
        kv.put("differencing.stationary", ev.differencing->stationary);
        kv.put("differencing.degenerate", ev.differencing->degenerate);
        for (std::size_t k = 0; k < ev.differencing->adf.size(); ++k) {
            kv.put_test("adf.d" + std::to_string(k), ev.differencing->adf[k]);
        }
    }
    if (ev.search) {
        for (std::size_t i = 0; i < ev.search->ranked.size(); ++i) {
            const auto& o = ev.search->ranked[i];
            kv.put("search.ranked." + std::to_string(i) + ".order", o.order.to_string());
            kv.put("search.ranked." + std::to_string(i) + ".aic", o.aic);
        }
        for (std::size_t i = 0; i < ev.search->skipped.size(); ++i) {
            const auto& s = ev.search->skipped[i];
            kv.put("search.skipped." + std::to_string(i) + ".order", s.order.to_string());
            kv.put("search.skipped." + std::to_string(i) + ".reason", s.reason);
        }
    }
    auto put_arima = [&](const std::string& prefix, const ArimaFit& a) {
        kv.put(prefix + ".order", a.order.to_string());
        kv.put(prefix + ".ar", a.ar_coeffs);
        kv.put(prefix + ".ma", a.ma_coeffs);
        kv.put(prefix + ".mean_estimated", a.mean_estimated);
        kv.put(prefix + ".constant", a.constant);
        kv.put(prefix + ".sigma2", a.sigma2);
        kv.put(prefix + ".log_likelihood", a.log_likelihood);
        kv.put(prefix + ".aic", a.aic);
        kv.put(prefix + ".ma_on_boundary", a.ma_on_boundary);
        kv.put(prefix + ".degenerate", a.degenerate);
    };
    auto put_ses = [&](const std::string& prefix, const SesFit& s) {
        kv.put(prefix + ".alpha", s.alpha);
        kv.put(prefix + ".sse", s.sse);
        kv.put(prefix + ".final_level", s.final_level);
    };
    auto put_hdes = [&](const std::string& prefix, const HdesFit& h) {
        kv.put(prefix + ".alpha", h.alpha);
        kv.put(prefix + ".beta", h.beta);
        kv.put(prefix + ".sse", h.sse);
        kv.put(prefix + ".final_level", h.final_level);
        kv.put(prefix + ".final_trend", h.final_trend);
    };
    if (ev.arima) {
        put_arima("arima", *ev.arima);
    }
    if (ev.ses) {
        put_ses("ses", *ev.ses);
    }
    if (ev.hdes) {
        put_hdes("hdes", *ev.hdes);
    }

    for (const auto& d : r.diagnostics) {
        const std::string p = "diagnostics." + lower_key(d.model);
        kv.put(p + ".residual_count", d.residual_count);
        if (d.ljung_box) {
            kv.put_test(p + ".ljung_box", *d.ljung_box);
        }
        if (d.shapiro_wilk) {
            kv.put_test(p + ".shapiro_wilk", *d.shapiro_wilk);
        }
        if (d.kpss) {
            kv.put_test(p + ".kpss", *d.kpss);
        }
        for (std::size_t i = 0; i < d.notes.size(); ++i) {
            kv.put(p + ".notes." + std::to_string(i), d.notes[i]);
        }
    }

    kv.put("evaluation.row_count", ev.report.rows.size());
    for (const auto& row : ev.report.rows) {
        const std::string p = "metrics." + lower_key(row.model);
        kv.put(p + ".parameters", row.parameters);
        kv.put(p + ".rmse", row.rmse);
        kv.put(p + ".mae", row.mae);
        kv.put(p + ".mape_percent", row.mape_percent);
        kv.put(p + ".test_forecast", row.forecast.values);
    }
    for (std::size_t i = 0; i < ev.report.failures.size(); ++i) {
        kv.put("failures." + std::to_string(i) + ".model", ev.report.failures[i].model);
        kv.put("failures." + std::to_string(i) + ".message", ev.report.failures[i].message);
    }

    if (r.final_arima) {
        put_arima("final.arima", *r.final_arima);
    }
    if (r.final_ses) {
        put_ses("final.ses", *r.final_ses);
    }
    if (r.final_hdes) {
        put_hdes("final.hdes", *r.final_hdes);
    }
    for (const auto& f : r.final_forecasts) {
        const std::string p = "forecast." + lower_key(f.source);
        kv.put(p + ".first_year", f.first_year);
        kv.put(p + ".last_year", f.last_year());
        kv.put(p + ".values", f.values);
    }
    if (const auto* h = r.headline_forecast()) {
        kv.put("forecast.headline.source", h->source);
        std::string years;
        for (int y = h->first_year; y <= h->last_year(); ++y) {
            years += (years.empty() ? "" : ",") + std::to_string(y);
        }
        kv.put("forecast.headline.years", years);
        kv.put("forecast.headline.values", h->values);
    }
    for (std::size_t i = 0; i < r.stages.size(); ++i) {
        const auto& s = r.stages[i];
        kv.put("stage." + std::to_string(i), s.stage + ":" + (s.ok ? "ok" : "failed") +
                                                   (s.message.empty() ? "" : ":" + s.message));
    }
    return kv.str();
}

std::map<std::string, std::string> parse_results(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("results line without '=': " + line);
        }
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

std::string render_report(const PipelineResult& r, const RunConfig& config) {
    std::ostringstream o;
    const auto& ev = r.evaluation;
    o << "# Forecast evaluation report\n\n";
    o << "Input: `" << config.input_path.filename().string() << "`";
    if (r.train && r.test) {
        o << ", training " << r.train->start_year() << "-" << r.train->end_year() << " ("
          << r.train->size() << " obs), test " << r.test->start_year() << "-"
          << r.test->end_year() << " (" << r.test->size() << " obs)";
    }
    o << "\n\n";

    o << "## Parameter estimates and holdout metrics\n\n";
    o << "| Model | Parameter Estimates | RMSE | MAE | MAPE |\n";
    o << "|---|---|---|---|---|\n";
    for (const auto& row : ev.report.rows) {
        o << "| " << row.model << " | " << row.parameters << " | " << format_metric(row.rmse)
          << " | " << format_metric(row.mae) << " | " << format_metric(row.mape_percent)
          << " |\n";
    }
    o << "\nMAPE is in percent.\n";
    if (!ev.report.failures.empty()) {
        o << "\nFailed models:\n\n";
        for (const auto& f : ev.report.failures) {
            o << "- " << f.model << ": " << f.message << "\n";
        }
    }

    if (ev.differencing) {
        o << "\n## Differencing (ADF, constant, H0: unit root)\n\n";
        o << "| d | ADF statistic | lags | p-value | stationary at 0.05 |\n";
        o << "|---|---|---|---|---|\n";
        for (std::size_t k = 0; k < ev.differencing->adf.size(); ++k) {
            const auto& t = ev.differencing->adf[k];
            o << "| " << k << " | " << fixed(t.statistic, 3) << " | " << t.lags_used << " | "
              << t.p_value_text() << " | " << (t.reject_at_005 ? "yes" : "no") << " |\n";
        }
        o << "\nSelected d = " << ev.differencing->d;
        if (ev.differencing->degenerate) {
            o << " (degenerate level: zero variance or exact fit)";
        } else if (!ev.differencing->stationary) {
            o << " (d_max reached without rejecting the unit root)";
        }
        o << "\n";
    }
    if (ev.search) {
        o << "\n## ARIMA order search (exact ML, ranked by AIC)\n\n";
        o << "| Order | AIC |\n|---|---|\n";
        for (const auto& c : ev.search->ranked) {
            o << "| " << c.order.to_string() << " | " << fixed(c.aic, 3) << " |\n";
        }
        for (const auto& s : ev.search->skipped) {
            o << "| " << s.order.to_string() << " | skipped: " << s.reason << " |\n";
        }
    }
    if (ev.arima) {
        const auto& a = *ev.arima;
        o << "\nARIMA" << a.order.to_string() << ":";
        for (std::size_t i = 0; i < a.ar_coeffs.size(); ++i) {
            o << " phi" << i + 1 << " = " << fixed(a.ar_coeffs[i], 4) << ";";
        }
        for (std::size_t j = 0; j < a.ma_coeffs.size(); ++j) {
            o << " theta" << j + 1 << " = " << fixed(a.ma_coeffs[j], 4) << ";";
        }
        o << " sigma^2 = " << fixed(a.sigma2, 4) << "; log-likelihood = "
          << fixed(a.log_likelihood, 3) << "; AIC = " << fixed(a.aic, 3);
        if (a.ma_on_boundary) {
            o << " (MA polynomial on the invertibility boundary)";
        }
        o << "\n";
    }
    if (ev.ses) {
        o << "\nSES: alpha = " << fixed(ev.ses->alpha, 4) << ", SSE = " << fixed(ev.ses->sse, 4)
          << "\n";
    }
    if (ev.hdes) {
        o << "\nHDES: alpha = " << fixed(ev.hdes->alpha, 4) << ", beta = "
          << fixed(ev.hdes->beta, 4) << ", SSE = " << fixed(ev.hdes->sse, 4) << "\n";
    }

    if (!r.diagnostics.empty()) {
        o << "\n## Residual diagnostics\n\n";
        o << "| Model | n | Ljung-Box Q | LB df | LB p | Shapiro-Wilk W | SW p | KPSS | KPSS p |\n";
        o << "|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& d : r.diagnostics) {
            o << "| " << d.model << " | " << d.residual_count << " | ";
            if (d.ljung_box) {
                o << fixed(d.ljung_box->statistic, 3) << " | " << d.ljung_box->df << " | "
                  << d.ljung_box->p_value_text();
            } else {
                o << "- | - | -";
            }
            o << " | ";
            if (d.shapiro_wilk) {
                o << fixed(d.shapiro_wilk->statistic, 4) << " | "
                  << d.shapiro_wilk->p_value_text();
            } else {
                o << "- | -";
            }
            o << " | ";
            if (d.kpss) {
                o << fixed(d.kpss->statistic, 3) << " | " << d.kpss->p_value_text();
            } else {
                o << "- | -";
            }
            o << " |\n";
        }
        for (const auto& d : r.diagnostics) {
            for (const auto& n : d.notes) {
                o << "\n- " << d.model << " " << n;
            }
        }
        o << "\n";
    }

    if (!r.final_forecasts.empty()) {
        o << "\n## Forecast (models refitted on " << r.series->start_year() << "-"
          << r.series->end_year() << ")\n\n";
        o << "| Year |";
        for (const auto& f : r.final_forecasts) {
            o << ' ' << f.source << " |";
        }
        o << "\n|---|";
        for (std::size_t i = 0; i < r.final_forecasts.size(); ++i) {
            o << "---|";
        }
        o << "\n";
        const auto& first = r.final_forecasts.front();
        for (std::size_t h = 0; h < first.values.size(); ++h) {
            o << "| " << first.first_year + static_cast<int>(h) << " |";
            for (const auto& f : r.final_forecasts) {
                o << ' ' << fixed(f.values[h], 2) << " |";
            }
            o << "\n";
        }
    }

    bool any_failed = false;
    for (const auto& s : r.stages) {
        any_failed = any_failed || !s.ok;
    }
    if (any_failed) {
        o << "\n## Stage failures\n\n";
        for (const auto& s : r.stages) {
            if (!s.ok) {
                o << "- " << s.stage << ": " << s.message << "\n";
            }
        }
    }
    return o.str();
}

void ensure_writable_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    const auto probe = dir / ".tsf_write_probe";
    {
        std::ofstream out(probe, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("output directory " + dir.string() + " is not writable");
        }
    }
    std::filesystem::remove(probe, ec);
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    const auto tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << contents;
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

void emit_report(const PipelineResult& result, const RunConfig& config) {
    ensure_writable_dir(config.output_dir);
    // Render both before touching the disk so a failure leaves no partial output.
    const auto report = render_report(result, config);
    const auto results = render_results(result, config);
    write_atomic(config.output_dir / "report.md", report);
    write_atomic(config.output_dir / "results.kv", results);
}

void emit_plots(const PipelineResult& r, const RunConfig& config) {
    if (!r.series) {
        return;
    }
    ensure_writable_dir(config.output_dir);
    const auto& series = *r.series;
    const auto values = series.values();
    plot::Line observed{"Observed", series.start_year(), {values.begin(), values.end()},
                        "#1f77b4", false};
    write_atomic(config.output_dir / "observed.svg",
                 plot::observed_svg("Observed rate per 100,000", observed));

    const auto& ev = r.evaluation;
    for (const auto& d : r.diagnostics) {
        std::span<const double> res;
        int first_year = 0;
        std::string title;
        if (d.model == "ARIMA" && ev.arima) {
            res = ev.arima->residuals;
            first_year = ev.arima->train_start_year + ev.arima->order.d;
            title = "ARIMA" + ev.arima->order.to_string();
        } else if (d.model == "SES" && ev.ses) {
            res = std::span<const double>(ev.ses->residuals).subspan(kSesLeadingZeros);
            first_year = ev.ses->train_start_year + static_cast<int>(kSesLeadingZeros);
            title = "SES";
        } else if (d.model == "HDES" && ev.hdes) {
            res = std::span<const double>(ev.hdes->residuals).subspan(kHdesLeadingZeros);
            first_year = ev.hdes->train_start_year + static_cast<int>(kHdesLeadingZeros);
            title = "HDES";
        } else {
            continue;
        }
        const std::string file = "residuals_" + lower_key(d.model) + ".svg";
        write_atomic(config.output_dir / file,
                     plot::residual_panel_svg(title, first_year, res,
                                              std::min<std::size_t>(20, res.size() - 1)));
    }

    // Observed vs in-sample fitted (ensemble when both parents exist) and the holdout forecast.
    std::vector<plot::Line> overlays;
    if (ev.hdes && ev.arima && r.train) {
        const auto train = r.train->values();
        const std::size_t d = static_cast<std::size_t>(ev.arima->order.d);
        const std::size_t start = std::max<std::size_t>(d, kHdesLeadingZeros);
        const auto w = difference_values(train, static_cast<int>(d));
        std::vector<double> fitted;
        for (std::size_t t = start; t < train.size(); ++t) {
            const double arima_fit_t = train[t] - w[t - d] + ev.arima->fitted_diff[t - d];
            fitted.push_back(0.5 * (arima_fit_t + ev.hdes->fitted[t]));
        }
        if (fitted.size() >= 2) {
            overlays.push_back({"HDES-ARIMA fitted", r.train->start_year() + static_cast<int>(start),
                                std::move(fitted), "#d62728", false});
        }
    } else if (ev.hdes && r.train) {
        overlays.push_back({"HDES fitted", r.train->start_year() + 2,
                            {ev.hdes->fitted.begin() + 2, ev.hdes->fitted.end()}, "#d62728",
                            false});
    }
    const EvaluationRow* holdout = ev.report.find("HDES-ARIMA");
    if (holdout == nullptr && !ev.report.rows.empty()) {
        holdout = &ev.report.rows.front();
    }
    if (holdout != nullptr) {
        auto vals = holdout->forecast.values;
        int first = holdout->forecast.first_year;
        if (vals.size() < 2 && r.train) {
            vals.insert(vals.begin(), r.train->values().back());
            --first;
        }
        overlays.push_back(
            {holdout->model + " holdout forecast", first, std::move(vals), "#2ca02c", true});
    }
    if (!overlays.empty()) {
        write_atomic(config.output_dir / "fitted_vs_observed.svg",
                     plot::fitted_vs_observed_svg("Observed and fitted values", observed, overlays));
    }

    if (const auto* f = r.headline_forecast()) {
        plot::Line fc{f->source + " forecast", f->first_year, f->values, "#d62728", true};
        write_atomic(config.output_dir / "forecast.svg",
                     plot::forecast_svg("Forecast " + std::to_string(f->first_year) + "-" +
                                            std::to_string(f->last_year()),
                                        observed, fc));
    }
}

}  // namespace tsf
