#include "tsf/ensemble.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tsf {

Forecast average_forecast(const Forecast& a, const Forecast& b) {
    if (a.first_year != b.first_year || a.values.size() != b.values.size()) {
        throw AlignmentError("cannot average forecasts over different spans: " +
                             std::to_string(a.first_year) + ".." + std::to_string(a.last_year()) +
                             " vs " + std::to_string(b.first_year) + ".." +
                             std::to_string(b.last_year()));
    }
    Forecast out{a.first_year, std::vector<double>(a.values.size()), a.source + "+" + b.source};
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        out.values[i] = (a.values[i] + b.values[i]) / 2.0;
    }
    return out;
}

namespace {

void check_pair(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) {
        throw std::invalid_argument("metric inputs differ in length: " +
                                    std::to_string(actual.size()) + " vs " +
                                    std::to_string(predicted.size()));
    }
    if (actual.empty()) {
        throw std::invalid_argument("metric inputs are empty");
    }
}

}  // namespace

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(actual.size()));
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        s += std::abs(actual[i] - predicted[i]);
    }
    return s / static_cast<double>(actual.size());
}

double mape_percent(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            throw std::domain_error("MAPE undefined: actual value at index " + std::to_string(i) +
                                    " is zero");
        }
        s += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
    }
    return 100.0 * s / static_cast<double>(actual.size());
}

const EvaluationRow* EvaluationReport::find(const std::string& model) const {
    for (const auto& r : rows) {
        if (r.model == model) {
            return &r;
        }
    }
    return nullptr;
}

std::string describe_arima(const ArimaOrder& order) { return order.to_string(); }

std::string describe_ses(const SesFit& fit) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "α = %.3f", fit.alpha);
    return buf;
}

std::string describe_hdes(const HdesFit& fit) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "α = %.2f, β = %.2f", fit.alpha, fit.beta);
    return buf;
}

namespace {

EvaluationRow score(std::string model, std::string params, Forecast f, const TimeSeries& test) {
    EvaluationRow row;
    row.model = std::move(model);
    row.parameters = std::move(params);
    row.rmse = rmse(test.values(), f.values);
    row.mae = mae(test.values(), f.values);
    row.mape_percent = mape_percent(test.values(), f.values);
    row.forecast = std::move(f);
    return row;
}

}  // namespace

Evaluation evaluate_models(const TimeSeries& train, const TimeSeries& test,
                           const EvaluationOptions& opts) {
    if (test.start_year() != train.end_year() + 1) {
        throw RangeError("test span must start the year after training ends (" +
                         std::to_string(train.end_year() + 1) + "), got " +
                         std::to_string(test.start_year()));
    }
    Evaluation ev;
    ev.report.test_first_year = test.start_year();
    ev.report.test_last_year = test.end_year();
    const int horizon = static_cast<int>(test.size());
    const auto& m = opts.models;

    std::optional<Forecast> arima_fc;
    std::optional<Forecast> hdes_fc;

    if (m.arima || m.ensemble) {
        try {
            ArimaOrder order;
            ArimaFitOptions fit_opts;
            if (opts.arima_order) {
                order = *opts.arima_order;
                fit_opts.include_mean = order.d == 0;
                ev.arima = arima_fit(train, order, fit_opts);
            } else {
                int d = 0;
                if (opts.fixed_d) {
                    d = *opts.fixed_d;
                } else {
                    AdfOptions adf;
                    adf.regression = opts.adf_regression;
                    ev.differencing = select_differencing(train, opts.d_max, adf);
                    d = ev.differencing->d;
                }
                fit_opts.include_mean = d == 0;
                ev.search = arima_order_search(train, d, opts.p_max, opts.q_max, fit_opts);
                ev.arima = ev.search->best;
                order = ev.arima->order;
            }
            arima_fc = arima_forecast(*ev.arima, train, horizon);
            if (m.arima) {
                ev.report.rows.push_back(score("ARIMA", describe_arima(order), *arima_fc, test));
            }
        } catch (const std::exception& e) {
            ev.report.failures.push_back({"ARIMA", e.what()});
        }
    }
    if (m.ses) {
        try {
            ev.ses = ses_fit(train);
            ev.report.rows.push_back(
                score("SES", describe_ses(*ev.ses), ses_forecast(*ev.ses, horizon), test));
        } catch (const std::exception& e) {
            ev.report.failures.push_back({"SES", e.what()});
        }
    }
    if (m.hdes || m.ensemble) {
        try {
            ev.hdes = hdes_fit(train);
            hdes_fc = hdes_forecast(*ev.hdes, horizon);
            if (m.hdes) {
                ev.report.rows.push_back(score("HDES", describe_hdes(*ev.hdes), *hdes_fc, test));
            }
        } catch (const std::exception& e) {
            ev.report.failures.push_back({"HDES", e.what()});
        }
    }
    if (m.ensemble) {
        if (arima_fc && hdes_fc) {
            try {
                const auto& o = ev.arima->order;
                std::string params = describe_hdes(*ev.hdes) + ", p = " + std::to_string(o.p) +
                                     ", d = " + std::to_string(o.d) + ", q = " +
                                     std::to_string(o.q);
                ev.report.rows.push_back(score("HDES-ARIMA", std::move(params),
                                               average_forecast(*hdes_fc, *arima_fc), test));
            } catch (const std::exception& e) {
                ev.report.failures.push_back({"HDES-ARIMA", e.what()});
            }
        } else {
            ev.report.failures.push_back(
                {"HDES-ARIMA", "requires both the HDES and ARIMA fits to succeed"});
        }
    }
    return ev;
}

}  // namespace tsf
