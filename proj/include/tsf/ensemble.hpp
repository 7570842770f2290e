#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsf/arima.hpp"
#include "tsf/exp_smoothing.hpp"
#include "tsf/forecast.hpp"
#include "tsf/series.hpp"

namespace tsf {

/// Element-wise mean of two forecasts over the same years.
[[nodiscard]] Forecast average_forecast(const Forecast& a, const Forecast& b);

[[nodiscard]] double rmse(std::span<const double> actual, std::span<const double> predicted);
[[nodiscard]] double mae(std::span<const double> actual, std::span<const double> predicted);
/// 100 * mean(|a - p| / |a|); throws std::domain_error naming the first zero actual.
[[nodiscard]] double mape_percent(std::span<const double> actual,
                                  std::span<const double> predicted);

struct ModelSelection {
    bool arima = true;
    bool ses = true;
    bool hdes = true;
    bool ensemble = true;

    [[nodiscard]] bool any() const { return arima || ses || hdes || ensemble; }
};

struct EvaluationOptions {
    ModelSelection models;
    /// Pin the ARIMA order; otherwise d comes from the ADF loop and (p, q) from AIC.
    std::optional<ArimaOrder> arima_order;
    /// Pin only d and search (p, q).
    std::optional<int> fixed_d;
    int d_max = 2;
    int p_max = 3;
    int q_max = 3;
    AdfRegression adf_regression = AdfRegression::Constant;
};

struct EvaluationRow {
    std::string model;
    std::string parameters;
    double rmse = 0.0;
    double mae = 0.0;
    double mape_percent = 0.0;
    Forecast forecast;
};

struct ModelFailure {
    std::string model;
    std::string message;
};

struct EvaluationReport {
    /// Fixed order: ARIMA, SES, HDES, HDES-ARIMA (selected models only).
    std::vector<EvaluationRow> rows;
    int test_first_year = 0;
    int test_last_year = 0;
    std::vector<ModelFailure> failures;

    [[nodiscard]] const EvaluationRow* find(const std::string& model) const;
};

/// Everything fitted on the training span, kept for diagnostics and final forecasts.
struct Evaluation {
    EvaluationReport report;
    std::optional<DifferencingChoice> differencing;
    std::optional<OrderSearchResult> search;
    std::optional<ArimaFit> arima;
    std::optional<SesFit> ses;
    std::optional<HdesFit> hdes;
};

/// Fits the selected models on `train` only, forecasts length(test) years and scores them.
/// `test` must start the year after `train` ends. A failing model is listed in
/// report.failures and the remaining models are still evaluated.
[[nodiscard]] Evaluation evaluate_models(const TimeSeries& train, const TimeSeries& test,
                                         const EvaluationOptions& opts = {});

/// "(0,2,2)", "α = 0.999", ... as printed in report tables.
[[nodiscard]] std::string describe_arima(const ArimaOrder& order);
[[nodiscard]] std::string describe_ses(const SesFit& fit);
[[nodiscard]] std::string describe_hdes(const HdesFit& fit);

}  // namespace tsf
