#pragma once

#include <vector>

#include "tsf/forecast.hpp"
#include "tsf/series.hpp"

namespace tsf {

/**
 * @brief Simple exponential smoothing fit.
 *
 * Level recursion l_t = alpha y_t + (1 - alpha) l_{t-1} started at the first
 * observation. residuals[t] = y_t - l_{t-1}, with residuals[0] = 0 by
 * construction, so residuals has one entry per training observation.
 */
struct SesFit {
    double alpha = 0.0;
    double final_level = 0.0;
    std::vector<double> fitted;
    std::vector<double> residuals;
    double sse = 0.0;
    int train_start_year = 0;
    int train_end_year = 0;
};

/**
 * @brief Holt's linear (double exponential) smoothing fit.
 *
 * Started at l = y_1, b = y_2 - y_1; the first two residuals are zero by
 * construction.
 */
struct HdesFit {
    double alpha = 0.0;
    double beta = 0.0;
    double final_level = 0.0;
    double final_trend = 0.0;
    std::vector<double> fitted;
    std::vector<double> residuals;
    double sse = 0.0;
    int train_start_year = 0;
    int train_end_year = 0;
};

/// Deterministic leading residuals that diagnostics should skip.
inline constexpr std::size_t kSesLeadingZeros = 1;
inline constexpr std::size_t kHdesLeadingZeros = 2;

/// Runs the SES recursion at a fixed alpha (no search).
[[nodiscard]] SesFit ses_evaluate(const TimeSeries& train, double alpha);

/// Runs Holt's recursions at fixed (alpha, beta) (no search).
[[nodiscard]] HdesFit hdes_evaluate(const TimeSeries& train, double alpha, double beta);

/// Grid search over alpha in {0.001, ..., 0.999}, then golden-section refinement inside the
/// winning cell. Ties go to the smallest alpha. Needs at least 3 observations.
[[nodiscard]] SesFit ses_fit(const TimeSeries& train);

/// Grid search over {0.01, ..., 0.99}^2, then Nelder-Mead from the grid winner with
/// parameters clamped to [0.0001, 0.9999]. Ties go to the smallest alpha, then beta.
/// Needs at least 4 observations.
[[nodiscard]] HdesFit hdes_fit(const TimeSeries& train);

/// Flat forecast at the final level.
[[nodiscard]] Forecast ses_forecast(const SesFit& fit, int horizon);

/// final_level + h * final_trend for h = 1..horizon.
[[nodiscard]] Forecast hdes_forecast(const HdesFit& fit, int horizon);

}  // namespace tsf
