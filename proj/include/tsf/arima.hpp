#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsf/diagnostics.hpp"
#include "tsf/forecast.hpp"
#include "tsf/series.hpp"

namespace tsf {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    bool operator==(const ArimaOrder&) const = default;
    [[nodiscard]] std::string to_string() const;
};

/// AR parameters outside the stationarity region.
class ConstraintError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The filter produced a non-positive prediction variance.
class ConditioningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Likelihood maximization did not converge after the allowed restarts.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_loglik, std::vector<double> best_params)
        : std::runtime_error(what), best_loglik(best_loglik), best_params(std::move(best_params)) {}
    double best_loglik;
    std::vector<double> best_params;
};

/// Every candidate in an order search failed.
class SearchExhaustedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief Fitted ARIMA(p,d,q).
 *
 * On the d-times differenced series w_t the model is
 *   w_t - mean = sum phi_i (w_{t-i} - mean) + e_t + sum theta_j e_{t-j},
 * so constant = mean (1 - sum phi_i). The mean is estimated only when requested and d = 0.
 */
struct ArimaFit {
    ArimaOrder order;
    double constant = 0.0;
    double mean = 0.0;
    bool mean_estimated = false;
    std::vector<double> ar_coeffs;
    std::vector<double> ma_coeffs;
    double sigma2 = 0.0;
    double log_likelihood = 0.0;
    double aic = 0.0;
    /// Standardized one-step innovations on the differenced scale, n - d of them.
    std::vector<double> residuals;
    /// One-step predictions of the differenced series (same length as residuals).
    std::vector<double> fitted_diff;
    /// MA polynomial sits on (numerically at) the unit circle.
    bool ma_on_boundary = false;
    /// The differenced series was exactly constant; sigma2 = 0 and the likelihood is unbounded.
    bool degenerate = false;
    std::size_t iterations = 0;
    /// Predicted state for the first out-of-sample period, mean removed.
    std::vector<double> final_state;
    int train_start_year = 0;
    int train_end_year = 0;

    /// Estimated parameter count used in the AIC: p + q + mean + variance.
    [[nodiscard]] int parameter_count() const;
};

/// True when 1 - sum phi_i z^i has all roots outside the unit circle.
[[nodiscard]] bool ar_is_stationary(std::span<const double> phi);

/// True when 1 + sum theta_j z^j has all roots outside or on the unit circle.
[[nodiscard]] bool ma_is_invertible(std::span<const double> theta, double tol = 1e-10);

/// Maps unconstrained reals to AR coefficients of a stationary polynomial
/// (tanh to partial autocorrelations, then Durbin-Levinson).
[[nodiscard]] std::vector<double> partials_to_ar(std::span<const double> unconstrained);

/// Inverse of partials_to_ar for stationary coefficients.
[[nodiscard]] std::vector<double> ar_to_partials(std::span<const double> phi);

struct KalmanOutput {
    double log_likelihood = 0.0;
    /// Sum of v_t^2 / F_t, the scale-free sum of squares.
    double sum_sq = 0.0;
    double sum_log_f = 0.0;
    std::vector<double> innovations;
    std::vector<double> variances;
    std::vector<double> predictions;
    std::vector<double> final_state;
};

/// Innovations filter for a zero-mean ARMA(p,q) with unit innovation variance. The initial
/// state covariance is the exact stationary solution of P = T P T' + R R'.
[[nodiscard]] KalmanOutput arma_kalman_filter(std::span<const double> w,
                                              std::span<const double> phi,
                                              std::span<const double> theta);

/// Exact Gaussian log-likelihood of a zero-mean ARMA(p,q) with innovation variance sigma2.
[[nodiscard]] double arima_loglik(std::span<const double> w, std::span<const double> phi,
                                  std::span<const double> theta, double sigma2);

struct ArimaFitOptions {
    /// Estimate a mean for d = 0; ignored when d > 0.
    bool include_mean = false;
    std::size_t max_iter = 2000;
    double rel_tol = 1e-8;
    int restarts = 3;
};

/// Exact maximum likelihood. Needs length(train) > d + p + q + 2.
[[nodiscard]] ArimaFit arima_fit(const TimeSeries& train, ArimaOrder order,
                                 const ArimaFitOptions& opts = {});

struct RankedOrder {
    ArimaOrder order;
    double aic;
};

struct SkippedOrder {
    ArimaOrder order;
    std::string reason;
};

struct OrderSearchResult {
    /// Ascending AIC; ties keep candidate order (p outer, q inner).
    std::vector<RankedOrder> ranked;
    std::vector<SkippedOrder> skipped;
    /// Fit of ranked.front().
    ArimaFit best;
};

/// Fits every (p, d, q) with p <= p_max, q <= q_max concurrently.
[[nodiscard]] OrderSearchResult arima_order_search(const TimeSeries& train, int d, int p_max,
                                                   int q_max, const ArimaFitOptions& opts = {});

/// Serial reference for arima_order_search.
[[nodiscard]] OrderSearchResult arima_order_search_serial(const TimeSeries& train, int d,
                                                          int p_max, int q_max,
                                                          const ArimaFitOptions& opts = {});

struct DifferencingChoice {
    int d = 0;
    /// ADF result on the level (index 0) and on each difference tried.
    std::vector<TestResult> adf;
    bool stationary = false;
    /// A level had zero variance or an exact ADF fit; d was set one past it.
    bool degenerate = false;
};

/// Differences until the ADF test rejects a unit root at 0.05, up to d_max.
[[nodiscard]] DifferencingChoice select_differencing(const TimeSeries& train, int d_max,
                                                     const AdfOptions& adf = {});

/// h-step forecasts integrated back to the original scale using the training tail.
[[nodiscard]] Forecast arima_forecast(const ArimaFit& fit, const TimeSeries& train, int horizon);

}  // namespace tsf
