#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsf/series.hpp"

namespace tsf {

/// Raised when a sample has zero variance (or is otherwise degenerate) for a statistic.
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class TestName { ADF, KPSS, LjungBox, ShapiroWilk };

[[nodiscard]] const char* to_string(TestName name) noexcept;

/// Whether a p-value is an interior estimate or a clamp at the edge of a lookup table.
enum class PValueBound { Exact, AtLeast, AtMost };

struct TestResult {
    TestName test_name;
    double statistic = 0.0;
    double p_value = 1.0;
    PValueBound bound = PValueBound::Exact;
    std::size_t lags_used = 0;
    std::size_t df = 0;
    bool reject_at_005 = false;

    /// Renders the p-value the way reports print it, e.g. ">= 0.10".
    [[nodiscard]] std::string p_value_text() const;
};

struct CorrelogramPoint {
    std::size_t lag;
    double value;
    double conf_bound;
};

/// Sample autocorrelation at a single lag; lag 0 is 1 by definition.
[[nodiscard]] double autocorrelation(std::span<const double> series, std::size_t lag);

/// r_1..r_max_lag with the +-1.96/sqrt(n) band.
[[nodiscard]] std::vector<CorrelogramPoint> acf(std::span<const double> series,
                                                std::size_t max_lag);

/// Partial autocorrelations by Durbin-Levinson on the sample ACF.
[[nodiscard]] std::vector<CorrelogramPoint> pacf(std::span<const double> series,
                                                 std::size_t max_lag);

enum class AdfRegression { Constant, ConstantTrend };

struct AdfOptions {
    AdfRegression regression = AdfRegression::Constant;
    /// Upper bound of the AIC lag search; default floor(12 (n/100)^(1/4)).
    std::optional<std::size_t> max_lag;
    /// Skip the AIC search and use exactly this many lagged differences.
    std::optional<std::size_t> fixed_lag;
};

/**
 * Augmented Dickey-Fuller unit-root test.
 *
 * Regresses dy_t on a constant (and optionally a trend), y_{t-1} and k lagged
 * differences; the statistic is the t-ratio on y_{t-1}. k minimizes AIC over
 * 0..max_lag on a common sample, then the chosen regression is re-estimated on
 * every usable row. The p-value comes from MacKinnon's (1994) response surface;
 * H0 is a unit root, so reject_at_005 means the series looks stationary.
 */
[[nodiscard]] TestResult adf_test(std::span<const double> series, const AdfOptions& opts = {});

/**
 * KPSS level-stationarity test with a Bartlett-kernel Newey-West long-run
 * variance, bandwidth floor(4 (n/100)^(1/4)). The p-value is interpolated in
 * the Kwiatkowski et al. table and clamped to [0.01, 0.10].
 */
[[nodiscard]] TestResult kpss_test(std::span<const double> series);

/// min(10, floor(n/5)), the conventional Ljung-Box lag count.
[[nodiscard]] std::size_t default_ljung_box_lags(std::size_t n);

/// Q = n(n+2) sum r_k^2/(n-k), chi-squared with lags - fitted_params df.
[[nodiscard]] TestResult ljung_box(std::span<const double> residuals, std::size_t lags,
                                   std::size_t fitted_params);

/// Shapiro-Wilk W with Royston's AS R94 coefficients and p-value; 3 <= n <= 5000.
[[nodiscard]] TestResult shapiro_wilk(std::span<const double> residuals);

// ---- Monte-Carlo size/power harness ---------------------------------------

/// Draws one sample of the null (or alternative) distribution from a seeded engine.
using SampleGenerator = std::function<std::vector<double>(std::mt19937_64&)>;
/// Returns true when the test rejects on the sample.
using RejectionRule = std::function<bool(std::span<const double>)>;

/// Fraction of `replications` samples rejected. Replication i uses seed base_seed + i.
/// Serial reference implementation.
[[nodiscard]] double rejection_rate_serial(const SampleGenerator& gen, const RejectionRule& rule,
                                           std::size_t replications, std::uint64_t base_seed);

/// OpenMP version of rejection_rate_serial; identical result for any thread count.
[[nodiscard]] double rejection_rate(const SampleGenerator& gen, const RejectionRule& rule,
                                    std::size_t replications, std::uint64_t base_seed);

}  // namespace tsf
