#include "tsf/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "tsf/distributions.hpp"
#include "tsf/series.hpp"

namespace tsf {

const char* to_string(TestName name) noexcept {
    switch (name) {
        case TestName::ADF: return "ADF";
        case TestName::KPSS: return "KPSS";
        case TestName::LjungBox: return "LjungBox";
        case TestName::ShapiroWilk: return "ShapiroWilk";
    }
    return "?";
}

std::string TestResult::p_value_text() const {
    char buf[64];
    switch (bound) {
        case PValueBound::AtLeast: std::snprintf(buf, sizeof buf, ">= %.2f", p_value); break;
        case PValueBound::AtMost: std::snprintf(buf, sizeof buf, "<= %.2f", p_value); break;
        case PValueBound::Exact:
            if (p_value < 0.001) {
                std::snprintf(buf, sizeof buf, "< 0.001");
            } else {
                std::snprintf(buf, sizeof buf, "%.4f", p_value);
            }
            break;
    }
    return buf;
}

namespace {

TestResult make_result(TestName name, double stat, double p, PValueBound bound,
                       std::size_t lags, std::size_t df) {
    TestResult r;
    r.test_name = name;
    r.statistic = stat;
    r.p_value = std::clamp(p, 0.0, 1.0);
    r.bound = bound;
    r.lags_used = lags;
    r.df = df;
    r.reject_at_005 = r.p_value < 0.05;
    return r;
}

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Centered autocovariance sums c_0..c_max_lag (not divided by n).
std::vector<double> autocov_sums(std::span<const double> x, std::size_t max_lag) {
    const double m = mean_of(x);
    const std::size_t n = x.size();
    std::vector<double> c(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) {
            s += (x[t] - m) * (x[t + k] - m);
        }
        c[k] = s;
    }
    return c;
}

std::vector<double> acf_values(std::span<const double> x, std::size_t max_lag) {
    if (max_lag >= x.size()) {
        throw LengthError("max_lag " + std::to_string(max_lag) + " must be below series length " +
                          std::to_string(x.size()));
    }
    auto c = autocov_sums(x, max_lag);
    const double scale = std::abs(c[0]);
    const double m = std::abs(mean_of(x));
    if (!(c[0] > 1e-24 * std::max(1.0, m * m) * static_cast<double>(x.size()))) {
        throw DegenerateError("autocorrelation undefined: series has zero variance");
    }
    for (auto& v : c) {
        v /= scale;
    }
    return c;
}

}  // namespace

double autocorrelation(std::span<const double> series, std::size_t lag) {
    return acf_values(series, lag)[lag];
}

std::vector<CorrelogramPoint> acf(std::span<const double> series, std::size_t max_lag) {
    if (max_lag == 0) {
        throw std::invalid_argument("max_lag must be positive");
    }
    const auto r = acf_values(series, max_lag);
    const double band = 1.96 / std::sqrt(static_cast<double>(series.size()));
    std::vector<CorrelogramPoint> out;
    out.reserve(max_lag);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        out.push_back({k, r[k], band});
    }
    return out;
}

std::vector<CorrelogramPoint> pacf(std::span<const double> series, std::size_t max_lag) {
    if (max_lag == 0) {
        throw std::invalid_argument("max_lag must be positive");
    }
    const auto r = acf_values(series, max_lag);
    const double band = 1.96 / std::sqrt(static_cast<double>(series.size()));
    std::vector<CorrelogramPoint> out;
    out.reserve(max_lag);

    // Durbin-Levinson: phi[k][k] is the lag-k partial autocorrelation.
    std::vector<double> phi(max_lag + 1, 0.0);
    std::vector<double> prev(max_lag + 1, 0.0);
    double v = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = r[k];
        for (std::size_t j = 1; j < k; ++j) {
            num -= prev[j] * r[k - j];
        }
        const double kk = v > 0.0 ? num / v : 0.0;
        phi[k] = kk;
        for (std::size_t j = 1; j < k; ++j) {
            phi[j] = prev[j] - kk * prev[k - j];
        }
        v *= (1.0 - kk * kk);
        prev = phi;
        out.push_back({k, std::clamp(kk, -1.0, 1.0), band});
    }
    return out;
}

// ---- ADF -------------------------------------------------------------------

namespace {

struct OlsFit {
    double ssr;
    double t_stat;  // of the designated coefficient
    std::size_t nobs;
    std::size_t ncols;
};

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Eigen::Index coef) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) {
        throw DegenerateError("ADF regression is rank deficient (degenerate series)");
    }
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const double ssr = resid.squaredNorm();
    const auto nobs = static_cast<double>(X.rows());
    const auto k = static_cast<double>(X.cols());
    const double s2 = ssr / (nobs - k);
    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    const double se = std::sqrt(s2 * xtx_inv(coef, coef));
    if (!(se > 0.0) || !std::isfinite(se)) {
        throw DegenerateError("ADF regression has zero residual variance (degenerate series)");
    }
    return {ssr, beta(coef) / se, static_cast<std::size_t>(X.rows()),
            static_cast<std::size_t>(X.cols())};
}

// Builds the ADF design on rows whose dy index runs from first_row to n-2.
OlsFit adf_regression(std::span<const double> y, std::size_t lags, std::size_t first_row,
                      AdfRegression reg) {
    const std::size_t n = y.size();
    const std::size_t rows = n - 1 - first_row;
    const std::size_t det = reg == AdfRegression::Constant ? 1 : 2;
    const std::size_t cols = det + 1 + lags;
    if (rows <= cols) {
        throw LengthError("ADF regression with " + std::to_string(lags) +
                          " lags needs more than " + std::to_string(cols + first_row + 1) +
                          " observations");
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t j = first_row + r;  // dy_j = y_{j+1} - y_j
        const auto ri = static_cast<Eigen::Index>(r);
        target(ri) = y[j + 1] - y[j];
        Eigen::Index c = 0;
        X(ri, c++) = 1.0;
        if (reg == AdfRegression::ConstantTrend) {
            X(ri, c++) = static_cast<double>(r + 1);
        }
        X(ri, c++) = y[j];
        for (std::size_t i = 1; i <= lags; ++i) {
            X(ri, c++) = y[j - i + 1] - y[j - i];
        }
    }
    return ols(X, target, static_cast<Eigen::Index>(det));
}

double ols_aic(const OlsFit& f) {
    const auto n = static_cast<double>(f.nobs);
    const double llf =
        -n / 2.0 * (std::log(2.0 * std::numbers::pi) + std::log(f.ssr / n) + 1.0);
    return -2.0 * llf + 2.0 * static_cast<double>(f.ncols);
}

// MacKinnon (1994) response-surface p-value for a single series (N = 1).
std::pair<double, PValueBound> mackinnon_p(double tau, AdfRegression reg) {
    struct Surface {
        double tau_max, tau_min, tau_star;
        std::array<double, 3> small;
        std::array<double, 4> large;
    };
    static constexpr Surface kConst{2.74, -18.83, -1.61,
                                    {2.1659, 1.4412, 3.8269e-2},
                                    {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2}};
    static constexpr Surface kTrend{0.7, -16.18, -2.89,
                                    {3.2512, 1.6047, 4.9588e-2},
                                    {2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2}};
    const Surface& s = reg == AdfRegression::Constant ? kConst : kTrend;
    if (tau > s.tau_max) {
        return {1.0, PValueBound::AtLeast};
    }
    if (tau < s.tau_min) {
        return {0.0, PValueBound::AtMost};
    }
    double z = 0.0;
    if (tau <= s.tau_star) {
        z = s.small[0] + tau * (s.small[1] + tau * s.small[2]);
    } else {
        z = s.large[0] + tau * (s.large[1] + tau * (s.large[2] + tau * s.large[3]));
    }
    return {dist::normal_cdf(z), PValueBound::Exact};
}

}  // namespace

TestResult adf_test(std::span<const double> series, const AdfOptions& opts) {
    const std::size_t n = series.size();
    if (n < 10) {
        throw LengthError("ADF test needs at least 10 observations, got " + std::to_string(n));
    }
    const std::size_t det = opts.regression == AdfRegression::Constant ? 1 : 2;

    std::size_t lag = 0;
    if (opts.fixed_lag) {
        lag = *opts.fixed_lag;
    } else {
        std::size_t max_lag = 0;
        if (opts.max_lag) {
            max_lag = *opts.max_lag;
        } else {
            max_lag = static_cast<std::size_t>(
                std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
            const long cap = static_cast<long>(n / 2) - static_cast<long>(det) - 1;
            max_lag = static_cast<std::size_t>(
                std::max(0L, std::min(static_cast<long>(max_lag), cap)));
        }
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k <= max_lag; ++k) {
            const double aic = ols_aic(adf_regression(series, k, max_lag, opts.regression));
            if (aic < best) {
                best = aic;
                lag = k;
            }
        }
    }
    const OlsFit fit = adf_regression(series, lag, lag, opts.regression);
    const auto [p, bound] = mackinnon_p(fit.t_stat, opts.regression);
    return make_result(TestName::ADF, fit.t_stat, p, bound, lag, 0);
}

// ---- KPSS ------------------------------------------------------------------

TestResult kpss_test(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 10) {
        throw LengthError("KPSS test needs at least 10 observations, got " + std::to_string(n));
    }
    const double m = mean_of(series);
    std::vector<double> e(n);
    for (std::size_t t = 0; t < n; ++t) {
        e[t] = series[t] - m;
    }
    const auto bandwidth = static_cast<std::size_t>(
        std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));

    double lrv = 0.0;
    for (double v : e) {
        lrv += v * v;
    }
    for (std::size_t s = 1; s <= bandwidth && s < n; ++s) {
        double g = 0.0;
        for (std::size_t t = s; t < n; ++t) {
            g += e[t] * e[t - s];
        }
        lrv += 2.0 * (1.0 - static_cast<double>(s) / static_cast<double>(bandwidth + 1)) * g;
    }
    lrv /= static_cast<double>(n);
    if (!(lrv > 1e-24 * std::max(1.0, m * m))) {
        throw DegenerateError("KPSS long-run variance is zero (degenerate series)");
    }
    double partial = 0.0;
    double eta = 0.0;
    for (double v : e) {
        partial += v;
        eta += partial * partial;
    }
    const double stat = eta / (static_cast<double>(n) * static_cast<double>(n) * lrv);

    static constexpr std::array<double, 4> kCrit{0.347, 0.463, 0.574, 0.739};
    static constexpr std::array<double, 4> kProb{0.10, 0.05, 0.025, 0.01};
    double p = 0.0;
    PValueBound bound = PValueBound::Exact;
    if (stat < kCrit.front()) {
        p = kProb.front();
        bound = PValueBound::AtLeast;
    } else if (stat > kCrit.back()) {
        p = kProb.back();
        bound = PValueBound::AtMost;
    } else {
        std::size_t i = 0;
        while (i + 2 < kCrit.size() && stat > kCrit[i + 1]) {
            ++i;
        }
        const double w = (stat - kCrit[i]) / (kCrit[i + 1] - kCrit[i]);
        p = kProb[i] + w * (kProb[i + 1] - kProb[i]);
    }
    return make_result(TestName::KPSS, stat, p, bound, bandwidth, 0);
}

// ---- Ljung-Box -------------------------------------------------------------

std::size_t default_ljung_box_lags(std::size_t n) { return std::min<std::size_t>(10, n / 5); }

TestResult ljung_box(std::span<const double> residuals, std::size_t lags,
                     std::size_t fitted_params) {
    if (lags <= fitted_params) {
        throw std::invalid_argument("Ljung-Box degrees of freedom must be positive (lags " +
                                    std::to_string(lags) + ", fitted parameters " +
                                    std::to_string(fitted_params) + ")");
    }
    const std::size_t n = residuals.size();
    if (lags >= n) {
        throw LengthError("Ljung-Box lags " + std::to_string(lags) +
                          " must be below the residual count " + std::to_string(n));
    }
    const auto r = acf_values(residuals, lags);
    const auto nd = static_cast<double>(n);
    double q = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        q += r[k] * r[k] / (nd - static_cast<double>(k));
    }
    q *= nd * (nd + 2.0);
    const std::size_t df = lags - fitted_params;
    return make_result(TestName::LjungBox, q, dist::chi2_sf(q, static_cast<double>(df)),
                       PValueBound::Exact, lags, df);
}

// ---- Shapiro-Wilk (Royston 1995, AS R94) ----------------------------------

namespace {

template <std::size_t N>
double poly(const std::array<double, N>& c, double x) {
    double r = 0.0;
    for (std::size_t i = N; i-- > 0;) {
        r = r * x + c[i];
    }
    return r;
}

}  // namespace

TestResult shapiro_wilk(std::span<const double> residuals) {
    const std::size_t n = residuals.size();
    if (n < 3 || n > 5000) {
        throw LengthError("Shapiro-Wilk needs 3 <= n <= 5000, got " + std::to_string(n));
    }
    std::vector<double> x(residuals.begin(), residuals.end());
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range > 1e-19 * std::max(1.0, std::abs(x.front())))) {
        throw DegenerateError("Shapiro-Wilk undefined: all values are identical");
    }

    static constexpr std::array<double, 6> c1{0.0, 0.221157, -0.147981,
                                              -2.07119, 4.434685, -2.706056};
    static constexpr std::array<double, 6> c2{0.0, 0.042981, -0.293762,
                                              -1.752461, 5.682633, -3.582633};
    static constexpr std::array<double, 4> c3{0.544, -0.39978, 0.025054, -6.714e-4};
    static constexpr std::array<double, 4> c4{1.3822, -0.77857, 0.062767, -0.0020322};
    static constexpr std::array<double, 4> c5{-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr std::array<double, 3> c6{-0.4803, -0.082676, 0.0030302};
    static constexpr std::array<double, 2> g{-2.273, 0.459};

    const std::size_t half = n / 2;
    const auto an = static_cast<double>(n);
    // a[i] pairs with x[n-1-i] - x[i]; positive weights.
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::numbers::sqrt2 / 2.0;
    } else {
        std::vector<double> m(half);
        double summ2 = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            m[i] = dist::normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = poly(c1, rsn) - m[0] / ssumm2;
        std::size_t first = 1;
        double fac = 0.0;
        if (n > 5) {
            first = 2;
            const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[1] = a2;
        } else {
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
        }
        a[0] = a1;
        for (std::size_t i = first; i < half; ++i) {
            a[i] = -m[i] / fac;
        }
    }

    const double mean = mean_of(x);
    double ssq = 0.0;
    for (double v : x) {
        ssq += (v - mean) * (v - mean);
    }
    double num = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        num += a[i] * (x[n - 1 - i] - x[i]);
    }
    const double w = std::min(1.0, num * num / ssq);

    double p = 0.0;
    if (n == 3) {
        constexpr double pi6 = 6.0 / std::numbers::pi;
        constexpr double stqr = std::numbers::pi / 3.0;
        p = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    } else {
        const double w1 = 1.0 - w;
        if (w1 <= 0.0) {
            p = 1.0;
        } else {
            double y = std::log(w1);
            const double xx = std::log(an);
            double mu = 0.0;
            double sigma = 0.0;
            bool tiny = false;
            if (n <= 11) {
                const double gamma = poly(g, an);
                if (y >= gamma) {
                    tiny = true;
                } else {
                    y = -std::log(gamma - y);
                    mu = poly(c3, an);
                    sigma = std::exp(poly(c4, an));
                }
            } else {
                mu = poly(c5, xx);
                sigma = std::exp(poly(c6, xx));
            }
            p = tiny ? 1e-99 : dist::normal_sf((y - mu) / sigma);
        }
    }
    return make_result(TestName::ShapiroWilk, w, p, PValueBound::Exact, 0, 0);
}

// ---- Monte-Carlo harness ---------------------------------------------------

double rejection_rate_serial(const SampleGenerator& gen, const RejectionRule& rule,
                             std::size_t replications, std::uint64_t base_seed) {
    if (replications == 0) {
        throw std::invalid_argument("replications must be positive");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < replications; ++i) {
        std::mt19937_64 rng(base_seed + i);
        const auto sample = gen(rng);
        hits += rule(sample) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(replications);
}

double rejection_rate(const SampleGenerator& gen, const RejectionRule& rule,
                      std::size_t replications, std::uint64_t base_seed) {
    if (replications == 0) {
        throw std::invalid_argument("replications must be positive");
    }
    std::vector<unsigned char> rejected(replications, 0);
    std::exception_ptr failure;
    const auto count = static_cast<long>(replications);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) {
        try {
            std::mt19937_64 rng(base_seed + static_cast<std::uint64_t>(i));
            const auto sample = gen(rng);
            rejected[static_cast<std::size_t>(i)] = rule(sample) ? 1 : 0;
        } catch (...) {
#pragma omp critical(tsf_rejection_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    const auto hits = std::accumulate(rejected.begin(), rejected.end(), std::size_t{0});
    return static_cast<double>(hits) / static_cast<double>(replications);
}

}  // namespace tsf
