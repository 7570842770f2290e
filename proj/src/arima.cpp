#include "tsf/arima.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "tsf/optimize.hpp"

namespace tsf {

std::string ArimaOrder::to_string() const {
    return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

int ArimaFit::parameter_count() const {
    return order.p + order.q + (mean_estimated ? 1 : 0) + 1;
}

// ---- parameter constraints ----------------------------------------------

bool ar_is_stationary(std::span<const double> phi) {
    std::vector<double> a(phi.begin(), phi.end());
    for (std::size_t k = a.size(); k > 0; --k) {
        const double r = a[k - 1];
        if (!(std::abs(r) < 1.0)) {
            return false;
        }
        const double denom = 1.0 - r * r;
        std::vector<double> next(k - 1);
        for (std::size_t j = 1; j < k; ++j) {
            next[j - 1] = (a[j - 1] + r * a[k - j - 1]) / denom;
        }
        a = std::move(next);
    }
    return true;
}

namespace {

// Largest modulus among the inverse roots of 1 + c_1 z + ... + c_m z^m.
double max_inverse_root(std::span<const double> c) {
    std::size_t m = c.size();
    while (m > 0 && c[m - 1] == 0.0) {
        --m;
    }
    if (m == 0) {
        return 0.0;
    }
    // Companion matrix of z^m + c_1 z^{m-1} + ... + c_m.
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                 static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        comp(0, static_cast<Eigen::Index>(j)) = -c[j];
    }
    for (std::size_t i = 1; i < m; ++i) {
        comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

bool ma_is_invertible(std::span<const double> theta, double tol) {
    return max_inverse_root(theta) <= 1.0 + tol;
}

std::vector<double> partials_to_ar(std::span<const double> unconstrained) {
    const std::size_t p = unconstrained.size();
    std::vector<double> phi(p);
    std::vector<double> prev(p);
    for (std::size_t k = 0; k < p; ++k) {
        const double r = std::tanh(unconstrained[k]);
        phi[k] = r;
        for (std::size_t j = 0; j < k; ++j) {
            phi[j] = prev[j] - r * prev[k - j - 1];
        }
        std::copy(phi.begin(), phi.begin() + static_cast<long>(k) + 1, prev.begin());
    }
    return phi;
}

std::vector<double> ar_to_partials(std::span<const double> phi) {
    if (!ar_is_stationary(phi)) {
        throw ConstraintError("coefficients are outside the stationarity region");
    }
    std::vector<double> a(phi.begin(), phi.end());
    std::vector<double> out(a.size());
    for (std::size_t k = a.size(); k > 0; --k) {
        const double r = a[k - 1];
        out[k - 1] = std::atanh(r);
        const double denom = 1.0 - r * r;
        std::vector<double> next(k - 1);
        for (std::size_t j = 1; j < k; ++j) {
            next[j - 1] = (a[j - 1] + r * a[k - j - 1]) / denom;
        }
        a = std::move(next);
    }
    return out;
}

// ---- state-space likelihood ----------------------------------------------

KalmanOutput arma_kalman_filter(std::span<const double> w, std::span<const double> phi,
                                std::span<const double> theta) {
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    const std::size_t r = std::max(p, q + 1);
    const auto ri = static_cast<Eigen::Index>(r);

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(ri, ri);
    for (std::size_t i = 0; i < p; ++i) {
        T(static_cast<Eigen::Index>(i), 0) = phi[i];
    }
    for (Eigen::Index i = 0; i + 1 < ri; ++i) {
        T(i, i + 1) = 1.0;
    }
    Eigen::VectorXd R = Eigen::VectorXd::Zero(ri);
    R(0) = 1.0;
    for (std::size_t j = 0; j < q; ++j) {
        R(static_cast<Eigen::Index>(j + 1)) = theta[j];
    }
    const Eigen::MatrixXd RR = R * R.transpose();

    // vec(P) = (I - T kron T)^{-1} vec(RR').
    const Eigen::Index r2 = ri * ri;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(r2, r2);
    for (Eigen::Index i = 0; i < ri; ++i) {
        for (Eigen::Index j = 0; j < ri; ++j) {
            if (T(i, j) == 0.0) {
                continue;
            }
            A.block(i * ri, j * ri, ri, ri) -= T(i, j) * T;
        }
    }
    const Eigen::VectorXd vec_rr = Eigen::Map<const Eigen::VectorXd>(RR.data(), r2);
    const Eigen::VectorXd vec_p = A.partialPivLu().solve(vec_rr);
    Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(vec_p.data(), ri, ri);
    P = 0.5 * (P + P.transpose());

    KalmanOutput out;
    const std::size_t n = w.size();
    out.innovations.resize(n);
    out.variances.resize(n);
    out.predictions.resize(n);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(ri);
    for (std::size_t t = 0; t < n; ++t) {
        const double f = P(0, 0);
        if (!(f > 0.0) || !std::isfinite(f)) {
            throw ConditioningError("non-positive prediction variance at t = " +
                                    std::to_string(t));
        }
        const double v = w[t] - a(0);
        out.predictions[t] = a(0);
        out.innovations[t] = v;
        out.variances[t] = f;
        out.sum_sq += v * v / f;
        out.sum_log_f += std::log(f);

        const Eigen::VectorXd pc = P.col(0);
        a += pc * (v / f);
        P -= pc * pc.transpose() / f;
        a = T * a;
        P = T * P * T.transpose() + RR;
    }
    out.final_state.assign(a.data(), a.data() + ri);
    return out;
}

double arima_loglik(std::span<const double> w, std::span<const double> phi,
                    std::span<const double> theta, double sigma2) {
    if (!ar_is_stationary(phi)) {
        throw ConstraintError("AR coefficients are not stationary");
    }
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("innovation variance must be positive");
    }
    const auto k = arma_kalman_filter(w, phi, theta);
    const auto n = static_cast<double>(w.size());
    return -0.5 * (n * std::log(2.0 * std::numbers::pi * sigma2) + k.sum_log_f +
                   k.sum_sq / sigma2);
}

// ---- estimation -------------------------------------------------------------

namespace {

constexpr double kMaxUnconstrained = 12.0;

struct Decoded {
    std::vector<double> phi;
    std::vector<double> theta;
    double mu = 0.0;
};

Decoded decode(std::span<const double> u, int p, int q, bool with_mean, double fixed_mu) {
    Decoded d;
    auto clamp = [](std::span<const double> s) {
        std::vector<double> v(s.begin(), s.end());
        for (auto& x : v) {
            x = std::clamp(x, -kMaxUnconstrained, kMaxUnconstrained);
        }
        return v;
    };
    const auto pu = static_cast<std::size_t>(p);
    const auto qu = static_cast<std::size_t>(q);
    d.phi = partials_to_ar(clamp(u.subspan(0, pu)));
    d.theta = partials_to_ar(clamp(u.subspan(pu, qu)));
    for (auto& t : d.theta) {
        t = -t;
    }
    d.mu = with_mean ? u[pu + qu] : fixed_mu;
    return d;
}

double css_objective(std::span<const double> w, const Decoded& m) {
    const std::size_t p = m.phi.size();
    const std::size_t q = m.theta.size();
    std::vector<double> e(w.size(), 0.0);
    double ss = 0.0;
    for (std::size_t t = p; t < w.size(); ++t) {
        double v = w[t] - m.mu;
        for (std::size_t i = 0; i < p; ++i) {
            v -= m.phi[i] * (w[t - i - 1] - m.mu);
        }
        for (std::size_t j = 0; j < q && j < t; ++j) {
            v -= m.theta[j] * e[t - j - 1];
        }
        e[t] = v;
        ss += v * v;
    }
    return std::isfinite(ss) ? ss : std::numeric_limits<double>::max();
}

// Negative exact log-likelihood with sigma^2 profiled out.
double neg_profile_loglik(std::span<const double> w, const Decoded& m) {
    std::vector<double> centered(w.begin(), w.end());
    for (auto& x : centered) {
        x -= m.mu;
    }
    try {
        const auto k = arma_kalman_filter(centered, m.phi, m.theta);
        const auto n = static_cast<double>(w.size());
        const double s2 = k.sum_sq / n;
        if (!(s2 > 0.0)) {
            return -std::numeric_limits<double>::max();
        }
        const double v = 0.5 * (n * (std::log(2.0 * std::numbers::pi * s2) + 1.0) + k.sum_log_f);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    } catch (const ConditioningError&) {
        return std::numeric_limits<double>::max();
    }
}

void fill_from_filter(ArimaFit& fit, std::span<const double> w, const Decoded& m) {
    std::vector<double> centered(w.begin(), w.end());
    for (auto& x : centered) {
        x -= m.mu;
    }
    const auto k = arma_kalman_filter(centered, m.phi, m.theta);
    const auto n = static_cast<double>(w.size());
    fit.ar_coeffs = m.phi;
    fit.ma_coeffs = m.theta;
    fit.mean = m.mu;
    const double phi_sum = std::accumulate(m.phi.begin(), m.phi.end(), 0.0);
    fit.constant = m.mu * (1.0 - phi_sum);
    fit.sigma2 = k.sum_sq / n;
    fit.log_likelihood =
        -0.5 * (n * (std::log(2.0 * std::numbers::pi * fit.sigma2) + 1.0) + k.sum_log_f);
    fit.residuals.resize(w.size());
    fit.fitted_diff.resize(w.size());
    for (std::size_t t = 0; t < w.size(); ++t) {
        fit.residuals[t] = k.innovations[t] / std::sqrt(k.variances[t]);
        fit.fitted_diff[t] = k.predictions[t] + m.mu;
    }
    fit.final_state = k.final_state;
    fit.ma_on_boundary = max_inverse_root(m.theta) > 1.0 - 1e-3;
}

}  // namespace

ArimaFit arima_fit(const TimeSeries& train, ArimaOrder order, const ArimaFitOptions& opts) {
    if (order.p < 0 || order.d < 0 || order.q < 0) {
        throw std::invalid_argument("ARIMA orders must be non-negative: " + order.to_string());
    }
    const std::size_t need =
        static_cast<std::size_t>(order.d + order.p + order.q + 2);
    if (train.size() <= need) {
        throw LengthError("ARIMA" + order.to_string() + " needs more than " +
                          std::to_string(need) + " observations, got " +
                          std::to_string(train.size()));
    }
    const auto w = difference_values(train.values(), order.d);
    const bool with_mean = opts.include_mean && order.d == 0;
    const double sample_mean =
        std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());

    ArimaFit fit;
    fit.order = order;
    fit.mean_estimated = with_mean;
    fit.train_start_year = train.start_year();
    fit.train_end_year = train.end_year();

    const std::size_t dim = static_cast<std::size_t>(order.p + order.q) + (with_mean ? 1 : 0);
    const double fixed_mu = 0.0;
    std::vector<double> start(dim, 0.0);
    if (with_mean) {
        start.back() = sample_mean;
    }

    // An exactly constant differenced series has zero innovation variance for
    // every parameter value: the likelihood is unbounded.
    const double centre = with_mean ? sample_mean : 0.0;
    const bool degenerate =
        std::all_of(w.begin(), w.end(), [&](double x) { return x == centre; });
    if (degenerate) {
        fit.ar_coeffs.assign(static_cast<std::size_t>(order.p), 0.0);
        fit.ma_coeffs.assign(static_cast<std::size_t>(order.q), 0.0);
        fit.mean = centre;
        fit.constant = centre;
        fit.sigma2 = 0.0;
        fit.degenerate = true;
        fit.log_likelihood = std::numeric_limits<double>::infinity();
        fit.aic = -std::numeric_limits<double>::infinity();
        fit.residuals.assign(w.size(), 0.0);
        fit.fitted_diff.assign(w.begin(), w.end());
        fit.final_state.assign(
            static_cast<std::size_t>(std::max(order.p, order.q + 1)), 0.0);
        return fit;
    }

    auto decode_u = [&](std::span<const double> u) {
        return decode(u, order.p, order.q, with_mean, fixed_mu);
    };

    if (dim > 0) {
        opt::NelderMeadOptions css_opts;
        css_opts.step = 0.2;
        css_opts.rel_tol = 1e-10;
        css_opts.max_iter = opts.max_iter;
        const auto css = opt::nelder_mead(
            [&](std::span<const double> u) { return css_objective(w, decode_u(u)); }, start,
            css_opts);
        if (std::isfinite(css.value)) {
            start = css.x;
        }

        auto objective = [&](std::span<const double> u) {
            return neg_profile_loglik(w, decode_u(u));
        };
        opt::NelderMeadOptions ml_opts;
        ml_opts.step = 0.1;
        ml_opts.rel_tol = opts.rel_tol;
        ml_opts.abs_tol = 1e-8;
        ml_opts.max_iter = opts.max_iter;

        auto best = opt::nelder_mead(objective, start, ml_opts);
        std::size_t iterations = best.iterations;
        std::mt19937_64 jitter_rng(0x5eedULL);
        std::normal_distribution<double> jitter(0.0, 0.1);
        bool converged = false;
        for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
            auto from = best.x;
            if (!best.converged) {
                for (auto& x : from) {
                    x += jitter(jitter_rng);
                }
            }
            auto again = opt::nelder_mead(objective, from, ml_opts);
            iterations += again.iterations;
            const double change = std::abs(again.value - best.value);
            const bool settled =
                again.converged && change <= opts.rel_tol * (std::abs(best.value) + 1e-8);
            if (again.value < best.value) {
                best = std::move(again);
            }
            if (settled) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw ConvergenceError("ARIMA" + order.to_string() +
                                       " likelihood did not converge after " +
                                       std::to_string(opts.restarts) + " restarts",
                                   -best.value, best.x);
        }
        fit.iterations = iterations;
        start = best.x;
    }

    fill_from_filter(fit, w, decode_u(start));
    fit.aic = -2.0 * fit.log_likelihood + 2.0 * fit.parameter_count();
    return fit;
}

// ---- order search -----------------------------------------------------------

namespace {

struct Candidate {
    ArimaOrder order;
    std::optional<ArimaFit> fit;
    std::string error;
};

std::vector<Candidate> candidates(int d, int p_max, int q_max) {
    if (p_max < 0 || q_max < 0 || p_max > 5 || q_max > 5) {
        throw std::invalid_argument("order search bounds must lie in [0, 5]");
    }
    if (d < 0) {
        throw std::invalid_argument("differencing order must be non-negative");
    }
    std::vector<Candidate> out;
    for (int p = 0; p <= p_max; ++p) {
        for (int q = 0; q <= q_max; ++q) {
            out.push_back({{p, d, q}, std::nullopt, {}});
        }
    }
    return out;
}

void fit_candidate(Candidate& c, const TimeSeries& train, const ArimaFitOptions& opts) {
    try {
        c.fit = arima_fit(train, c.order, opts);
    } catch (const std::exception& e) {
        c.error = e.what();
    }
}

OrderSearchResult rank(std::vector<Candidate>& all) {
    OrderSearchResult res;
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i].fit) {
            ok.push_back(i);
        } else {
            res.skipped.push_back({all[i].order, all[i].error});
        }
    }
    if (ok.empty()) {
        std::string why = "all ARIMA candidates failed";
        if (!res.skipped.empty()) {
            why += "; first: " + res.skipped.front().order.to_string() + " " +
                   res.skipped.front().reason;
        }
        throw SearchExhaustedError(why);
    }
    std::stable_sort(ok.begin(), ok.end(), [&](std::size_t a, std::size_t b) {
        return all[a].fit->aic < all[b].fit->aic;
    });
    for (auto i : ok) {
        res.ranked.push_back({all[i].order, all[i].fit->aic});
    }
    res.best = std::move(*all[ok.front()].fit);
    return res;
}

}  // namespace

OrderSearchResult arima_order_search_serial(const TimeSeries& train, int d, int p_max, int q_max,
                                            const ArimaFitOptions& opts) {
    auto all = candidates(d, p_max, q_max);
    for (auto& c : all) {
        fit_candidate(c, train, opts);
    }
    return rank(all);
}

OrderSearchResult arima_order_search(const TimeSeries& train, int d, int p_max, int q_max,
                                     const ArimaFitOptions& opts) {
    auto all = candidates(d, p_max, q_max);
    const auto count = static_cast<long>(all.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
        fit_candidate(all[static_cast<std::size_t>(i)], train, opts);
    }
    return rank(all);
}

// ---- differencing choice ----------------------------------------------------

DifferencingChoice select_differencing(const TimeSeries& train, int d_max,
                                       const AdfOptions& adf) {
    if (d_max < 0) {
        throw std::invalid_argument("d_max must be non-negative");
    }
    DifferencingChoice choice;
    choice.d = d_max;
    for (int k = 0; k <= d_max; ++k) {
        const auto w = difference_values(train.values(), k);
        try {
            const auto r = adf_test(w, adf);
            choice.adf.push_back(r);
            if (r.reject_at_005) {
                choice.d = k;
                choice.stationary = true;
                return choice;
            }
        } catch (const DegenerateError&) {
            // Zero variance (or an exact fit) at this level: one more difference
            // turns it into a constant, which every ARMA order reproduces.
            choice.d = std::min(k + 1, d_max);
            choice.degenerate = true;
            return choice;
        }
    }
    return choice;
}

// ---- forecasting ------------------------------------------------------------

Forecast arima_forecast(const ArimaFit& fit, const TimeSeries& train, int horizon) {
    if (horizon < 1) {
        throw std::invalid_argument("forecast horizon must be at least 1, got " +
                                    std::to_string(horizon));
    }
    const int d = fit.order.d;
    const std::size_t p = fit.ar_coeffs.size();
    const std::size_t r = fit.final_state.size();

    // Last value of each of the 0..d-1 fold differences of the training data.
    std::vector<double> lasts(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        lasts[static_cast<std::size_t>(k)] = difference_values(train.values(), k).back();
    }

    Forecast f{train.end_year() + 1, {}, "ARIMA" + fit.order.to_string()};
    f.values.reserve(static_cast<std::size_t>(horizon));
    std::vector<double> state = fit.final_state;
    for (int h = 0; h < horizon; ++h) {
        const double w = fit.mean + (state.empty() ? 0.0 : state[0]);
        // Advance a <- T a for the companion-form transition.
        std::vector<double> next(r, 0.0);
        for (std::size_t i = 0; i < r; ++i) {
            double v = i < p ? fit.ar_coeffs[i] * state[0] : 0.0;
            if (i + 1 < r) {
                v += state[i + 1];
            }
            next[i] = v;
        }
        state = std::move(next);

        double level = w;
        for (int k = d - 1; k >= 0; --k) {
            auto& last = lasts[static_cast<std::size_t>(k)];
            last += level;
            level = last;
        }
        f.values.push_back(level);
    }
    return f;
}

}  // namespace tsf
