#pragma once

// Reference computations used by the unit and acceptance tests. Nothing here
// calls into the library's numerical code.

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace tsf::oracle {

/// Autocovariances gamma(0..max_lag) of a causal ARMA(p, q) with unit-led MA
/// polynomial 1 + theta_1 B + ... and innovation variance sigma2.
/// Solves the first p + 1 Yule-Walker-type equations exactly, then recurses.
inline std::vector<double> arma_autocovariance(const std::vector<double>& phi,
                                               const std::vector<double>& theta, double sigma2,
                                               std::size_t max_lag) {
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    std::vector<double> th(q + 1, 1.0);
    for (std::size_t j = 0; j < q; ++j) {
        th[j + 1] = theta[j];
    }
    // psi weights up to q.
    std::vector<double> psi(q + 1, 0.0);
    psi[0] = 1.0;
    for (std::size_t j = 1; j <= q; ++j) {
        psi[j] = th[j];
        for (std::size_t i = 1; i <= std::min(j, p); ++i) {
            psi[j] += phi[i - 1] * psi[j - i];
        }
    }
    auto rhs = [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t j = k; j <= q; ++j) {
            s += th[j] * psi[j - k];
        }
        return sigma2 * s;
    };
    std::vector<double> gamma(std::max(max_lag, p) + 1, 0.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p + 1),
                                              static_cast<Eigen::Index>(p + 1));
    Eigen::VectorXd b(static_cast<Eigen::Index>(p + 1));
    for (std::size_t k = 0; k <= p; ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        a(r, r) += 1.0;
        for (std::size_t i = 1; i <= p; ++i) {
            const auto lag = static_cast<Eigen::Index>(k >= i ? k - i : i - k);
            a(r, lag) -= phi[i - 1];
        }
        b(r) = rhs(k);
    }
    const Eigen::VectorXd g = a.fullPivLu().solve(b);
    for (std::size_t k = 0; k <= p; ++k) {
        gamma[k] = g(static_cast<Eigen::Index>(k));
    }
    for (std::size_t k = p + 1; k < gamma.size(); ++k) {
        double s = rhs(k);
        for (std::size_t i = 1; i <= p; ++i) {
            s += phi[i - 1] * gamma[k - i];
        }
        gamma[k] = s;
    }
    gamma.resize(max_lag + 1);
    return gamma;
}

/// Gaussian log-density of w under the ARMA covariance matrix, via Cholesky.
inline double dense_arma_loglik(const std::vector<double>& w, const std::vector<double>& phi,
                                const std::vector<double>& theta, double sigma2) {
    const std::size_t n = w.size();
    const auto gamma = arma_autocovariance(phi, theta, sigma2, n - 1);
    Eigen::MatrixXd cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                gamma[i > j ? i - j : j - i];
        }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    const Eigen::Map<const Eigen::VectorXd> x(w.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd z = llt.matrixL().solve(x);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
    }
    return -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + logdet +
                   z.squaredNorm());
}

/// Draws a stationary AR(p) coefficient vector, p <= 2, by rejection on the
/// stationarity triangle with a small margin.
inline std::vector<double> draw_stationary_ar(std::size_t p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u1(-0.9, 0.9);
    std::uniform_real_distribution<double> u2(-1.9, 1.9);
    if (p == 0) {
        return {};
    }
    if (p == 1) {
        return {u1(rng)};
    }
    for (;;) {
        const double a = u2(rng);
        const double b = u1(rng);
        if (a + b < 0.95 && b - a < 0.95 && std::abs(b) < 0.95) {
            return {a, b};
        }
    }
}

/// ARMA(p, q) sample with burn-in; theta uses the 1 + theta B convention.
inline std::vector<double> simulate_arma(const std::vector<double>& phi,
                                         const std::vector<double>& theta, std::size_t n,
                                         std::mt19937_64& rng, double sigma = 1.0,
                                         std::size_t burn = 500) {
    std::normal_distribution<double> z(0.0, sigma);
    const std::size_t total = n + burn;
    std::vector<double> e(total);
    std::vector<double> w(total, 0.0);
    for (auto& v : e) {
        v = z(rng);
    }
    for (std::size_t t = 0; t < total; ++t) {
        double s = e[t];
        for (std::size_t i = 0; i < phi.size() && i < t; ++i) {
            s += phi[i] * w[t - i - 1];
        }
        for (std::size_t j = 0; j < theta.size() && j < t; ++j) {
            s += theta[j] * e[t - j - 1];
        }
        w[t] = s;
    }
    return {w.begin() + static_cast<std::ptrdiff_t>(burn), w.end()};
}

/// Cumulative sums applied d times, starting from `start`.
inline std::vector<double> integrate_n(std::vector<double> w, int d, double start = 50.0) {
    for (int k = 0; k < d; ++k) {
        std::vector<double> out(w.size() + 1);
        out[0] = start;
        for (std::size_t t = 0; t < w.size(); ++t) {
            out[t + 1] = out[t] + w[t];
        }
        w = std::move(out);
    }
    return w;
}

inline std::vector<double> normal_sample(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    std::vector<double> x(n);
    for (auto& v : x) {
        v = z(rng);
    }
    return x;
}

inline std::vector<double> random_walk(std::size_t n, std::mt19937_64& rng) {
    auto x = normal_sample(n, rng);
    for (std::size_t t = 1; t < n; ++t) {
        x[t] += x[t - 1];
    }
    return x;
}

/// Mortality CSV used by data-dependent checks; TSF_SEER_CSV overrides the shipped file.
inline std::string seer_csv_path() {
    if (const char* env = std::getenv("TSF_SEER_CSV"); env != nullptr && *env != '\0') {
        return env;
    }
    return TSF_DATA_DIR "/seer_lung_mortality_1975_2021.csv";
}

}  // namespace tsf::oracle
