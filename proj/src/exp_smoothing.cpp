#include "tsf/exp_smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "tsf/kernels.hpp"
#include "tsf/optimize.hpp"

namespace tsf {

namespace {

constexpr double kHdesLower = 0.0001;
constexpr double kHdesUpper = 0.9999;

std::vector<double> uniform_grid(int steps, double step) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(steps));
    for (int i = 1; i <= steps; ++i) {
        g.push_back(static_cast<double>(i) * step);
    }
    return g;
}

void require_horizon(int horizon) {
    if (horizon < 1) {
        throw std::invalid_argument("forecast horizon must be at least 1, got " +
                                    std::to_string(horizon));
    }
}

}  // namespace

SesFit ses_evaluate(const TimeSeries& train, double alpha) {
    const auto y = train.values();
    SesFit fit;
    fit.alpha = alpha;
    fit.train_start_year = train.start_year();
    fit.train_end_year = train.end_year();
    fit.fitted.resize(y.size());
    fit.residuals.resize(y.size());
    double level = y[0];
    fit.fitted[0] = level;
    fit.residuals[0] = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        fit.fitted[t] = level;
        const double e = y[t] - level;
        fit.residuals[t] = e;
        fit.sse += e * e;
        level += alpha * e;
    }
    fit.final_level = level;
    return fit;
}

HdesFit hdes_evaluate(const TimeSeries& train, double alpha, double beta) {
    const auto y = train.values();
    if (y.size() < 2) {
        throw LengthError("Holt smoothing needs at least 2 observations");
    }
    HdesFit fit;
    fit.alpha = alpha;
    fit.beta = beta;
    fit.train_start_year = train.start_year();
    fit.train_end_year = train.end_year();
    fit.fitted.resize(y.size());
    fit.residuals.resize(y.size());
    double level = y[0];
    double trend = y[1] - y[0];
    fit.fitted[0] = y[0];
    fit.residuals[0] = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double pred = level + trend;
        fit.fitted[t] = pred;
        const double e = y[t] - pred;
        fit.residuals[t] = e;
        fit.sse += e * e;
        const double next = alpha * y[t] + (1.0 - alpha) * pred;
        trend = beta * (next - level) + (1.0 - beta) * trend;
        level = next;
    }
    fit.final_level = level;
    fit.final_trend = trend;
    return fit;
}

SesFit ses_fit(const TimeSeries& train) {
    if (train.size() < 3) {
        throw LengthError("SES needs at least 3 observations, got " +
                          std::to_string(train.size()));
    }
    const auto y = train.values();
    const auto grid = uniform_grid(999, 0.001);
    const auto sse = kernels::ses_grid_sse(y, grid);
    const std::size_t best = kernels::first_argmin(sse);
    double alpha = grid[best];
    double best_sse = sse[best];

    const double lo = std::max(grid.front(), alpha - 0.001);
    const double hi = std::min(grid.back(), alpha + 0.001);
    const auto refined = opt::golden_section(
        [&](double a) { return kernels::ses_sse(y, a); }, lo, hi, 1e-10);
    if (refined.value < best_sse) {
        alpha = refined.x;
        best_sse = refined.value;
    }
    return ses_evaluate(train, alpha);
}

HdesFit hdes_fit(const TimeSeries& train) {
    if (train.size() < 4) {
        throw LengthError("HDES needs at least 4 observations, got " +
                          std::to_string(train.size()));
    }
    const auto y = train.values();
    const auto grid = uniform_grid(99, 0.01);
    const auto sse = kernels::hdes_grid_sse(y, grid);
    const std::size_t best = kernels::first_argmin(sse);
    double alpha = grid[best / grid.size()];
    double beta = grid[best % grid.size()];
    double best_sse = sse[best];

    auto clamp = [](double v) { return std::clamp(v, kHdesLower, kHdesUpper); };
    opt::NelderMeadOptions nm;
    nm.step = 0.01;
    nm.rel_tol = 1e-12;
    const auto refined = opt::nelder_mead(
        [&](std::span<const double> p) { return kernels::hdes_sse(y, clamp(p[0]), clamp(p[1])); },
        {alpha, beta}, nm);
    if (refined.value < best_sse) {
        alpha = clamp(refined.x[0]);
        beta = clamp(refined.x[1]);
        best_sse = refined.value;
    }
    return hdes_evaluate(train, alpha, beta);
}

Forecast ses_forecast(const SesFit& fit, int horizon) {
    require_horizon(horizon);
    return {fit.train_end_year + 1,
            std::vector<double>(static_cast<std::size_t>(horizon), fit.final_level), "SES"};
}

Forecast hdes_forecast(const HdesFit& fit, int horizon) {
    require_horizon(horizon);
    Forecast f{fit.train_end_year + 1, {}, "HDES"};
    f.values.reserve(static_cast<std::size_t>(horizon));
    for (int h = 1; h <= horizon; ++h) {
        f.values.push_back(fit.final_level + static_cast<double>(h) * fit.final_trend);
    }
    return f;
}

}  // namespace tsf
