#include "tsf/kernels.hpp"

#include <stdexcept>

namespace tsf::kernels {

double ses_sse(std::span<const double> y, double alpha) noexcept {
    double level = y[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double e = y[t] - level;
        sse += e * e;
        level += alpha * e;
    }
    return sse;
}

double hdes_sse(std::span<const double> y, double alpha, double beta) noexcept {
    double level = y[0];
    double trend = y[1] - y[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double e = y[t] - (level + trend);
        sse += e * e;
        const double next = alpha * y[t] + (1.0 - alpha) * (level + trend);
        trend = beta * (next - level) + (1.0 - beta) * trend;
        level = next;
    }
    return sse;
}

std::vector<double> ses_grid_sse_serial(std::span<const double> y, std::span<const double> grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = ses_sse(y, grid[i]);
    }
    return out;
}

std::vector<double> ses_grid_sse(std::span<const double> y, std::span<const double> grid) {
    std::vector<double> out(grid.size());
    const auto n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = ses_sse(y, grid[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::vector<double> hdes_grid_sse_serial(std::span<const double> y,
                                         std::span<const double> grid) {
    const std::size_t g = grid.size();
    std::vector<double> out(g * g);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            out[i * g + j] = hdes_sse(y, grid[i], grid[j]);
        }
    }
    return out;
}

std::vector<double> hdes_grid_sse(std::span<const double> y, std::span<const double> grid) {
    const std::size_t g = grid.size();
    std::vector<double> out(g * g);
    const auto cells = static_cast<long>(g * g);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < cells; ++c) {
        const auto cell = static_cast<std::size_t>(c);
        out[cell] = hdes_sse(y, grid[cell / g], grid[cell % g]);
    }
    return out;
}

std::size_t first_argmin(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("first_argmin of an empty range");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) {
            best = i;
        }
    }
    return best;
}

}  // namespace tsf::kernels
