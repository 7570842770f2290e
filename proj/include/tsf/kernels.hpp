#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial twin kept as the
// reference; the two must agree bit for bit because every cell is computed by
// the same scalar routine and results are written to fixed slots.

#include <cstddef>
#include <span>
#include <vector>

namespace tsf::kernels {

/// One-step SSE of simple exponential smoothing with level start l = y[0].
[[nodiscard]] double ses_sse(std::span<const double> y, double alpha) noexcept;

/// One-step SSE of Holt's linear method with l = y[0], b = y[1] - y[0].
[[nodiscard]] double hdes_sse(std::span<const double> y, double alpha, double beta) noexcept;

/// SSE at every alpha in `grid`.
[[nodiscard]] std::vector<double> ses_grid_sse_serial(std::span<const double> y,
                                                      std::span<const double> grid);
[[nodiscard]] std::vector<double> ses_grid_sse(std::span<const double> y,
                                               std::span<const double> grid);

/// SSE over grid x grid, row-major with alpha as the row index.
[[nodiscard]] std::vector<double> hdes_grid_sse_serial(std::span<const double> y,
                                                       std::span<const double> grid);
[[nodiscard]] std::vector<double> hdes_grid_sse(std::span<const double> y,
                                                std::span<const double> grid);

/// Index of the first minimum in scan order (the tie-break rule).
[[nodiscard]] std::size_t first_argmin(std::span<const double> values);

}  // namespace tsf::kernels
