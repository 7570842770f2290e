#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tsf::opt {

struct ScalarMinimum {
    double x;
    double value;
};

/// Golden-section search for a minimum of f on [lo, hi].
[[nodiscard]] ScalarMinimum golden_section(const std::function<double(double)>& f, double lo,
                                           double hi, double tol = 1e-10,
                                           std::size_t max_iter = 200);

struct NelderMeadOptions {
    /// Initial simplex edge length per coordinate.
    double step = 0.1;
    /// Stop when |f_worst - f_best| <= rel_tol * (|f_best| + abs_tol).
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_iter = 2000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value;
    std::size_t iterations;
    bool converged;
};

/// Derivative-free simplex minimization (standard reflection/expansion/contraction/shrink).
[[nodiscard]] NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& f, std::vector<double> start,
    const NelderMeadOptions& opts = {});

}  // namespace tsf::opt
