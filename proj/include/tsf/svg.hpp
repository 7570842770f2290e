#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsf::plot {

class PlotError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Line {
    std::string label;
    int first_year = 0;
    std::vector<double> values;
    std::string color = "#1f77b4";
    bool dashed = false;
};

/// Single-panel year-vs-value line chart.
[[nodiscard]] std::string observed_svg(const std::string& title, const Line& series);

/// Observed series with one or more fitted overlays.
[[nodiscard]] std::string fitted_vs_observed_svg(const std::string& title, const Line& observed,
                                                 std::span<const Line> fitted);

/// Observed history plus forecast; the forecast years are shaded.
[[nodiscard]] std::string forecast_svg(const std::string& title, const Line& observed,
                                       const Line& forecast);

/// Three stacked panels: residuals over time, their ACF with a +-1.96/sqrt(n) band,
/// and a normal Q-Q plot.
[[nodiscard]] std::string residual_panel_svg(const std::string& title, int first_year,
                                             std::span<const double> residuals,
                                             std::size_t acf_lags);

}  // namespace tsf::plot
