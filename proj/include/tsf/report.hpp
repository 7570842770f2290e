#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "tsf/pipeline.hpp"

namespace tsf {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Metric text for tables: 2 decimals, 3 below one.
[[nodiscard]] std::string format_metric(double v);

/// Markdown report whose first table has columns Model | Parameter Estimates | RMSE | MAE | MAPE.
[[nodiscard]] std::string render_report(const PipelineResult& result, const RunConfig& config);

/// Flat `key=value` lines; reals use 17 significant digits, arrays are comma separated.
[[nodiscard]] std::string render_results(const PipelineResult& result, const RunConfig& config);

/// Parses render_results output back into key/value pairs.
[[nodiscard]] std::map<std::string, std::string> parse_results(const std::string& text);

/// Creates `dir` if needed and checks it is writable. Throws IoError.
void ensure_writable_dir(const std::filesystem::path& dir);

/// Writes to a sibling temporary file then renames over `path`. Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// report.md and results.kv.
void emit_report(const PipelineResult& result, const RunConfig& config);

/// observed.svg, residuals_<model>.svg, fitted_vs_observed.svg, forecast.svg.
void emit_plots(const PipelineResult& result, const RunConfig& config);

}  // namespace tsf
