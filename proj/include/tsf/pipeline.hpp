#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsf/arima.hpp"
#include "tsf/diagnostics.hpp"
#include "tsf/ensemble.hpp"
#include "tsf/exp_smoothing.hpp"
#include "tsf/series.hpp"

namespace tsf {

struct RunConfig {
    std::filesystem::path input_path;
    int train_end_year = 2012;
    int horizon = 9;
    ModelSelection models;
    int d_max = 2;
    std::optional<int> fix_d;
    int p_max = 3;
    int q_max = 3;
    AdfRegression adf_regression = AdfRegression::Constant;
    std::filesystem::path output_dir = "out";
    bool emit_plots = false;
    std::uint64_t seed = 20240101;

    /// Throws std::invalid_argument on horizon < 1 or search bounds outside [0, 5].
    void validate() const;
};

/// Residual tests for one fitted model. A test that could not run leaves its slot empty
/// and adds a note (e.g. zero-variance residuals).
struct ResidualDiagnostics {
    std::string model;
    std::size_t residual_count = 0;
    std::optional<TestResult> ljung_box;
    std::optional<TestResult> shapiro_wilk;
    std::optional<TestResult> kpss;
    std::vector<std::string> notes;
};

struct StageStatus {
    std::string stage;
    bool ok = true;
    std::string message;
};

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitFit = 3, kExitIo = 4 };

struct PipelineResult {
    std::optional<TimeSeries> series;
    std::optional<TimeSeries> train;
    std::optional<TimeSeries> test;
    Evaluation evaluation;
    std::vector<ResidualDiagnostics> diagnostics;

    /// Models refitted on the whole series for the out-of-sample horizon.
    std::optional<ArimaFit> final_arima;
    std::optional<SesFit> final_ses;
    std::optional<HdesFit> final_hdes;
    std::vector<Forecast> final_forecasts;

    std::vector<StageStatus> stages;
    int exit_code = kExitOk;

    /// The ensemble forecast when available, otherwise the first one produced.
    [[nodiscard]] const Forecast* headline_forecast() const;
};

/// Residuals used for testing: leading deterministic zeros dropped for SES/HDES.
[[nodiscard]] ResidualDiagnostics diagnose_residuals(const std::string& model,
                                                     std::span<const double> residuals,
                                                     std::size_t fitted_params, bool with_kpss);

/// Stages 2-7 on an already loaded series; no file I/O.
[[nodiscard]] PipelineResult run_analysis(const TimeSeries& series, const RunConfig& config);

/// Load, analyse and write every artifact into config.output_dir.
[[nodiscard]] PipelineResult run_pipeline(const RunConfig& config);

}  // namespace tsf
