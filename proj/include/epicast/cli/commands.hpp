#pragma once

#include "epicast/cli/run_config.hpp"
#include "epicast/synth.hpp"

#include <filesystem>
#include <iosfwd>

namespace epicast::cli {

// Files written into RunConfig::out_dir.
inline constexpr const char* kRunConfigFile = "run.cfg";
inline constexpr const char* kRegressionModelFile = "regression.model";
inline constexpr const char* kMlpModelFile = "mlp.model";
inline constexpr const char* kNormalizationFile = "normalization.txt";
inline constexpr const char* kTrainReportFile = "train_report.csv";
inline constexpr const char* kSelectionFile = "selection.csv";
inline constexpr const char* kTrainSummaryFile = "train_summary.txt";
inline constexpr const char* kEvaluationCsvFile = "evaluation.csv";
inline constexpr const char* kEvaluationMdFile = "evaluation.md";
inline constexpr const char* kForecastsFile = "forecasts.csv";
inline constexpr const char* kLongHorizonFile = "long_horizon.txt";
inline constexpr const char* kForecastFile = "forecast.csv";
inline constexpr const char* kAdjustmentFile = "adjustment.txt";
inline constexpr const char* kForecastSummaryCsvFile = "forecast_summary.csv";
inline constexpr const char* kForecastSummaryMdFile = "forecast_summary.md";
inline constexpr const char* kSynthFile = "synthetic.csv";
inline constexpr const char* kSynthConfigFile = "synth.cfg";

/// Fits the regression baseline and selects/trains the network on the train split.
void cmd_train(const RunConfig& cfg, std::ostream& log);

/// Fitting/validation/test metrics for both models plus the per-point forecast table.
void cmd_evaluate(const RunConfig& cfg, std::ostream& log);

/// Scores a CSV with columns actual,ann,regression as validation rows.
void cmd_evaluate_fixture(const std::filesystem::path& fixture, const std::filesystem::path& out_dir,
                          std::ostream& log);

/// Plain and adjusted network forecasts for the validation and test splits.
void cmd_forecast(const RunConfig& cfg, std::ostream& log);

/// Scores a CSV with columns actual,plain,adjusted.
void cmd_forecast_fixture(const std::filesystem::path& fixture, const std::filesystem::path& out_dir,
                          std::ostream& log);

void cmd_synth(const synth::SyntheticSpec& spec, const std::filesystem::path& out_dir, std::ostream& log);

/// fig2.csv, fig3.csv and fig6.csv from the data and the evaluate output.
void cmd_plotdata(const RunConfig& cfg, std::ostream& log);

/// Entry point. Returns 0 on success, 1 on user/data errors, 2 on internal errors.
/// Failures print a single `error[Code]: message` line to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace epicast::cli
