#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epicast::eval {

/// (1/n) * sum (actual - forecast)^2. Throws LengthMismatch, EmptyInput.
double mse(std::span<const double> actual, std::span<const double> forecast);

struct MapeResult {
    double value = 0.0;       // fraction, not percent
    std::size_t used = 0;
    std::size_t skipped_zero_actual = 0;
};

/// Mean of |a - f| / |a| over points with a != 0.
/// Throws LengthMismatch, EmptyInput, AllActualsZero.
MapeResult mape_detail(std::span<const double> actual, std::span<const double> forecast);
double mape(std::span<const double> actual, std::span<const double> forecast);

/// Mean absolute error; used by the adjustment diagnostics.
double mae(std::span<const double> actual, std::span<const double> forecast);

enum class Stage { Fitting, Validation, Test };
std::string_view to_string(Stage s) noexcept;

struct ReportEntry {
    std::string model;
    Stage stage = Stage::Validation;
    std::vector<double> actual;
    std::vector<double> forecast;
};

struct ReportRow {
    std::string model;
    Stage stage = Stage::Validation;
    double mse = 0.0;
    double mape = 0.0;
    std::size_t n_points = 0;
    std::size_t n_skipped_zero_actual = 0;
};

struct EvaluationReport {
    std::vector<ReportRow> rows;
};

/// One row per entry, in input order.
EvaluationReport compare_report(const std::vector<ReportEntry>& entries);

/// `model,stage,mse,mape,n,skipped` with full-precision values.
std::string to_csv(const EvaluationReport& report);
/// Aligned markdown table, metrics shown with 3 decimals.
std::string to_markdown(const EvaluationReport& report);

} // namespace epicast::eval
