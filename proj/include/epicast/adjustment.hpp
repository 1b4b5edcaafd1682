#pragma once

#include "epicast/matrix.hpp"
#include "epicast/mlp.hpp"
#include "epicast/regression.hpp"
#include "epicast/timeseries.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epicast::adjust {

enum class AdjustmentMode { None, MaxAdjusted, MinAdjusted, BothAdjusted };

std::string_view to_string(AdjustmentMode mode) noexcept;
std::optional<AdjustmentMode> mode_from_string(std::string_view s) noexcept;

/// Shifted denormalization bounds for the target.
struct AdjustmentFactors {
    AdjustmentMode mode = AdjustmentMode::None;
    double max_adj = 1.0;        // replaces the target max in MaxAdjusted / BothAdjusted
    double min_adj = 0.0;        // replaces the target min in MinAdjusted / BothAdjusted
    double mean_deviation = 0.0; // mean(actual - forecast) the factors were estimated from

    static AdjustmentFactors none(data::FeatureBounds target) noexcept {
        return {AdjustmentMode::None, target.max, target.min, 0.0};
    }

    /// Bounds actually used by apply_forecast.
    [[nodiscard]] data::FeatureBounds effective(data::FeatureBounds target) const noexcept;

    bool operator==(const AdjustmentFactors&) const = default;
};

inline constexpr double kDeviationTolerance = 1e-9;
/// A bound may move by at most this fraction of the target range.
inline constexpr double kMaxShiftFraction = 0.9;

/// Shifts one bound by the mean signed residual d = mean(actual - forecast):
/// d > tol raises the floor (underestimation), d < -tol lowers the ceiling
/// (overestimation), otherwise no adjustment.
AdjustmentFactors estimate_adjustment(std::span<const double> actual,
                                      std::span<const double> plain_forecasts,
                                      data::FeatureBounds target,
                                      double tolerance = kDeviationTolerance);

/// Maps a network output u in [0,1] to target units through the effective bounds.
/// Throws InconsistentFactors or UnnormalizedInput.
double apply_forecast(double u, data::FeatureBounds target, const AdjustmentFactors& f);

/// Raw feature rows -> normalized (clipped) -> network -> adjusted target units.
std::vector<double> forecast_values(const mlp::MLPModel& model, const Matrix& raw_x,
                                    const data::NormalizationParams& feature_norm,
                                    data::FeatureBounds target, const AdjustmentFactors& f);
std::vector<std::int64_t> forecast_series(const mlp::MLPModel& model, const Matrix& raw_x,
                                          const data::NormalizationParams& feature_norm,
                                          data::FeatureBounds target, const AdjustmentFactors& f);

/// The regression baseline predicts directly in target units.
std::vector<double> forecast_values(const regression::RegressionModel& model, const Matrix& x);
std::vector<std::int64_t> forecast_series(const regression::RegressionModel& model, const Matrix& x);

std::string serialize(const AdjustmentFactors& f);
AdjustmentFactors deserialize_adjustment(std::string_view text);

} // namespace epicast::adjust
