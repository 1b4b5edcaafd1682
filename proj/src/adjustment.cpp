#include "epicast/adjustment.hpp"

#include "epicast/error.hpp"
#include "epicast/text_io.hpp"

#include <algorithm>
#include <cmath>

namespace epicast::adjust {

std::string_view to_string(AdjustmentMode mode) noexcept {
    switch (mode) {
    case AdjustmentMode::None: return "none";
    case AdjustmentMode::MaxAdjusted: return "max_adjusted";
    case AdjustmentMode::MinAdjusted: return "min_adjusted";
    case AdjustmentMode::BothAdjusted: return "both_adjusted";
    }
    return "none";
}

std::optional<AdjustmentMode> mode_from_string(std::string_view s) noexcept {
    for (auto m : {AdjustmentMode::None, AdjustmentMode::MaxAdjusted, AdjustmentMode::MinAdjusted,
                   AdjustmentMode::BothAdjusted})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

data::FeatureBounds AdjustmentFactors::effective(data::FeatureBounds target) const noexcept {
    switch (mode) {
    case AdjustmentMode::None: return target;
    case AdjustmentMode::MaxAdjusted: return {target.min, max_adj};
    case AdjustmentMode::MinAdjusted: return {min_adj, target.max};
    case AdjustmentMode::BothAdjusted: return {min_adj, max_adj};
    }
    return target;
}

AdjustmentFactors estimate_adjustment(std::span<const double> actual,
                                      std::span<const double> plain_forecasts,
                                      data::FeatureBounds target, double tolerance) {
    if (actual.size() != plain_forecasts.size())
        fail(ErrorCode::LengthMismatch, "actual has " + std::to_string(actual.size()) +
                                            " values, forecasts " +
                                            std::to_string(plain_forecasts.size()));
    if (actual.empty()) fail(ErrorCode::EmptyInput, "adjustment needs at least one observation");
    if (!(target.max > target.min)) fail(ErrorCode::InvalidBounds, "target bounds need max > min");

    double sum = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) sum += actual[t] - plain_forecasts[t];
    const double deviation = sum / static_cast<double>(actual.size());
    const double max_shift = kMaxShiftFraction * (target.max - target.min);

    auto f = AdjustmentFactors::none(target);
    f.mean_deviation = deviation;
    if (deviation > tolerance) {
        f.mode = AdjustmentMode::MinAdjusted;
        f.min_adj = target.min + std::min(deviation, max_shift);
    } else if (deviation < -tolerance) {
        f.mode = AdjustmentMode::MaxAdjusted;
        f.max_adj = target.max + std::max(deviation, -max_shift);
    }
    return f;
}

double apply_forecast(double u, data::FeatureBounds target, const AdjustmentFactors& f) {
    if (!(u >= 0.0 && u <= 1.0))
        fail(ErrorCode::UnnormalizedInput, "network output " + text::format_double(u) + " outside [0,1]");
    if (f.mode == AdjustmentMode::None && (f.max_adj != target.max || f.min_adj != target.min))
        fail(ErrorCode::InconsistentFactors, "mode none carries bounds that differ from the target's");
    const auto b = f.effective(target);
    if (!(b.max > b.min))
        fail(ErrorCode::InconsistentFactors, "effective max " + text::format_double(b.max) +
                                                 " <= effective min " + text::format_double(b.min));
    return u * (b.max - b.min) + b.min;
}

std::vector<double> forecast_values(const mlp::MLPModel& model, const Matrix& raw_x,
                                    const data::NormalizationParams& feature_norm,
                                    data::FeatureBounds target, const AdjustmentFactors& f) {
    const auto x = data::normalize(raw_x, feature_norm).values;
    std::vector<double> out;
    out.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r)
        out.push_back(apply_forecast(mlp::predict(model, x.row(r)), target, f));
    return out;
}

std::vector<std::int64_t> forecast_series(const mlp::MLPModel& model, const Matrix& raw_x,
                                          const data::NormalizationParams& feature_norm,
                                          data::FeatureBounds target, const AdjustmentFactors& f) {
    return regression::round_counts(forecast_values(model, raw_x, feature_norm, target, f));
}

std::vector<double> forecast_values(const regression::RegressionModel& model, const Matrix& x) {
    return regression::predict(model, x);
}

std::vector<std::int64_t> forecast_series(const regression::RegressionModel& model, const Matrix& x) {
    return regression::round_counts(regression::predict(model, x));
}

std::string serialize(const AdjustmentFactors& f) {
    text::KeyValues kv;
    kv["adjustment.mode"] = std::string(to_string(f.mode));
    kv["adjustment.max_adj"] = text::format_double(f.max_adj);
    kv["adjustment.min_adj"] = text::format_double(f.min_adj);
    kv["adjustment.mean_deviation"] = text::format_double(f.mean_deviation);
    return text::format_key_values(kv);
}

AdjustmentFactors deserialize_adjustment(std::string_view body) {
    const auto kv = text::parse_key_values(body);
    const auto get = [&](std::string_view key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) fail(ErrorCode::ParseError, "adjustment: missing key '" + std::string(key) + "'");
        return it->second;
    };
    AdjustmentFactors f;
    const auto mode = mode_from_string(get("adjustment.mode"));
    if (!mode) fail(ErrorCode::ParseError, "adjustment: unknown mode '" + get("adjustment.mode") + "'");
    f.mode = *mode;
    f.max_adj = text::parse_double(get("adjustment.max_adj"), "adjustment.max_adj");
    f.min_adj = text::parse_double(get("adjustment.min_adj"), "adjustment.min_adj");
    f.mean_deviation = text::parse_double(get("adjustment.mean_deviation"), "adjustment.mean_deviation");
    return f;
}

} // namespace epicast::adjust
