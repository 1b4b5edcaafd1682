#pragma once

#include "epicast/matrix.hpp"
#include "epicast/timeseries.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epicast::regression {

/// y = intercept + coefficients . x, fitted by least squares.
struct RegressionModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    std::vector<std::string> feature_names;
    double rss = 0.0;
    double ridge = 0.0;

    bool operator==(const RegressionModel&) const = default;
};

/// Least-squares fit with an intercept column.
///
/// Solved by column-pivoted Householder QR on the design matrix (never by
/// forming X^T X). With `ridge > 0` the penalty `ridge * |beta|^2` is applied
/// to the slope coefficients only, via row augmentation.
///
/// Throws TooFewRows unless n > p + 1, and RankDeficient when the design
/// matrix (with intercept) is numerically rank deficient and `ridge == 0`.
RegressionModel fit_ols(const data::SupervisedMatrix& m, double ridge = 0.0);

/// Columns x^1 ... x^degree. Throws DegreeZero.
Matrix polynomial_features(std::span<const double> x, int degree);

/// Expands the single feature of `m` into powers 1..degree; names become `name^k`.
/// Throws DegreeZero, or ShapeMismatch if `m` has more than one feature.
data::SupervisedMatrix expand_polynomial(const data::SupervisedMatrix& m, int degree);

/// Throws ShapeMismatch when column count differs from the model.
std::vector<double> predict(const RegressionModel& model, const Matrix& x);
double predict_row(const RegressionModel& model, std::span<const double> x);

/// Half-away-from-zero rounding, then clamp at 0.
std::vector<std::int64_t> round_counts(std::span<const double> forecast);

std::string serialize(const RegressionModel& model);
RegressionModel deserialize_regression(std::string_view text);

} // namespace epicast::regression
