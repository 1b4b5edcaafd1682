#include "epicast/regression.hpp"

#include "epicast/error.hpp"
#include "epicast/text_io.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace epicast::regression {

namespace {

// Relative pivot threshold below which a column counts as dependent.
constexpr double kRankTolerance = 1e-10;

constexpr std::string_view kFormatTag = "epicast-regression";
constexpr std::string_view kFormatVersion = "1";

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ',';
        out += parts[i];
    }
    return out;
}

} // namespace

RegressionModel fit_ols(const data::SupervisedMatrix& m, double ridge) {
    const auto n = m.x.rows();
    const auto p = m.x.cols();
    if (p == 0) fail(ErrorCode::ShapeMismatch, "no features");
    if (m.y.size() != n)
        fail(ErrorCode::ShapeMismatch, "X has " + std::to_string(n) + " rows, y has " + std::to_string(m.y.size()));
    if (!(ridge >= 0.0) || !std::isfinite(ridge))
        fail(ErrorCode::InvalidConfig, "ridge must be a finite value >= 0");
    if (n <= p + 1)
        fail(ErrorCode::TooFewRows, "least squares needs more than p+1 = " + std::to_string(p + 1) +
                                        " rows, got " + std::to_string(n));

    // Column 0 of the design is the intercept.
    const Eigen::Index extra = ridge > 0.0 ? static_cast<Eigen::Index>(p) : 0;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) + extra,
                                              static_cast<Eigen::Index>(p + 1));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
    for (std::size_t r = 0; r < n; ++r) {
        const auto ri = static_cast<Eigen::Index>(r);
        a(ri, 0) = 1.0;
        for (std::size_t c = 0; c < p; ++c) a(ri, static_cast<Eigen::Index>(c + 1)) = m.x(r, c);
        b(ri) = m.y[r];
    }
    const double penalty = std::sqrt(ridge);
    for (Eigen::Index k = 0; k < extra; ++k) a(static_cast<Eigen::Index>(n) + k, k + 1) = penalty;

    // Equilibrate columns so the rank test is scale-free.
    Eigen::VectorXd scale(a.cols());
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double norm = a.col(c).norm();
        scale(c) = norm > 0.0 ? norm : 1.0;
        a.col(c) /= scale(c);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < a.cols())
        fail(ErrorCode::RankDeficient, "design matrix has rank " + std::to_string(qr.rank()) +
                                           " < " + std::to_string(a.cols()) +
                                           " (collinear or constant features)");

    const Eigen::VectorXd beta = qr.solve(b).cwiseQuotient(scale);

    RegressionModel model;
    model.intercept = beta(0);
    model.coefficients.assign(beta.data() + 1, beta.data() + beta.size());
    model.feature_names = m.feature_names;
    model.ridge = ridge;
    double rss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double e = m.y[r] - predict_row(model, m.x.row(r));
        rss += e * e;
    }
    model.rss = rss;
    return model;
}

Matrix polynomial_features(std::span<const double> x, int degree) {
    if (degree < 1) fail(ErrorCode::DegreeZero, "polynomial degree must be >= 1");
    Matrix out(x.size(), static_cast<std::size_t>(degree));
    for (std::size_t r = 0; r < x.size(); ++r) {
        double power = 1.0;
        for (int k = 0; k < degree; ++k) {
            power *= x[r];
            out(r, static_cast<std::size_t>(k)) = power;
        }
    }
    return out;
}

data::SupervisedMatrix expand_polynomial(const data::SupervisedMatrix& m, int degree) {
    if (degree < 1) fail(ErrorCode::DegreeZero, "polynomial degree must be >= 1");
    if (m.x.cols() != 1)
        fail(ErrorCode::ShapeMismatch, "polynomial regression takes exactly one feature, got " +
                                           std::to_string(m.x.cols()));
    data::SupervisedMatrix out;
    out.x = polynomial_features(m.x.column(0), degree);
    out.y = m.y;
    out.target_name = m.target_name;
    out.days = m.days;
    const std::string base = m.feature_names.empty() ? "x" : m.feature_names.front();
    if (degree == 1) {
        out.feature_names = {base};
    } else {
        for (int k = 1; k <= degree; ++k) out.feature_names.push_back(base + "^" + std::to_string(k));
    }
    return out;
}

double predict_row(const RegressionModel& model, std::span<const double> x) {
    if (x.size() != model.coefficients.size())
        fail(ErrorCode::ShapeMismatch, "row has " + std::to_string(x.size()) + " values, model expects " +
                                           std::to_string(model.coefficients.size()));
    double y = model.intercept;
    for (std::size_t c = 0; c < x.size(); ++c) y += model.coefficients[c] * x[c];
    return y;
}

std::vector<double> predict(const RegressionModel& model, const Matrix& x) {
    if (x.cols() != model.coefficients.size())
        fail(ErrorCode::ShapeMismatch, "matrix has " + std::to_string(x.cols()) +
                                           " columns, model expects " +
                                           std::to_string(model.coefficients.size()));
    std::vector<double> out;
    out.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(predict_row(model, x.row(r)));
    return out;
}

std::vector<std::int64_t> round_counts(std::span<const double> forecast) {
    std::vector<std::int64_t> out;
    out.reserve(forecast.size());
    for (double v : forecast) {
        const double r = std::round(v);
        out.push_back(r > 0.0 ? static_cast<std::int64_t>(r) : 0);
    }
    return out;
}

std::string serialize(const RegressionModel& model) {
    text::KeyValues kv;
    kv["format"] = std::string(kFormatTag);
    kv["version"] = std::string(kFormatVersion);
    kv["features"] = join(model.feature_names);
    kv["intercept"] = text::format_double(model.intercept);
    kv["coefficients"] = text::format_doubles(model.coefficients);
    kv["rss"] = text::format_double(model.rss);
    kv["ridge"] = text::format_double(model.ridge);
    return text::format_key_values(kv);
}

RegressionModel deserialize_regression(std::string_view body) {
    const auto kv = text::parse_key_values(body);
    const auto get = [&](std::string_view key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) fail(ErrorCode::ParseError, "regression model: missing key '" + std::string(key) + "'");
        return it->second;
    };
    if (get("format") != kFormatTag) fail(ErrorCode::ParseError, "not a regression model file");
    if (get("version") != kFormatVersion)
        fail(ErrorCode::ParseError, "unsupported regression model version " + get("version"));
    RegressionModel m;
    m.feature_names = text::split(get("features"), ',');
    m.intercept = text::parse_double(get("intercept"), "intercept");
    m.coefficients = text::parse_doubles(get("coefficients"), "coefficients");
    m.rss = text::parse_double(get("rss"), "rss");
    m.ridge = text::parse_double(get("ridge"), "ridge");
    if (m.coefficients.size() != m.feature_names.size())
        fail(ErrorCode::ParseError, "regression model: coefficient count does not match feature count");
    return m;
}

} // namespace epicast::regression
