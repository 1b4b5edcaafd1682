#include "epicast/evaluation.hpp"

#include "epicast/error.hpp"
#include "epicast/text_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace epicast::eval {

namespace {

void check_lengths(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.size() != forecast.size())
        fail(ErrorCode::LengthMismatch, "actual has " + std::to_string(actual.size()) +
                                            " values, forecast has " + std::to_string(forecast.size()));
    if (actual.empty()) fail(ErrorCode::EmptyInput, "metric over an empty series");
}

} // namespace

double mse(std::span<const double> actual, std::span<const double> forecast) {
    check_lengths(actual, forecast);
    double sum = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        const double e = actual[t] - forecast[t];
        sum += e * e;
    }
    return sum / static_cast<double>(actual.size());
}

MapeResult mape_detail(std::span<const double> actual, std::span<const double> forecast) {
    check_lengths(actual, forecast);
    MapeResult r;
    double sum = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        if (actual[t] == 0.0) {
            ++r.skipped_zero_actual;
            continue;
        }
        sum += std::abs(actual[t] - forecast[t]) / std::abs(actual[t]);
        ++r.used;
    }
    if (r.used == 0) fail(ErrorCode::AllActualsZero, "MAPE undefined: every actual value is zero");
    r.value = sum / static_cast<double>(r.used);
    return r;
}

double mape(std::span<const double> actual, std::span<const double> forecast) {
    return mape_detail(actual, forecast).value;
}

double mae(std::span<const double> actual, std::span<const double> forecast) {
    check_lengths(actual, forecast);
    double sum = 0.0;
    for (std::size_t t = 0; t < actual.size(); ++t) sum += std::abs(actual[t] - forecast[t]);
    return sum / static_cast<double>(actual.size());
}

std::string_view to_string(Stage s) noexcept {
    switch (s) {
    case Stage::Fitting: return "fitting";
    case Stage::Validation: return "validation";
    case Stage::Test: return "test";
    }
    return "";
}

EvaluationReport compare_report(const std::vector<ReportEntry>& entries) {
    EvaluationReport report;
    report.rows.reserve(entries.size());
    for (const auto& e : entries) {
        const auto m = mape_detail(e.actual, e.forecast);
        report.rows.push_back({e.model, e.stage, mse(e.actual, e.forecast), m.value, e.actual.size(),
                               m.skipped_zero_actual});
    }
    return report;
}

std::string to_csv(const EvaluationReport& report) {
    std::string out = "model,stage,mse,mape,n,skipped\n";
    for (const auto& r : report.rows) {
        out += r.model + ',' + std::string(to_string(r.stage)) + ',' + text::format_double(r.mse) + ',' +
               text::format_double(r.mape) + ',' + std::to_string(r.n_points) + ',' +
               std::to_string(r.n_skipped_zero_actual) + '\n';
    }
    return out;
}

std::string to_markdown(const EvaluationReport& report) {
    const std::array<std::string, 6> header = {"model", "stage", "mse", "mape", "n", "skipped"};
    std::vector<std::array<std::string, 6>> cells;
    for (const auto& r : report.rows)
        cells.push_back({r.model, std::string(to_string(r.stage)), text::format_fixed(r.mse, 3),
                         text::format_fixed(r.mape, 3), std::to_string(r.n_points),
                         std::to_string(r.n_skipped_zero_actual)});

    std::array<std::size_t, 6> width{};
    for (std::size_t c = 0; c < 6; ++c) {
        width[c] = std::max<std::size_t>(header[c].size(), 3);
        for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
    }
    // text columns left-aligned, numbers right-aligned
    const auto numeric = [](std::size_t c) { return c >= 2; };
    const auto pad = [&](const std::string& s, std::size_t c) {
        const std::string fill(width[c] - s.size(), ' ');
        return numeric(c) ? fill + s : s + fill;
    };

    std::string out = "|";
    for (std::size_t c = 0; c < 6; ++c) out += ' ' + pad(header[c], c) + " |";
    out += "\n|";
    for (std::size_t c = 0; c < 6; ++c)
        out += numeric(c) ? ' ' + std::string(width[c] - 1, '-') + ": |"
                          : ' ' + std::string(width[c], '-') + " |";
    out += '\n';
    for (const auto& row : cells) {
        out += '|';
        for (std::size_t c = 0; c < 6; ++c) out += ' ' + pad(row[c], c) + " |";
        out += '\n';
    }
    return out;
}

} // namespace epicast::eval
