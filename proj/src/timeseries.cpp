#include "epicast/timeseries.hpp"

#include "epicast/error.hpp"
#include "epicast/text_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <istream>
#include <sstream>

namespace epicast::data {

namespace {

constexpr std::array<std::pair<std::string_view, Column>, 8> kNumericColumns = {{
    {"day_index", Column::DayIndex},
    {"confirmed", Column::Confirmed},
    {"deaths", Column::Deaths},
    {"male", Column::Male},
    {"female", Column::Female},
    {"under_45", Column::Under45},
    {"over_45", Column::Over45},
    {"comorbid", Column::Comorbid},
}};

std::string cell_ref(std::size_t row, std::string_view col) {
    return "row " + std::to_string(row) + ", column '" + std::string(col) + "'";
}

bool parse_digits(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return true;
}

void check_record(const TimeSeriesRecord& r, std::size_t row) {
    const std::pair<std::string_view, std::int64_t> counts[] = {
        {"confirmed", r.confirmed}, {"deaths", r.deaths},     {"male", r.male},
        {"female", r.female},       {"under_45", r.under_45}, {"over_45", r.over_45},
        {"comorbid", r.comorbid},
    };
    for (const auto& [name, v] : counts)
        if (v < 0) fail(ErrorCode::NegativeCount, cell_ref(row, name) + ": negative count " + std::to_string(v));
    if (r.deaths > r.confirmed)
        fail(ErrorCode::DeathsExceedConfirmed,
             "row " + std::to_string(row) + ": deaths " + std::to_string(r.deaths) +
                 " exceed confirmed " + std::to_string(r.confirmed));
}

} // namespace

std::optional<std::chrono::sys_days> parse_iso_date(std::string_view s) noexcept {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_digits(s.substr(0, 4), y) || !parse_digits(s.substr(5, 2), m) ||
        !parse_digits(s.substr(8, 2), d))
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

std::optional<Column> column_from_name(std::string_view name) noexcept {
    for (const auto& [n, c] : kNumericColumns)
        if (n == name) return c;
    return std::nullopt;
}

std::string_view column_name(Column c) noexcept {
    for (const auto& [n, col] : kNumericColumns)
        if (col == c) return n;
    return {};
}

double column_value(const TimeSeriesRecord& r, Column c) noexcept {
    switch (c) {
    case Column::DayIndex: return static_cast<double>(r.day_index);
    case Column::Confirmed: return static_cast<double>(r.confirmed);
    case Column::Deaths: return static_cast<double>(r.deaths);
    case Column::Male: return static_cast<double>(r.male);
    case Column::Female: return static_cast<double>(r.female);
    case Column::Under45: return static_cast<double>(r.under_45);
    case Column::Over45: return static_cast<double>(r.over_45);
    case Column::Comorbid: return static_cast<double>(r.comorbid);
    }
    return 0.0;
}

Dataset::Dataset(std::vector<TimeSeriesRecord> records, std::string source_label)
    : records_(std::move(records)), source_label_(std::move(source_label)) {
    if (records_.empty()) fail(ErrorCode::EmptyDataset, "dataset has no records");
    for (std::size_t i = 0; i < records_.size(); ++i) {
        check_record(records_[i], i + 1);
        if (i > 0 && records_[i].day_index != records_[i - 1].day_index + 1)
            fail(ErrorCode::NonContiguousDays,
                 "day_index " + std::to_string(records_[i].day_index) + " follows " +
                     std::to_string(records_[i - 1].day_index));
    }
    if (records_.front().day_index < 1)
        fail(ErrorCode::NonContiguousDays, "day_index must be >= 1");
}

std::vector<double> Dataset::series(Column c) const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(column_value(r, c));
    return out;
}

Dataset parse_csv(std::istream& in, std::string source_label) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::MissingColumn, "empty input: no header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = text::split_csv_line(line);
    std::array<std::size_t, kCsvHeader.size()> pos{};
    for (std::size_t k = 0; k < kCsvHeader.size(); ++k) {
        const auto hits = std::count(header.begin(), header.end(), kCsvHeader[k]);
        if (hits == 0) fail(ErrorCode::MissingColumn, "missing column '" + std::string(kCsvHeader[k]) + "'");
        if (hits > 1) fail(ErrorCode::DuplicateColumn, "duplicate column '" + std::string(kCsvHeader[k]) + "'");
        pos[k] = static_cast<std::size_t>(
            std::find(header.begin(), header.end(), kCsvHeader[k]) - header.begin());
    }

    std::vector<TimeSeriesRecord> records;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        ++row;
        const auto cells = text::split_csv_line(line);
        if (cells.size() != header.size())
            fail(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": expected " +
                                              std::to_string(header.size()) + " cells, got " +
                                              std::to_string(cells.size()));
        const auto count = [&](std::size_t k) {
            const auto& cell = cells[pos[k]];
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
                fail(ErrorCode::NonNumericCell, cell_ref(row, kCsvHeader[k]) + ": '" + cell + "'");
            return v;
        };
        TimeSeriesRecord r;
        r.day_index = count(0);
        r.date = cells[pos[1]];
        if (!parse_iso_date(r.date))
            fail(ErrorCode::InvalidDate, cell_ref(row, "date") + ": '" + r.date + "' is not YYYY-MM-DD");
        r.confirmed = count(2);
        r.deaths = count(3);
        r.male = count(4);
        r.female = count(5);
        r.under_45 = count(6);
        r.over_45 = count(7);
        r.comorbid = count(8);
        check_record(r, row);
        records.push_back(std::move(r));
    }
    if (records.empty()) fail(ErrorCode::EmptyDataset, "no data rows");
    if (records.front().day_index != 1)
        fail(ErrorCode::NonContiguousDays,
             "first day_index is " + std::to_string(records.front().day_index) + ", expected 1");
    return Dataset(std::move(records), std::move(source_label));
}

Dataset parse_csv_text(std::string_view text, std::string source_label) {
    std::istringstream in{std::string(text)};
    return parse_csv(in, std::move(source_label));
}

void emit_csv(std::ostream& out, const Dataset& ds) {
    for (std::size_t k = 0; k < kCsvHeader.size(); ++k) out << (k ? "," : "") << kCsvHeader[k];
    out << '\n';
    for (const auto& r : ds.records()) {
        out << r.day_index << ',' << r.date << ',' << r.confirmed << ',' << r.deaths << ','
            << r.male << ',' << r.female << ',' << r.under_45 << ',' << r.over_45 << ','
            << r.comorbid << '\n';
    }
}

std::string emit_csv_text(const Dataset& ds) {
    std::ostringstream out;
    emit_csv(out, ds);
    return out.str();
}

std::vector<std::string> consistency_warnings(const Dataset& ds) {
    std::vector<std::string> out;
    for (const auto& r : ds.records()) {
        if (r.male + r.female != r.confirmed)
            out.push_back("day " + std::to_string(r.day_index) + ": male+female (" +
                          std::to_string(r.male + r.female) + ") != confirmed (" +
                          std::to_string(r.confirmed) + ")");
        if (r.under_45 + r.over_45 != r.confirmed)
            out.push_back("day " + std::to_string(r.day_index) + ": under_45+over_45 (" +
                          std::to_string(r.under_45 + r.over_45) + ") != confirmed (" +
                          std::to_string(r.confirmed) + ")");
    }
    return out;
}

IndexRange parse_range(std::string_view s) {
    s = text::trim(s);
    const auto dash = s.find('-');
    IndexRange r;
    if (dash == std::string_view::npos) {
        r.first = r.last = text::parse_int(s, "range");
    } else {
        r.first = text::parse_int(s.substr(0, dash), "range start");
        r.last = text::parse_int(s.substr(dash + 1), "range end");
    }
    return r;
}

std::string format_range(const IndexRange& r) {
    return std::to_string(r.first) + "-" + std::to_string(r.last);
}

void validate_split(const SplitSpec& spec, std::int64_t first_day, std::int64_t last_day) {
    if (spec.train.width() < 1)
        fail(ErrorCode::EmptyTrain, "train range " + format_range(spec.train) + " is empty");

    std::vector<std::pair<std::string_view, IndexRange>> ranges{{"train", spec.train}};
    if (spec.validation) ranges.emplace_back("validation", *spec.validation);
    if (spec.test) ranges.emplace_back("test", *spec.test);

    for (const auto& [name, r] : ranges)
        if (r.width() < 1)
            fail(ErrorCode::InvalidRange, std::string(name) + " range " + format_range(r) + " is empty");

    for (std::size_t i = 0; i < ranges.size(); ++i)
        for (std::size_t j = i + 1; j < ranges.size(); ++j) {
            const auto& a = ranges[i].second;
            const auto& b = ranges[j].second;
            if (a.first <= b.last && b.first <= a.last)
                fail(ErrorCode::RangeOverlap, std::string(ranges[i].first) + " " + format_range(a) +
                                                  " overlaps " + std::string(ranges[j].first) + " " +
                                                  format_range(b));
        }
    for (std::size_t i = 1; i < ranges.size(); ++i)
        if (ranges[i].second.first < ranges[i - 1].second.last)
            fail(ErrorCode::RangeOrder, std::string(ranges[i].first) + " range must follow " +
                                            std::string(ranges[i - 1].first));

    for (const auto& [name, r] : ranges)
        if (r.first < first_day || r.last > last_day)
            fail(ErrorCode::RangeOutOfBounds,
                 std::string(name) + " range " + format_range(r) + " outside data days " +
                     std::to_string(first_day) + "-" + std::to_string(last_day));
}

Splits split(const Dataset& ds, const SplitSpec& spec) {
    validate_split(spec, ds.first_day(), ds.last_day());
    const auto slice = [&](const IndexRange& r) {
        const auto begin = ds.records().begin() + (r.first - ds.first_day());
        return Dataset({begin, begin + r.width()}, ds.source_label());
    };
    Splits out{slice(spec.train), std::nullopt, std::nullopt};
    if (spec.validation) out.validation = slice(*spec.validation);
    if (spec.test) out.test = slice(*spec.test);
    return out;
}

FeatureBounds fit_normalizer(std::span<const double> column) {
    if (column.size() < 2)
        fail(ErrorCode::TooFewRows, "normalizer needs at least 2 rows, got " + std::to_string(column.size()));
    const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
    if (!(*hi > *lo))
        fail(ErrorCode::ConstantFeature, "constant column (value " + text::format_double(*lo) + ")");
    return {*lo, *hi};
}

NormalizationParams fit_normalizer(const Matrix& x) {
    NormalizationParams p;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        try {
            p.bounds.push_back(fit_normalizer(x.column(c)));
        } catch (const Error& e) {
            fail(e.code(), "feature " + std::to_string(c) + ": " + e.what());
        }
    }
    return p;
}

double normalize(double v, FeatureBounds b) {
    if (!(b.max > b.min)) fail(ErrorCode::InvalidBounds, "normalize requires max > min");
    return std::clamp((v - b.min) / (b.max - b.min), 0.0, 1.0);
}

double denormalize(double u, FeatureBounds b) {
    if (!(b.max > b.min)) fail(ErrorCode::InvalidBounds, "denormalize requires max > min");
    return u * (b.max - b.min) + b.min;
}

NormalizedMatrix normalize(const Matrix& x, const NormalizationParams& p) {
    if (x.cols() != p.bounds.size())
        fail(ErrorCode::ShapeMismatch, "matrix has " + std::to_string(x.cols()) +
                                           " columns, normalizer has " +
                                           std::to_string(p.bounds.size()));
    NormalizedMatrix out{Matrix(x.rows(), x.cols()), 0};
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const auto& b = p.bounds[c];
            const double v = x(r, c);
            if (v < b.min || v > b.max) ++out.clipped;
            out.values(r, c) = normalize(v, b);
        }
    return out;
}

NormalizedVector normalize(std::span<const double> v, FeatureBounds b) {
    NormalizedVector out;
    out.values.reserve(v.size());
    for (double x : v) {
        if (x < b.min || x > b.max) ++out.clipped;
        out.values.push_back(normalize(x, b));
    }
    return out;
}

SupervisedMatrix make_supervised(const Dataset& ds, const std::vector<std::string>& features,
                                 std::string_view target) {
    if (features.empty()) fail(ErrorCode::UnknownColumn, "feature list is empty");
    const auto target_col = column_from_name(target);
    if (!target_col) fail(ErrorCode::UnknownColumn, "unknown target column '" + std::string(target) + "'");

    std::vector<Column> cols;
    for (const auto& f : features) {
        const auto c = column_from_name(f);
        if (!c) fail(ErrorCode::UnknownColumn, "unknown feature column '" + f + "'");
        if (*c == *target_col)
            fail(ErrorCode::TargetInFeatures, "target '" + f + "' also listed as a feature");
        cols.push_back(*c);
    }

    SupervisedMatrix m{Matrix(ds.size(), cols.size()), {}, features, std::string(target), {}};
    m.y.reserve(ds.size());
    m.days.reserve(ds.size());
    for (std::size_t r = 0; r < ds.size(); ++r) {
        const auto& rec = ds.records()[r];
        for (std::size_t c = 0; c < cols.size(); ++c) m.x(r, c) = column_value(rec, cols[c]);
        m.y.push_back(column_value(rec, *target_col));
        m.days.push_back(rec.day_index);
    }
    return m;
}

} // namespace epicast::data
