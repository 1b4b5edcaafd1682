#pragma once

#include "epicast/matrix.hpp"

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epicast::data {

/// One hospital-day observation. Counts are people per day.
struct TimeSeriesRecord {
    std::int64_t day_index = 0; // 1-based ordinal, authoritative for ordering
    std::string date;           // ISO-8601 label; not used in modeling
    std::int64_t confirmed = 0;
    std::int64_t deaths = 0;
    std::int64_t male = 0;
    std::int64_t female = 0;
    std::int64_t under_45 = 0;
    std::int64_t over_45 = 0;
    std::int64_t comorbid = 0;

    bool operator==(const TimeSeriesRecord&) const = default;
};

/// Numeric columns that can feed a model.
enum class Column { DayIndex, Confirmed, Deaths, Male, Female, Under45, Over45, Comorbid };

inline constexpr std::array<std::string_view, 9> kCsvHeader = {
    "day_index", "date", "confirmed", "deaths", "male", "female", "under_45", "over_45", "comorbid"};

/// Strict `YYYY-MM-DD`; nullopt for malformed or impossible dates.
std::optional<std::chrono::sys_days> parse_iso_date(std::string_view s) noexcept;

std::optional<Column> column_from_name(std::string_view name) noexcept;
std::string_view column_name(Column c) noexcept;
double column_value(const TimeSeriesRecord& r, Column c) noexcept;

/// Ordered, validated series of contiguous days. Pieces produced by split()
/// keep their original day indices, so only a parsed dataset is guaranteed
/// to start at day 1.
class Dataset {
public:
    /// Throws EmptyDataset, NegativeCount, DeathsExceedConfirmed, NonContiguousDays.
    explicit Dataset(std::vector<TimeSeriesRecord> records, std::string source_label = {});

    [[nodiscard]] const std::vector<TimeSeriesRecord>& records() const noexcept { return records_; }
    [[nodiscard]] const std::string& source_label() const noexcept { return source_label_; }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] std::int64_t first_day() const noexcept { return records_.front().day_index; }
    [[nodiscard]] std::int64_t last_day() const noexcept { return records_.back().day_index; }

    [[nodiscard]] std::vector<double> series(Column c) const;

private:
    std::vector<TimeSeriesRecord> records_;
    std::string source_label_;
};

/// Reads the nine-column CSV schema (any column order, extra columns ignored).
/// The first data row must be day 1.
Dataset parse_csv(std::istream& in, std::string source_label = {});
Dataset parse_csv_text(std::string_view text, std::string source_label = {});

/// Writes the canonical header order with LF line endings.
void emit_csv(std::ostream& out, const Dataset& ds);
std::string emit_csv_text(const Dataset& ds);

/// Soft identity checks (male+female and under_45+over_45 against confirmed).
std::vector<std::string> consistency_warnings(const Dataset& ds);

/// Inclusive 1-based day range.
struct IndexRange {
    std::int64_t first = 1;
    std::int64_t last = 0;

    [[nodiscard]] std::int64_t width() const noexcept { return last - first + 1; }
    bool operator==(const IndexRange&) const = default;
};

/// Parses "a-b" or a single day "a".
IndexRange parse_range(std::string_view s);
std::string format_range(const IndexRange& r);

struct SplitSpec {
    IndexRange train{1, 46};
    std::optional<IndexRange> validation = IndexRange{47, 56};
    std::optional<IndexRange> test = IndexRange{57, 61};
};

struct Splits {
    Dataset train;
    std::optional<Dataset> validation;
    std::optional<Dataset> test;
};

/// Throws EmptyTrain, InvalidRange, RangeOverlap, RangeOrder, RangeOutOfBounds.
void validate_split(const SplitSpec& spec, std::int64_t first_day, std::int64_t last_day);
Splits split(const Dataset& ds, const SplitSpec& spec);

/// Per-feature min-max bounds.
struct FeatureBounds {
    double min = 0.0;
    double max = 1.0;
    bool operator==(const FeatureBounds&) const = default;
};

struct NormalizationParams {
    std::vector<FeatureBounds> bounds;
    bool operator==(const NormalizationParams&) const = default;
};

/// Column extrema. Throws TooFewRows (< 2 rows) or ConstantFeature.
NormalizationParams fit_normalizer(const Matrix& x);
FeatureBounds fit_normalizer(std::span<const double> column);

/// (v - min) / (max - min), clipped to [0,1]. Throws InvalidBounds unless max > min.
double normalize(double v, FeatureBounds b);
double denormalize(double u, FeatureBounds b);

struct NormalizedMatrix {
    Matrix values;
    std::size_t clipped = 0;
};
NormalizedMatrix normalize(const Matrix& x, const NormalizationParams& p);

struct NormalizedVector {
    std::vector<double> values;
    std::size_t clipped = 0;
};
NormalizedVector normalize(std::span<const double> v, FeatureBounds b);

/// Explanatory rows plus response for one dataset.
struct SupervisedMatrix {
    Matrix x;
    std::vector<double> y;
    std::vector<std::string> feature_names;
    std::string target_name;
    std::vector<std::int64_t> days;
};

inline const std::vector<std::string> kDefaultFeatures = {"confirmed", "male",    "female",
                                                          "under_45",  "over_45", "comorbid"};
inline constexpr std::string_view kDefaultTarget = "deaths";

/// Throws UnknownColumn (including an empty feature list) or TargetInFeatures.
SupervisedMatrix make_supervised(const Dataset& ds,
                                 const std::vector<std::string>& features = kDefaultFeatures,
                                 std::string_view target = kDefaultTarget);

} // namespace epicast::data
