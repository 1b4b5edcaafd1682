#include "epicast/synth.hpp"
#include "epicast/timeseries.hpp"

#include "expect_error.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace epicast;
using namespace epicast::data;

namespace {

const char* kSmall =
    "day_index,date,confirmed,deaths,male,female,under_45,over_45,comorbid\n"
    "1,2020-05-28,10,1,6,4,7,3,2\n"
    "2,2020-05-29,12,2,7,5,8,4,3\n"
    "3,2020-05-30,9,0,5,4,6,3,1\n";

std::string with_row(std::string_view row) {
    return std::string("day_index,date,confirmed,deaths,male,female,under_45,over_45,comorbid\n") +
           std::string(row) + "\n";
}

Dataset days(std::int64_t n) {
    std::vector<TimeSeriesRecord> recs;
    for (std::int64_t d = 1; d <= n; ++d)
        recs.push_back({d, "2020-01-01", 10 + d, d % 3, 5, 5 + d, 4, 6 + d, 2});
    return Dataset(recs);
}

} // namespace

TEST_CASE("CSV parse and emit are inverse") {
    const auto ds = parse_csv_text(kSmall, "small");
    REQUIRE(ds.size() == 3);
    CHECK(ds.records()[1].confirmed == 12);
    CHECK(ds.records()[1].date == "2020-05-29");
    CHECK(ds.source_label() == "small");
    CHECK(emit_csv_text(ds) == kSmall);
    CHECK(parse_csv_text(emit_csv_text(ds)).records() == ds.records());
}

TEST_CASE("CSV emit then parse is identity on synthetic data") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        synth::SyntheticSpec spec;
        spec.seed = seed;
        const auto ds = synth::generate(spec);
        const auto text = emit_csv_text(ds);
        CHECK(parse_csv_text(text).records() == ds.records());
        CHECK(emit_csv_text(parse_csv_text(text)) == text);
    }
}

TEST_CASE("CSV header order is free and extra columns are ignored") {
    const std::string csv =
        "note,deaths,confirmed,date,day_index,comorbid,over_45,under_45,female,male\n"
        "x,1,10,2020-05-28,1,2,3,7,4,6\r\n";
    const auto ds = parse_csv_text(csv);
    CHECK(ds.records()[0] == TimeSeriesRecord{1, "2020-05-28", 10, 1, 6, 4, 7, 3, 2});
}

TEST_CASE("CSV BOM is accepted") {
    const auto ds = parse_csv_text(std::string("\xEF\xBB\xBF") + kSmall);
    CHECK(ds.size() == 3);
}

TEST_CASE("CSV ingestion errors") {
    REQUIRE_ERROR_CODE(parse_csv_text("day_index,date,confirmed\n1,2020-01-01,3\n"), ErrorCode::MissingColumn);
    REQUIRE_ERROR_CODE(parse_csv_text(""), ErrorCode::MissingColumn);
    REQUIRE_ERROR_CODE(
        parse_csv_text("day_index,date,confirmed,deaths,male,female,under_45,over_45,comorbid,deaths\n"),
        ErrorCode::DuplicateColumn);
    REQUIRE_ERROR_CODE(parse_csv_text(with_row("1,2020-05-28,10,1,6,4,7,3")), ErrorCode::MalformedRow);
    REQUIRE_ERROR_CODE(parse_csv_text(with_row("1,2020-05-28,ten,1,6,4,7,3,2")), ErrorCode::NonNumericCell);
    REQUIRE_ERROR_CODE(parse_csv_text(with_row("1,2020-05-28,10,1.5,6,4,7,3,2")), ErrorCode::NonNumericCell);
    REQUIRE_ERROR_CODE(parse_csv_text(with_row("1,2020-05-28,10,-1,6,4,7,3,2")), ErrorCode::NegativeCount);
    REQUIRE_ERROR_CODE(parse_csv_text(with_row("1,2020-05-28,10,11,6,4,7,3,2")), ErrorCode::DeathsExceedConfirmed);
    REQUIRE_ERROR_CODE(parse_csv_text(with_row("1,2020-02-30,10,1,6,4,7,3,2")), ErrorCode::InvalidDate);
    REQUIRE_ERROR_CODE(parse_csv_text(with_row("1,28/05/2020,10,1,6,4,7,3,2")), ErrorCode::InvalidDate);
    REQUIRE_ERROR_CODE(parse_csv_text(with_row("2,2020-05-28,10,1,6,4,7,3,2")), ErrorCode::NonContiguousDays);
    REQUIRE_ERROR_CODE(parse_csv_text(std::string(kSmall) + "5,2020-06-01,1,0,1,0,1,0,0\n"),
                       ErrorCode::NonContiguousDays);
    REQUIRE_ERROR_CODE(parse_csv_text("day_index,date,confirmed,deaths,male,female,under_45,over_45,comorbid\n"),
                       ErrorCode::EmptyDataset);
}

TEST_CASE("NonNumericCell names the row and column") {
    try {
        (void)parse_csv_text(std::string(kSmall) + "4,2020-05-31,x,0,0,0,0,0,0\n");
        FAIL("expected throw");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 4") != std::string::npos);
        CHECK(msg.find("confirmed") != std::string::npos);
    }
}

TEST_CASE("ISO dates are strict") {
    CHECK(parse_iso_date("2020-02-29").has_value());
    CHECK_FALSE(parse_iso_date("2019-02-29").has_value());
    CHECK_FALSE(parse_iso_date("2020-1-01").has_value());
    CHECK_FALSE(parse_iso_date("2020-01-01x").has_value());
}

TEST_CASE("consistency warnings are soft") {
    const auto ds = parse_csv_text(with_row("1,2020-05-28,10,1,6,5,7,3,2"));
    const auto w = consistency_warnings(ds);
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("male+female") != std::string::npos);
    CHECK(consistency_warnings(parse_csv_text(kSmall)).empty());
}

TEST_CASE("default split covers 61 days as 46/10/5") {
    const auto s = split(days(61), SplitSpec{});
    CHECK(s.train.size() == 46);
    REQUIRE(s.validation);
    REQUIRE(s.test);
    CHECK(s.validation->size() == 10);
    CHECK(s.test->size() == 5);
    CHECK(s.validation->first_day() == 47);
    CHECK(s.test->last_day() == 61);
}

TEST_CASE("split pieces partition their ranges in order") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::int64_t n = 3 + static_cast<std::int64_t>(rng() % 80);
        const auto ds = days(n);
        const std::int64_t a = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n - 2));
        const std::int64_t b = a + 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n - a - 1));
        SplitSpec spec{{1, a}, IndexRange{a + 1, b}, std::nullopt};
        if (b < n) spec.test = IndexRange{b + 1, n};
        const auto s = split(ds, spec);
        std::vector<TimeSeriesRecord> joined = s.train.records();
        joined.insert(joined.end(), s.validation->records().begin(), s.validation->records().end());
        if (s.test) joined.insert(joined.end(), s.test->records().begin(), s.test->records().end());
        REQUIRE(joined == ds.records());
    }
}

TEST_CASE("split validation errors") {
    const auto ds = days(61);
    REQUIRE_ERROR_CODE(split(ds, SplitSpec{{5, 4}, std::nullopt, std::nullopt}), ErrorCode::EmptyTrain);
    REQUIRE_ERROR_CODE(split(ds, SplitSpec{{1, 40}, IndexRange{50, 45}, std::nullopt}), ErrorCode::InvalidRange);
    REQUIRE_ERROR_CODE(split(ds, SplitSpec{{1, 46}, IndexRange{46, 56}, std::nullopt}), ErrorCode::RangeOverlap);
    REQUIRE_ERROR_CODE(split(ds, SplitSpec{{11, 46}, IndexRange{1, 10}, std::nullopt}), ErrorCode::RangeOrder);
    REQUIRE_ERROR_CODE(split(ds, SplitSpec{{1, 46}, IndexRange{47, 56}, IndexRange{57, 62}}),
                       ErrorCode::RangeOutOfBounds);
}

TEST_CASE("ranges parse and format") {
    CHECK(parse_range("47-56") == IndexRange{47, 56});
    CHECK(parse_range(" 7 ") == IndexRange{7, 7});
    CHECK(format_range({1, 46}) == "1-46");
    REQUIRE_ERROR_CODE(parse_range("a-b"), ErrorCode::ParseError);
}

TEST_CASE("normalize and denormalize round-trip") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        double lo = u(rng), hi = u(rng);
        if (lo == hi) continue;
        if (lo > hi) std::swap(lo, hi);
        const FeatureBounds b{lo, hi};
        const double v = lo + (hi - lo) * (u(rng) + 100.0) / 200.0;
        const double back = denormalize(normalize(v, b), b);
        REQUIRE(std::abs(back - v) <= 1e-12 * (hi - lo));
        const double x = (u(rng) + 100.0) / 200.0;
        REQUIRE(std::abs(normalize(denormalize(x, b), b) - x) <= 1e-12);
    }
}

TEST_CASE("normalize clips out-of-range values") {
    const FeatureBounds b{2.0, 6.0};
    CHECK(normalize(4.0, b) == 0.5);
    CHECK(normalize(10.0, b) == 1.0);
    CHECK(normalize(-1.0, b) == 0.0);
    const std::vector<double> v{1.0, 4.0, 7.0};
    const auto n = normalize(v, b);
    CHECK(n.clipped == 2);
    CHECK(n.values == std::vector<double>{0.0, 0.5, 1.0});
    REQUIRE_ERROR_CODE(normalize(1.0, FeatureBounds{3.0, 3.0}), ErrorCode::InvalidBounds);
}

TEST_CASE("fit_normalizer takes column extrema") {
    Matrix x(3, 2);
    x(0, 0) = 1; x(1, 0) = 5; x(2, 0) = 3;
    x(0, 1) = -2; x(1, 1) = 0; x(2, 1) = 4;
    const auto p = fit_normalizer(x);
    CHECK(p.bounds[0] == FeatureBounds{1, 5});
    CHECK(p.bounds[1] == FeatureBounds{-2, 4});
    const auto nx = normalize(x, p);
    CHECK(nx.clipped == 0);
    CHECK(nx.values(1, 0) == 1.0);
    CHECK(nx.values(0, 1) == 0.0);

    const std::vector<double> constant{2, 2, 2};
    REQUIRE_ERROR_CODE(fit_normalizer(std::span<const double>(constant)), ErrorCode::ConstantFeature);
    const std::vector<double> single{2};
    REQUIRE_ERROR_CODE(fit_normalizer(std::span<const double>(single)), ErrorCode::TooFewRows);
    REQUIRE_ERROR_CODE(normalize(Matrix(2, 3), p), ErrorCode::ShapeMismatch);
}

TEST_CASE("make_supervised selects columns") {
    const auto ds = parse_csv_text(kSmall);
    const auto m = make_supervised(ds, {"confirmed", "comorbid"}, "deaths");
    CHECK(m.x.rows() == 3);
    CHECK(m.x.cols() == 2);
    CHECK(m.x(1, 0) == 12);
    CHECK(m.x(1, 1) == 3);
    CHECK(m.y == std::vector<double>{1, 2, 0});
    CHECK(m.days == std::vector<std::int64_t>{1, 2, 3});
    CHECK(make_supervised(ds).x.cols() == 6);

    REQUIRE_ERROR_CODE(make_supervised(ds, {"confirmed", "deaths"}, "deaths"), ErrorCode::TargetInFeatures);
    REQUIRE_ERROR_CODE(make_supervised(ds, {"cases"}, "deaths"), ErrorCode::UnknownColumn);
    REQUIRE_ERROR_CODE(make_supervised(ds, {}, "deaths"), ErrorCode::UnknownColumn);
    REQUIRE_ERROR_CODE(make_supervised(ds, {"confirmed"}, "recovered"), ErrorCode::UnknownColumn);
}

TEST_CASE("normalized training target spans exactly the unit interval") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        synth::SyntheticSpec spec;
        spec.seed = seed;
        const auto train = split(synth::generate(spec), SplitSpec{}).train;
        const auto m = make_supervised(train);
        const auto y = normalize(m.y, fit_normalizer(m.y));
        REQUIRE(y.clipped == 0);
        REQUIRE(*std::min_element(y.values.begin(), y.values.end()) == 0.0);
        REQUIRE(*std::max_element(y.values.begin(), y.values.end()) == 1.0);
    }
}
