#include "epicast/synth.hpp"

#include "epicast/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace epicast::synth {

namespace {

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string format_date(std::chrono::sys_days day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::int64_t split_share(std::int64_t total, double share, double jitter, double u) {
    const double s = std::clamp(share + jitter * (2.0 * u - 1.0), 0.0, 1.0);
    return std::clamp<std::int64_t>(std::llround(static_cast<double>(total) * s), 0, total);
}

} // namespace

void SyntheticSpec::validate() const {
    const auto bad = [](const std::string& msg) { fail(ErrorCode::InvalidConfig, "synthetic spec: " + msg); };
    if (length < 3) bad("length must be >= 3");
    if (!(period > 0.0)) bad("period must be > 0");
    if (!(noise >= 0.0)) bad("noise must be >= 0");
    if (cases_per_death < 1) bad("cases_per_death must be >= 1");
    if (case_offset < 0) bad("case_offset must be >= 0");
    for (double s : {male_share, under45_share, comorbid_share})
        if (!(s >= 0.0 && s <= 1.0)) bad("shares must lie in [0,1]");
    if (!(share_jitter >= 0.0)) bad("share_jitter must be >= 0");
    for (double v : {base, slope, drift, amplitude})
        if (!std::isfinite(v)) bad("trend parameters must be finite");
    if (!data::parse_iso_date(start_date)) bad("start_date '" + start_date + "' is not YYYY-MM-DD");
}

data::Dataset generate(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const auto start = *data::parse_iso_date(spec.start_date);

    std::vector<data::TimeSeriesRecord> records;
    records.reserve(spec.length);
    for (std::size_t i = 0; i < spec.length; ++i) {
        const double t = static_cast<double>(i);
        // fixed draw order keeps series comparable across noise settings
        const double u_noise = unit_uniform(rng);
        const double u_sex = unit_uniform(rng);
        const double u_age = unit_uniform(rng);
        const double u_comorbid = unit_uniform(rng);

        const double level = spec.base + spec.slope * t + spec.drift * t * t +
                             spec.amplitude * std::sin(2.0 * std::numbers::pi * t / spec.period);
        const std::int64_t core = std::max<std::int64_t>(0, std::llround(level));

        data::TimeSeriesRecord r;
        r.day_index = static_cast<std::int64_t>(i) + 1;
        r.date = format_date(start + std::chrono::days{static_cast<int>(i)});
        r.confirmed = spec.cases_per_death * core + spec.case_offset;
        r.deaths = std::clamp<std::int64_t>(core + std::llround(spec.noise * (2.0 * u_noise - 1.0)), 0,
                                            r.confirmed);
        r.male = split_share(r.confirmed, spec.male_share, spec.share_jitter, u_sex);
        r.female = r.confirmed - r.male;
        r.under_45 = split_share(r.confirmed, spec.under45_share, spec.share_jitter, u_age);
        r.over_45 = r.confirmed - r.under_45;
        r.comorbid = split_share(r.confirmed, spec.comorbid_share, spec.share_jitter, u_comorbid);
        records.push_back(std::move(r));
    }
    return data::Dataset(std::move(records), "synthetic seed " + std::to_string(spec.seed));
}

} // namespace epicast::synth
