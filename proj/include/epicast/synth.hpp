#pragma once

#include "epicast/timeseries.hpp"

#include <cstdint>
#include <string>

namespace epicast::synth {

/// Seeded generator for hospital-day series.
///
/// A latent daily death level
///     level(t) = base + slope*t + drift*t^2 + amplitude*sin(2*pi*t/period),  t = day - 1
/// is rounded to an integer core. Confirmed cases are exactly
/// cases_per_death * core + case_offset, and deaths are core plus a uniform
/// integer perturbation of at most `noise`. With noise == 0 deaths are an
/// exact affine function of confirmed. Demographic splits draw their share
/// around the configured value (+/- share_jitter) independently of `noise`,
/// and always sum to confirmed.
struct SyntheticSpec {
    std::size_t length = 61;
    std::string start_date = "2020-05-28";
    double base = 2.0;
    double slope = 0.05;
    double drift = 0.0015;
    double amplitude = 1.0;
    double period = 14.0;
    double noise = 1.0;
    std::int64_t cases_per_death = 8;
    std::int64_t case_offset = 5;
    double male_share = 0.55;
    double under45_share = 0.6;
    double comorbid_share = 0.3;
    double share_jitter = 0.1;
    std::uint64_t seed = 20200528;

    /// Throws InvalidConfig.
    void validate() const;
};

data::Dataset generate(const SyntheticSpec& spec);

} // namespace epicast::synth
