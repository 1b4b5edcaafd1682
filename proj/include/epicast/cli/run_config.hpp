#pragma once

#include "epicast/synth.hpp"
#include "epicast/text_io.hpp"
#include "epicast/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace epicast::cli {

/// Everything a reproducible run needs. Serialized as flat `key=value` text:
///
///   data                 CSV path
///   train / validation / test   day ranges "a-b"; "none" disables validation/test
///   features             MLP inputs, comma separated
///   target               response column
///   regression_features  regression inputs; one column when regression_degree > 1
///   regression_degree    1 = multivariate linear, k > 1 = polynomial in one column
///   ridge                optional L2 penalty for the regression (0 = plain OLS)
///   hidden               hidden-layer candidates, `;` between candidates and `,`
///                        between layers, e.g. "4;8;12" or "8,4;6"
///   learning_rate, epochs, seed, init_low, init_high
///   adjustment           true/false, estimate adjustment factors on validation
///   out                  output directory
struct RunConfig {
    std::filesystem::path data_path;
    data::SplitSpec split;
    std::vector<std::string> features = data::kDefaultFeatures;
    std::string target{data::kDefaultTarget};
    // female and over_45 are complements of male and under_45, so the full
    // default feature list is collinear with the intercept.
    std::vector<std::string> regression_features = {"confirmed", "male", "under_45", "comorbid"};
    int regression_degree = 1;
    double ridge = 0.0;
    std::vector<std::vector<std::size_t>> hidden_candidates = {{4}, {8}, {12}};
    double learning_rate = 0.3;
    std::size_t epochs = 1000;
    std::uint64_t seed = 42;
    double init_low = 0.0;
    double init_high = 1.0;
    bool adjustment = true;
    std::filesystem::path out_dir = "run";

    /// Static checks that do not need the data (InvalidConfig, UnknownColumn, ...).
    void validate() const;

    /// Full layer_sizes for every candidate: {features, hidden..., 1}.
    [[nodiscard]] std::vector<std::vector<std::size_t>> candidate_layer_sizes() const;

    [[nodiscard]] text::KeyValues to_key_values() const;
    /// Applies the keys present in `kv` on top of `*this`. Unknown keys are rejected.
    void apply(const text::KeyValues& kv);
};

std::vector<std::vector<std::size_t>> parse_hidden(std::string_view s);
std::string format_hidden(const std::vector<std::vector<std::size_t>>& hidden);

text::KeyValues synth_to_key_values(const synth::SyntheticSpec& spec);
/// Keys are the SyntheticSpec field names.
void apply_synth(synth::SyntheticSpec& spec, const text::KeyValues& kv);

} // namespace epicast::cli
