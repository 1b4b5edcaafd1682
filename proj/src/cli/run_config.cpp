#include "epicast/cli/run_config.hpp"

#include "epicast/error.hpp"

#include <algorithm>
#include <functional>

namespace epicast::cli {

namespace {

std::string join(const std::vector<std::string>& parts, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::optional<data::IndexRange> parse_optional_range(std::string_view s) {
    if (text::trim(s) == "none" || text::trim(s).empty()) return std::nullopt;
    return data::parse_range(s);
}

std::string format_optional_range(const std::optional<data::IndexRange>& r) {
    return r ? data::format_range(*r) : "none";
}

bool parse_bool(std::string_view s, std::string_view key) {
    s = text::trim(s);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    fail(ErrorCode::ParseError, std::string(key) + ": expected true/false, got '" + std::string(s) + "'");
}

std::vector<std::string> parse_names(std::string_view s) {
    if (text::trim(s).empty()) return {};
    return text::split(s, ',');
}

void check_columns(const std::vector<std::string>& names, const std::string& target, std::string_view what) {
    if (names.empty()) fail(ErrorCode::UnknownColumn, std::string(what) + " list is empty");
    for (const auto& n : names) {
        if (!data::column_from_name(n))
            fail(ErrorCode::UnknownColumn, std::string(what) + ": unknown column '" + n + "'");
        if (n == target) fail(ErrorCode::TargetInFeatures, std::string(what) + ": target '" + n + "' listed");
    }
}

using Setter = std::function<void(std::string_view)>;

} // namespace

std::vector<std::vector<std::size_t>> parse_hidden(std::string_view s) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& candidate : text::split(s, ';')) {
        std::vector<std::size_t> layers;
        if (!candidate.empty() && candidate != "none")
            for (const auto& n : text::split(candidate, ','))
                layers.push_back(static_cast<std::size_t>(text::parse_uint(n, "hidden")));
        out.push_back(std::move(layers));
    }
    return out;
}

std::string format_hidden(const std::vector<std::vector<std::size_t>>& hidden) {
    std::string out;
    for (std::size_t i = 0; i < hidden.size(); ++i) {
        if (i) out += ';';
        if (hidden[i].empty()) out += "none";
        for (std::size_t k = 0; k < hidden[i].size(); ++k) {
            if (k) out += ',';
            out += std::to_string(hidden[i][k]);
        }
    }
    return out;
}

void RunConfig::validate() const {
    const auto bad = [](const std::string& msg) { fail(ErrorCode::InvalidConfig, msg); };
    if (!data::column_from_name(target)) fail(ErrorCode::UnknownColumn, "unknown target column '" + target + "'");
    check_columns(features, target, "features");
    check_columns(regression_features, target, "regression_features");
    if (regression_degree < 1) fail(ErrorCode::DegreeZero, "regression_degree must be >= 1");
    if (regression_degree > 1 && regression_features.size() != 1)
        bad("polynomial regression (degree > 1) takes exactly one regression feature");
    if (!(ridge >= 0.0)) bad("ridge must be >= 0");
    if (hidden_candidates.empty()) bad("hidden: at least one candidate required");
    for (const auto& c : hidden_candidates)
        for (auto n : c)
            if (n == 0) bad("hidden: layer sizes must be >= 1");
    if (!(learning_rate > 0.0)) bad("learning_rate must be > 0");
    if (epochs < 1) bad("epochs must be >= 1");
    if (!(init_low < init_high)) bad("init_low must be < init_high");
    if (split.train.width() < 1) fail(ErrorCode::EmptyTrain, "train range is empty");
}

std::vector<std::vector<std::size_t>> RunConfig::candidate_layer_sizes() const {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& hidden : hidden_candidates) {
        std::vector<std::size_t> sizes{features.size()};
        sizes.insert(sizes.end(), hidden.begin(), hidden.end());
        sizes.push_back(1);
        out.push_back(std::move(sizes));
    }
    return out;
}

text::KeyValues RunConfig::to_key_values() const {
    text::KeyValues kv;
    kv["data"] = data_path.generic_string();
    kv["train"] = data::format_range(split.train);
    kv["validation"] = format_optional_range(split.validation);
    kv["test"] = format_optional_range(split.test);
    kv["features"] = join(features);
    kv["target"] = target;
    kv["regression_features"] = join(regression_features);
    kv["regression_degree"] = std::to_string(regression_degree);
    kv["ridge"] = text::format_double(ridge);
    kv["hidden"] = format_hidden(hidden_candidates);
    kv["learning_rate"] = text::format_double(learning_rate);
    kv["epochs"] = std::to_string(epochs);
    kv["seed"] = std::to_string(seed);
    kv["init_low"] = text::format_double(init_low);
    kv["init_high"] = text::format_double(init_high);
    kv["adjustment"] = adjustment ? "true" : "false";
    kv["out"] = out_dir.generic_string();
    return kv;
}

void RunConfig::apply(const text::KeyValues& kv) {
    const std::map<std::string, Setter, std::less<>> setters = {
        {"data", [&](std::string_view v) { data_path = std::string(v); }},
        {"train", [&](std::string_view v) { split.train = data::parse_range(v); }},
        {"validation", [&](std::string_view v) { split.validation = parse_optional_range(v); }},
        {"test", [&](std::string_view v) { split.test = parse_optional_range(v); }},
        {"features", [&](std::string_view v) { features = parse_names(v); }},
        {"target", [&](std::string_view v) { target = std::string(text::trim(v)); }},
        {"regression_features", [&](std::string_view v) { regression_features = parse_names(v); }},
        {"regression_degree",
         [&](std::string_view v) { regression_degree = static_cast<int>(text::parse_int(v, "regression_degree")); }},
        {"ridge", [&](std::string_view v) { ridge = text::parse_double(v, "ridge"); }},
        {"hidden", [&](std::string_view v) { hidden_candidates = parse_hidden(v); }},
        {"learning_rate", [&](std::string_view v) { learning_rate = text::parse_double(v, "learning_rate"); }},
        {"epochs", [&](std::string_view v) { epochs = static_cast<std::size_t>(text::parse_uint(v, "epochs")); }},
        {"seed", [&](std::string_view v) { seed = text::parse_uint(v, "seed"); }},
        {"init_low", [&](std::string_view v) { init_low = text::parse_double(v, "init_low"); }},
        {"init_high", [&](std::string_view v) { init_high = text::parse_double(v, "init_high"); }},
        {"adjustment", [&](std::string_view v) { adjustment = parse_bool(v, "adjustment"); }},
        {"out", [&](std::string_view v) { out_dir = std::string(v); }},
    };
    for (const auto& [key, value] : kv) {
        const auto it = setters.find(key);
        if (it == setters.end()) fail(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
        it->second(value);
    }
}

text::KeyValues synth_to_key_values(const synth::SyntheticSpec& s) {
    text::KeyValues kv;
    kv["length"] = std::to_string(s.length);
    kv["start_date"] = s.start_date;
    kv["base"] = text::format_double(s.base);
    kv["slope"] = text::format_double(s.slope);
    kv["drift"] = text::format_double(s.drift);
    kv["amplitude"] = text::format_double(s.amplitude);
    kv["period"] = text::format_double(s.period);
    kv["noise"] = text::format_double(s.noise);
    kv["cases_per_death"] = std::to_string(s.cases_per_death);
    kv["case_offset"] = std::to_string(s.case_offset);
    kv["male_share"] = text::format_double(s.male_share);
    kv["under45_share"] = text::format_double(s.under45_share);
    kv["comorbid_share"] = text::format_double(s.comorbid_share);
    kv["share_jitter"] = text::format_double(s.share_jitter);
    kv["seed"] = std::to_string(s.seed);
    return kv;
}

void apply_synth(synth::SyntheticSpec& s, const text::KeyValues& kv) {
    const auto num = [](std::string_view v, std::string_view k) { return text::parse_double(v, k); };
    const std::map<std::string, Setter, std::less<>> setters = {
        {"length", [&](std::string_view v) { s.length = static_cast<std::size_t>(text::parse_uint(v, "length")); }},
        {"start_date", [&](std::string_view v) { s.start_date = std::string(text::trim(v)); }},
        {"base", [&](std::string_view v) { s.base = num(v, "base"); }},
        {"slope", [&](std::string_view v) { s.slope = num(v, "slope"); }},
        {"drift", [&](std::string_view v) { s.drift = num(v, "drift"); }},
        {"amplitude", [&](std::string_view v) { s.amplitude = num(v, "amplitude"); }},
        {"period", [&](std::string_view v) { s.period = num(v, "period"); }},
        {"noise", [&](std::string_view v) { s.noise = num(v, "noise"); }},
        {"cases_per_death", [&](std::string_view v) { s.cases_per_death = text::parse_int(v, "cases_per_death"); }},
        {"case_offset", [&](std::string_view v) { s.case_offset = text::parse_int(v, "case_offset"); }},
        {"male_share", [&](std::string_view v) { s.male_share = num(v, "male_share"); }},
        {"under45_share", [&](std::string_view v) { s.under45_share = num(v, "under45_share"); }},
        {"comorbid_share", [&](std::string_view v) { s.comorbid_share = num(v, "comorbid_share"); }},
        {"share_jitter", [&](std::string_view v) { s.share_jitter = num(v, "share_jitter"); }},
        {"seed", [&](std::string_view v) { s.seed = text::parse_uint(v, "seed"); }},
    };
    for (const auto& [key, value] : kv) {
        const auto it = setters.find(key);
        if (it == setters.end()) fail(ErrorCode::InvalidConfig, "unknown synth key '" + key + "'");
        it->second(value);
    }
}

} // namespace epicast::cli
