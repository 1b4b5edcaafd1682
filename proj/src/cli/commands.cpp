#include "epicast/cli/commands.hpp"

#include "epicast/adjustment.hpp"
#include "epicast/error.hpp"
#include "epicast/evaluation.hpp"
#include "epicast/mlp.hpp"
#include "epicast/regression.hpp"
#include "epicast/text_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace epicast::cli {

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::size_t index(std::string_view name, const fs::path& source) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            fail(ErrorCode::MissingColumn, source.string() + ": missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    }

    [[nodiscard]] std::vector<double> numbers(std::string_view name, const fs::path& source) const {
        const auto c = index(name, source);
        std::vector<double> out;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            try {
                out.push_back(text::parse_double(rows[r][c], name));
            } catch (const Error&) {
                fail(ErrorCode::NonNumericCell, source.string() + ": row " + std::to_string(r + 1) +
                                                    ", column '" + std::string(name) + "': '" +
                                                    rows[r][c] + "'");
            }
        }
        return out;
    }
};

Table read_table(const fs::path& path) {
    if (!fs::exists(path)) fail(ErrorCode::IoError, "missing input file '" + path.string() + "'");
    std::istringstream in(text::read_file(path));
    Table t;
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::ParseError, path.string() + ": empty file");
    t.header = text::split_csv_line(line);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        ++row;
        auto cells = text::split_csv_line(line);
        if (cells.size() != t.header.size())
            fail(ErrorCode::MalformedRow, path.string() + ": row " + std::to_string(row) + " has " +
                                              std::to_string(cells.size()) + " cells, header has " +
                                              std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

data::Dataset load_dataset(const RunConfig& cfg, std::ostream& log) {
    if (cfg.data_path.empty()) fail(ErrorCode::InvalidConfig, "no data path configured (key 'data')");
    if (!fs::exists(cfg.data_path)) fail(ErrorCode::IoError, "data file not found: '" + cfg.data_path.string() + "'");
    std::ifstream in(cfg.data_path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open data file '" + cfg.data_path.string() + "'");
    auto ds = data::parse_csv(in, cfg.data_path.filename().string());
    for (const auto& w : data::consistency_warnings(ds)) log << "warning: " << w << '\n';
    return ds;
}

std::vector<double> to_doubles(std::span<const std::int64_t> v) {
    return {v.begin(), v.end()};
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ',';
        out += parts[i];
    }
    return out;
}

std::string sizes_to_string(std::span<const std::size_t> sizes) {
    std::string out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(sizes[i]);
    }
    return out;
}

void write_in(const fs::path& dir, const char* name, std::string_view contents) {
    text::write_file(dir / name, contents);
}

struct Normalization {
    std::vector<std::string> features;
    data::NormalizationParams feature_params;
    std::string target;
    data::FeatureBounds target_bounds;
};

std::string serialize(const Normalization& n) {
    text::KeyValues kv;
    kv["features"] = join(n.features);
    kv["target"] = n.target;
    for (std::size_t i = 0; i < n.features.size(); ++i) {
        kv["feature." + n.features[i] + ".min"] = text::format_double(n.feature_params.bounds[i].min);
        kv["feature." + n.features[i] + ".max"] = text::format_double(n.feature_params.bounds[i].max);
    }
    kv["target.min"] = text::format_double(n.target_bounds.min);
    kv["target.max"] = text::format_double(n.target_bounds.max);
    return text::format_key_values(kv);
}

Normalization deserialize_normalization(std::string_view body) {
    const auto kv = text::parse_key_values(body);
    const auto get = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) fail(ErrorCode::ParseError, "normalization: missing key '" + key + "'");
        return it->second;
    };
    Normalization n;
    n.features = text::split(get("features"), ',');
    n.target = get("target");
    for (const auto& f : n.features)
        n.feature_params.bounds.push_back({text::parse_double(get("feature." + f + ".min"), f),
                                           text::parse_double(get("feature." + f + ".max"), f)});
    n.target_bounds = {text::parse_double(get("target.min"), "target.min"),
                       text::parse_double(get("target.max"), "target.max")};
    return n;
}

std::vector<std::string> expected_regression_names(const RunConfig& cfg) {
    if (cfg.regression_degree <= 1) return cfg.regression_features;
    std::vector<std::string> names;
    for (int k = 1; k <= cfg.regression_degree; ++k)
        names.push_back(cfg.regression_features.front() + "^" + std::to_string(k));
    return names;
}

data::SupervisedMatrix regression_design(const RunConfig& cfg, const data::Dataset& ds) {
    auto m = data::make_supervised(ds, cfg.regression_features, cfg.target);
    if (cfg.regression_degree > 1) m = regression::expand_polynomial(m, cfg.regression_degree);
    return m;
}

data::SupervisedMatrix normalized(const data::SupervisedMatrix& raw, const Normalization& n, std::size_t& clipped) {
    data::SupervisedMatrix out = raw;
    auto x = data::normalize(raw.x, n.feature_params);
    auto y = data::normalize(raw.y, n.target_bounds);
    out.x = std::move(x.values);
    out.y = std::move(y.values);
    clipped += x.clipped + y.clipped;
    return out;
}

struct Stage {
    eval::Stage stage;
    data::Dataset ds;
};

std::vector<Stage> stages_of(const data::Splits& s) {
    std::vector<Stage> out{{eval::Stage::Fitting, s.train}};
    if (s.validation) out.push_back({eval::Stage::Validation, *s.validation});
    if (s.test) out.push_back({eval::Stage::Test, *s.test});
    return out;
}

struct TrainedModels {
    mlp::MLPModel network;
    regression::RegressionModel regression;
    Normalization norm;
};

TrainedModels load_models(const RunConfig& cfg) {
    const auto& dir = cfg.out_dir;
    for (const char* f : {kMlpModelFile, kRegressionModelFile, kNormalizationFile})
        if (!fs::exists(dir / f))
            fail(ErrorCode::IoError, "missing '" + (dir / f).string() + "'; run 'train' first");
    TrainedModels m{mlp::deserialize_mlp(text::read_file(dir / kMlpModelFile)),
                    regression::deserialize_regression(text::read_file(dir / kRegressionModelFile)),
                    deserialize_normalization(text::read_file(dir / kNormalizationFile))};

    if (m.norm.features != cfg.features || m.network.input_size() != cfg.features.size())
        fail(ErrorCode::ShapeMismatch, "network was trained on features [" + join(m.norm.features) +
                                           "], configuration requests [" + join(cfg.features) + "]");
    if (m.norm.target != cfg.target)
        fail(ErrorCode::ShapeMismatch, "models were trained for target '" + m.norm.target +
                                           "', configuration requests '" + cfg.target + "'");
    const auto reg_names = expected_regression_names(cfg);
    if (m.regression.feature_names != reg_names)
        fail(ErrorCode::ShapeMismatch, "regression was fitted on [" + join(m.regression.feature_names) +
                                           "], configuration requests [" + join(reg_names) + "]");
    return m;
}

std::string format_counts_row(std::int64_t day, std::string_view stage, std::initializer_list<double> values) {
    std::string out = std::to_string(day) + ',' + std::string(stage);
    for (double v : values) out += ',' + text::format_double(v);
    return out + '\n';
}

} // namespace

void cmd_train(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto ds = load_dataset(cfg, log);
    const auto splits = data::split(ds, cfg.split);

    // network
    const auto raw_train = data::make_supervised(splits.train, cfg.features, cfg.target);
    Normalization norm{cfg.features, data::fit_normalizer(raw_train.x), cfg.target,
                       data::fit_normalizer(raw_train.y)};
    std::size_t train_clipped = 0;
    std::size_t validation_clipped = 0;
    const auto train_set = normalized(raw_train, norm, train_clipped);

    mlp::MLPConfig mcfg;
    mcfg.learning_rate = cfg.learning_rate;
    mcfg.max_epochs = cfg.epochs;
    mcfg.seed = cfg.seed;
    mcfg.init_low = cfg.init_low;
    mcfg.init_high = cfg.init_high;
    const auto candidates = cfg.candidate_layer_sizes();

    mlp::Selection sel;
    if (splits.validation) {
        const auto val_set = normalized(data::make_supervised(*splits.validation, cfg.features, cfg.target), norm,
                                        validation_clipped);
        sel = mlp::select_architecture(candidates, train_set, val_set, mcfg);
    } else {
        if (candidates.size() != 1)
            fail(ErrorCode::EmptyInput, "architecture selection over " + std::to_string(candidates.size()) +
                                            " candidates needs a validation range");
        mcfg.layer_sizes = candidates.front();
        auto result = mlp::train(mlp::init_weights(mcfg), train_set, mcfg);
        sel.candidates.push_back({mcfg.layer_sizes, result.model.weight_count(), result.report, 0.0});
        sel.best = std::move(result.model);
    }
    const auto& best = sel.candidates[sel.best_index];

    // regression baseline
    const auto reg = regression::fit_ols(regression_design(cfg, splits.train), cfg.ridge);

    const auto& dir = cfg.out_dir;
    fs::create_directories(dir);
    auto saved = cfg.to_key_values();
    saved.erase("out");
    write_in(dir, kRunConfigFile, text::format_key_values(saved));
    write_in(dir, kMlpModelFile, mlp::serialize(sel.best));
    write_in(dir, kRegressionModelFile, regression::serialize(reg));
    write_in(dir, kNormalizationFile, serialize(norm));

    std::string report = "epoch,train_mse\n";
    for (std::size_t e = 0; e < best.report.train_mse_per_epoch.size(); ++e)
        report += std::to_string(e + 1) + ',' + text::format_double(best.report.train_mse_per_epoch[e]) + '\n';
    write_in(dir, kTrainReportFile, report);

    std::string selection = "candidate,layers,weights,final_train_mse,validation_mse,selected\n";
    for (std::size_t i = 0; i < sel.candidates.size(); ++i) {
        const auto& c = sel.candidates[i];
        selection += std::to_string(i + 1) + ',' + sizes_to_string(c.layer_sizes) + ',' +
                     std::to_string(c.weight_count) + ',' + text::format_double(c.report.final_train_mse) + ',' +
                     (c.report.final_validation_mse ? text::format_double(c.validation_mse) : "") + ',' +
                     (i == sel.best_index ? "1" : "0") + '\n';
    }
    write_in(dir, kSelectionFile, selection);

    text::KeyValues summary;
    summary["mlp.layers"] = sizes_to_string(best.layer_sizes);
    summary["mlp.epochs_run"] = std::to_string(best.report.epochs_run);
    summary["mlp.final_train_mse"] = text::format_double(best.report.final_train_mse);
    summary["mlp.final_validation_mse"] =
        best.report.final_validation_mse ? text::format_double(*best.report.final_validation_mse) : "none";
    summary["mlp.validation_clipped_values"] = std::to_string(validation_clipped);
    summary["regression.features"] = join(reg.feature_names);
    summary["regression.rss"] = text::format_double(reg.rss);
    summary["train.rows"] = std::to_string(splits.train.size());
    summary["validation.rows"] = std::to_string(splits.validation ? splits.validation->size() : 0);
    summary["test.rows"] = std::to_string(splits.test ? splits.test->size() : 0);
    write_in(dir, kTrainSummaryFile, text::format_key_values(summary));

    log << "trained " << sel.candidates.size() << " network candidate(s); selected "
        << sizes_to_string(best.layer_sizes) << " after " << best.report.epochs_run << " epochs\n"
        << "network train mse (normalized) " << text::format_double(best.report.final_train_mse) << '\n'
        << "regression rss " << text::format_double(reg.rss) << '\n'
        << "wrote " << dir.string() << '\n';
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto models = load_models(cfg);
    const auto ds = load_dataset(cfg, log);
    const auto splits = data::split(ds, cfg.split);
    const auto none = adjust::AdjustmentFactors::none(models.norm.target_bounds);

    std::vector<eval::ReportEntry> reg_entries;
    std::vector<eval::ReportEntry> ann_entries;
    std::string table = "day,stage,actual,ann,regression\n";
    for (const auto& s : stages_of(splits)) {
        const auto raw = data::make_supervised(s.ds, cfg.features, cfg.target);
        const auto ann = to_doubles(adjust::forecast_series(models.network, raw.x, models.norm.feature_params,
                                                            models.norm.target_bounds, none));
        const auto reg = to_doubles(adjust::forecast_series(models.regression, regression_design(cfg, s.ds).x));
        for (std::size_t r = 0; r < raw.y.size(); ++r)
            table += format_counts_row(raw.days[r], eval::to_string(s.stage), {raw.y[r], ann[r], reg[r]});
        reg_entries.push_back({"regression", s.stage, raw.y, reg});
        ann_entries.push_back({"ann", s.stage, raw.y, ann});
    }
    auto entries = reg_entries;
    entries.insert(entries.end(), ann_entries.begin(), ann_entries.end());
    const auto report = eval::compare_report(entries);

    const auto& dir = cfg.out_dir;
    write_in(dir, kEvaluationCsvFile, eval::to_csv(report));
    write_in(dir, kEvaluationMdFile, eval::to_markdown(report));
    write_in(dir, kForecastsFile, table);

    const auto find = [&](std::string_view model, eval::Stage st) -> const eval::ReportRow* {
        for (const auto& r : report.rows)
            if (r.model == model && r.stage == st) return &r;
        return nullptr;
    };
    if (const auto* v = find("ann", eval::Stage::Validation), *t = find("ann", eval::Stage::Test); v && t) {
        text::KeyValues kv;
        kv["ann.validation_mse"] = text::format_double(v->mse);
        kv["ann.test_mse"] = text::format_double(t->mse);
        kv["ann.test_exceeds_validation"] = t->mse > v->mse ? "true" : "false";
        write_in(dir, kLongHorizonFile, text::format_key_values(kv));
    }
    log << eval::to_markdown(report);
}

void cmd_evaluate_fixture(const fs::path& fixture, const fs::path& out_dir, std::ostream& log) {
    const auto t = read_table(fixture);
    const auto actual = t.numbers("actual", fixture);
    const auto report = eval::compare_report({
        {"regression", eval::Stage::Validation, actual, t.numbers("regression", fixture)},
        {"ann", eval::Stage::Validation, actual, t.numbers("ann", fixture)},
    });
    fs::create_directories(out_dir);
    write_in(out_dir, kEvaluationCsvFile, eval::to_csv(report));
    write_in(out_dir, kEvaluationMdFile, eval::to_markdown(report));
    log << eval::to_markdown(report);
}

void cmd_forecast(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto models = load_models(cfg);
    const auto ds = load_dataset(cfg, log);
    const auto splits = data::split(ds, cfg.split);
    const auto& norm = models.norm;
    const auto none = adjust::AdjustmentFactors::none(norm.target_bounds);

    auto factors = none;
    if (cfg.adjustment) {
        if (!splits.validation)
            fail(ErrorCode::EmptyInput, "adjustment needs a validation range to estimate its factors");
        const auto raw = data::make_supervised(*splits.validation, cfg.features, cfg.target);
        const auto plain = adjust::forecast_values(models.network, raw.x, norm.feature_params, norm.target_bounds, none);
        factors = adjust::estimate_adjustment(raw.y, plain, norm.target_bounds);
    }

    std::vector<Stage> horizon;
    if (splits.validation) horizon.push_back({eval::Stage::Validation, *splits.validation});
    if (splits.test) horizon.push_back({eval::Stage::Test, *splits.test});
    if (horizon.empty()) fail(ErrorCode::EmptyInput, "forecast needs a validation or test range");

    std::string table = "day,stage,actual,plain,adjusted\n";
    std::vector<eval::ReportEntry> entries;
    for (const auto& s : horizon) {
        const auto raw = data::make_supervised(s.ds, cfg.features, cfg.target);
        const auto plain = to_doubles(
            adjust::forecast_series(models.network, raw.x, norm.feature_params, norm.target_bounds, none));
        const auto adjusted = to_doubles(
            adjust::forecast_series(models.network, raw.x, norm.feature_params, norm.target_bounds, factors));
        for (std::size_t r = 0; r < raw.y.size(); ++r)
            table += format_counts_row(raw.days[r], eval::to_string(s.stage), {raw.y[r], plain[r], adjusted[r]});
        entries.push_back({"ann_plain", s.stage, raw.y, plain});
        entries.push_back({"ann_adjusted", s.stage, raw.y, adjusted});
    }
    const auto report = eval::compare_report(entries);

    const auto& dir = cfg.out_dir;
    auto adj = text::parse_key_values(adjust::serialize(factors));
    adj["target.min"] = text::format_double(norm.target_bounds.min);
    adj["target.max"] = text::format_double(norm.target_bounds.max);
    write_in(dir, kForecastFile, table);
    write_in(dir, kAdjustmentFile, text::format_key_values(adj));
    write_in(dir, kForecastSummaryCsvFile, eval::to_csv(report));
    write_in(dir, kForecastSummaryMdFile, eval::to_markdown(report));
    log << "adjustment mode " << adjust::to_string(factors.mode) << " (mean deviation "
        << text::format_double(factors.mean_deviation) << ")\n"
        << eval::to_markdown(report);
}

void cmd_forecast_fixture(const fs::path& fixture, const fs::path& out_dir, std::ostream& log) {
    const auto t = read_table(fixture);
    const auto actual = t.numbers("actual", fixture);
    const auto report = eval::compare_report({
        {"ann_plain", eval::Stage::Test, actual, t.numbers("plain", fixture)},
        {"ann_adjusted", eval::Stage::Test, actual, t.numbers("adjusted", fixture)},
    });
    fs::create_directories(out_dir);
    write_in(out_dir, kForecastSummaryCsvFile, eval::to_csv(report));
    write_in(out_dir, kForecastSummaryMdFile, eval::to_markdown(report));
    log << eval::to_markdown(report);
}

void cmd_synth(const synth::SyntheticSpec& spec, const fs::path& out_dir, std::ostream& log) {
    const auto ds = synth::generate(spec);
    fs::create_directories(out_dir);
    write_in(out_dir, kSynthFile, data::emit_csv_text(ds));
    write_in(out_dir, kSynthConfigFile, text::format_key_values(synth_to_key_values(spec)));
    log << "wrote " << ds.size() << " days to " << (out_dir / kSynthFile).string() << '\n';
}

void cmd_plotdata(const RunConfig& cfg, std::ostream& log) {
    const auto ds = load_dataset(cfg, log);
    const auto forecasts = read_table(cfg.out_dir / kForecastsFile);
    const auto day_col = forecasts.index("day", cfg.out_dir / kForecastsFile);
    const auto stage_col = forecasts.index("stage", cfg.out_dir / kForecastsFile);
    const auto actual_col = forecasts.index("actual", cfg.out_dir / kForecastsFile);
    const auto ann_col = forecasts.index("ann", cfg.out_dir / kForecastsFile);
    const auto reg_col = forecasts.index("regression", cfg.out_dir / kForecastsFile);

    std::string fig2 = "day,confirmed,deaths\n";
    for (const auto& r : ds.records())
        fig2 += std::to_string(r.day_index) + ',' + std::to_string(r.confirmed) + ',' + std::to_string(r.deaths) + '\n';

    std::string fig3 = "day,actual,ann_fit\n";
    std::string fig6 = "day,actual,ann,regression\n";
    for (const auto& row : forecasts.rows) {
        if (row[stage_col] == "fitting")
            fig3 += row[day_col] + ',' + row[actual_col] + ',' + row[ann_col] + '\n';
        else
            fig6 += row[day_col] + ',' + row[actual_col] + ',' + row[ann_col] + ',' + row[reg_col] + '\n';
    }
    write_in(cfg.out_dir, "fig2.csv", fig2);
    write_in(cfg.out_dir, "fig3.csv", fig3);
    write_in(cfg.out_dir, "fig6.csv", fig6);
    log << "wrote fig2.csv, fig3.csv, fig6.csv to " << cfg.out_dir.string() << '\n';
}

namespace {

struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr FlagSpec kRunFlags[] = {
    {"--data", "data", "Input CSV"},
    {"--train", "train", "Training day range, e.g. 1-46"},
    {"--validation", "validation", "Validation day range or 'none'"},
    {"--test", "test", "Test day range or 'none'"},
    {"--features", "features", "Network input columns (comma separated)"},
    {"--target", "target", "Response column"},
    {"--regression-features", "regression_features", "Regression input columns"},
    {"--degree", "regression_degree", "Polynomial degree (needs one regression feature when > 1)"},
    {"--ridge", "ridge", "L2 penalty for the regression"},
    {"--hidden", "hidden", "Hidden-layer candidates, e.g. '4;8;12' or '8,4'"},
    {"--eta", "learning_rate", "Learning rate"},
    {"--epochs", "epochs", "Training epochs"},
    {"--init-low", "init_low", "Lower weight-init bound"},
    {"--init-high", "init_high", "Upper weight-init bound"},
    {"--adjust", "adjustment", "Estimate adjustment factors (true/false)"},
};

constexpr FlagSpec kSynthFlags[] = {
    {"--length", "length", "Number of days"},
    {"--start-date", "start_date", "Date of day 1 (YYYY-MM-DD)"},
    {"--base", "base", "Death level on day 1"},
    {"--slope", "slope", "Linear trend per day"},
    {"--drift", "drift", "Quadratic trend per day^2"},
    {"--amplitude", "amplitude", "Oscillation amplitude"},
    {"--period", "period", "Oscillation period in days"},
    {"--noise", "noise", "Maximum integer perturbation of deaths"},
    {"--cases-per-death", "cases_per_death", "Confirmed cases per unit death level"},
    {"--case-offset", "case_offset", "Constant added to confirmed"},
    {"--male-share", "male_share", "Mean male fraction"},
    {"--under45-share", "under45_share", "Mean under-45 fraction"},
    {"--comorbid-share", "comorbid_share", "Mean comorbid fraction"},
    {"--share-jitter", "share_jitter", "Half-width of the share draws"},
};

struct FlagBinding {
    CLI::Option* option;
    std::string key;
    std::shared_ptr<std::string> value;
};

std::vector<FlagBinding> bind_flags(CLI::App& sub, std::span<const FlagSpec> specs) {
    std::vector<FlagBinding> out;
    for (const auto& s : specs) {
        auto value = std::make_shared<std::string>();
        auto* opt = sub.add_option(s.flag, *value, s.help);
        out.push_back({opt, s.key, std::move(value)});
    }
    return out;
}

text::KeyValues collect(const std::vector<FlagBinding>& flags) {
    text::KeyValues kv;
    for (const auto& f : flags)
        if (f.option->count() > 0) kv[f.key] = *f.value;
    return kv;
}

text::KeyValues read_config_file(const std::string& path) {
    if (path.empty()) return {};
    if (!fs::exists(path)) fail(ErrorCode::IoError, "config file not found: '" + path + "'");
    return text::parse_key_values(text::read_file(path));
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"epicast: daily death-count forecasting with regression and backpropagation networks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    std::string seed_flag;
    app.add_option("--config", config_path, "Flat key=value configuration file");
    auto* out_opt = app.add_option("--out", out_flag, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed_flag, "Random seed (u64)");

    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
    auto* train = app.add_subcommand("train", "Fit the regression and train the network");
    auto* evaluate = app.add_subcommand("evaluate", "Score trained models on every split");
    auto* forecast = app.add_subcommand("forecast", "Plain and adjusted network forecasts");
    auto* plotdata = app.add_subcommand("plotdata", "Emit per-figure CSV point files");

    std::string eval_fixture;
    std::string forecast_fixture;
    evaluate->add_option("--fixture", eval_fixture, "Score a CSV with columns actual,ann,regression");
    forecast->add_option("--fixture", forecast_fixture, "Score a CSV with columns actual,plain,adjusted");

    const auto synth_flags = bind_flags(*synth, kSynthFlags);
    std::map<CLI::App*, std::vector<FlagBinding>> run_flags;
    for (auto* sub : {train, evaluate, forecast, plotdata}) run_flags[sub] = bind_flags(*sub, kRunFlags);
    for (auto* sub : {synth, train, evaluate, forecast, plotdata}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error[Usage]: " << e.what() << '\n';
        return 1;
    }

    try {
        const auto file_kv = read_config_file(config_path);
        if (synth->parsed()) {
            synth::SyntheticSpec spec;
            fs::path out_dir = "synthetic";
            auto kv = file_kv;
            if (auto it = kv.find("out"); it != kv.end()) {
                out_dir = it->second;
                kv.erase(it);
            }
            apply_synth(spec, kv);
            apply_synth(spec, collect(synth_flags));
            if (seed_opt->count()) spec.seed = text::parse_uint(seed_flag, "--seed");
            if (out_opt->count()) out_dir = out_flag;
            cmd_synth(spec, out_dir, out);
            return 0;
        }

        CLI::App* sub = train->parsed() ? train : evaluate->parsed() ? evaluate : forecast->parsed() ? forecast : plotdata;
        if (sub == evaluate && !eval_fixture.empty()) {
            cmd_evaluate_fixture(eval_fixture, out_opt->count() ? fs::path(out_flag) : fs::path("fixture_eval"), out);
            return 0;
        }
        if (sub == forecast && !forecast_fixture.empty()) {
            cmd_forecast_fixture(forecast_fixture,
                                 out_opt->count() ? fs::path(out_flag) : fs::path("fixture_forecast"), out);
            return 0;
        }

        RunConfig cfg;
        text::KeyValues flags = collect(run_flags[sub]);
        if (seed_opt->count()) flags["seed"] = seed_flag;
        if (out_opt->count()) flags["out"] = out_flag;

        if (sub != train) {
            // later stages start from the configuration saved by `train`
            fs::path out_dir = cfg.out_dir;
            if (auto it = file_kv.find("out"); it != file_kv.end()) out_dir = it->second;
            if (out_opt->count()) out_dir = out_flag;
            const auto saved = out_dir / kRunConfigFile;
            if (!fs::exists(saved))
                fail(ErrorCode::IoError, "missing '" + saved.string() + "'; run 'train' first");
            cfg.apply(text::parse_key_values(text::read_file(saved)));
            cfg.out_dir = out_dir;
        }
        cfg.apply(file_kv);
        cfg.apply(flags);

        if (sub == train) cmd_train(cfg, out);
        else if (sub == evaluate) cmd_evaluate(cfg, out);
        else if (sub == forecast) cmd_forecast(cfg, out);
        else cmd_plotdata(cfg, out);
        return 0;
    } catch (const Error& e) {
        err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error[Internal]: " << e.what() << '\n';
        return 2;
    }
}

} // namespace epicast::cli
