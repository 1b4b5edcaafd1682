// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include "epicast/adjustment.hpp"
#include "epicast/cli/commands.hpp"
#include "epicast/evaluation.hpp"
#include "epicast/mlp.hpp"
#include "epicast/regression.hpp"
#include "epicast/synth.hpp"
#include "epicast/text_io.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace epicast;

namespace {

struct Outcome {
    enum class Status { Pass, Fail, NotReproducible } status;
    std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::Pass, std::move(d)}; }
Outcome fail_with(std::string d) { return {Outcome::Status::Fail, std::move(d)}; }
Outcome verdict(bool ok, std::string d) { return ok ? pass(std::move(d)) : fail_with(std::move(d)); }

std::string num(double v, int decimals = 6) { return text::format_fixed(v, decimals); }

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "epicast");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
    return code;
}

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = text::read_file(e.path());
    return files;
}

fs::path workdir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "epicast_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

const std::vector<double> kActual{4, 6, 3, 2, 5};

Outcome published_validation_metrics() {
    const Timer t;
    const std::vector<double> reg{2, 5, 1, 1, 3};
    const std::vector<double> ann{2, 4, 1, 1, 2};
    const double reg_mse = eval::mse(kActual, reg);
    const double reg_mape = eval::mape(kActual, reg);
    const double ann_mse = eval::mse(kActual, ann);
    const double ann_mape = eval::mape(kActual, ann);
    const double elapsed = t.seconds();
    // "exactly": the decimal value nearest the computed double
    const bool ok = reg_mse == 2.8 && std::abs(reg_mape - 0.447) <= 0.0005 && std::abs(ann_mse - 4.40) <= 1e-12 &&
                    std::abs(ann_mape - 0.52) <= 0.0005 && elapsed < 1.0;
    return verdict(ok, "regression mse=" + text::format_double(reg_mse) + " mape=" + num(reg_mape, 4) +
                           ", ann mse=" + text::format_double(ann_mse) + " mape=" + num(ann_mape, 4) + ", " +
                           num(elapsed, 4) + " s");
}

Outcome published_adjusted_summary() {
    const std::vector<double> adjusted{2, 5, 2, 2, 3};
    const double m = eval::mse(kActual, adjusted);
    const double p = eval::mape(kActual, adjusted);
    return verdict(m == 2.0 && std::abs(p - 0.28) <= 0.0005,
                   "mse=" + text::format_double(m) + " mape=" + num(p, 4));
}

Outcome fitting_stage_values() {
    return {Outcome::Status::NotReproducible,
            "hospital series and hyperparameters unpublished; covered by criteria 4-9"};
}

Outcome gradient_correctness() {
    const Timer t;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        mlp::MLPConfig cfg;
        cfg.layer_sizes = {1 + rng() % 8};
        const auto hidden = 1 + rng() % 3;
        for (std::size_t h = 0; h < hidden; ++h) cfg.layer_sizes.push_back(1 + rng() % 8);
        cfg.layer_sizes.push_back(1);
        cfg.seed = rng();
        cfg.init_low = -1.0;
        cfg.init_high = 1.0;
        const auto model = mlp::init_weights(cfg);
        std::vector<double> x(model.input_size());
        for (double& v : x) v = u(rng);
        worst = std::max(worst, mlp::gradient_check(model, x, u(rng), 1e-5));
    }
    const double elapsed = t.seconds();
    return verdict(worst <= 1e-4 && elapsed < 10.0,
                   "worst relative error " + text::format_double(worst) + " over 100 nets, " + num(elapsed, 3) + " s");
}

Outcome least_squares_oracle() {
    const Timer t;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        data::SupervisedMatrix m;
        m.x = Matrix(20, 3);
        oracle::Rows rows;
        for (std::size_t r = 0; r < 20; ++r) {
            std::vector<double> row(3);
            for (std::size_t c = 0; c < 3; ++c) m.x(r, c) = row[c] = g(rng);
            rows.push_back(row);
            m.y.push_back(1.0 + 2.0 * row[0] - 3.0 * row[1] + 0.5 * row[2] + g(rng));
        }
        m.feature_names = {"a", "b", "c"};
        const auto model = regression::fit_ols(m);
        const auto ref = oracle::normal_equations(rows, m.y);
        std::vector<double> got{model.intercept};
        got.insert(got.end(), model.coefficients.begin(), model.coefficients.end());
        for (std::size_t k = 0; k < got.size(); ++k)
            worst = std::max(worst, std::abs(got[k] - ref[k]) / std::max(std::abs(ref[k]), 1e-300));
    }
    const double elapsed = t.seconds();
    return verdict(worst <= 1e-8 && elapsed < 1.0,
                   "worst relative coefficient error " + text::format_double(worst) + ", " + num(elapsed, 4) + " s");
}

Outcome convergence() {
    synth::SyntheticSpec spec;
    spec.amplitude = 0.0;
    spec.drift = 0.0;
    spec.noise = 1.0;
    const auto ds = synth::generate(spec);

    // network on normalized data; the MSE ratio is unit-free
    const auto raw = data::make_supervised(ds);
    data::SupervisedMatrix set = raw;
    set.x = data::normalize(raw.x, data::fit_normalizer(raw.x)).values;
    set.y = data::normalize(raw.y, data::fit_normalizer(raw.y)).values;
    mlp::MLPConfig cfg;
    cfg.layer_sizes = {set.x.cols(), 8, 1};
    cfg.learning_rate = 0.3;
    cfg.max_epochs = 1000;
    const auto result = mlp::train(mlp::init_weights(cfg), set, cfg);
    const double baseline = oracle::variance(set.y);
    const double ratio = result.report.final_train_mse / baseline;

    // noiseless variant: deaths = (confirmed - offset) / k exactly
    spec.noise = 0.0;
    const auto clean = data::make_supervised(synth::generate(spec), {"confirmed", "male", "under_45", "comorbid"});
    const auto model = regression::fit_ols(clean);
    double scale = 0.0;
    for (double y : clean.y) scale += y * y;
    const double rel_rss = model.rss / scale;

    return verdict(ratio <= 0.5 && rel_rss <= 1e-16,
                   "mlp train mse / mean-predictor mse = " + num(ratio, 4) + ", ols rss / sum(y^2) = " +
                       text::format_double(rel_rss));
}

struct AdjustmentScenario {
    std::vector<double> actual, plain, adjusted;
};

// Trains the default pipeline on a seeded synthetic series and returns
// plain and adjusted validation forecasts in target units.
AdjustmentScenario pipeline_scenario(std::uint64_t seed) {
    synth::SyntheticSpec spec;
    spec.seed = seed;
    const auto splits = data::split(synth::generate(spec), data::SplitSpec{});
    const auto raw_train = data::make_supervised(splits.train);
    const auto raw_val = data::make_supervised(*splits.validation);
    const auto feat = data::fit_normalizer(raw_train.x);
    const auto target = data::fit_normalizer(raw_train.y);
    data::SupervisedMatrix train_set = raw_train;
    train_set.x = data::normalize(raw_train.x, feat).values;
    train_set.y = data::normalize(raw_train.y, target).values;

    mlp::MLPConfig cfg;
    cfg.layer_sizes = {train_set.x.cols(), 8, 1};
    const auto model = mlp::train(mlp::init_weights(cfg), train_set, cfg).model;
    const auto none = adjust::AdjustmentFactors::none(target);
    AdjustmentScenario s;
    s.actual = raw_val.y;
    s.plain = adjust::forecast_values(model, raw_val.x, feat, target, none);
    const auto f = adjust::estimate_adjustment(s.actual, s.plain, target);
    s.adjusted = adjust::forecast_values(model, raw_val.x, feat, target, f);
    return s;
}

Outcome adjustment_efficacy() {
    std::size_t qualifying = 0, repaired = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = pipeline_scenario(seed);
        bool under = true;
        for (std::size_t i = 0; i < s.actual.size(); ++i) under = under && s.plain[i] < s.actual[i];
        if (!under) continue;
        ++qualifying;
        if (oracle::mae(s.actual, s.adjusted) < oracle::mae(s.actual, s.plain) &&
            oracle::mape(s.actual, s.adjusted) < oracle::mape(s.actual, s.plain))
            ++repaired;
    }

    // the published underestimating forecasts, denormalized from target range [1, 6]
    const data::FeatureBounds bounds{1.0, 6.0};
    const std::vector<double> plain{2, 4, 1, 1, 2};
    const auto f = adjust::estimate_adjustment(kActual, plain, bounds);
    std::vector<double> adjusted;
    for (double p : plain) adjusted.push_back(adjust::apply_forecast(data::normalize(p, bounds), bounds, f));
    const bool table_ok = oracle::mae(kActual, adjusted) < oracle::mae(kActual, plain) &&
                          oracle::mape(kActual, adjusted) < oracle::mape(kActual, plain);
    if (table_ok) ++repaired;
    ++qualifying;

    return verdict(qualifying >= 2 && repaired == qualifying,
                   std::to_string(repaired) + "/" + std::to_string(qualifying) +
                       " underestimating scenarios improved in MAE and MAPE");
}

// Shared by criteria 8 and 9: the bundled synthetic benchmark through the CLI.
bool full_pipeline(const fs::path& out) {
    const auto data = std::string(EPICAST_FIXTURE_DIR) + "/synthetic_61.csv";
    for (const char* cmd : {"train", "evaluate", "forecast", "plotdata"})
        if (run_cli({cmd, "--data", data, "--out", out.string()}) != 0) return false;
    return true;
}

Outcome determinism() {
    const auto a = workdir() / "run_a";
    const auto b = workdir() / "run_b";
    if (!full_pipeline(a) || !full_pipeline(b)) return fail_with("pipeline run failed");
    const auto ta = tree(a);
    const auto tb = tree(b);
    return verdict(!ta.empty() && ta == tb, std::to_string(ta.size()) + " files compared");
}

Outcome long_horizon_degradation() {
    const auto dir = workdir() / "run_a";
    if (!fs::exists(dir / cli::kLongHorizonFile)) return fail_with("long_horizon.txt missing");
    const auto kv = text::parse_key_values(text::read_file(dir / cli::kLongHorizonFile));
    const double val = text::parse_double(kv.at("ann.validation_mse"), "validation");
    const double test = text::parse_double(kv.at("ann.test_mse"), "test");
    return verdict(test > val, "ann validation mse=" + num(val, 3) + ", test mse=" + num(test, 3));
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 published validation metrics", published_validation_metrics},
        {"2 published adjusted summary", published_adjusted_summary},
        {"3 published fitting-stage values", fitting_stage_values},
        {"4 gradient correctness", gradient_correctness},
        {"5 least-squares oracle equivalence", least_squares_oracle},
        {"6 convergence and exact recovery", convergence},
        {"7 adjustment efficacy", adjustment_efficacy},
        {"8 determinism", determinism},
        {"9 long-horizon degradation", long_horizon_degradation},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = fail_with(std::string("exception: ") + e.what());
        }
        const char* tag = o.status == Outcome::Status::Pass   ? "PASS"
                          : o.status == Outcome::Status::Fail ? "FAIL"
                                                              : "N/A ";
        if (o.status == Outcome::Status::Fail) ++failures;
        std::printf("[%s] %s: %s\n", tag, name.c_str(), o.detail.c_str());
    }
    std::printf("%d failing criteria\n", failures);
    return failures == 0 ? 0 : 1;
}
