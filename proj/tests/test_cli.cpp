#include "epicast/cli/commands.hpp"
#include "epicast/text_io.hpp"

#include "expect_error.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace epicast;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "epicast");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("epicast_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = text::read_file(e.path());
    return files;
}

std::string fixture(const char* name) { return std::string(EPICAST_FIXTURE_DIR) + "/" + name; }

// Synthetic data plus a fast training config shared by the pipeline tests.
fs::path prepare(const std::string& name) {
    const auto dir = scratch(name);
    REQUIRE(invoke({"synth", "--out", (dir / "data").string()}).code == 0);
    text::write_file(dir / "fast.cfg", "data=" + (dir / "data" / cli::kSynthFile).string() +
                                           "\nepochs=200\nhidden=3;5\n");
    return dir;
}

Result pipeline(const fs::path& dir, const fs::path& out) {
    const auto cfg = (dir / "fast.cfg").string();
    for (const char* cmd : {"train", "evaluate", "forecast", "plotdata"}) {
        auto r = invoke({cmd, "--config", cfg, "--out", out.string()});
        if (r.code != 0) return r;
    }
    return {0, "", ""};
}

} // namespace

TEST_CASE("help exits 0") {
    const auto r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("train") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    auto r = invoke({});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error[Usage]", 0) == 0);
    r = invoke({"train", "--no-such-flag"});
    CHECK(r.code == 1);
}

TEST_CASE("fixture evaluation reproduces the published validation metrics") {
    const auto dir = scratch("fixture_eval");
    const auto r = invoke({"evaluate", "--fixture", fixture("table2_fixture.csv"), "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto csv = text::read_file(dir / cli::kEvaluationCsvFile);
    CHECK(csv.find("regression,validation,2.8,") != std::string::npos);
    CHECK(r.out.find("| 2.800 | 0.447 |") != std::string::npos);
    CHECK(r.out.find("| 4.400 | 0.520 |") != std::string::npos);
}

TEST_CASE("fixture forecast reproduces the adjusted summary") {
    const auto dir = scratch("fixture_forecast");
    const auto r = invoke({"forecast", "--fixture", fixture("table3_fixture.csv"), "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto csv = text::read_file(dir / cli::kForecastSummaryCsvFile);
    const auto at = csv.find("ann_adjusted,test,2,");
    REQUIRE(at != std::string::npos);
    const auto mape = text::split(csv.substr(at, csv.find('\n', at) - at), ',')[3];
    CHECK(std::abs(text::parse_double(mape, "mape") - 0.28) <= 0.0005);
}

TEST_CASE("full pipeline writes every artifact") {
    const auto dir = prepare("pipeline");
    const auto out = dir / "run";
    const auto r = pipeline(dir, out);
    INFO(r.err);
    REQUIRE(r.code == 0);
    for (const char* f : {cli::kRunConfigFile, cli::kMlpModelFile, cli::kRegressionModelFile, cli::kNormalizationFile,
                          cli::kTrainReportFile, cli::kSelectionFile, cli::kTrainSummaryFile, cli::kEvaluationCsvFile,
                          cli::kEvaluationMdFile, cli::kForecastsFile, cli::kLongHorizonFile, cli::kForecastFile,
                          cli::kAdjustmentFile, cli::kForecastSummaryCsvFile, cli::kForecastSummaryMdFile, "fig2.csv",
                          "fig3.csv", "fig6.csv"})
        CHECK(fs::exists(out / f));

    const auto eval = text::read_file(out / cli::kEvaluationCsvFile);
    for (const char* row : {"regression,fitting,", "regression,validation,", "regression,test,", "ann,fitting,",
                            "ann,validation,", "ann,test,"})
        CHECK(eval.find(row) != std::string::npos);

    const auto report = text::read_file(out / cli::kTrainReportFile);
    CHECK(std::count(report.begin(), report.end(), '\n') == 201);
    const auto selection = text::read_file(out / cli::kSelectionFile);
    CHECK(std::count(selection.begin(), selection.end(), '\n') == 3);

    const auto fig2 = text::read_file(out / "fig2.csv");
    CHECK(std::count(fig2.begin(), fig2.end(), '\n') == 62);
    const auto fig6 = text::read_file(out / "fig6.csv");
    CHECK(std::count(fig6.begin(), fig6.end(), '\n') == 16);
}

TEST_CASE("identical configs give byte-identical output trees") {
    const auto dir = prepare("determinism");
    REQUIRE(pipeline(dir, dir / "a").code == 0);
    REQUIRE(pipeline(dir, dir / "b").code == 0);
    const auto a = tree(dir / "a");
    const auto b = tree(dir / "b");
    CHECK(a.size() == 18);
    CHECK(a == b);
}

TEST_CASE("disabled adjustment leaves forecasts unchanged") {
    const auto dir = prepare("no_adjust");
    const auto out = (dir / "run").string();
    const auto cfg = (dir / "fast.cfg").string();
    REQUIRE(invoke({"train", "--config", cfg, "--out", out}).code == 0);
    REQUIRE(invoke({"forecast", "--out", out, "--adjust", "false"}).code == 0);
    CHECK(text::read_file(dir / "run" / cli::kAdjustmentFile).find("adjustment.mode=none") != std::string::npos);
    std::istringstream rows(text::read_file(dir / "run" / cli::kForecastFile));
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
        const auto cells = text::split(line, ',');
        REQUIRE(cells[3] == cells[4]);
    }
}

TEST_CASE("adjustment without validation is rejected") {
    const auto dir = prepare("no_validation");
    const auto cfg = (dir / "fast.cfg").string();
    const auto out = (dir / "run").string();
    const auto r = invoke({"train", "--config", cfg, "--out", out, "--validation", "none", "--hidden", "4",
                        "--test", "47-61"});
    REQUIRE(r.code == 0);
    const auto f = invoke({"forecast", "--out", out});
    CHECK(f.code == 1);
    CHECK(f.err.rfind("error[EmptyInput]", 0) == 0);

    const auto multi = invoke({"train", "--config", cfg, "--out", out, "--validation", "none"});
    CHECK(multi.code == 1);
    CHECK(multi.err.rfind("error[EmptyInput]", 0) == 0);
}

TEST_CASE("data and config errors exit 1 with a coded message") {
    const auto dir = scratch("errors");
    auto r = invoke({"train", "--data", (dir / "missing.csv").string(), "--out", (dir / "run").string()});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error[IoError]", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

    text::write_file(dir / "bad.cfg", "lerning_rate=0.3\n");
    r = invoke({"train", "--config", (dir / "bad.cfg").string()});
    CHECK(r.err.rfind("error[InvalidConfig]", 0) == 0);

    text::write_file(dir / "bad.csv", "day_index,date,confirmed\n1,2020-01-01,4\n");
    r = invoke({"train", "--data", (dir / "bad.csv").string(), "--out", (dir / "run").string()});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error[MissingColumn]", 0) == 0);

    r = invoke({"evaluate", "--out", (dir / "never_trained").string()});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error[IoError]", 0) == 0);

    r = invoke({"train", "--features", "confirmed,deaths", "--data", "x.csv"});
    CHECK(r.err.rfind("error[TargetInFeatures]", 0) == 0);

    r = invoke({"train", "--eta", "fast"});
    CHECK(r.err.rfind("error[ParseError]", 0) == 0);
}

TEST_CASE("evaluate rejects a feature set that differs from training") {
    const auto dir = prepare("shape");
    const auto out = (dir / "run").string();
    REQUIRE(invoke({"train", "--config", (dir / "fast.cfg").string(), "--out", out}).code == 0);
    const auto r = invoke({"evaluate", "--out", out, "--features", "confirmed,male"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error[ShapeMismatch]", 0) == 0);
}

TEST_CASE("polynomial regression through the CLI") {
    const auto dir = prepare("poly");
    const auto out = (dir / "run").string();
    const auto r = invoke({"train", "--config", (dir / "fast.cfg").string(), "--out", out, "--regression-features",
                        "confirmed", "--degree", "2", "--hidden", "3"});
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(text::read_file(dir / "run" / cli::kRegressionModelFile).find("confirmed^2") != std::string::npos);
    CHECK(invoke({"evaluate", "--out", out}).code == 0);
}

TEST_CASE("the installed binary reports exit codes") {
    const std::string bin = EPICAST_CLI_PATH;
    const auto status = [](const std::string& cmd) {
        const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    CHECK(status(bin + " --help") == 0);
    CHECK(status(bin + " frobnicate") == 1);
    CHECK(status(bin + " evaluate --fixture " + fixture("table2_fixture.csv") + " --out " +
                 scratch("binary").string()) == 0);
    CHECK(status(bin + " evaluate --fixture /nonexistent.csv") == 1);
}
