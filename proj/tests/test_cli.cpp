#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "driver/experiments.hpp"

using namespace restriction_lab;
using namespace restriction_lab::driver;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("restriction_lab_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir.parent_path());
    return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
    const auto path = scratch(name + ".json");
    std::ofstream(path) << text;
    return path;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(RESTRICTION_LAB_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome run_text(const std::string& text) {
    const auto config = parse_config_text(text);
    return run_experiment(config);
}

}  // namespace

TEST(Config, RejectsMalformedJson) {
    EXPECT_THROW(parse_config_text("{\"experiment\": \"discrete\","), config_error);
    EXPECT_THROW(parse_config_text("[1, 2]"), config_error);
    EXPECT_THROW(parse_config_text("{\"parameters\": {}}"), config_error);
}

TEST(Config, RejectsUnknownKeys) {
    EXPECT_THROW(parse_config_text(R"({"experiment": "discrete", "sed": 3})"), config_error);
    EXPECT_THROW(run_text(R"({"experiment": "discrete", "parameters": {"N": 25, "radius": 3}})"), config_error);
    // keys of another source are unknown too
    EXPECT_THROW(run_text(R"({"experiment": "discrete", "parameters": {"source": "lattice", "K": 3}})"), config_error);
    EXPECT_THROW(run_text(R"({"experiment": "no-such-experiment"})"), config_error);
}

TEST(Config, RejectsBadTypesAndRanges) {
    EXPECT_THROW(run_text(R"({"experiment": "discrete", "parameters": {"N": "25"}})"), config_error);
    EXPECT_THROW(run_text(R"({"experiment": "discrete", "parameters": {"N": 2.5}})"), config_error);
    EXPECT_THROW(run_text(R"({"experiment": "discrete", "parameters": {"N": -1}})"), config_error);
    EXPECT_THROW(run_text(R"({"experiment": "discrete", "parameters": {"route": "fast"}})"), config_error);
    EXPECT_THROW(run_text(R"({"experiment": "ts-sweep", "seed": 1, "parameters": {"s": [3]}})"), config_error);
    EXPECT_THROW(parse_config_text(R"({"experiment": "discrete", "seed": -4})"), config_error);
}

TEST(Config, SeedMandatoryForRandomizedExperiments) {
    EXPECT_THROW(run_text(R"({"experiment": "discrete", "parameters": {"source": "random-separated"}})"), config_error);
    EXPECT_THROW(run_text(R"({"experiment": "discrete", "parameters": {"coefficients": "random"}})"), config_error);
    EXPECT_THROW(run_text(R"({"experiment": "ts-sweep"})"), config_error);
    EXPECT_THROW(run_text(R"({"experiment": "multiplier"})"), config_error);
    EXPECT_THROW(run_text(R"({"experiment": "extension"})"), config_error);
    EXPECT_NO_THROW(run_text(R"({"experiment": "discrete", "parameters": {"N": 25}})"));
}

TEST(Config, HashIgnoresFormattingOnly) {
    const auto a = parse_config_text(R"({"experiment":"discrete","parameters":{"N":25}})");
    const auto b = parse_config_text("{ \"parameters\" : { \"N\" : 25 },\n  \"experiment\" : \"discrete\" }");
    const auto c = parse_config_text(R"({"experiment":"discrete","parameters":{"N":50}})");
    EXPECT_EQ(a.hash, b.hash);
    EXPECT_NE(a.hash, c.hash);
}

TEST(Artifacts, HeaderAndParameterEcho) {
    const auto config = parse_config_text(R"({"experiment": "discrete", "parameters": {"N": 25}})");
    const auto outcome = run_experiment(config);
    const auto files = render(outcome, {config.experiment, config.hash});
    ASSERT_FALSE(files.empty());
    const auto& csv = files.front().content;
    EXPECT_EQ(csv.rfind("# restriction-lab " + std::string(version) + " experiment=discrete config=" + config.hash, 0), 0u);
    std::istringstream lines(body_of(csv));
    std::string header, row;
    std::getline(lines, header);
    EXPECT_EQ(header.rfind("cfg_experiment,cfg_seed,cfg_source,cfg_N,cfg_coefficients,", 0), 0u) << header;
    int rows = 0;
    while (std::getline(lines, row)) {
        EXPECT_EQ(row.rfind("discrete,none,lattice,25,unit,", 0), 0u) << row;
        ++rows;
    }
    EXPECT_EQ(rows, 1);
}

TEST(Discrete, LatticeLedgerRow) {
    const auto outcome = run_text(R"({"experiment": "discrete", "parameters": {"N": 25}})");
    const auto& t = outcome.tables.front();
    const auto& row = t.rows.front();
    auto col = [&](const std::string& name) {
        return row[std::find(t.columns.begin(), t.columns.end(), name) - t.columns.begin()];
    };
    EXPECT_EQ(col("points"), "12");
    EXPECT_EQ(col("M"), "2");
    EXPECT_GT(std::stod(col("ratio")), 0.0);
}

TEST(Cli, RunWritesLedgerAndExitsZero) {
    const auto cfg = write_config("ok", R"({"experiment": "bessel-check", "parameters": {"nu": [1, 5], "density": 16}})");
    const auto out = scratch("ok_out");
    EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + out.string() + " --threads 1"), 0);
    const auto csv = slurp(out / "bessel_envelope.csv");
    EXPECT_EQ(csv.rfind("# restriction-lab ", 0), 0u);
}

TEST(Cli, MalformedConfigExitsTwoWithoutOutput) {
    const auto out = scratch("bad_out");
    const auto bad = write_config("bad", R"({"experiment": "discrete", "parameters": {"N": 25)");
    EXPECT_EQ(cli("run --config " + bad.string() + " --out " + out.string()), 2);
    EXPECT_FALSE(fs::exists(out));
    const auto unknown = write_config("unknown", R"({"experiment": "discrete", "parameters": {"M": 2}})");
    EXPECT_EQ(cli("run --config " + unknown.string() + " --out " + out.string()), 2);
    const auto seedless = write_config("seedless", R"({"experiment": "ts-sweep"})");
    EXPECT_EQ(cli("run --config " + seedless.string() + " --out " + out.string()), 2);
    EXPECT_EQ(cli("run --config " + (out / "missing.json").string() + " --out " + out.string()), 2);
    EXPECT_EQ(cli("run --out " + out.string()), 2);
    EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, ResolutionErrorExitsThree) {
    const auto out = scratch("coarse_out");
    const auto cfg = write_config("coarse", R"({"experiment": "discrete", "parameters": {"N": 25, "step": 0.25}})");
    EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + out.string()), 3);
    EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, InvariantViolationExitsFourWithEvidence) {
    // A fitted decay exponent never matches the formula exactly.
    const auto out = scratch("violation_out");
    const auto cfg = write_config("violation", R"({"experiment": "lemma-r3", "parameters": {"exponent_tolerance": 0}})");
    EXPECT_EQ(cli("run --config " + cfg.string() + " --out " + out.string()), 4);
    EXPECT_TRUE(fs::exists(out / "lemma_summary.csv"));
}

TEST(Cli, RerunsAreByteIdentical) {
    const auto cfg = write_config("det", R"({"experiment": "discrete", "seed": 11,
        "parameters": {"source": "random-separated", "R": 100, "K": 5, "coefficients": "random", "draws": 3,
                       "ascent_iterations": 5}})");
    const auto a = scratch("det_a"), b = scratch("det_b");
    ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + a.string()), 0);
    ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + b.string() + " --threads 1"), 0);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
        ++files;
    }
    EXPECT_EQ(files, 2);
}
