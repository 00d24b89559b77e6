#include "mlcache/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace mlcache;
using namespace mlcache::cli;

namespace {

const std::string kConfigs = MLCACHE_CONFIG_DIR;
const std::string kBinary = MLCACHE_CLI_PATH;

std::string config(const std::string& name) { return kConfigs + "/" + name; }

std::filesystem::path scratch(const std::string& name) {
    // One directory per test: ctest runs them in parallel.
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    const auto dir = std::filesystem::temp_directory_path() / "mlcache_cli_tests" /
                     (std::string(info->test_suite_name()) + "." + info->name());
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run(const std::string& args, const std::string& out_name = "stdout.txt") {
    const auto out = scratch(out_name);
    const auto err = scratch("stderr.txt");
    const std::string command = "'" + kBinary + "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);)
        out.push_back(line);
    return out;
}

}  // namespace

TEST(CmdTradeoff, CsvCornersAndSamples) {
    TradeoffOptions opt;
    opt.num_files = 2;
    opt.num_users = 2;
    opt.kind = "exact2x2";
    opt.samples = 4;
    const auto result = cmd_tradeoff(opt);
    const auto lines = lines_of(result.output);
    ASSERT_EQ(lines.size(), 1u + 4u + 5u);
    EXPECT_EQ(lines[0], "type,memory,rate,memory_decimal,rate_decimal");
    EXPECT_EQ(lines[1], "corner,0,2,0,2");
    EXPECT_EQ(lines[2], "corner,1/2,1,0.5,1");
    EXPECT_EQ(lines[6], "sample,1/2,1,0.5,1");
    EXPECT_EQ(lines[9], "sample,2,0,2,0");
}

TEST(CmdTradeoff, JsonRecordAndBadKind) {
    TradeoffOptions opt;
    opt.num_files = 3;
    opt.num_users = 2;
    opt.format = "json";
    const auto record = json::parse(cmd_tradeoff(opt).output);
    EXPECT_EQ(record["command"], "tradeoff");
    EXPECT_EQ(record["version"], kToolVersion);
    EXPECT_TRUE(record["config_digest"].is_null());
    EXPECT_EQ(record["outputs"]["corners"][0], json({"0", "2"}));
    opt.kind = "magic";
    EXPECT_THROW(cmd_tradeoff(opt), InputError);
    opt.kind = "exact2x2";
    EXPECT_THROW(cmd_tradeoff(opt), InputError);
}

TEST(CmdAllocate, TwoLibrary) {
    AllocateOptions opt;
    opt.config_path = config("two_libraries.json");
    opt.oracle_step = "1/100";
    const auto result = cmd_allocate(opt);
    EXPECT_EQ(result.exit_code, kSuccess);
    const auto record = json::parse(result.output);
    EXPECT_EQ(record["outputs"]["trace"]["final"], json({"2/5", "3/5"}));
    EXPECT_EQ(record["outputs"]["trace"]["rate"], "1/2");
    EXPECT_EQ(record["outputs"]["oracle"]["agree"], true);
    EXPECT_EQ(record["outputs"]["trace"]["steps"][0]["library"], 1);
}

TEST(CmdAllocate, OracleAgreesOnEveryShippedConfig) {
    for (const auto* name : {"two_libraries.json", "unequal_n.json", "equal_n3.json"}) {
        AllocateOptions opt;
        opt.config_path = config(name);
        opt.oracle_step = "1/20";
        const auto result = cmd_allocate(opt);
        EXPECT_EQ(result.exit_code, kSuccess) << name;
        EXPECT_EQ(json::parse(result.output)["outputs"]["oracle"]["agree"], true) << name;
    }
}

TEST(CmdAllocate, InputErrors) {
    AllocateOptions opt;
    EXPECT_THROW(cmd_allocate(opt), InputError);
    opt.config_path = config("missing.json");
    EXPECT_THROW(cmd_allocate(opt), InputError);
    opt.config_path = config("two_libraries.json");
    opt.kinds = "scheme,scheme,scheme";
    EXPECT_THROW(cmd_allocate(opt), InputError);
    opt.kinds = "auto";
    opt.oracle_step = "-1";
    EXPECT_THROW(cmd_allocate(opt), InputError);
}

TEST(CmdAllocate, InvalidConfigNamesTheInvariant) {
    const auto path = scratch("bad.json");
    std::ofstream(path) << R"({"libraries":[{"num_files":2,"alpha":"1/2"},{"num_files":2,"alpha":"1/3"}],)"
                        << R"("num_users":2,"cache_size":"1"})";
    AllocateOptions opt;
    opt.config_path = path.string();
    try {
        cmd_allocate(opt);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("5/6"), std::string::npos) << e.what();
    }
}

TEST(CmdAllocate, ClampWarning) {
    const auto path = scratch("big_cache.json");
    std::ofstream(path) << R"({"libraries":[{"num_files":2,"alpha":"1/2"},{"num_files":2,"alpha":"1/2"}],)"
                        << R"("num_users":2,"cache_size":"5"})";
    AllocateOptions opt;
    opt.config_path = path.string();
    const auto result = cmd_allocate(opt);
    ASSERT_EQ(result.messages.size(), 1u);
    EXPECT_EQ(result.messages[0].rfind("warning:", 0), 0u);
    EXPECT_EQ(json::parse(result.output)["outputs"]["trace"]["rate"], "0");
}

TEST(CmdSweep, CsvUsesDotDecimal) {
    SweepOptions opt;
    opt.config_path = config("two_libraries.json");
    opt.samples = 10;
    const auto lines = lines_of(cmd_sweep(opt).output);
    ASSERT_EQ(lines.size(), 12u);
    EXPECT_EQ(lines[0], "lambda,rate,lambda_decimal,rate_decimal");
    EXPECT_EQ(lines[1], "0,9/10,0,0.9");
    EXPECT_EQ(lines[5], "2/5,1/2,0.4,0.5");
    EXPECT_EQ(lines[11], "1,6/5,1,1.2");
}

TEST(CmdSweep, SummaryFileAndLibraryCount) {
    SweepOptions opt;
    opt.config_path = config("two_libraries.json");
    opt.summary_path = scratch("summary.json").string();
    cmd_sweep(opt);
    const auto summary = json::parse(slurp(*opt.summary_path));
    EXPECT_EQ(summary["outputs"]["segments"].size(), 5u);
    EXPECT_FALSE(summary["outputs"].contains("samples"));
    opt.config_path = config("equal_n3.json");
    EXPECT_THROW(cmd_sweep(opt), InputError);
}

TEST(CmdConverse, Reports) {
    ConverseOptions opt;
    opt.config_path = config("unequal_n.json");
    const auto record = json::parse(cmd_converse(opt).output);
    EXPECT_EQ(record["outputs"]["concatenated"]["betas"], json({"4/3", "2/3"}));
    EXPECT_EQ(record["outputs"]["concatenated"]["scale"], "3/4");
    EXPECT_EQ(record["outputs"]["gap"]["status"], "open");
    opt.config_path = config("two_libraries.json");
    const auto tight = json::parse(cmd_converse(opt).output);
    EXPECT_EQ(tight["outputs"]["gap"]["status"], "tight");
    EXPECT_EQ(tight["outputs"]["gap"]["gap"], "0");
}

TEST(CmdSimulate, TwoLibraryGreedy) {
    SimulateOptions opt;
    opt.config_path = config("two_libraries.json");
    const auto result = cmd_simulate(opt);
    EXPECT_EQ(result.exit_code, kSuccess);
    const auto v = json::parse(result.output)["outputs"]["verification"];
    EXPECT_EQ(v["demands_checked"], 16);
    EXPECT_EQ(v["errors"], 0);
    EXPECT_EQ(v["base_bits"], 10);
    EXPECT_EQ(v["max_transcript_bits"], 5);
    EXPECT_EQ(v["measured_rate"], "1/2");
}

TEST(CmdSimulate, ExplicitReductionAndDump) {
    SimulateOptions opt;
    opt.config_path = config("unequal_n.json");
    opt.allocation = "explicit";
    opt.explicit_allocation = "0,1/2";
    opt.reduction = true;
    opt.dump_path = scratch("sim.dump").string();
    const auto result = cmd_simulate(opt);
    EXPECT_EQ(result.exit_code, kSuccess);
    const auto out = json::parse(result.output)["outputs"];
    EXPECT_EQ(out["reduction"]["ok"], true);
    EXPECT_EQ(out["reduction"]["demands_checked"], 4);
    std::ifstream dump(*opt.dump_path, std::ios::binary);
    EXPECT_EQ(read_dump(dump).size(), 9u);
    opt.explicit_allocation = "1/4,1/2";
    EXPECT_THROW(cmd_simulate(opt), InputError);
    opt.explicit_allocation = "1/2";
    EXPECT_THROW(cmd_simulate(opt), InputError);
}

TEST(CmdSimulate, BitBudget) {
    SimulateOptions opt;
    opt.config_path = config("two_libraries.json");
    opt.max_base_bits = 5;
    EXPECT_THROW(cmd_simulate(opt), InputError);
}

TEST(RunRecord, DigestIsStableAndOrderInsensitive) {
    const json a = {{"b", 1}, {"a", "x"}};
    const json b = {{"a", "x"}, {"b", 1}};
    EXPECT_EQ(digest(a), digest(b));
    EXPECT_EQ(digest(a).size(), 16u);
    EXPECT_NE(digest(a), digest(json{{"a", "y"}, {"b", 1}}));
}

TEST(RunRecord, RepeatedRunsAreIdentical) {
    SimulateOptions opt;
    opt.config_path = config("equal_n3.json");
    opt.seed = 42;
    EXPECT_EQ(cmd_simulate(opt).output, cmd_simulate(opt).output);
    const auto record = json::parse(cmd_simulate(opt).output);
    EXPECT_EQ(record["seed"], 42);
    EXPECT_FALSE(record["config_digest"].get<std::string>().empty());
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(run("allocate --config '" + config("two_libraries.json") + "'"), 0);
    EXPECT_EQ(json::parse(slurp(scratch("stdout.txt")))["outputs"]["trace"]["rate"], "1/2");
    EXPECT_EQ(run("allocate --config '" + config("two_libraries.json") + "' --oracle 1/100"), 0);
    EXPECT_EQ(run("allocate --config '" + config("missing.json") + "'"), 2);
    EXPECT_EQ(run("allocate"), 2);
    EXPECT_EQ(run("no-such-command"), 2);
    EXPECT_EQ(run("converse --config '" + config("two_libraries.json") + "' --format csv"), 2);
    EXPECT_EQ(run("simulate --config '" + config("two_libraries.json") + "' --max-bits 5"), 2);
    EXPECT_EQ(run("--version"), 0);
}

TEST(Binary, GlobalFlagsOnEitherSide) {
    ASSERT_EQ(run("--config '" + config("two_libraries.json") + "' sweep --samples 5"), 0);
    const auto before = slurp(scratch("stdout.txt"));
    ASSERT_EQ(run("sweep --samples 5 --config '" + config("two_libraries.json") + "'"), 0);
    EXPECT_EQ(slurp(scratch("stdout.txt")), before);
    EXPECT_EQ(lines_of(before)[0], "lambda,rate,lambda_decimal,rate_decimal");
}

TEST(Binary, OutFileAndSeed) {
    const auto out = scratch("sim.json");
    ASSERT_EQ(run("simulate --config '" + config("two_libraries.json") + "' --seed 7 --out '" + out.string() + "'"), 0);
    const auto record = json::parse(slurp(out));
    EXPECT_EQ(record["seed"], 7);
    EXPECT_EQ(record["outputs"]["verification"]["ok"], true);
}

TEST(Binary, TradeoffDefaultsToCsv) {
    ASSERT_EQ(run("tradeoff --n 2 --k 2 --kind exact2x2 --samples 2"), 0);
    EXPECT_EQ(lines_of(slurp(scratch("stdout.txt")))[0], "type,memory,rate,memory_decimal,rate_decimal");
    EXPECT_EQ(run("tradeoff --n 3 --k 2 --kind exact2x2"), 2);
}
