#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"

using namespace semiqsum;
using namespace semiqsum::cli;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result invoke(const RunSpec& spec) {
    std::ostringstream out, err;
    const int code = dispatch(spec, out, err);
    return {code, out.str(), err.str()};
}

RunSpec spec_for(std::string sub) {
    RunSpec s;
    s.subcommand = std::move(sub);
    return s;
}

std::filesystem::path temp_dir() {
    auto p = std::filesystem::temp_directory_path() / ("semiqsum_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST(Cli, RunCompletesAndReportsXor) {
    auto s = spec_for("run");
    s.config.seed = 7;
    const auto r = invoke(s);
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["status"], "COMPLETED");
    EXPECT_EQ(j["S_matches_xor"], true);
    EXPECT_EQ(j["schema_version"], 1);
}

TEST(Cli, RunAbortExitsTwo) {
    auto s = spec_for("run");
    s.config.seed = 7;
    s.attack = AttackKind::MeasureResend;
    const auto r = invoke(s);
    EXPECT_EQ(r.code, kAbortOrDisagree);
    EXPECT_EQ(Json::parse(r.out)["status"], "ABORT_EVE_CHECK_B");
}

TEST(Cli, ConfigErrorExitsOne) {
    auto s = spec_for("run");
    s.config.n = 3;
    s.config.gamma = 0.5;
    const auto r = invoke(s);
    EXPECT_EQ(r.code, kUsage);
    EXPECT_NE(r.err.find("error"), std::string::npos);
    EXPECT_EQ(invoke(spec_for("attack")).code, kUsage);
    EXPECT_EQ(invoke(spec_for("nope")).code, kUsage);
}

TEST(Cli, FractionalGammaAccepted) {
    auto s = spec_for("run");
    s.config.gamma = 0.5;
    s.config.seed = 7;
    const auto r = invoke(s);
    EXPECT_NE(r.code, kUsage);
    EXPECT_EQ(Json::parse(r.out)["checks"]["eve_B"]["ctrl_total"].get<int>() +
                  Json::parse(r.out)["checks"]["eve_B"]["sift_total"].get<int>(),
              16);
}

TEST(Cli, NonIntegralQualifyingWarnsAndRuns) {
    auto s = spec_for("run");
    s.config.n = 3;
    s.config.gamma = 1;
    const auto r = invoke(s);
    EXPECT_NE(r.code, kUsage);
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_EQ(Json::parse(r.out)["warnings"].size(), 1u);
}

TEST(Cli, InputsInlineAndFromFile) {
    auto s = spec_for("run");
    s.config.n = 4;
    s.x = "0xA";
    s.y = "0110";
    s.z = "0x0";
    auto r = invoke(s);
    auto j = Json::parse(r.out);
    EXPECT_EQ(j["X"], "1010");
    EXPECT_EQ(j["Z"], "0000");

    const auto dir = temp_dir();
    const auto file = dir / "inputs.txt";
    std::ofstream(file) << "# fixture\nX=1111\ny: 0x3\nZ = 0001\n";
    s = spec_for("run");
    s.config.n = 4;
    s.inputs_file = file.string();
    j = Json::parse(invoke(s).out);
    EXPECT_EQ(j["Y"], "0011");
    EXPECT_EQ(j["Z"], "0001");

    s.inputs_file.clear();
    s.x = "0x1F";
    EXPECT_EQ(invoke(s).code, kUsage);
    s.x = "101";
    EXPECT_EQ(invoke(s).code, kUsage);
    std::filesystem::remove_all(dir);
}

TEST(Cli, OutputAndTranscriptFilesAreWritten) {
    const auto dir = temp_dir();
    auto s = spec_for("run");
    s.config.seed = 3;
    s.output_path = (dir / "report.json").string();
    s.transcript_path = (dir / "t.jsonl").string();
    const auto r = invoke(s);
    EXPECT_TRUE(r.out.empty());
    std::ifstream report(s.output_path);
    EXPECT_EQ(Json::parse(report)["config"]["seed"], 3);
    std::ifstream t(s.transcript_path);
    std::string first;
    std::getline(t, first);
    EXPECT_EQ(Json::parse(first)["seq_no"], 0);
    for (const auto& e : std::filesystem::directory_iterator(dir))
        EXPECT_EQ(e.path().string().find(".tmp."), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST(Cli, FailedRunLeavesNoFile) {
    const auto dir = temp_dir();
    auto s = spec_for("run");
    s.config.lambda = 0;
    s.output_path = (dir / "report.json").string();
    EXPECT_EQ(invoke(s).code, kUsage);
    EXPECT_TRUE(std::filesystem::is_empty(dir));
    std::filesystem::remove_all(dir);
}

TEST(Cli, AttackReportsExactValue) {
    auto s = spec_for("attack");
    s.attack = AttackKind::MeasureResend;
    s.trials = 500;
    s.config.seed = 1;
    const auto r = invoke(s);
    EXPECT_EQ(r.code, kOk);
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["results"][0]["exact"], "1/4");
    EXPECT_EQ(j["agrees"], true);
}

TEST(Cli, DoubleCnotHasNoDetections) {
    auto s = spec_for("attack");
    s.attack = AttackKind::DoubleCnot;
    s.trials = 300;
    const auto j = Json::parse(invoke(s).out);
    EXPECT_EQ(j["results"][0]["exact"], "0/1");
    EXPECT_EQ(j["results"][0]["detections"], 0);
    EXPECT_EQ(j["results"][1]["detections"], 0);
}

TEST(Cli, SilentAliceAlwaysAbortsOnRate) {
    auto s = spec_for("attack");
    s.attack = AttackKind::AliceAttackIISilent;
    s.trials = 100;
    const auto j = Json::parse(invoke(s).out);
    EXPECT_EQ(j["status_counts"]["ABORT_SUMMATION_RATE"], 100);
}

TEST(Cli, SweepGridRows) {
    auto s = spec_for("sweep");
    auto r = invoke(s);
    ASSERT_EQ(r.code, kOk) << r.err;
    const auto j = Json::parse(r.out);
    ASSERT_EQ(j["rows"].size(), 8u);
    for (const auto& row : j["rows"]) {
        const auto l = row["config"]["lambda"].get<std::uint64_t>();
        const auto e = row["config"]["epsilon"].get<std::uint64_t>();
        const auto g = static_cast<std::uint64_t>(row["config"]["gamma"].get<double>());
        EXPECT_EQ(row["efficiency"]["eta"], Rational(1, 3 * (8 + l + e + g) + 3).str());
    }
    s.format = "csv";
    r = invoke(s);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 9);
}

TEST(Cli, SweepWithCampaign) {
    auto s = spec_for("sweep");
    s.attack = AttackKind::BobProbe;
    s.trials = 200;
    s.lambdas = {2};
    s.epsilons = {2};
    s.gammas = {8};
    const auto r = invoke(s);
    EXPECT_EQ(r.code, kOk);
    EXPECT_TRUE(Json::parse(r.out)["rows"][0].contains("campaign"));
}

TEST(Cli, OracleAndEfficiency) {
    auto o = invoke(spec_for("oracle"));
    EXPECT_EQ(o.code, kOk);
    EXPECT_EQ(o.out, invoke(spec_for("oracle")).out);
    EXPECT_EQ(Json::parse(o.out)["honest"]["summation_rate"], "3/8");
    const auto e = Json::parse(invoke(spec_for("efficiency")).out);
    EXPECT_EQ(e["efficiency"]["eta"], "1/63");
    EXPECT_EQ(e["baseline"]["eta"], "1/147");
    EXPECT_EQ(e["dominates"], true);
}

TEST(Cli, ReportsAreByteIdentical) {
    for (const char* sub : {"run", "attack", "sweep", "oracle", "efficiency"}) {
        auto s = spec_for(sub);
        s.attack = AttackKind::InterceptResend;
        s.trials = 50;
        s.config.seed = 11;
        EXPECT_EQ(invoke(s).out, invoke(s).out) << sub;
    }
}

TEST(Cli, BitParsing) {
    EXPECT_EQ(parse_bits("0x0F", 4).str(), "1111");
    EXPECT_EQ(parse_bits(" 0101 ", 4).str(), "0101");
    EXPECT_THROW(parse_bits("0xG", 4), ConfigError);
    EXPECT_THROW(parse_bits("0x1", 8), ConfigError);
}
