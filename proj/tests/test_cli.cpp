#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "attestgame/cli.hpp"
#include "attestgame/defender_optimal.hpp"
#include "attestgame/scenario.hpp"
#include "fixtures.hpp"

using namespace attestgame;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "attestgame");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("attestgame_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  std::vector<std::string> lines(const std::string& text) const {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenerateWritesLoadableEnvironment) {
  const auto r = run({"generate", "--devices", "50", "--classes", "5", "--seed", "7", "--out", path("env.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("seed: 7"), std::string::npos);
  const auto doc = load_environment(path("env.json"));
  EXPECT_TRUE(doc.environment.valid());
  EXPECT_EQ(doc.environment.device_count(), 50u);
  EXPECT_EQ(doc.config->seed, 7u);
}

TEST_F(CliTest, GenerateWithoutSeedPrintsOne) {
  const auto r = run({"generate", "--devices", "4", "--classes", "2", "--out", path("env.json")});
  ASSERT_EQ(r.code, 0);
  const auto at = r.out.find("seed: ");
  ASSERT_NE(at, std::string::npos);
  const std::uint64_t seed = std::stoull(r.out.substr(at + 6));
  EXPECT_EQ(load_environment(path("env.json")).config->seed, seed);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  write("config.json", R"({"device_count": 9, "class_count": 3, "seed": 4})");
  const auto r = run({"generate", "--config", path("config.json"), "--devices", "6", "--out", path("env.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("--devices overrides"), std::string::npos);
  const auto doc = load_environment(path("env.json"));
  EXPECT_EQ(doc.environment.device_count(), 6u);
  EXPECT_EQ(doc.environment.class_count(), 3u);
  EXPECT_EQ(doc.config->seed, 4u);
}

TEST_F(CliTest, SolveDefaultEnvironment) {
  ASSERT_EQ(run({"generate", "--seed", "11", "--out", path("env.json")}).code, 0);
  const auto r = run({"solve", path("env.json"), "--out", path("solution.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("modes: c0="), std::string::npos);
  EXPECT_NE(r.out.find("defender_utility="), std::string::npos);

  const auto env = load_environment(path("env.json")).environment;
  const auto solution = read_json_file(path("solution.json"));
  const auto strategy = defender_strategy_from_json(solution["strategy"], env);
  const auto attack = attacker_strategy_from_json(solution["attack"], env);
  EXPECT_EQ(solution["defender_utility"].get<double>(), defender_utility(strategy, attack, env));
  EXPECT_EQ(solution["defender_utility"].get<double>(), optimal_strategy(env).defender_utility);
}

TEST_F(CliTest, SolveRejectsMultipleMethods) {
  const Environment env({fixtures::zero_sum_device("d", "c", 10, -10, 1)}, {DeviceClass{"c", 1, {"d"}}},
                        {AttestationMethod{"m1", 0.5, 1}, AttestationMethod{"m2", 0.5, 2}}, true);
  save_environment(env, path("two.json"));
  const auto r = run({"solve", path("two.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("unsupported: optimal solver requires a single method"), std::string::npos);
  EXPECT_EQ(run({"compare", path("two.json")}).code, 3);
}

TEST_F(CliTest, OracleCheckReportsMargin) {
  ASSERT_EQ(run({"generate", "--devices", "5", "--classes", "2", "--seed", "3", "--out", path("env.json")}).code, 0);
  const auto r = run({"solve", path("env.json"), "--oracle-check", "--samples", "5000", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto at = r.out.find("margin=");
  ASSERT_NE(at, std::string::npos);
  EXPECT_GE(std::stod(r.out.substr(at + 7)), -1e-6);
}

TEST_F(CliTest, BestResponseClosedFormAndExhaustiveAgree) {
  ASSERT_EQ(run({"generate", "--devices", "8", "--classes", "2", "--seed", "5", "--out", path("env.json")}).code, 0);
  const auto env = load_environment(path("env.json")).environment;
  write_json_file(defender_strategy_to_json(DefenderStrategy::uniform(env, 0.2), env), path("p.json"));
  const auto closed = run({"best-response", path("env.json"), "--strategy", path("p.json"), "--out", path("a1.json")});
  const auto exhaustive = run({"best-response", path("env.json"), "--strategy", path("p.json"),
                               "--brute-force", "--out", path("a2.json")});
  ASSERT_EQ(closed.code, 0) << closed.err;
  ASSERT_EQ(exhaustive.code, 0) << exhaustive.err;
  EXPECT_EQ(slurp("a1.json"), slurp("a2.json"));
}

TEST_F(CliTest, CompareEmitsEighteenRows) {
  ASSERT_EQ(run({"generate", "--seed", "2", "--out", path("env.json")}).code, 0);
  const auto r = run({"compare", path("env.json"), "--out", path("cmp.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp("cmp.csv"));
  ASSERT_EQ(rows.size(), 19u);
  EXPECT_EQ(rows[0], "strategy,response,defender_utility,attacker_utility");
  bool saw_zero_row = false;
  for (const auto& row : rows) {
    if (row == "p0,no_attack,0.000000,0.000000") saw_zero_row = true;
  }
  EXPECT_TRUE(saw_zero_row);
}

TEST_F(CliTest, CompareRowsRecomputable) {
  ASSERT_EQ(run({"generate", "--seed", "8", "--out", path("env.json")}).code, 0);
  ASSERT_EQ(run({"solve", path("env.json"), "--out", path("solution.json")}).code, 0);
  const auto rows = lines(run({"compare", path("env.json")}).out);
  const auto env = load_environment(path("env.json")).environment;
  const auto solution = read_json_file(path("solution.json"));
  const auto p = defender_strategy_from_json(solution["strategy"], env);
  char expected[128];
  std::snprintf(expected, sizeof expected, "optimal,attack_all,%.6f,%.6f",
                defender_utility(p, AttackerStrategy(env.device_count(), true), env),
                attacker_utility(p, AttackerStrategy(env.device_count(), true), env));
  EXPECT_NE(std::find(rows.begin(), rows.end(), std::string(expected)), rows.end()) << expected;
}

TEST_F(CliTest, CompareReplicatesAreDeterministic) {
  const auto a = run({"compare", "--replicates", "3", "--seed", "9", "--devices", "10", "--classes", "2"});
  const auto b = run({"compare", "--replicates", "3", "--seed", "9", "--devices", "10", "--classes", "2"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out).size(), 19u);
}

TEST_F(CliTest, SweepDefaultGrid) {
  ASSERT_EQ(run({"generate", "--devices", "10", "--classes", "2", "--seed", "6", "--out", path("env.json")}).code, 0);
  const auto r = run({"sweep-coverage", path("env.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("synthetic"), std::string::npos);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0], "coverage,detection_rate,run_cost,defender_utility");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].find("nan"), std::string::npos);
    EXPECT_EQ(rows[i].find("inf"), std::string::npos);
  }
}

TEST_F(CliTest, SweepZeroCoverageMeansNoAttestation) {
  save_environment(fixtures::worked_single(), path("env.json"));
  const auto r = run({"sweep-coverage", path("env.json"), "--grid", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out)[1], "0.000000,0.000000,0.000000,-30.000000");
}

TEST_F(CliTest, SweepExposesInteriorOptimum) {
  // Detection 0.2 + 0.5 c and 10 ms per unit coverage. The device cannot be
  // deterred below c = 0.6 and deterrence gets dearer above it.
  write("cal.csv", "coverage,detection_rate,runtime_ms\n0,0.2,0\n1,0.7,10\n");
  save_environment(fixtures::single(0.5, 1.0, 0.0, 0.0, 30.0, -30.0), path("env.json"));
  const auto r = run({"sweep-coverage", path("env.json"), "--calibration", path("cal.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.err.find("synthetic"), std::string::npos);
  const auto rows = lines(r.out);
  std::size_t best_row = 1;
  double best = -1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double u = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    if (u > best + 1e-9) best = u, best_row = i;
  }
  EXPECT_GT(best_row, 1u);
  EXPECT_LT(best_row, rows.size() - 1);
  EXPECT_EQ(rows[best_row].substr(0, 8), "0.600000");
}

TEST_F(CliTest, SweepCalibrationErrors) {
  save_environment(fixtures::worked_single(), path("env.json"));
  write("flat.csv", "coverage,detection_rate,runtime_ms\n0.5,0.2,1\n0.5,0.3,2\n");
  EXPECT_EQ(run({"sweep-coverage", path("env.json"), "--calibration", path("flat.csv")}).code, 2);
  write("bad.csv", "coverage,detection_rate,runtime_ms\n0.5,x,1\n");
  EXPECT_EQ(run({"sweep-coverage", path("env.json"), "--calibration", path("bad.csv")}).code, 2);
  EXPECT_EQ(run({"sweep-coverage", path("env.json"), "--grid", "0.5,2"}).code, 1);
}

TEST_F(CliTest, SimulateChecksum) {
  const auto r = run({"simulate-checksum", "--blocks", "10", "--modified", "1", "--covered", "4",
                      "--trials", "20000", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NE(rows[1].find(",0.400000,"), std::string::npos);
  EXPECT_EQ(run({"simulate-checksum", "--blocks", "10", "--covered", "11"}).code, 1);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"solve"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"generate", "--devices", "0"}).code, 1);
  EXPECT_EQ(run({"solve", path("missing.json")}).code, 2);
  write("broken.json", "{not json");
  EXPECT_EQ(run({"solve", path("broken.json")}).code, 2);
  ScenarioConfig c;
  c.device_count = 3;
  c.class_count = 1;
  auto doc = environment_to_json(generate(c));
  doc["devices"][0]["defender_loss"] = 4.0;
  write_json_file(doc, path("invalid.json"));
  const auto r = run({"solve", path("invalid.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("d0"), std::string::npos);
}

TEST_F(CliTest, OutputsAreByteIdenticalAcrossRuns) {
  for (int round = 0; round < 2; ++round) {
    const std::string tag = std::to_string(round);
    ASSERT_EQ(run({"generate", "--devices", "12", "--classes", "3", "--seed", "42", "--out", path("env" + tag)}).code, 0);
    ASSERT_EQ(run({"solve", path("env" + tag), "--out", path("sol" + tag)}).code, 0);
    ASSERT_EQ(run({"compare", path("env" + tag), "--out", path("cmp" + tag)}).code, 0);
    ASSERT_EQ(run({"sweep-coverage", path("env" + tag), "--out", path("sweep" + tag)}).code, 0);
    ASSERT_EQ(run({"simulate-checksum", "--blocks", "64", "--modified", "3", "--covered", "16", "--trials",
                   "5000", "--seed", "42", "--out", path("sim" + tag)}).code, 0);
  }
  for (const char* name : {"env", "sol", "cmp", "sweep", "sim"}) {
    EXPECT_EQ(slurp(std::string(name) + "0"), slurp(std::string(name) + "1")) << name;
  }
}
