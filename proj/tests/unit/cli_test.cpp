#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
namespace cli = topokinetic::cli;

namespace {

const std::string kConfigs = TOPOKINETIC_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Rows of a CSV file as string cells, header first.
std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("topokinetic_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  fs::path out(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(Cli, MissingConfigIsAUsageError) {
  EXPECT_EQ(run({"simulate", "--config", "/nonexistent/config.json", "--out", out("a")}), 2);
  EXPECT_EQ(run({"simulate"}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(Cli, SimulateFigureOneReachesConsensusAndIsReproducible) {
  const auto cfg = kConfigs + "/figure1.json";
  const auto before = slurp(cfg);
  ASSERT_EQ(run({"simulate", "-c", cfg, "--seed", "7", "--out", out("a")}), 0) << err_.str();
  ASSERT_EQ(run({"simulate", "-c", cfg, "--seed", "7", "--out", out("b")}), 0) << err_.str();
  EXPECT_EQ(slurp(cfg), before);
  for (const char* f : {"trajectory.csv", "diagnostics.csv"}) {
    EXPECT_EQ(slurp(out("a") / f), slurp(out("b") / f)) << f;
  }
  const auto diag = read_csv(out("a") / "diagnostics.csv");
  ASSERT_EQ(diag.front(), (std::vector<std::string>{"t", "variance", "distinct_velocities"}));
  EXPECT_EQ(diag[1][2], "10");
  EXPECT_EQ(diag.back()[2], "1");
  const auto traj = read_csv(out("a") / "trajectory.csv");
  EXPECT_EQ(traj.front(), (std::vector<std::string>{"t", "particle_id", "x", "v"}));

  ASSERT_EQ(run({"simulate", "-c", cfg, "--seed", "8", "--out", out("c")}), 0);
  EXPECT_NE(slurp(out("a") / "trajectory.csv"), slurp(out("c") / "trajectory.csv"));
}

TEST_F(Cli, ReplayReproducesOutputsBitForBit) {
  ASSERT_EQ(run({"simulate", "-c", kConfigs + "/figure1.json", "--out", out("a"), "--n", "6"}), 0);
  ASSERT_EQ(run({"replay", (out("a") / "manifest.json").string(), "--out", out("b")}), 0) << err_.str();
  EXPECT_EQ(slurp(out("a") / "trajectory.csv"), slurp(out("b") / "trajectory.csv"));

  ASSERT_EQ(run({"verify", "rank", "--trials", "2000", "--seed", "3", "--out", out("c")}), 0);
  ASSERT_EQ(run({"replay", (out("c") / "manifest.json").string(), "--out", out("d")}), 0);
  EXPECT_EQ(slurp(out("c") / "verify_rank.csv"), slurp(out("d") / "verify_rank.csv"));
}

TEST_F(Cli, ManifestRecordsConfigSeedAndOutputs) {
  ASSERT_EQ(run({"simulate", "-c", kConfigs + "/figure1.json", "--out", out("a"), "--set",
                 "simulate.n=5", "--n", "6", "--seed", "11"}),
            0);
  const auto m = nlohmann::json::parse(slurp(out("a") / "manifest.json"));
  EXPECT_EQ(m["command"], "simulate");
  EXPECT_EQ(m["seed"], 11);
  EXPECT_EQ(m["config"]["simulate"]["n"], 6);  // named flag beats --set beats the file
  EXPECT_EQ(m["outputs"], (nlohmann::json{"trajectory.csv", "diagnostics.csv"}));
  EXPECT_TRUE(m.contains("version"));
  EXPECT_TRUE(m["wall_clock_seconds"].is_number());
}

TEST_F(Cli, SeedFallsBackToEnvironment) {
  ::setenv("TOPOKINETIC_SEED", "4242", 1);
  ASSERT_EQ(run({"solve", "-c", kConfigs + "/homogeneous.json", "--out", out("a"), "--set",
                 "kinetic.t_end=0.1"}),
            0);
  ::unsetenv("TOPOKINETIC_SEED");
  EXPECT_EQ(nlohmann::json::parse(slurp(out("a") / "manifest.json"))["seed"], 4242);
}

TEST_F(Cli, SolveHomogeneousIsStationary) {
  ASSERT_EQ(run({"solve", "-c", kConfigs + "/homogeneous.json", "--out", out("a")}), 0) << err_.str();
  const auto rows = read_csv(out("a") / "density.csv");
  ASSERT_EQ(rows.front(), (std::vector<std::string>{"t", "x", "rho"}));
  const std::size_t cells = 64;
  ASSERT_EQ((rows.size() - 1) % cells, 0u);
  const std::size_t last = rows.size() - cells;
  double worst = 0.0;
  for (std::size_t m = 0; m < cells; ++m) {
    worst = std::max(worst, std::abs(std::stod(rows[last + m][2]) - std::stod(rows[1 + m][2])));
  }
  EXPECT_LT(worst, 1e-10);
  EXPECT_EQ(read_csv(out("a") / "velocity.csv").front(), (std::vector<std::string>{"t", "v", "g"}));
}

TEST_F(Cli, SolveConservesMassAndRejectsLargeSteps) {
  ASSERT_EQ(run({"solve", "-c", kConfigs + "/wave.json", "--out", out("a")}), 0) << err_.str();
  const auto rows = read_csv(out("a") / "mass.csv");
  ASSERT_GT(rows.size(), 3u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_NEAR(std::stod(rows[k][1]), std::stod(rows[1][1]), 1e-12);
  }
  EXPECT_EQ(run({"solve", "-c", kConfigs + "/wave.json", "--out", out("b"), "--dt", "1.5"}), 2);
  EXPECT_EQ(run({"solve", "-c", kConfigs + "/wave.json", "--out", out("b"), "--dt", "0"}), 2);

  ASSERT_EQ(run({"solve", "-c", kConfigs + "/wave.json", "--out", out("c"), "--set",
                 "kinetic.keep_states=true", "--t-end", "0.02"}),
            0);
  EXPECT_EQ(read_csv(out("c") / "phase_space.csv").size(), 1u + 2u * 256u * 4u);
}

TEST_F(Cli, VerifySuites) {
  ASSERT_EQ(run({"verify", "sn", "--kernel", "constant", "--out", out("a")}), 0) << err_.str();
  const auto sn = read_csv(out("a") / "verify_sn.csv");
  ASSERT_EQ(sn.size(), 4u);
  for (std::size_t k = 1; k < sn.size(); ++k) EXPECT_EQ(std::stod(sn[k][8]), 0.0);
  EXPECT_EQ(run({"verify", "lemma", "--kernel", "smoothcutoff", "--p", "0.4", "--out", out("a")}), 0)
      << out_.str();
  ASSERT_EQ(run({"verify", "bernstein", "--f", "xsq", "--out", out("a")}), 0) << out_.str();
  const auto b = read_csv(out("a") / "verify_bernstein.csv");
  EXPECT_EQ(b.size(), 1u + 5u * 3u);
  for (std::size_t k = 1; k < b.size(); ++k) EXPECT_LE(std::abs(std::stod(b[k][8])), 1e-12);
  EXPECT_EQ(run({"verify", "bernstein", "--f", "kernel", "--kernel", "powerlaw", "--alpha", "3",
                 "--out", out("a")}),
            0)
      << out_.str();
  EXPECT_EQ(run({"verify", "rank", "--trials", "20000", "--out", out("a")}), 0) << out_.str();
  EXPECT_EQ(run({"verify", "changevar", "--cells", "16", "--densities", "2", "--out", out("a")}), 0)
      << out_.str();
}

TEST_F(Cli, VerifyRejectsBadInput) {
  EXPECT_EQ(run({"verify", "nonsense", "--out", out("a")}), 2);
  EXPECT_EQ(run({"verify", "lemma", "--kernel", "uniformcutoff", "--out", out("a")}), 2);
  EXPECT_EQ(run({"verify", "lemma", "--p", "1.5", "--out", out("a")}), 2);
  EXPECT_EQ(run({"verify", "sn", "--kernel", "smoothcutoff", "--theta", "2", "--out", out("a")}), 2);
  // a discontinuous kernel fails the o(1/N) ladder rather than the input checks
  EXPECT_EQ(run({"verify", "sn", "--kernel", "uniformcutoff", "--theta", "0.3", "--out", out("a")}), 1);
}

TEST_F(Cli, CompareRejectsBadLaddersAndGrids) {
  const auto cfg = kConfigs + "/compare.json";
  EXPECT_EQ(run({"compare", "-c", cfg, "--out", out("a"), "--ladder", "250"}), 2);
  EXPECT_EQ(run({"compare", "-c", cfg, "--out", out("a"), "--set", "compare.comparison_cells=100"}), 2);
  EXPECT_EQ(run({"compare", "-c", cfg, "--out", out("a"), "--dt", "1.5"}), 2);
}

TEST_F(Cli, CompareWritesConvergenceReport) {
  const auto cfg = kConfigs + "/compare.json";
  const int code = run({"compare", "-c", cfg, "--out", out("a"), "--ladder", "20,40,80", "--runs",
                        "10", "--set", "compare.resamples=10", "--set", "compare.times=[0.25,0.5]"});
  EXPECT_TRUE(code == 0 || code == 1) << err_.str();
  const auto rows = read_csv(out("a") / "convergence.csv");
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows.front(), (std::vector<std::string>{"N", "t", "d_rho", "d_rho_stderr", "d_vel",
                                                    "d_vel_stderr", "chaos_metric"}));
  EXPECT_EQ(rows[1][0], "20");
  EXPECT_EQ(rows[1][1], "0.25");
}
