#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "support/run.hpp"

using evcoop::testkit::read_file;
using evcoop::testkit::run_cli;
using evcoop::testkit::TempDir;
using evcoop::testkit::write_file;

namespace {

const std::string kGolden = EVCOOP_GOLDEN_DIR;
const std::string kFixtures = EVCOOP_FIXTURE_DIR;

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

const char* kSmallFlsim =
    "flsim.beta_list = 1\n"
    "flsim.seeds = 1\n"
    "flsim.runs = 1\n"
    "flsim.n_per_station = 200\n"
    "flsim.rounds = 4\n";

}  // namespace

TEST(CliTest, EquilibriumReportCoversEveryProfile) {
  TempDir tmp;
  const auto r = run_cli("equilibrium --scenario \"" + kGolden + "/beta001_rmse.scenario\"", tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0][0], "profile");
  EXPECT_EQ(rows[0][3], "regime");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].size(), rows[0].size());
    EXPECT_EQ(rows[k][3], "dominance");
  }
  EXPECT_NE(r.err.find("pure NE: 00"), std::string::npos);
}

TEST(CliTest, EquilibriumJson) {
  TempDir tmp;
  const auto r = run_cli(
      "equilibrium --format json --scenario \"" + kGolden + "/beta001_rmse.scenario\"", tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["profiles"].size(), 4u);
  EXPECT_EQ(j["profiles"][0]["partition"]["scenario"], "monopoly_B");
  EXPECT_TRUE(j["profiles"][0]["partition"]["a_lo"].is_null());
  EXPECT_EQ(j["nash"]["pure_ne"][0]["profile"], "00");
  EXPECT_NEAR(j["profit_matrix"]["11"]["B"].get<double>(), 49.9, 1e-9);
}

TEST(CliTest, DegenerateMarketIsLabelled) {
  TempDir tmp;
  write_file(tmp / "s.txt",
             "game.w_l = 1\nqos.low_A = 0.5\nqos.low_B = 0.5\nqos.high_A = 0.9\nqos.high_B = 0.9\n");
  const auto r = run_cli("equilibrium --scenario \"" + (tmp / "s.txt").string() + "\"", tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("degenerate_market"), std::string::npos);
}

TEST(CliTest, MissingFieldIsAConfigError) {
  TempDir tmp;
  write_file(tmp / "s.txt", "qos.low_A = 1\nqos.low_B = 1\nqos.high_A = 2\n");
  const auto r = run_cli("equilibrium --scenario \"" + (tmp / "s.txt").string() + "\"", tmp);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("qos.high_B"), std::string::npos) << r.err;
}

TEST(CliTest, BadValueReportsLine) {
  TempDir tmp;
  write_file(tmp / "s.txt", "game.w_l = 10\ngame.w_p = fast\n");
  const auto r = run_cli("participation --scenario \"" + (tmp / "s.txt").string() + "\"", tmp);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("line 2: game.w_p"), std::string::npos) << r.err;
}

TEST(CliTest, UsageErrors) {
  TempDir tmp;
  EXPECT_EQ(run_cli("", tmp).exit_code, 2);
  EXPECT_EQ(run_cli("equilibrium --bogus", tmp).exit_code, 2);
  EXPECT_EQ(run_cli("equilibrium --format xml", tmp).exit_code, 2);
  EXPECT_EQ(run_cli("oracle-check --draws 0", tmp).exit_code, 2);
  EXPECT_EQ(run_cli("equilibrium --scenario /nonexistent/s.txt", tmp).exit_code, 2);
  EXPECT_EQ(run_cli("--help", tmp).exit_code, 0);
}

TEST(CliTest, ParticipationMatchesGoldenMatrix) {
  TempDir tmp;
  const auto r =
      run_cli("participation --scenario \"" + kGolden + "/beta001_rmse.scenario\"", tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto got = parse_csv(r.out);
  const auto want = parse_csv(read_file(kGolden + "/beta001_participation.csv"));
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t k = 0; k < want.size(); ++k) {
    ASSERT_EQ(got[k].size(), want[k].size());
    for (std::size_t c = 0; c < want[k].size(); ++c) {
      if (k > 0 && (c == 1 || c == 2)) {
        EXPECT_NEAR(std::stod(got[k][c]), std::stod(want[k][c]), 1e-9);
      } else {
        EXPECT_EQ(got[k][c], want[k][c]);
      }
    }
  }
}

TEST(CliTest, OracleCheckFixedInstance) {
  TempDir tmp;
  write_file(tmp / "s.txt",
             "game.w_l = 1\ngame.w_p = 1\noracle.draws = 1\noracle.fixed_q_A = 3\noracle.fixed_q_B = 3\n");
  const auto r = run_cli("oracle-check --scenario \"" + (tmp / "s.txt").string() + "\"", tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][7], "competitive");
  EXPECT_EQ(rows[1][8], "competitive");
  EXPECT_EQ(rows[1].back(), "1");
  EXPECT_NE(r.err.find("OK"), std::string::npos);
}

TEST(CliTest, OracleCheckDrawsRows) {
  TempDir tmp;
  const auto r = run_cli("oracle-check --draws 8 --seed 3", tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(parse_csv(r.out).size(), 9u);
  EXPECT_NE(r.err.find("draws=8"), std::string::npos);
}

TEST(CliTest, SweepSinglePointIsOneRow) {
  TempDir tmp;
  write_file(tmp / "s.txt", kSmallFlsim);
  const auto r = run_cli("sweep-beta --scenario \"" + (tmp / "s.txt").string() + "\"", tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"beta", "seed", "W_A_00", "W_B_00", "W_A_11",
                                               "W_B_11", "ne_set", "fl_happens"}));
  ASSERT_EQ(rows[1].size(), 8u);
  EXPECT_EQ(std::stod(rows[1][0]), 1.0);
  EXPECT_NO_THROW(std::stoull(rows[1][1]));
  for (int c = 2; c < 6; ++c) EXPECT_TRUE(std::isfinite(std::stod(rows[1][c])));
  EXPECT_TRUE(rows[1][7] == "0" || rows[1][7] == "1");
}

TEST(CliTest, SweepCoversGridTimesSeeds) {
  TempDir tmp;
  write_file(tmp / "s.txt",
             "flsim.beta_list = 0.01,0.1,1,10,50,75,100\nflsim.seeds = 2\nflsim.runs = 1\n"
             "flsim.n_per_station = 100\nflsim.rounds = 2\n");
  const auto r = run_cli("sweep-beta --scenario \"" + (tmp / "s.txt").string() + "\"", tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(parse_csv(r.out).size(), 1u + 7u * 2u);
}

TEST(CliTest, SweepNeedsFlsimSource) {
  TempDir tmp;
  const auto r = run_cli("sweep-beta", tmp);
  EXPECT_EQ(r.exit_code, 2);
}

TEST(CliTest, FlsimRowsPerStation) {
  TempDir tmp;
  write_file(tmp / "s.txt", kSmallFlsim);
  const auto r = run_cli("flsim --scenario \"" + (tmp / "s.txt").string() + "\"", tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "beta");
  EXPECT_EQ(rows[1][2], "A");
  EXPECT_EQ(rows[2][2], "B");
}

TEST(CliTest, FlsimOnIngestedSessions) {
  TempDir tmp;
  write_file(tmp / "s.txt",
             "flsim.beta_list = 1\nflsim.runs = 1\nflsim.clusters = 24\nflsim.n_per_station = 50\n"
             "flsim.rounds = 3\n");
  const auto r = run_cli("flsim --scenario \"" + (tmp / "s.txt").string() + "\" --sessions \"" +
                             kFixtures + "/sessions_good.csv\"",
                         tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(parse_csv(r.out).size(), 3u);
}

TEST(CliTest, IngestSummaryAndTable) {
  TempDir tmp;
  const auto table = tmp / "table.csv";
  const auto r = run_cli("ingest --input \"" + kFixtures + "/sessions_one_bad.csv\" --dataset-out \"" +
                             table.string() + "\"",
                         tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"rows", "2"}));
  EXPECT_EQ(rows[2], (std::vector<std::string>{"dropped", "1"}));
  EXPECT_EQ(rows[3], (std::vector<std::string>{"dim", "4"}));
  EXPECT_EQ(parse_csv(read_file(table)).size(), 3u);
}

TEST(CliTest, IngestErrorsAreRuntimeErrors) {
  TempDir tmp;
  EXPECT_EQ(run_cli("ingest --input \"" + kFixtures + "/sessions_bad_header.csv\"", tmp).exit_code, 3);
  EXPECT_EQ(run_cli("ingest --input \"" + kFixtures + "/sessions_no_rows.csv\"", tmp).exit_code, 3);
  EXPECT_EQ(run_cli("ingest", tmp).exit_code, 2);
}

TEST(CliTest, OutFlagWritesFile) {
  TempDir tmp;
  const auto out = tmp / "o.json";
  const auto r = run_cli("participation --format json --out \"" + out.string() + "\" --scenario \"" +
                             kGolden + "/beta001_rmse.scenario\"",
                         tmp);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_NO_THROW(nlohmann::json::parse(read_file(out)));
}
