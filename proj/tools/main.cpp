#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/scenario.hpp"
#include "evcoop/sessions.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace evcoop::cli;

  CLI::App app{"EV charging station FL participation game"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format = "csv";
  app.add_option("--scenario", scenario_path, "Scenario file (key = value lines)");
  app.add_option("--seed", seed, "Root seed (overrides run.seed)");
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  auto* equilibrium = app.add_subcommand("equilibrium", "Pricing outcome of every participation profile");
  auto* participation = app.add_subcommand("participation", "Profit matrix and pure Nash equilibria");
  auto* sweep = app.add_subcommand("sweep-beta", "Profits and equilibria across heterogeneity levels");
  auto* oracle_check = app.add_subcommand("oracle-check", "Closed form vs best-response dynamics");
  auto* flsim = app.add_subcommand("flsim", "Local vs federated training RMSE");
  auto* ingest = app.add_subcommand("ingest", "Load a charging-sessions CSV");

  std::optional<std::uint64_t> draws;
  oracle_check->add_option("--draws", draws, "Number of random draws (overrides oracle.draws)");
  std::string sessions_path;
  flsim->add_option("--sessions", sessions_path, "Train on an ingested sessions CSV");
  std::string input_path;
  std::string dataset_out;
  ingest->add_option("--input", input_path, "Sessions CSV (overrides ingest.path)");
  ingest->add_option("--dataset-out", dataset_out, "Write the feature table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    Scenario s = scenario_path.empty() ? Scenario{} : load_scenario(scenario_path);
    if (seed) s.seed = *seed;
    if (draws) s.oracle.draws = *draws;
    if (!input_path.empty()) s.ingest.path = input_path;
    const Format f = format == "json" ? Format::Json : Format::Csv;

    CommandOutput result;
    if (*equilibrium) {
      result = cmd_equilibrium(s, f);
    } else if (*participation) {
      result = cmd_participation(s, f);
    } else if (*sweep) {
      result = cmd_sweep_beta(s, f);
    } else if (*oracle_check) {
      result = cmd_oracle_check(s, f);
    } else if (*flsim) {
      std::optional<std::filesystem::path> sessions;
      if (!sessions_path.empty()) sessions = sessions_path;
      result = cmd_flsim(s, f, sessions);
    } else if (*ingest) {
      std::optional<std::filesystem::path> table;
      if (!dataset_out.empty()) table = dataset_out;
      result = cmd_ingest(s, f, table);
    }

    if (out_path.empty()) {
      std::cout << result.body << std::flush;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      out << result.body;
      if (!out) throw std::runtime_error("cannot write " + out_path);
    }
    if (!result.summary.empty()) std::cerr << result.summary << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
