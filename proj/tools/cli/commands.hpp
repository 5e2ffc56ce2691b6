#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "scenario.hpp"

namespace evcoop::cli {

enum class Format { Csv, Json };

struct CommandOutput {
  std::string body;     // the report, written to --out or stdout
  std::string summary;  // one human-readable line for stderr, may be empty
};

CommandOutput cmd_equilibrium(const Scenario& s, Format f);
CommandOutput cmd_participation(const Scenario& s, Format f);
CommandOutput cmd_sweep_beta(const Scenario& s, Format f);
CommandOutput cmd_oracle_check(const Scenario& s, Format f);

/// Synthetic data by default; with `sessions`, stations are re-sampled from
/// the ingested pool (cluster = start hour).
CommandOutput cmd_flsim(const Scenario& s, Format f,
                        const std::optional<std::filesystem::path>& sessions = {});

/// Summary of an ingested sessions file; optionally writes the feature table.
CommandOutput cmd_ingest(const Scenario& s, Format f,
                         const std::optional<std::filesystem::path>& dataset_out = {});

}  // namespace evcoop::cli
