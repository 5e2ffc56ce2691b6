#pragma once

// Scenario files: flat `section.key = value` lines, `#` comments.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evcoop/flsim.hpp"
#include "evcoop/model.hpp"
#include "evcoop/oracle.hpp"

namespace evcoop::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-station RMSE with and without FL, mapped to QoS through qos_map.
struct RmseProfile {
  PerStation<double> local;
  PerStation<double> fl;

  friend bool operator==(const RmseProfile&, const RmseProfile&) = default;
};

struct FlsimSection {
  std::vector<double> beta_list{0.01, 0.1, 1.0, 10.0, 50.0, 75.0, 100.0};
  std::uint64_t seeds = 1;
  std::uint64_t runs = 10;
  flsim::HeterogeneityConfig data;  // beta and seed are set per point
  flsim::TrainConfig train;

  friend bool operator==(const FlsimSection& x, const FlsimSection& y);
};

struct OracleSection {
  std::uint64_t draws = 500;
  oracle::AuditOptions audit;
  oracle::DrawRanges ranges;
  std::optional<QosVector> fixed_q;  // audit this single instance instead of drawing

  friend bool operator==(const OracleSection& x, const OracleSection& y);
};

struct IngestSection {
  std::string path;
  std::string start_column = "start_datetime";
  std::string end_column = "end_datetime";
  std::string energy_column = "energy_kwh";

  friend bool operator==(const IngestSection&, const IngestSection&) = default;
};

struct Scenario {
  ModelParams params;
  std::uint64_t seed = 0;

  // At most one QoS source.
  std::optional<QosProfile> qos;
  std::optional<RmseProfile> rmse;
  std::optional<FlsimSection> flsim;

  OracleSection oracle;
  IngestSection ingest;

  /// Explicit QoS, or QoS mapped from the RMSE section. ConfigError when the
  /// scenario has neither.
  QosProfile explicit_qos() const;
  const FlsimSection& flsim_source() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws ConfigError with "line N: key: message" diagnostics.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Every key, in canonical order, with round-trip precision.
std::string serialize_scenario(const Scenario& s);

}  // namespace evcoop::cli
