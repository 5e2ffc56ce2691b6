#pragma once

// Charging-session CSV ingestion.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>

#include "evcoop/flsim.hpp"

namespace evcoop {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyDatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionsSchema {
  std::string start_datetime = "start_datetime";
  std::string end_datetime = "end_datetime";
  std::string energy_kwh = "energy_kwh";
};

struct IngestResult {
  /// Features: start hour of day (fractional), start day of week (0 = Monday),
  /// duration in hours, start month (1..12). Target: energy in kWh.
  /// cluster = integer start hour.
  flsim::Samples rows;
  std::size_t dropped = 0;
};

struct CivilTime {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0;
  double second = 0.0;
};

/// ISO-8601 local date-time: YYYY-MM-DD[T| ]HH:MM[:SS[.fff]].
std::optional<CivilTime> parse_datetime(std::string_view text);

/// Seconds since 1970-01-01T00:00 treating the time as UTC.
double to_epoch_seconds(const CivilTime& t) noexcept;

/// 0 = Monday ... 6 = Sunday.
int day_of_week(const CivilTime& t) noexcept;

/// Columns are located by name and may appear in any order; extra columns are
/// ignored. Rows with missing or unparseable fields, negative energy, or an
/// end before the start are dropped and counted.
/// Throws SchemaError when a declared column is absent and EmptyDatasetError
/// when no row survives.
IngestResult ingest_sessions_csv(std::istream& in, const SessionsSchema& schema = {});
IngestResult ingest_sessions_csv(const std::filesystem::path& path,
                                 const SessionsSchema& schema = {});

}  // namespace evcoop
