#include "evcoop/sessions.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <vector>

namespace evcoop {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= line.size(); ++k) {
    if (k == line.size() || line[k] == ',') {
      out.push_back(trim(line.substr(start, k - start)));
      start = k + 1;
    }
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return m == 2 && leap ? 29 : kDays[static_cast<std::size_t>(m - 1)];
}

// Days from 1970-01-01 to y-m-d in the proleptic Gregorian calendar.
long days_from_civil(int y, int m, int d) noexcept {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const long yoe = y - era * 400;
  const long doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const long doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

}  // namespace

std::optional<CivilTime> parse_datetime(std::string_view text) {
  text = trim(text);
  if (text.size() < 16) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
    return std::nullopt;
  }
  CivilTime t;
  if (!parse_int(text.substr(0, 4), t.year) || !parse_int(text.substr(5, 2), t.month) ||
      !parse_int(text.substr(8, 2), t.day) || !parse_int(text.substr(11, 2), t.hour) ||
      !parse_int(text.substr(14, 2), t.minute)) {
    return std::nullopt;
  }
  if (text.size() > 16) {
    if (text[16] != ':' || !parse_double(text.substr(17), t.second)) return std::nullopt;
    if (t.second < 0.0 || t.second >= 61.0) return std::nullopt;
  }
  if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > days_in_month(t.year, t.month)) {
    return std::nullopt;
  }
  if (t.hour < 0 || t.hour > 23 || t.minute < 0 || t.minute > 59) return std::nullopt;
  return t;
}

double to_epoch_seconds(const CivilTime& t) noexcept {
  const double days = static_cast<double>(days_from_civil(t.year, t.month, t.day));
  return days * 86400.0 + t.hour * 3600.0 + t.minute * 60.0 + t.second;
}

int day_of_week(const CivilTime& t) noexcept {
  // 1970-01-01 was a Thursday (3 with Monday = 0).
  const long d = days_from_civil(t.year, t.month, t.day);
  return static_cast<int>(((d % 7) + 7 + 3) % 7);
}

IngestResult ingest_sessions_csv(std::istream& in, const SessionsSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("sessions CSV has no header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_fields(line);
  auto column = [&](const std::string& name) {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    throw SchemaError("sessions CSV header lacks column '" + name + "'");
  };
  const std::size_t c_start = column(schema.start_datetime);
  const std::size_t c_end = column(schema.end_datetime);
  const std::size_t c_energy = column(schema.energy_kwh);
  const std::size_t needed = std::max({c_start, c_end, c_energy}) + 1;

  IngestResult res;
  res.rows.dim = 4;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() < needed) {
      ++res.dropped;
      continue;
    }
    const auto start = parse_datetime(f[c_start]);
    const auto end = parse_datetime(f[c_end]);
    double energy = 0.0;
    if (!start || !end || !parse_double(f[c_energy], energy) || energy < 0.0) {
      ++res.dropped;
      continue;
    }
    const double duration_h = (to_epoch_seconds(*end) - to_epoch_seconds(*start)) / 3600.0;
    if (duration_h < 0.0) {
      ++res.dropped;
      continue;
    }
    const std::array<double, 4> features{
        start->hour + start->minute / 60.0 + start->second / 3600.0,
        static_cast<double>(day_of_week(*start)), duration_h, static_cast<double>(start->month)};
    res.rows.push_back(features, energy, start->hour);
  }
  if (res.rows.empty()) {
    throw EmptyDatasetError("sessions CSV has no usable rows (" + std::to_string(res.dropped) +
                            " dropped)");
  }
  return res;
}

IngestResult ingest_sessions_csv(const std::filesystem::path& path, const SessionsSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ingest_sessions_csv(in, schema);
}

}  // namespace evcoop
