#include "scenario.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace evcoop::cli {

bool operator==(const FlsimSection& x, const FlsimSection& y) {
  const auto& a = x.data;
  const auto& b = y.data;
  return x.beta_list == y.beta_list && x.seeds == y.seeds && x.runs == y.runs &&
         a.clusters == b.clusters && a.n_per_station == b.n_per_station &&
         a.base_features == b.base_features && a.noise == b.noise &&
         a.train_fraction == b.train_fraction && x.train.rounds == y.train.rounds &&
         x.train.local_epochs == y.train.local_epochs &&
         x.train.personalize_epochs == y.train.personalize_epochs && x.train.lr == y.train.lr &&
         x.train.local_only_epochs == y.train.local_only_epochs;
}

bool operator==(const OracleSection& x, const OracleSection& y) {
  const auto& a = x.audit;
  const auto& b = y.audit;
  const auto& r = x.ranges;
  const auto& t = y.ranges;
  return x.draws == y.draws && a.price_steps == b.price_steps && a.x_steps == b.x_steps &&
         a.max_iters == b.max_iters && a.tolerance_steps == b.tolerance_steps &&
         a.min_boundary_steps == b.min_boundary_steps && r.w_l_lo == t.w_l_lo &&
         r.w_l_hi == t.w_l_hi && r.w_p_lo == t.w_p_lo && r.w_p_hi == t.w_p_hi &&
         r.q_lo == t.q_lo && r.q_hi == t.q_hi && r.o_lo == t.o_lo && r.o_hi == t.o_hi &&
         x.fixed_q == y.fixed_q;
}

QosProfile Scenario::explicit_qos() const {
  if (qos) return *qos;
  if (rmse) {
    QosProfile q;
    for (StationId i : kStations) {
      q.low[i] = flsim::qos_map(rmse->local[i], params);
      q.high[i] = flsim::qos_map(rmse->fl[i], params);
    }
    return q;
  }
  throw ConfigError("scenario needs an explicit QoS source (qos.* or rmse.* keys)");
}

const FlsimSection& Scenario::flsim_source() const {
  if (!flsim) throw ConfigError("scenario needs an flsim QoS source (flsim.* keys)");
  return *flsim;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t to_u64(std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::vector<double> to_list(std::string_view v) {
  std::vector<double> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= v.size(); ++k) {
    if (k == v.size() || v[k] == ',') {
      out.push_back(to_double(trim(v.substr(start, k - start))));
      start = k + 1;
    }
  }
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ',';
    out += format_double(v[k]);
  }
  return out;
}

struct Field {
  std::string key;
  std::function<void(Scenario&, std::string_view)> set;
  std::function<std::optional<std::string>(const Scenario&)> get;
};

template <class T>
T& ensure(std::optional<T>& o) {
  if (!o) o.emplace();
  return *o;
}

// Helpers binding a member reached through `ref` to a field.
template <class Ref>
Field real(std::string key, Ref ref) {
  return {std::move(key), [ref](Scenario& s, std::string_view v) { ref(s) = to_double(v); },
          [ref](const Scenario& s) -> std::optional<std::string> {
            return format_double(ref(const_cast<Scenario&>(s)));
          }};
}

template <class Ref>
Field count(std::string key, Ref ref) {
  return {std::move(key),
          [ref](Scenario& s, std::string_view v) {
            ref(s) = static_cast<std::remove_reference_t<decltype(ref(s))>>(to_u64(v));
          },
          [ref](const Scenario& s) -> std::optional<std::string> {
            return std::to_string(ref(const_cast<Scenario&>(s)));
          }};
}

template <class Ref>
Field text(std::string key, Ref ref) {
  return {std::move(key), [ref](Scenario& s, std::string_view v) { ref(s) = std::string(v); },
          [ref](const Scenario& s) -> std::optional<std::string> {
            return ref(const_cast<Scenario&>(s));
          }};
}

// Field of an optional section: emitted only when the section exists.
Field optional_field(Field f, std::function<bool(const Scenario&)> present) {
  auto get = f.get;
  f.get = [get, present](const Scenario& s) -> std::optional<std::string> {
    if (!present(s)) return std::nullopt;
    return get(s);
  };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(count("run.seed", [](Scenario& s) -> std::uint64_t& { return s.seed; }));

    t.push_back(real("game.w_l", [](Scenario& s) -> double& { return s.params.w_l; }));
    t.push_back(real("game.w_p", [](Scenario& s) -> double& { return s.params.w_p; }));
    t.push_back(real("game.o_A", [](Scenario& s) -> double& { return s.params.o.a(); }));
    t.push_back(real("game.o_B", [](Scenario& s) -> double& { return s.params.o.b(); }));
    t.push_back(real("game.w_c", [](Scenario& s) -> double& { return s.params.w_c; }));
    t.push_back(real("game.q_max", [](Scenario& s) -> double& { return s.params.q_max; }));
    t.push_back(real("game.theta", [](Scenario& s) -> double& { return s.params.theta; }));
    t.push_back(
        real("game.boundary_tol", [](Scenario& s) -> double& { return s.params.boundary_tol; }));

    auto has_qos = [](const Scenario& s) { return s.qos.has_value(); };
    t.push_back(optional_field(
        real("qos.low_A", [](Scenario& s) -> double& { return ensure(s.qos).low.a(); }), has_qos));
    t.push_back(optional_field(
        real("qos.low_B", [](Scenario& s) -> double& { return ensure(s.qos).low.b(); }), has_qos));
    t.push_back(optional_field(
        real("qos.high_A", [](Scenario& s) -> double& { return ensure(s.qos).high.a(); }), has_qos));
    t.push_back(optional_field(
        real("qos.high_B", [](Scenario& s) -> double& { return ensure(s.qos).high.b(); }), has_qos));

    auto has_rmse = [](const Scenario& s) { return s.rmse.has_value(); };
    t.push_back(optional_field(
        real("rmse.local_A", [](Scenario& s) -> double& { return ensure(s.rmse).local.a(); }),
        has_rmse));
    t.push_back(optional_field(
        real("rmse.local_B", [](Scenario& s) -> double& { return ensure(s.rmse).local.b(); }),
        has_rmse));
    t.push_back(optional_field(
        real("rmse.fl_A", [](Scenario& s) -> double& { return ensure(s.rmse).fl.a(); }), has_rmse));
    t.push_back(optional_field(
        real("rmse.fl_B", [](Scenario& s) -> double& { return ensure(s.rmse).fl.b(); }), has_rmse));

    auto has_fl = [](const Scenario& s) { return s.flsim.has_value(); };
    t.push_back(optional_field(
        Field{"flsim.beta_list",
              [](Scenario& s, std::string_view v) { ensure(s.flsim).beta_list = to_list(v); },
              [](const Scenario& s) -> std::optional<std::string> {
                return from_list(s.flsim->beta_list);
              }},
        has_fl));
    t.push_back(optional_field(
        count("flsim.seeds", [](Scenario& s) -> std::uint64_t& { return ensure(s.flsim).seeds; }),
        has_fl));
    t.push_back(optional_field(
        count("flsim.runs", [](Scenario& s) -> std::uint64_t& { return ensure(s.flsim).runs; }),
        has_fl));
    t.push_back(optional_field(count("flsim.clusters",
                                     [](Scenario& s) -> std::size_t& {
                                       return ensure(s.flsim).data.clusters;
                                     }),
                               has_fl));
    t.push_back(optional_field(count("flsim.n_per_station",
                                     [](Scenario& s) -> std::size_t& {
                                       return ensure(s.flsim).data.n_per_station;
                                     }),
                               has_fl));
    t.push_back(optional_field(count("flsim.base_features",
                                     [](Scenario& s) -> std::size_t& {
                                       return ensure(s.flsim).data.base_features;
                                     }),
                               has_fl));
    t.push_back(optional_field(
        real("flsim.noise", [](Scenario& s) -> double& { return ensure(s.flsim).data.noise; }),
        has_fl));
    t.push_back(optional_field(real("flsim.train_fraction",
                                    [](Scenario& s) -> double& {
                                      return ensure(s.flsim).data.train_fraction;
                                    }),
                               has_fl));
    t.push_back(optional_field(
        count("flsim.rounds",
              [](Scenario& s) -> std::size_t& { return ensure(s.flsim).train.rounds; }),
        has_fl));
    t.push_back(optional_field(
        count("flsim.local_epochs",
              [](Scenario& s) -> std::size_t& { return ensure(s.flsim).train.local_epochs; }),
        has_fl));
    t.push_back(optional_field(count("flsim.personalize_epochs",
                                     [](Scenario& s) -> std::size_t& {
                                       return ensure(s.flsim).train.personalize_epochs;
                                     }),
                               has_fl));
    t.push_back(optional_field(
        real("flsim.lr", [](Scenario& s) -> double& { return ensure(s.flsim).train.lr; }), has_fl));
    t.push_back(optional_field(count("flsim.local_only_epochs",
                                     [](Scenario& s) -> std::size_t& {
                                       return ensure(s.flsim).train.local_only_epochs;
                                     }),
                               has_fl));

    t.push_back(
        count("oracle.draws", [](Scenario& s) -> std::uint64_t& { return s.oracle.draws; }));
    t.push_back(count("oracle.price_steps",
                      [](Scenario& s) -> std::size_t& { return s.oracle.audit.price_steps; }));
    t.push_back(count("oracle.x_steps",
                      [](Scenario& s) -> std::size_t& { return s.oracle.audit.x_steps; }));
    t.push_back(count("oracle.max_iters",
                      [](Scenario& s) -> std::size_t& { return s.oracle.audit.max_iters; }));
    t.push_back(real("oracle.tolerance_steps",
                     [](Scenario& s) -> double& { return s.oracle.audit.tolerance_steps; }));
    t.push_back(real("oracle.min_boundary_steps",
                     [](Scenario& s) -> double& { return s.oracle.audit.min_boundary_steps; }));
    t.push_back(real("oracle.w_l_lo", [](Scenario& s) -> double& { return s.oracle.ranges.w_l_lo; }));
    t.push_back(real("oracle.w_l_hi", [](Scenario& s) -> double& { return s.oracle.ranges.w_l_hi; }));
    t.push_back(real("oracle.w_p_lo", [](Scenario& s) -> double& { return s.oracle.ranges.w_p_lo; }));
    t.push_back(real("oracle.w_p_hi", [](Scenario& s) -> double& { return s.oracle.ranges.w_p_hi; }));
    t.push_back(real("oracle.q_lo", [](Scenario& s) -> double& { return s.oracle.ranges.q_lo; }));
    t.push_back(real("oracle.q_hi", [](Scenario& s) -> double& { return s.oracle.ranges.q_hi; }));
    t.push_back(real("oracle.o_lo", [](Scenario& s) -> double& { return s.oracle.ranges.o_lo; }));
    t.push_back(real("oracle.o_hi", [](Scenario& s) -> double& { return s.oracle.ranges.o_hi; }));
    auto has_fixed = [](const Scenario& s) { return s.oracle.fixed_q.has_value(); };
    t.push_back(optional_field(
        real("oracle.fixed_q_A",
             [](Scenario& s) -> double& { return ensure(s.oracle.fixed_q).a(); }),
        has_fixed));
    t.push_back(optional_field(
        real("oracle.fixed_q_B",
             [](Scenario& s) -> double& { return ensure(s.oracle.fixed_q).b(); }),
        has_fixed));

    t.push_back(text("ingest.path", [](Scenario& s) -> std::string& { return s.ingest.path; }));
    t.push_back(text("ingest.start_column",
                     [](Scenario& s) -> std::string& { return s.ingest.start_column; }));
    t.push_back(text("ingest.end_column",
                     [](Scenario& s) -> std::string& { return s.ingest.end_column; }));
    t.push_back(text("ingest.energy_column",
                     [](Scenario& s) -> std::string& { return s.ingest.energy_column; }));
    return t;
  }();
  return table;
}

void require_group(const std::set<std::string>& seen, const std::string& prefix,
                   std::initializer_list<const char*> names) {
  bool any = false;
  for (const char* n : names) any = any || seen.count(prefix + n);
  if (!any) return;
  for (const char* n : names) {
    if (!seen.count(prefix + n)) throw ConfigError(prefix + n + ": missing (required with the other " + prefix + "* keys)");
  }
}

void validate(const Scenario& s) {
  auto wrap = [](const std::string& where, const auto& check) {
    try {
      check();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  };
  wrap("game", [&] { s.params.validate(); });
  const int sources = int(s.qos.has_value()) + int(s.rmse.has_value()) + int(s.flsim.has_value());
  if (sources > 1) throw ConfigError("scenario declares more than one QoS source (qos, rmse, flsim)");
  if (s.qos) wrap("qos", [&] { s.qos->validate(); });
  if (s.rmse) {
    for (StationId i : kStations) {
      if (!(s.rmse->local[i] >= 0.0) || !(s.rmse->fl[i] >= 0.0)) {
        throw ConfigError("rmse: values must be >= 0");
      }
    }
  }
  if (s.flsim) {
    if (s.flsim->beta_list.empty()) throw ConfigError("flsim.beta_list: empty");
    if (s.flsim->seeds == 0) throw ConfigError("flsim.seeds: must be >= 1");
    if (s.flsim->runs == 0) throw ConfigError("flsim.runs: must be >= 1");
    if (!(s.flsim->train.lr > 0.0)) throw ConfigError("flsim.lr: must be > 0");
    for (double beta : s.flsim->beta_list) {
      flsim::HeterogeneityConfig c = s.flsim->data;
      c.beta = beta;
      wrap("flsim", [&] { c.validate(); });
    }
  }
  const auto& r = s.oracle.ranges;
  if (!(r.w_l_lo > 0.0 && r.w_l_lo <= r.w_l_hi && r.w_p_lo > 0.0 && r.w_p_lo <= r.w_p_hi &&
        r.q_lo >= 0.0 && r.q_lo <= r.q_hi && r.o_lo >= 0.0 && r.o_lo <= r.o_hi)) {
    throw ConfigError("oracle: draw ranges must be ordered and within the parameter domain");
  }
  if (s.oracle.audit.price_steps < 2 || s.oracle.audit.x_steps < 2 || s.oracle.audit.max_iters < 1) {
    throw ConfigError("oracle: price_steps and x_steps must be >= 2, max_iters >= 1");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  std::map<std::string, const Field*, std::less<>> index;
  for (const Field& f : fields()) index.emplace(f.key, &f);

  Scenario s;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key(trim(l.substr(0, eq)));
    const std::string_view value = trim(l.substr(eq + 1));
    const auto it = index.find(key);
    if (it == index.end()) throw ConfigError(where + ": " + key + ": unknown key");
    if (!seen.insert(key).second) throw ConfigError(where + ": " + key + ": duplicate key");
    try {
      it->second->set(s, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + key + ": " + e.what());
    }
  }
  require_group(seen, "qos.", {"low_A", "low_B", "high_A", "high_B"});
  require_group(seen, "rmse.", {"local_A", "local_B", "fl_A", "fl_B"});
  require_group(seen, "oracle.", {"fixed_q_A", "fixed_q_B"});
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  std::string out;
  for (const Field& f : fields()) {
    if (auto v = f.get(s)) out += f.key + " = " + *v + "\n";
  }
  return out;
}

}  // namespace evcoop::cli
