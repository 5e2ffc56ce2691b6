#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "evcoop/flsim.hpp"
#include "evcoop/oracle.hpp"
#include "evcoop/participation.hpp"
#include "evcoop/pricing.hpp"
#include "evcoop/sessions.hpp"

namespace evcoop::cli {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    for (const char* h : header) cell(std::string(h));
    end_row();
  }
  Csv& cell(const std::string& v) {
    if (!first_) out_ << ',';
    out_ << v;
    first_ = false;
    return *this;
  }
  Csv& cell(double v) { return cell(num(v)); }
  Csv& cell(std::uint64_t v) { return cell(std::to_string(v)); }
  Csv& cell(bool v) { return cell(std::string(v ? "1" : "0")); }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  bool first_ = true;
};

std::string ne_set(const ParticipationEquilibrium& eq) {
  if (eq.pure_ne.empty()) return "none";
  std::string s;
  for (const NashProfile& n : eq.pure_ne) {
    if (!s.empty()) s += '|';
    s += to_string(n.profile);
  }
  return s;
}

const NashProfile* find_ne(const ParticipationEquilibrium& eq, ParticipationProfile r) {
  for (const NashProfile& n : eq.pure_ne) {
    if (n.profile == r) return &n;
  }
  return nullptr;
}

json nash_json(const ParticipationEquilibrium& eq) {
  json list = json::array();
  for (const NashProfile& n : eq.pure_ne) {
    list.push_back({{"profile", to_string(n.profile)},
                    {"strict", n.strict},
                    {"fl_happens", n.fl_happens}});
  }
  json out{{"pure_ne", list}, {"payoff_dominant", nullptr}};
  if (eq.payoff_dominant) out["payoff_dominant"] = to_string(*eq.payoff_dominant);
  return out;
}

json matrix_json(const ProfitMatrix& m) {
  json out = json::object();
  for (ParticipationProfile r : kProfiles) {
    out[std::string(to_string(r))] = {{"A", m(r, StationId::A)}, {"B", m(r, StationId::B)}};
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

CommandOutput cmd_equilibrium(const Scenario& s, Format f) {
  const QosProfile q = s.explicit_qos();
  const ProfitMatrix m = build_profit_matrix(q, s.params);
  const ParticipationEquilibrium eq = pure_nash(m);

  Csv csv{"profile", "q_A",      "q_B",      "regime", "case",  "p_A",  "p_B",
          "share_A", "share_B",  "rev_A",    "rev_B",  "W_A",   "W_B",  "scenario",
          "a_lo",    "a_hi",     "b_lo",     "b_hi",   "is_ne", "strict_ne"};
  json profiles = json::array();
  for (ParticipationProfile r : kProfiles) {
    const QosVector qe = effective_qos(r, q);
    const PricingOutcome o = pricing_equilibrium(qe, s.params);
    const NashProfile* ne = find_ne(eq, r);
    const auto& part = o.partition;

    csv.cell(std::string(to_string(r))).cell(qe.a()).cell(qe.b());
    csv.cell(std::string(to_string(o.regime))).cell(std::to_string(case_number(o.regime)));
    csv.cell(o.p_star.a()).cell(o.p_star.b()).cell(o.share.a()).cell(o.share.b());
    csv.cell(o.revenue.a()).cell(o.revenue.b()).cell(m(r, StationId::A)).cell(m(r, StationId::B));
    csv.cell(std::string(to_string(part.scenario)));
    csv.cell(part.a ? num(part.a->lo) : "").cell(part.a ? num(part.a->hi) : "");
    csv.cell(part.b ? num(part.b->lo) : "").cell(part.b ? num(part.b->hi) : "");
    csv.cell(ne != nullptr).cell(ne != nullptr && ne->strict);
    csv.end_row();

    json partition{{"scenario", to_string(part.scenario)},
                   {"a_lo", part.a ? json(part.a->lo) : json(nullptr)},
                   {"a_hi", part.a ? json(part.a->hi) : json(nullptr)},
                   {"b_lo", part.b ? json(part.b->lo) : json(nullptr)},
                   {"b_hi", part.b ? json(part.b->hi) : json(nullptr)}};
    json outcome{{"regime", to_string(o.regime)},
                 {"case", case_number(o.regime)},
                 {"p_A", o.p_star.a()},
                 {"p_B", o.p_star.b()},
                 {"share_A", o.share.a()},
                 {"share_B", o.share.b()},
                 {"rev_A", o.revenue.a()},
                 {"rev_B", o.revenue.b()},
                 {"dominated", o.dominated ? json(to_string(*o.dominated)) : json(nullptr)}};
    profiles.push_back({{"profile", to_string(r)},
                        {"q_A", qe.a()},
                        {"q_B", qe.b()},
                        {"pricing", outcome},
                        {"partition", partition},
                        {"W_A", m(r, StationId::A)},
                        {"W_B", m(r, StationId::B)}});
  }

  const std::string summary = "pure NE: " + ne_set(eq);
  if (f == Format::Csv) return {csv.str(), summary};
  json j{{"profiles", profiles}, {"profit_matrix", matrix_json(m)}, {"nash", nash_json(eq)}};
  return {dump(j), summary};
}

CommandOutput cmd_participation(const Scenario& s, Format f) {
  const ProfitMatrix m = build_profit_matrix(s.explicit_qos(), s.params);
  const ParticipationEquilibrium eq = pure_nash(m);
  const std::string summary = "pure NE: " + ne_set(eq);
  if (f == Format::Json) {
    return {dump({{"profit_matrix", matrix_json(m)}, {"nash", nash_json(eq)}}), summary};
  }
  Csv csv{"profile", "W_A", "W_B", "is_ne", "strict_ne", "fl_happens", "payoff_dominant"};
  for (ParticipationProfile r : kProfiles) {
    const NashProfile* ne = find_ne(eq, r);
    csv.cell(std::string(to_string(r))).cell(m(r, StationId::A)).cell(m(r, StationId::B));
    csv.cell(ne != nullptr).cell(ne != nullptr && ne->strict).cell(r.collaborates());
    csv.cell(eq.payoff_dominant && *eq.payoff_dominant == r);
    csv.end_row();
  }
  return {csv.str(), summary};
}

namespace {

struct SweepPoint {
  double beta;
  std::uint64_t seed;
  flsim::FlRunResult result;
};

std::vector<SweepPoint> run_sweep(const Scenario& s) {
  const FlsimSection& fl = s.flsim_source();
  std::vector<SweepPoint> points;
  for (double beta : fl.beta_list) {
    for (std::uint64_t k = 0; k < fl.seeds; ++k) {
      flsim::HeterogeneityConfig cfg = fl.data;
      cfg.beta = beta;
      cfg.seed = flsim::derive_seed(s.seed, k);
      points.push_back({beta, cfg.seed, flsim::run_averaged(cfg, fl.train, s.params, fl.runs)});
    }
  }
  return points;
}

}  // namespace

CommandOutput cmd_sweep_beta(const Scenario& s, Format f) {
  Csv csv{"beta", "seed", "W_A_00", "W_B_00", "W_A_11", "W_B_11", "ne_set", "fl_happens"};
  json rows = json::array();
  std::size_t fl_points = 0;
  const auto points = run_sweep(s);
  for (const SweepPoint& p : points) {
    const ProfitMatrix m = build_profit_matrix(p.result.qos(), s.params);
    const ParticipationEquilibrium eq = pure_nash(m);
    const bool fl = eq.contains({true, true});
    fl_points += fl;
    const PerStation<double>& w00 = m({false, false});
    const PerStation<double>& w11 = m({true, true});
    csv.cell(p.beta).cell(p.seed).cell(w00.a()).cell(w00.b()).cell(w11.a()).cell(w11.b());
    csv.cell(ne_set(eq)).cell(fl);
    csv.end_row();
    rows.push_back({{"beta", p.beta},
                    {"seed", p.seed},
                    {"W_A_00", w00.a()},
                    {"W_B_00", w00.b()},
                    {"W_A_11", w11.a()},
                    {"W_B_11", w11.b()},
                    {"ne_set", ne_set(eq)},
                    {"fl_happens", fl},
                    {"profit_matrix", matrix_json(m)}});
  }
  const std::string summary = "FL is an equilibrium at " + std::to_string(fl_points) + " of " +
                              std::to_string(points.size()) + " points";
  return {f == Format::Csv ? csv.str() : dump(rows), summary};
}

CommandOutput cmd_oracle_check(const Scenario& s, Format f) {
  if (s.oracle.draws == 0) throw ConfigError("oracle.draws: must be >= 1");

  std::vector<oracle::AuditRow> rows;
  if (s.oracle.fixed_q) {
    rows.push_back(oracle::audit_draw(0, {s.params, *s.oracle.fixed_q}, s.oracle.audit));
  } else {
    for (std::uint64_t k = 0; k < s.oracle.draws; ++k) {
      rows.push_back(
          oracle::audit_draw(k, oracle::stratified_draw(s.oracle.ranges, s.seed, k), s.oracle.audit));
    }
  }
  const oracle::AuditSummary sum = oracle::summarize(rows);

  Csv csv{"index",        "w_l",         "w_p",           "o_A",         "o_B",
          "q_A",          "q_B",         "closed_regime", "oracle_regime", "closed_p_A",
          "closed_p_B",   "oracle_p_A",  "oracle_p_B",    "dev_steps_A", "dev_steps_B",
          "boundary_steps", "settled",   "judged",        "regime_agrees", "pass"};
  json jrows = json::array();
  for (const oracle::AuditRow& r : rows) {
    const bool shared = r.closed.regime == PricingRegime::SharedBoundary;
    const PerStation<double>& dev = shared ? r.warm_deviation_steps : r.deviation_steps;
    const PriceProfile& op = r.cold.terminal();
    const bool settled = r.cold.converged || r.cold.cycle_detected;
    const auto& d = r.draw;
    csv.cell(r.index).cell(d.params.w_l).cell(d.params.w_p).cell(d.params.o.a()).cell(d.params.o.b());
    csv.cell(d.q.a()).cell(d.q.b());
    csv.cell(std::string(to_string(r.closed.regime))).cell(std::string(to_string(r.oracle_regime)));
    csv.cell(r.closed.p_star.a()).cell(r.closed.p_star.b()).cell(op.a()).cell(op.b());
    csv.cell(dev.a()).cell(dev.b()).cell(r.boundary_steps);
    csv.cell(settled).cell(r.judged).cell(r.regime_agrees).cell(r.pass);
    csv.end_row();
    jrows.push_back({{"index", r.index},
                     {"w_l", d.params.w_l},
                     {"w_p", d.params.w_p},
                     {"o_A", d.params.o.a()},
                     {"o_B", d.params.o.b()},
                     {"q_A", d.q.a()},
                     {"q_B", d.q.b()},
                     {"closed_regime", to_string(r.closed.regime)},
                     {"oracle_regime", to_string(r.oracle_regime)},
                     {"closed_p", {r.closed.p_star.a(), r.closed.p_star.b()}},
                     {"oracle_p", {op.a(), op.b()}},
                     {"dev_steps", {dev.a(), dev.b()}},
                     {"boundary_steps", r.boundary_steps},
                     {"settled", settled},
                     {"judged", r.judged},
                     {"regime_agrees", r.regime_agrees},
                     {"pass", r.pass}});
  }

  std::ostringstream line;
  line << "draws=" << sum.draws << " judged=" << sum.judged << " passed=" << sum.passed
       << " max_deviation_steps=" << num(sum.max_deviation_steps)
       << " regime_agreement=" << num(sum.agreement_rate()) << " cases=";
  for (std::size_t c = 1; c <= 4; ++c) line << (c > 1 ? "/" : "") << sum.regime_counts[c];
  line << " degenerate=" << sum.regime_counts[0] << (sum.ok() ? " OK" : " MISMATCH");

  if (f == Format::Csv) return {csv.str(), line.str()};
  json j{{"rows", jrows},
         {"summary",
          {{"draws", sum.draws},
           {"judged", sum.judged},
           {"passed", sum.passed},
           {"max_deviation_steps", sum.max_deviation_steps},
           {"regime_agreement", sum.agreement_rate()},
           {"ok", sum.ok()}}}};
  return {dump(j), line.str()};
}

CommandOutput cmd_flsim(const Scenario& s, Format f,
                        const std::optional<std::filesystem::path>& sessions) {
  const FlsimSection& fl = s.flsim_source();
  std::optional<flsim::Samples> pool;
  if (sessions) {
    const SessionsSchema schema{s.ingest.start_column, s.ingest.end_column, s.ingest.energy_column};
    pool = ingest_sessions_csv(*sessions, schema).rows;
  }

  Csv csv{"beta", "seed", "station", "rmse_local", "rmse_fl", "qos_local", "qos_fl"};
  json rows = json::array();
  std::size_t improved = 0, total = 0;
  for (double beta : fl.beta_list) {
    for (std::uint64_t k = 0; k < fl.seeds; ++k) {
      flsim::HeterogeneityConfig cfg = fl.data;
      cfg.beta = beta;
      cfg.seed = flsim::derive_seed(s.seed, k);
      flsim::FlRunResult res;
      if (pool) {
        res = flsim::run_experiment(flsim::partition_pool(*pool, cfg), fl.train, s.params);
      } else {
        res = flsim::run_averaged(cfg, fl.train, s.params, fl.runs);
      }
      for (StationId i : kStations) {
        csv.cell(beta).cell(cfg.seed).cell(std::string(to_string(i)));
        csv.cell(res.rmse_local[i]).cell(res.rmse_fl[i]).cell(res.qos_local[i]).cell(res.qos_fl[i]);
        csv.end_row();
        rows.push_back({{"beta", beta},
                        {"seed", cfg.seed},
                        {"station", to_string(i)},
                        {"rmse_local", res.rmse_local[i]},
                        {"rmse_fl", res.rmse_fl[i]},
                        {"qos_local", res.qos_local[i]},
                        {"qos_fl", res.qos_fl[i]}});
        improved += res.rmse_fl[i] <= res.rmse_local[i];
        ++total;
      }
    }
  }
  const std::string summary =
      "FL RMSE <= local RMSE in " + std::to_string(improved) + " of " + std::to_string(total) + " rows";
  return {f == Format::Csv ? csv.str() : dump(rows), summary};
}

CommandOutput cmd_ingest(const Scenario& s, Format f,
                         const std::optional<std::filesystem::path>& dataset_out) {
  if (s.ingest.path.empty()) throw ConfigError("ingest.path: no sessions file given");
  const SessionsSchema schema{s.ingest.start_column, s.ingest.end_column, s.ingest.energy_column};
  const IngestResult res = ingest_sessions_csv(std::filesystem::path(s.ingest.path), schema);
  const flsim::Samples& rows = res.rows;

  static constexpr const char* kFeatures[] = {"start_hour", "start_day_of_week", "duration_h",
                                              "start_month"};
  std::vector<double> mean(rows.dim, 0.0);
  double target_mean = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < rows.dim; ++j) mean[j] += rows.row(r)[j];
    target_mean += rows.y[r];
  }
  const double n = static_cast<double>(rows.size());
  for (double& m : mean) m /= n;
  target_mean /= n;

  if (dataset_out) {
    Csv table{"start_hour", "start_day_of_week", "duration_h", "start_month", "energy_kwh", "cluster"};
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (double v : rows.row(r)) table.cell(v);
      table.cell(rows.y[r]).cell(std::to_string(rows.cluster[r]));
      table.end_row();
    }
    std::ofstream out(*dataset_out, std::ios::binary);
    out << table.str();
    if (!out) throw std::runtime_error("cannot write " + dataset_out->string());
  }

  const std::string summary = "ingested " + std::to_string(rows.size()) + " rows, dropped " +
                              std::to_string(res.dropped);
  if (f == Format::Json) {
    json means = json::object();
    for (std::size_t j = 0; j < rows.dim; ++j) means[kFeatures[j]] = mean[j];
    return {dump({{"rows", rows.size()},
                  {"dropped", res.dropped},
                  {"dim", rows.dim},
                  {"feature_mean", means},
                  {"energy_kwh_mean", target_mean}}),
            summary};
  }
  Csv csv{"field", "value"};
  csv.cell(std::string("rows")).cell(static_cast<std::uint64_t>(rows.size())).end_row();
  csv.cell(std::string("dropped")).cell(static_cast<std::uint64_t>(res.dropped)).end_row();
  csv.cell(std::string("dim")).cell(static_cast<std::uint64_t>(rows.dim)).end_row();
  for (std::size_t j = 0; j < rows.dim; ++j) {
    csv.cell(std::string("mean_") + kFeatures[j]).cell(mean[j]).end_row();
  }
  csv.cell(std::string("mean_energy_kwh")).cell(target_mean).end_row();
  return {csv.str(), summary};
}

}  // namespace evcoop::cli
