// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "evcoop/flsim.hpp"
#include "evcoop/oracle.hpp"
#include "evcoop/participation.hpp"
#include "evcoop/pricing.hpp"
#include "support/gen.hpp"
#include "support/run.hpp"

using namespace evcoop;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. Closed-form prices against best-response dynamics.
Verdict oracle_equivalence() {
  const auto t0 = Clock::now();
  std::vector<oracle::AuditRow> rows;
  for (std::uint64_t k = 0; k < 500; ++k) {
    rows.push_back(oracle::audit_draw(k, oracle::stratified_draw({}, 2024, k), {}));
  }
  const oracle::AuditSummary s = oracle::summarize(rows);
  const double t = seconds_since(t0);
  const bool pass = s.ok() && s.all_regimes_covered() && s.max_deviation_steps <= 2.0 &&
                    s.agreement_rate() == 1.0 && t < 60.0;
  return {pass, fmt("draws=%zu judged=%zu passed=%zu max_dev=%.3f steps agreement=%.3f "
                    "cases=%zu/%zu/%zu/%zu time=%.1fs",
                    s.draws, s.judged, s.passed, s.max_deviation_steps, s.agreement_rate(),
                    s.regime_counts[1], s.regime_counts[2], s.regime_counts[3], s.regime_counts[4], t)};
}

// 2. Closed-form market shares against the per-EV argmax grid.
Verdict market_shares() {
  const auto t0 = Clock::now();
  constexpr std::size_t kCells = 100000;
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    testkit::Gen g(7001, k);
    const ModelParams p = g.params();
    const QosVector q = g.qos();
    const PriceProfile price{p.o.a() + g.uniform(-0.5, 1.5) * p.w_l * q.a() / p.w_p,
                             p.o.b() + g.uniform(-0.5, 1.5) * p.w_l * q.b() / p.w_p};
    const PriceProfile clamped{std::max(price.a(), 0.0), std::max(price.b(), 0.0)};
    const PerStation<double> closed = shares(market_partition(clamped, q, p));
    const PerStation<double> grid = oracle::simulate_shares(clamped, q, p, kCells);
    for (StationId i : kStations) worst = std::max(worst, std::abs(closed[i] - grid[i]));
  }
  const double t = seconds_since(t0);
  return {worst <= 2e-5 && t < 10.0, fmt("scenarios=200 worst=%.2e time=%.1fs", worst, t)};
}

// 3. Internal identities of the pricing regimes.
Verdict identities() {
  double worst1 = 0.0, worst3 = 0.0, worst_join = 0.0;
  std::size_t n1 = 0, n3 = 0;
  for (std::uint64_t k = 0; n1 < 300 || n3 < 300; ++k) {
    testkit::Gen g(7002, k);
    const ModelParams p = g.params();
    const QosVector q = g.qos();
    const PerStation<double> m = quality_margins(q, p);
    const PricingOutcome o = pricing_equilibrium(q, p);
    for (StationId i : kStations) {
      if (o.regime == PricingRegime::Competitive) {
        const double d = 1 + (m[i] - m[other(i)]) / 3;
        const double want = d * d / (2 * p.w_p);
        worst1 = std::max(worst1, std::abs(o.revenue[i] - want) / want);
      } else if (o.regime == PricingRegime::LocalMonopolies) {
        const double want = m[i] * m[i] / (4 * p.w_p);
        worst3 = std::max(worst3, std::abs(o.revenue[i] - want) / want);
      }
    }
    n1 += o.regime == PricingRegime::Competitive;
    n3 += o.regime == PricingRegime::LocalMonopolies;
  }
  for (std::uint64_t k = 0; k < 300; ++k) {
    testkit::Gen g(7003, k);
    ModelParams p = g.params();
    const double da = g.uniform(0.05, 1.95);
    const QosVector q{(da + p.w_p * p.o.a()) / p.w_l, (2.0 - da + p.w_p * p.o.b()) / p.w_l};
    const PerStation<double> m = quality_margins(q, p);
    const double sum = m.a() + m.b();
    for (StationId i : kStations) {
      const double shared = p.o[i] + m[i] * (1 - 1 / sum) / p.w_p;
      const double local = (p.w_p * p.o[i] + p.w_l * q[i]) / (2 * p.w_p);
      worst_join = std::max(worst_join, std::abs(shared - local));
      worst_join = std::max(worst_join, std::abs(pricing_equilibrium(q, p).p_star[i] - local));
    }
  }
  const bool pass = worst1 <= 1e-9 && worst3 <= 1e-9 && worst_join <= 1e-12;
  return {pass, fmt("case1 rel=%.1e (n=%zu) case3 rel=%.1e (n=%zu) sum=2 join=%.1e", worst1, n1,
                    worst3, n3, worst_join)};
}

// Profit of every cell recomputed with the brute-force oracle: dynamics from
// cost, grid profit at the terminal profile, minus the FL fee.
PerStation<double> oracle_profit(ParticipationProfile r, const QosProfile& q, const ModelParams& p,
                                 double& step) {
  const QosVector qe = effective_qos(r, q);
  const oracle::GridSpec grid = oracle::default_grid(qe, p, 4001, 1000000);
  const oracle::BestResponseTrace t = oracle::best_response_dynamics(p.o, qe, p, grid);
  const PriceProfile& end = t.terminal();
  const PerStation<double> s = oracle::simulate_shares_bisect(end, qe, p, grid.x_steps);
  step = std::max(grid.step(StationId::A), grid.step(StationId::B));
  const PerStation<double> c = fl_cost(r, p);
  return {(end.a() - p.o.a()) * s.a() - c.a(), (end.b() - p.o.b()) * s.b() - c.b()};
}

// 4. FL improves both QoS values yet full participation is not an equilibrium.
Verdict refusal_witness() {
  const auto t0 = Clock::now();
  ModelParams p;
  p.w_c = 0.0;
  const auto w = find_fl_refusal_witness(p, {}, 10000, 2024);
  if (!w) return {false, "no witness within budget"};

  bool improves = true;
  for (StationId i : kStations) improves = improves && w->qos.high[i] >= w->qos.low[i];

  // Independent recomputation of all four cells.
  ProfitMatrix check;
  double max_err = 0.0, step = 0.0;
  for (ParticipationProfile r : kProfiles) {
    check(r) = oracle_profit(r, w->qos, p, step);
    for (StationId i : kStations) max_err = std::max(max_err, std::abs(check(r)[i] - w->profits(r)[i]));
  }
  const StationId i = w->deviator;
  const double gain = check(deviate({true, true}, i), i) - check({true, true}, i);
  const double slack = 4 * step;
  const double t = seconds_since(t0);
  const bool pass = improves && gain > slack && max_err <= slack && t < 30.0;
  return {pass, fmt("q_low=(%.4g,%.4g) q_high=(%.4g,%.4g) deviator=%s gain=%.4g oracle_gain=%.4g "
                    "cell_err=%.2e %s draws=%llu time=%.1fs",
                    w->qos.low.a(), w->qos.low.b(), w->qos.high.a(), w->qos.high.b(),
                    std::string(to_string(i)).c_str(), w->gain, gain, max_err,
                    w->from_directed ? "directed" : "random",
                    static_cast<unsigned long long>(w->draws_used), t)};
}

// 5. Measured beta = 0.01 RMSEs through the whole pipeline.
Verdict skewed_rmse_pipeline() {
  const ModelParams p;  // experiment defaults
  QosProfile q;
  const PerStation<double> local{6.59, 6.04}, fl{6.40, 5.89};
  for (StationId i : kStations) {
    q.low[i] = flsim::qos_map(local[i], p);
    q.high[i] = flsim::qos_map(fl[i], p);
  }
  const ProfitMatrix m = build_profit_matrix(q, p);
  const ParticipationEquilibrium eq = pure_nash(m);
  double refuse = 0.0;
  for (StationId i : kStations) refuse = std::max(refuse, deviation_gain(m, {true, true}, i));

  // Golden cells, frozen from this pipeline and checked by hand.
  std::istringstream golden(testkit::read_file(std::string(EVCOOP_GOLDEN_DIR) +
                                               "/beta001_participation.csv"));
  std::string line;
  std::getline(golden, line);
  double golden_err = 0.0;
  std::size_t golden_rows = 0;
  while (std::getline(golden, line)) {
    std::istringstream ls(line);
    std::string profile, wa, wb;
    std::getline(ls, profile, ',');
    std::getline(ls, wa, ',');
    std::getline(ls, wb, ',');
    const ParticipationProfile r{profile[0] == '1', profile[1] == '1'};
    golden_err = std::max({golden_err, std::abs(m(r, StationId::A) - std::stod(wa)),
                           std::abs(m(r, StationId::B) - std::stod(wb))});
    ++golden_rows;
  }

  // The oracle agrees on the equilibrium prices of every profile.
  double max_steps = 0.0;
  for (ParticipationProfile r : kProfiles) {
    const QosVector qe = effective_qos(r, q);
    const oracle::GridSpec grid = oracle::default_grid(qe, p);
    const oracle::BestResponseTrace t = oracle::best_response_dynamics(p.o, qe, p, grid);
    const PricingOutcome o = pricing_equilibrium(qe, p);
    for (StationId i : kStations) {
      max_steps = std::max(max_steps, std::abs(t.terminal()[i] - o.p_star[i]) / grid.step(i));
    }
  }

  const bool pass = !eq.contains({true, true}) && refuse > 0.0 && golden_rows == 4 &&
                    golden_err <= 1e-9 && max_steps <= 2.0;
  return {pass, fmt("W11=(%.4g,%.4g) W10=(%.4g,%.4g) W01=(%.4g,%.4g) W00=(%.4g,%.4g) "
                    "refusal_gain=%.4g golden_err=%.1e oracle_dev=%.2f steps",
                    m({true, true}, StationId::A), m({true, true}, StationId::B),
                    m({true, false}, StationId::A), m({true, false}, StationId::B),
                    m({false, true}, StationId::A), m({false, true}, StationId::B),
                    m({false, false}, StationId::A), m({false, false}, StationId::B), refuse,
                    golden_err, max_steps)};
}

// 6. FedAvg with personalization beats local training at moderate skew.
Verdict fl_benefit() {
  const auto t0 = Clock::now();
  const ModelParams p;
  std::vector<double> la, lb, fa, fb;
  for (std::uint64_t k = 0; k < 10; ++k) {
    flsim::HeterogeneityConfig c;
    c.beta = 1.0;
    c.seed = flsim::derive_seed(2024, k);
    const flsim::FlRunResult r = flsim::run_experiment(flsim::generate_partitioned_data(c), {}, p);
    la.push_back(r.rmse_local.a());
    lb.push_back(r.rmse_local.b());
    fa.push_back(r.rmse_fl.a());
    fb.push_back(r.rmse_fl.b());
  }
  const double t = seconds_since(t0);
  const bool pass = median(fa) <= median(la) && median(fb) <= median(lb) && t < 120.0;
  return {pass, fmt("seeds=10 A: local=%.4f fl=%.4f  B: local=%.4f fl=%.4f time=%.1fs", median(la),
                    median(fa), median(lb), median(fb), t)};
}

// 7. Every command reproduces its output byte for byte.
Verdict determinism() {
  testkit::TempDir tmp;
  const std::string golden = EVCOOP_GOLDEN_DIR;
  testkit::write_file(tmp / "fl.txt",
                      "flsim.beta_list = 0.1,10\nflsim.seeds = 2\nflsim.runs = 2\n"
                      "flsim.n_per_station = 300\nflsim.rounds = 10\n");
  testkit::write_file(tmp / "sessions.csv",
                      "start_datetime,end_datetime,energy_kwh\n"
                      "2017-03-06T08:30:00,2017-03-06T10:00:00,12.5\n"
                      "2017-03-07T17:45:00,2017-03-07T19:15:00,7.25\n"
                      "2017-03-08T23:00:00,2017-03-09T01:30:00,20\n"
                      "2017-03-09T09:00:00,bad,1\n");
  testkit::write_file(tmp / "ingest.txt", "ingest.path = " + (tmp / "sessions.csv").string() + "\n");
  const std::string beta001 = "--scenario \"" + golden + "/beta001_rmse.scenario\"";
  const std::string fl = "--scenario \"" + (tmp / "fl.txt").string() + "\"";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"equilibrium", "equilibrium " + beta001},
      {"participation", "participation " + beta001},
      {"sweep-beta", "sweep-beta " + fl},
      {"oracle-check", "oracle-check --draws 40"},
      {"flsim", "flsim " + fl},
      {"ingest", "ingest --scenario \"" + (tmp / "ingest.txt").string() + "\""},
  };
  std::size_t identical = 0, total = 0;
  std::string failed;
  for (const auto& [name, args] : commands) {
    for (const char* format : {"csv", "json"}) {
      std::string outputs[2];
      bool ok = true;
      for (int run = 0; run < 2; ++run) {
        const auto out = tmp / (name + "." + format + "." + std::to_string(run));
        const auto r = testkit::run_cli(args + " --seed 17 --format " + format + " --out \"" +
                                            out.string() + "\"",
                                        tmp);
        ok = ok && r.exit_code == 0;
        outputs[run] = testkit::read_file(out);
      }
      ++total;
      if (ok && !outputs[0].empty() && outputs[0] == outputs[1]) {
        ++identical;
      } else {
        failed += " " + name + "/" + format;
      }
    }
  }
  return {identical == total,
          fmt("%zu/%zu command-format pairs byte-identical%s", identical, total, failed.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"oracle equivalence of equilibrium prices", oracle_equivalence},
      {"market shares vs per-EV simulation", market_shares},
      {"pricing identities", identities},
      {"FL refusal witness without FL cost", refusal_witness},
      {"beta = 0.01 RMSEs give a profit matrix without FL equilibrium", skewed_rmse_pipeline},
      {"FL benefit at desk scale", fl_benefit},
      {"CLI determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
