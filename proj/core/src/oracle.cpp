#include "evcoop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>

namespace evcoop::oracle {

void GridSpec::validate() const {
  for (StationId i : kStations) {
    if (!(price_lo[i] >= 0.0)) throw std::invalid_argument("price grid must start at >= 0");
    if (!(price_hi[i] > price_lo[i])) throw std::invalid_argument("price grid must be non-empty");
  }
  if (price_steps < 2) throw std::invalid_argument("price_steps must be >= 2");
  if (x_steps < 2) throw std::invalid_argument("x_steps must be >= 2");
}

double GridSpec::step(StationId i) const noexcept {
  return (price_hi[i] - price_lo[i]) / static_cast<double>(price_steps - 1);
}

double GridSpec::price(StationId i, std::size_t k) const noexcept {
  if (k + 1 >= price_steps) return price_hi[i];
  return price_lo[i] + (price_hi[i] - price_lo[i]) * static_cast<double>(k) /
                           static_cast<double>(price_steps - 1);
}

std::size_t GridSpec::nearest(StationId i, double p) const noexcept {
  const double t = std::round((p - price_lo[i]) / step(i));
  if (!(t > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(t), price_steps - 1);
}

GridSpec default_grid(const QosVector& q_eff, const ModelParams& params, std::size_t price_steps,
                      std::size_t x_steps) {
  GridSpec g;
  const double width = (params.w_l * std::max(q_eff.a(), q_eff.b()) + 2.0) / params.w_p;
  for (StationId i : kStations) {
    g.price_lo[i] = params.o[i];
    g.price_hi[i] = params.o[i] + width;
  }
  g.price_steps = price_steps;
  g.x_steps = x_steps;
  return g;
}

EvChoice payoff_argmax(double x, const PriceProfile& p, const QosVector& q_eff,
                       const ModelParams& params) {
  const double ua = ev_payoff(x, EvChoice::A, p, q_eff, params);
  const double ub = ev_payoff(x, EvChoice::B, p, q_eff, params);
  if (ua >= 0.0 && ua >= ub) return EvChoice::A;
  if (ub >= 0.0) return EvChoice::B;
  return EvChoice::None;
}

namespace {

double cell_center(std::size_t k, std::size_t n) {
  return (static_cast<double>(k) + 0.5) / static_cast<double>(n);
}

// Number of midpoint cells whose EV picks station i.
std::size_t customer_cells(StationId i, const PriceProfile& p, const QosVector& q_eff,
                           const ModelParams& params, std::size_t n) {
  const EvChoice want = choice_for(i);
  auto picks = [&](std::size_t k) { return payoff_argmax(cell_center(k, n), p, q_eff, params) == want; };
  // First cell where the prefix (A) ends or the suffix (B) starts.
  std::size_t lo = 0, hi = n;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const bool past = i == StationId::A ? !picks(mid) : picks(mid);
    if (past) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return i == StationId::A ? lo : n - lo;
}

double station_profit(StationId i, const PriceProfile& p, const QosVector& q_eff,
                      const ModelParams& params, std::size_t x_steps) {
  const double share =
      static_cast<double>(customer_cells(i, p, q_eff, params, x_steps)) / static_cast<double>(x_steps);
  return (p[i] - params.o[i]) * share;
}

std::size_t best_response_index(StationId i, double p_other, const QosVector& q_eff,
                                const ModelParams& params, const GridSpec& grid) {
  PriceProfile p;
  p[other(i)] = p_other;
  std::size_t best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.price_steps; ++k) {
    p[i] = grid.price(i, k);
    const double v = station_profit(i, p, q_eff, params, grid.x_steps);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace

PerStation<double> simulate_shares(const PriceProfile& p, const QosVector& q_eff,
                                   const ModelParams& params, std::size_t x_steps) {
  if (x_steps < 2) throw std::invalid_argument("x_steps must be >= 2");
  std::size_t na = 0, nb = 0;
  for (std::size_t k = 0; k < x_steps; ++k) {
    switch (payoff_argmax(cell_center(k, x_steps), p, q_eff, params)) {
      case EvChoice::A:
        ++na;
        break;
      case EvChoice::B:
        ++nb;
        break;
      case EvChoice::None:
        break;
    }
  }
  const double n = static_cast<double>(x_steps);
  return {static_cast<double>(na) / n, static_cast<double>(nb) / n};
}

PerStation<double> simulate_shares_bisect(const PriceProfile& p, const QosVector& q_eff,
                                          const ModelParams& params, std::size_t x_steps) {
  if (x_steps < 2) throw std::invalid_argument("x_steps must be >= 2");
  const double n = static_cast<double>(x_steps);
  return {static_cast<double>(customer_cells(StationId::A, p, q_eff, params, x_steps)) / n,
          static_cast<double>(customer_cells(StationId::B, p, q_eff, params, x_steps)) / n};
}

double best_response(StationId i, double p_other, const QosVector& q_eff, const ModelParams& params,
                     const GridSpec& grid) {
  grid.validate();
  return grid.price(i, best_response_index(i, p_other, q_eff, params, grid));
}

BestResponseTrace best_response_dynamics(const PriceProfile& p0, const QosVector& q_eff,
                                         const ModelParams& params, const GridSpec& grid,
                                         std::size_t max_iters) {
  grid.validate();
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");

  using State = std::pair<std::size_t, std::size_t>;
  State s{grid.nearest(StationId::A, p0.a()), grid.nearest(StationId::B, p0.b())};
  auto to_prices = [&](State st) {
    return PriceProfile{grid.price(StationId::A, st.first), grid.price(StationId::B, st.second)};
  };

  BestResponseTrace trace;
  trace.iterates.push_back(to_prices(s));
  std::set<State> visited{s};
  for (std::size_t it = 0; it < max_iters; ++it) {
    State next;
    next.first = best_response_index(StationId::A, grid.price(StationId::B, s.second), q_eff, params, grid);
    next.second = best_response_index(StationId::B, grid.price(StationId::A, next.first), q_eff, params, grid);
    if (next == s) {
      trace.converged = true;
      return trace;
    }
    trace.iterates.push_back(to_prices(next));
    if (!visited.insert(next).second) {
      trace.cycle_detected = true;
      return trace;
    }
    s = next;
  }
  return trace;
}

std::vector<PriceProfile> BestResponseTrace::terminal_set() const {
  if (!cycle_detected) return {terminal()};
  const PriceProfile& last = terminal();
  std::size_t first = iterates.size() - 1;
  for (std::size_t k = 0; k + 1 < iterates.size(); ++k) {
    if (iterates[k].a() == last.a() && iterates[k].b() == last.b()) {
      first = k;
      break;
    }
  }
  return {iterates.begin() + static_cast<std::ptrdiff_t>(first), iterates.end() - 1};
}

PerStation<double> max_deviation_gain(const PriceProfile& p, const QosVector& q_eff,
                                      const ModelParams& params, const GridSpec& grid) {
  grid.validate();
  PerStation<double> gain;
  for (StationId i : kStations) {
    const double here = station_profit(i, p, q_eff, params, grid.x_steps);
    PriceProfile dev = p;
    dev[i] = grid.price(i, best_response_index(i, p[other(i)], q_eff, params, grid));
    gain[i] = std::max(station_profit(i, dev, q_eff, params, grid.x_steps) - here, 0.0);
  }
  return gain;
}

PricingRegime observed_regime(const PriceProfile& p, const QosVector& q_eff,
                              const ModelParams& params, const GridSpec& grid) {
  // A station is out of the market when it sells nothing or sells at cost.
  PerStation<bool> out;
  for (StationId i : kStations) {
    out[i] = customer_cells(i, p, q_eff, params, grid.x_steps) == 0 ||
             p[i] - params.o[i] < 0.5 * grid.step(i);
  }
  if (out.a() && out.b()) return PricingRegime::Degenerate;
  if (out.a() || out.b()) return PricingRegime::Dominance;

  // Payoff of the EV standing on each station.
  const double da = ev_payoff(0.0, EvChoice::A, p, q_eff, params);
  const double db = ev_payoff(1.0, EvChoice::B, p, q_eff, params);
  const double slack =
      1.5 * params.w_p * std::max(grid.step(StationId::A), grid.step(StationId::B));
  if (da + db < 1.0 - slack) return PricingRegime::LocalMonopolies;
  if (da + db <= 1.0 + slack) return PricingRegime::SharedBoundary;
  return PricingRegime::Competitive;
}

Draw stratified_draw(const DrawRanges& ranges, std::uint64_t seed, std::uint64_t k) {
  static constexpr std::array<PricingRegime, 4> kTargets{
      PricingRegime::Competitive, PricingRegime::SharedBoundary, PricingRegime::LocalMonopolies,
      PricingRegime::Dominance};
  const PricingRegime target = kTargets[k % kTargets.size()];

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  std::mt19937_64 rng(seq);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  for (;;) {
    Draw d;
    d.params.w_l = uniform(ranges.w_l_lo, ranges.w_l_hi);
    d.params.w_p = uniform(ranges.w_p_lo, ranges.w_p_hi);
    d.params.o = {uniform(ranges.o_lo, ranges.o_hi), uniform(ranges.o_lo, ranges.o_hi)};
    d.q = {uniform(ranges.q_lo, ranges.q_hi), uniform(ranges.q_lo, ranges.q_hi)};
    if (classify_regime(quality_margins(d.q, d.params), d.params.boundary_tol) == target) return d;
  }
}

double boundary_distance_steps(const Draw& d, const GridSpec& grid) {
  const PerStation<double> m = quality_margins(d.q, d.params);
  // Distances are measured in units of the payoff at a station's doorstep,
  // which one price step moves by w_p * step.
  std::vector<double> dist{std::abs(m.a()), std::abs(m.b())};
  const double sum = m.a() + m.b();
  const double gap = std::abs(m.a() - m.b());
  if (m.a() > 0.0 && m.b() > 0.0) {
    dist.push_back(std::abs(sum - 3.0));
    dist.push_back(std::abs(sum - 2.0) / 2.0);
    dist.push_back(std::abs(gap - 3.0) / 3.0);
  }
  const double lead = std::max(m.a(), m.b());
  if (std::min(m.a(), m.b()) <= 0.0 && lead > 0.0) dist.push_back(std::abs(lead - 2.0) / 2.0);
  const double unit =
      d.params.w_p * std::max(grid.step(StationId::A), grid.step(StationId::B));
  return *std::min_element(dist.begin(), dist.end()) / unit;
}

AuditRow audit_draw(std::uint64_t index, const Draw& d, const AuditOptions& opts) {
  AuditRow row;
  row.index = index;
  row.draw = d;
  const GridSpec grid = default_grid(d.q, d.params, opts.price_steps, opts.x_steps);

  row.closed = pricing_equilibrium(d.q, d.params);
  row.cold = best_response_dynamics(d.params.o, d.q, d.params, grid, opts.max_iters);
  row.warm = best_response_dynamics(row.closed.p_star, d.q, d.params, grid, opts.max_iters);
  row.oracle_regime = observed_regime(row.cold.terminal(), d.q, d.params, grid);
  auto deviation = [&](const BestResponseTrace& t) {
    PerStation<double> dev{0.0, 0.0};
    for (const PriceProfile& p : t.terminal_set()) {
      for (StationId i : kStations) {
        dev[i] = std::max(dev[i], std::abs(p[i] - row.closed.p_star[i]) / grid.step(i));
      }
    }
    return dev;
  };
  row.deviation_steps = deviation(row.cold);
  row.warm_deviation_steps = deviation(row.warm);
  row.boundary_steps = boundary_distance_steps(d, grid);
  row.judged = row.boundary_steps >= opts.min_boundary_steps;
  row.regime_agrees = row.oracle_regime == row.closed.regime;

  auto settled = [](const BestResponseTrace& t) { return t.converged || t.cycle_detected; };
  auto within = [&](const PerStation<double>& dev) {
    return dev.a() <= opts.tolerance_steps && dev.b() <= opts.tolerance_steps;
  };
  if (row.closed.regime == PricingRegime::SharedBoundary) {
    row.pass = row.regime_agrees && settled(row.cold) && settled(row.warm) &&
               within(row.warm_deviation_steps);
  } else {
    row.pass = row.regime_agrees && settled(row.cold) && within(row.deviation_steps);
  }
  return row;
}

bool AuditSummary::all_regimes_covered() const noexcept {
  return regime_counts[1] > 0 && regime_counts[2] > 0 && regime_counts[3] > 0 &&
         regime_counts[4] > 0;
}

AuditSummary summarize(const std::vector<AuditRow>& rows) {
  AuditSummary s;
  s.draws = rows.size();
  for (const AuditRow& r : rows) {
    ++s.regime_counts[static_cast<std::size_t>(case_number(r.closed.regime))];
    if (!r.judged) continue;
    ++s.judged;
    if (r.pass) ++s.passed;
    if (r.regime_agrees) ++s.regime_agreements;
    const PerStation<double>& dev =
        r.closed.regime == PricingRegime::SharedBoundary ? r.warm_deviation_steps : r.deviation_steps;
    s.max_deviation_steps = std::max({s.max_deviation_steps, dev.a(), dev.b()});
  }
  return s;
}

}  // namespace evcoop::oracle
