#include "evcoop/market.hpp"

#include <algorithm>
#include <stdexcept>

namespace evcoop {

std::string_view to_string(MarketScenario s) noexcept {
  switch (s) {
    case MarketScenario::Bifurcated:
      return "bifurcated";
    case MarketScenario::Segmented:
      return "segmented";
    case MarketScenario::MonopolyA:
      return "monopoly_A";
    case MarketScenario::MonopolyB:
      return "monopoly_B";
    case MarketScenario::Empty:
      break;
  }
  return "empty";
}

DeltaPair make_delta_pair(double delta_a, double delta_b) noexcept {
  DeltaPair d;
  d.delta = {delta_a, delta_b};
  d.swapped = delta_b > delta_a;
  d.first = d.swapped ? delta_b : delta_a;
  d.second = d.swapped ? delta_a : delta_b;
  d.tau = (1.0 + d.first - d.second) / 2.0;
  return d;
}

DeltaPair make_delta_pair(const PriceProfile& p, const QosVector& q_eff,
                          const ModelParams& params) noexcept {
  return make_delta_pair(net_attractiveness(StationId::A, p, q_eff, params),
                         net_attractiveness(StationId::B, p, q_eff, params));
}

EvChoice ev_select(double x, double delta_a, double delta_b) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("EV location must lie in [0, 1]");
  const double tau = (1.0 + delta_a - delta_b) / 2.0;
  if (delta_a >= 0.0) {
    const double a_hi = std::max(std::min({delta_a, tau, 1.0}), 0.0);
    if (x <= a_hi) return EvChoice::A;
  }
  if (delta_b >= 0.0) {
    const double b_lo = std::min(std::max({1.0 - delta_b, tau, 0.0}), 1.0);
    if (x >= b_lo) return EvChoice::B;
  }
  return EvChoice::None;
}

EvChoice ev_select(double x, const PriceProfile& p, const QosVector& q_eff,
                   const ModelParams& params) {
  return ev_select(x, net_attractiveness(StationId::A, p, q_eff, params),
                   net_attractiveness(StationId::B, p, q_eff, params));
}

namespace {

// Partition in the frame where the leader sits at x = 0.
MarketPartition leader_frame_partition(double hi, double lo, double tol) {
  MarketPartition m;
  if (approx_le(hi, 0.0, tol)) {
    m.scenario = MarketScenario::Empty;
    return m;
  }
  if (approx_le(lo, 0.0, tol)) {
    m.a = Interval{0.0, std::min(hi, 1.0)};
    m.scenario = MarketScenario::MonopolyA;
    return m;
  }
  if (approx_ge(hi - lo, 1.0, tol)) {
    m.a = Interval{0.0, 1.0};
    m.scenario = MarketScenario::MonopolyA;
    return m;
  }
  if (approx_ge(hi + lo, 1.0, tol)) {
    const double tau = std::clamp((1.0 + hi - lo) / 2.0, 0.0, 1.0);
    m.a = Interval{0.0, tau};
    m.b = Interval{tau, 1.0};
    m.scenario = MarketScenario::Bifurcated;
    return m;
  }
  m.a = Interval{0.0, hi};
  m.b = Interval{1.0 - lo, 1.0};
  m.scenario = MarketScenario::Segmented;
  return m;
}

std::optional<Interval> mirror(const std::optional<Interval>& iv) {
  if (!iv) return std::nullopt;
  return Interval{1.0 - iv->hi, 1.0 - iv->lo};
}

}  // namespace

MarketPartition market_partition(double delta_a, double delta_b, double tol) {
  const DeltaPair d = make_delta_pair(delta_a, delta_b);
  MarketPartition m = leader_frame_partition(d.first, d.second, tol);
  if (!d.swapped) return m;

  // B leads: mirror the line so the leader's interval ends at 1.
  MarketPartition out;
  out.a = mirror(m.b);
  out.b = mirror(m.a);
  out.scenario = m.scenario == MarketScenario::MonopolyA ? MarketScenario::MonopolyB : m.scenario;
  return out;
}

MarketPartition market_partition(const PriceProfile& p, const QosVector& q_eff,
                                 const ModelParams& params) {
  return market_partition(net_attractiveness(StationId::A, p, q_eff, params),
                          net_attractiveness(StationId::B, p, q_eff, params),
                          params.boundary_tol);
}

PerStation<double> shares(const MarketPartition& partition) noexcept {
  return {partition.a ? partition.a->length() : 0.0, partition.b ? partition.b->length() : 0.0};
}

}  // namespace evcoop
