#include "evcoop/pricing.hpp"

namespace evcoop {

std::string_view to_string(PricingRegime r) noexcept {
  switch (r) {
    case PricingRegime::Competitive:
      return "competitive";
    case PricingRegime::SharedBoundary:
      return "shared_boundary";
    case PricingRegime::LocalMonopolies:
      return "local_monopolies";
    case PricingRegime::Dominance:
      return "dominance";
    case PricingRegime::Degenerate:
      break;
  }
  return "degenerate_market";
}

int case_number(PricingRegime r) noexcept {
  switch (r) {
    case PricingRegime::Competitive:
      return 1;
    case PricingRegime::SharedBoundary:
      return 2;
    case PricingRegime::LocalMonopolies:
      return 3;
    case PricingRegime::Dominance:
      return 4;
    case PricingRegime::Degenerate:
      break;
  }
  return 0;
}

PerStation<double> quality_margins(const QosVector& q_eff, const ModelParams& params) noexcept {
  return {quality_margin(StationId::A, q_eff, params), quality_margin(StationId::B, q_eff, params)};
}

namespace {

// A is the nominal leader on ties; outputs are symmetric there.
StationId leader_of(const PerStation<double>& m) noexcept {
  return m.b() > m.a() ? StationId::B : StationId::A;
}

}  // namespace

PricingRegime classify_regime(const PerStation<double>& margins, double tol) {
  const StationId lead = leader_of(margins);
  const double hi = margins[lead];
  const double lo = margins[other(lead)];
  if (approx_le(hi, 0.0, tol)) return PricingRegime::Degenerate;
  if (approx_le(lo, 0.0, tol) || approx_gt(hi - lo, 3.0, tol)) return PricingRegime::Dominance;
  const double sum = hi + lo;
  if (approx_ge(sum, 3.0, tol)) return PricingRegime::Competitive;
  if (approx_ge(sum, 2.0, tol)) return PricingRegime::SharedBoundary;
  return PricingRegime::LocalMonopolies;
}

PricingOutcome pricing_equilibrium(const QosVector& q_eff, const ModelParams& params) {
  params.validate();
  const PerStation<double> m = quality_margins(q_eff, params);
  const double tol = params.boundary_tol;
  const double w_p = params.w_p;

  PricingOutcome out;
  out.regime = classify_regime(m, tol);
  out.p_star = params.o;  // every station starts at cost

  switch (out.regime) {
    case PricingRegime::Competitive:
      for (StationId i : kStations) {
        out.p_star[i] = params.o[i] + (1.0 + (m[i] - m[other(i)]) / 3.0) / w_p;
      }
      break;
    case PricingRegime::SharedBoundary: {
      const double sum = m.a() + m.b();
      for (StationId i : kStations) out.p_star[i] = params.o[i] + m[i] * (1.0 - 1.0 / sum) / w_p;
      break;
    }
    case PricingRegime::LocalMonopolies:
      for (StationId i : kStations) {
        out.p_star[i] = (w_p * params.o[i] + params.w_l * q_eff[i]) / (2.0 * w_p);
      }
      break;
    case PricingRegime::Dominance: {
      const StationId lead = leader_of(m);
      const double rival = m[other(lead)];
      double& p = out.p_star[lead];
      if (approx_gt(rival, 0.0, tol)) {
        // The rival can still sell above cost: price it out exactly.
        p = params.o[lead] + (m[lead] - rival - 1.0) / w_p;
      } else if (approx_le(m[lead], 2.0, tol)) {
        p = (w_p * params.o[lead] + params.w_l * q_eff[lead]) / (2.0 * w_p);
      } else {
        p = (params.w_l * q_eff[lead] - 1.0) / w_p;
      }
      out.dominated = other(lead);
      break;
    }
    case PricingRegime::Degenerate:
      break;
  }

  out.partition = market_partition(out.p_star, q_eff, params);
  out.share = shares(out.partition);
  for (StationId i : kStations) out.revenue[i] = (out.p_star[i] - params.o[i]) * out.share[i];
  return out;
}

PerStation<double> profit(ParticipationProfile r, const QosProfile& q, const ModelParams& params) {
  const PricingOutcome eq = pricing_equilibrium(effective_qos(r, q), params);
  const PerStation<double> cost = fl_cost(r, params);
  return {eq.revenue.a() - cost.a(), eq.revenue.b() - cost.b()};
}

}  // namespace evcoop
