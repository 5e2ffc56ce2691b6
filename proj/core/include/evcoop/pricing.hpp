#pragma once

// Closed-form pricing equilibrium of the duopoly and the station profits it
// induces for a given participation profile.
//
// With Delta_i = w_l q_i - w_p o_i and S = Delta_A + Delta_B, the regimes are
//
//   Competitive     S >= 3, |Delta_A - Delta_B| <= 3, both Delta > 0
//                   p_i = o_i + (1 + (Delta_i - Delta_-i) / 3) / w_p
//   SharedBoundary  2 <= S < 3, both Delta > 0
//                   every EV is served and the market splits where both
//                   stations' EVs are just indifferent to opting out;
//                   p_i = o_i + Delta_i (1 - 1/S) / w_p
//   LocalMonopolies S < 2, both Delta > 0
//                   p_i = (w_p o_i + w_l q_i) / (2 w_p)
//   Dominance       Delta_-i <= 0, or Delta_i - Delta_-i > 3
//                   the rival holds no share. Against a rival that could still
//                   sell above cost the leader limit-prices,
//                   p_i = o_i + (Delta_i - Delta_-i - 1) / w_p; otherwise it
//                   charges the monopoly price.
//   Degenerate      both Delta <= 0; nobody can sell above cost.
//
// The SharedBoundary regime has a continuum of equilibria along the kink;
// the selection above is the one continuous with both neighbouring regimes.

#include <optional>
#include <string_view>

#include "evcoop/market.hpp"
#include "evcoop/model.hpp"

namespace evcoop {

enum class PricingRegime { Competitive, SharedBoundary, LocalMonopolies, Dominance, Degenerate };

std::string_view to_string(PricingRegime r) noexcept;

/// 1-based case number as used in reports (Degenerate reports 0).
int case_number(PricingRegime r) noexcept;

/// Delta_i for both stations.
PerStation<double> quality_margins(const QosVector& q_eff, const ModelParams& params) noexcept;

struct PricingOutcome {
  PriceProfile p_star;
  PricingRegime regime = PricingRegime::Degenerate;
  MarketPartition partition;
  PerStation<double> share;
  PerStation<double> revenue;
  std::optional<StationId> dominated;  // Dominance only

  bool degenerate() const noexcept { return regime == PricingRegime::Degenerate; }
};

/// Regime selection from the quality margins alone.
PricingRegime classify_regime(const PerStation<double>& margins, double tol = kBoundaryTolerance);

/// Equilibrium prices, partition and revenues. A degenerate market (both
/// margins <= 0) is reported through `regime` with prices at cost and zero
/// revenue.
PricingOutcome pricing_equilibrium(const QosVector& q_eff, const ModelParams& params);

/// W_i(r) = revenue at the pricing equilibrium minus FL cost.
PerStation<double> profit(ParticipationProfile r, const QosProfile& q, const ModelParams& params);

}  // namespace evcoop
