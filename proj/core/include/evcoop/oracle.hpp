#pragma once

// Brute-force audit of the market and pricing solutions.
//
// Everything here is built from `ev_payoff` alone: EV choices are the argmax
// of the three payoffs on a grid of locations, and prices come from scanning
// a price grid. Nothing in this file calls the closed-form market or pricing
// code except `audit_draw`, which compares the two.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "evcoop/model.hpp"
#include "evcoop/pricing.hpp"

namespace evcoop::oracle {

struct GridSpec {
  PerStation<double> price_lo;
  PerStation<double> price_hi;
  std::size_t price_steps = 4001;
  std::size_t x_steps = 1'000'000;

  void validate() const;
  double step(StationId i) const noexcept;
  double price(StationId i, std::size_t k) const noexcept;
  /// Nearest grid index to p (clamped).
  std::size_t nearest(StationId i, double p) const noexcept;
};

/// [o_i, o_i + (w_l max(q) + 2) / w_p] on `price_steps` points.
GridSpec default_grid(const QosVector& q_eff, const ModelParams& params,
                      std::size_t price_steps = 4001, std::size_t x_steps = 1'000'000);

/// Argmax of the three EV payoffs, ties to a station and then to A.
EvChoice payoff_argmax(double x, const PriceProfile& p, const QosVector& q_eff,
                       const ModelParams& params);

/// Midpoint-rule measure of each station's customers over x_steps cells,
/// evaluated cell by cell.
PerStation<double> simulate_shares(const PriceProfile& p, const QosVector& q_eff,
                                   const ModelParams& params, std::size_t x_steps);

/// Same measure as simulate_shares, located by bisection. A's customers form
/// a prefix of the cells and B's a suffix because U_A falls and U_B rises
/// with x.
PerStation<double> simulate_shares_bisect(const PriceProfile& p, const QosVector& q_eff,
                                          const ModelParams& params, std::size_t x_steps);

/// Grid price maximizing (p_i - o_i) * share_i against a fixed rival price.
/// Ties go to the lowest price.
double best_response(StationId i, double p_other, const QosVector& q_eff,
                     const ModelParams& params, const GridSpec& grid);

struct BestResponseTrace {
  std::vector<PriceProfile> iterates;  // starts with the snapped p0
  bool converged = false;
  bool cycle_detected = false;

  const PriceProfile& terminal() const { return iterates.back(); }
  /// Profiles the dynamics settled on: the fixed point, or every profile of
  /// the detected cycle.
  std::vector<PriceProfile> terminal_set() const;
};

/// Alternating best responses (A, then B) until a fixed point on the grid,
/// a revisited profile, or max_iters rounds.
BestResponseTrace best_response_dynamics(const PriceProfile& p0, const QosVector& q_eff,
                                         const ModelParams& params, const GridSpec& grid,
                                         std::size_t max_iters = 200);

/// Best profit gain each station could get from a unilateral move on the grid.
PerStation<double> max_deviation_gain(const PriceProfile& p, const QosVector& q_eff,
                                      const ModelParams& params, const GridSpec& grid);

/// Regime read off the play at a price profile: who sells, and whether the
/// served intervals are separated, touch at the opt-out boundary, or overlap.
PricingRegime observed_regime(const PriceProfile& p, const QosVector& q_eff,
                              const ModelParams& params, const GridSpec& grid);

// --- Closed-form vs oracle audit ---------------------------------------------

struct Draw {
  ModelParams params;
  QosVector q;
};

struct DrawRanges {
  double w_l_lo = 0.5, w_l_hi = 15.0;
  double w_p_lo = 0.5, w_p_hi = 3.0;
  double q_lo = 0.0, q_hi = 6.0;
  double o_lo = 0.0, o_hi = 2.0;
};

/// Draw k of a stratified sample: uniform in `ranges`, rejected until the
/// closed-form regime equals the k-th of {Competitive, SharedBoundary,
/// LocalMonopolies, Dominance}. Deterministic in (seed, k).
Draw stratified_draw(const DrawRanges& ranges, std::uint64_t seed, std::uint64_t k);

/// Distance, in price-grid steps, from the nearest regime boundary.
double boundary_distance_steps(const Draw& d, const GridSpec& grid);

struct AuditRow {
  std::uint64_t index = 0;
  Draw draw;
  PricingOutcome closed;
  BestResponseTrace cold;  // from (o_A, o_B)
  BestResponseTrace warm;  // from the closed-form prices
  PricingRegime oracle_regime = PricingRegime::Degenerate;
  // Largest distance from the closed form over each run's terminal set.
  PerStation<double> deviation_steps;       // cold start
  PerStation<double> warm_deviation_steps;  // warm start
  double boundary_steps = 0.0;
  bool judged = false;  // far enough from a boundary to be compared
  bool regime_agrees = false;
  bool pass = false;
};

struct AuditOptions {
  std::size_t price_steps = 4001;
  std::size_t x_steps = 1'000'000;
  std::size_t max_iters = 200;
  double tolerance_steps = 2.0;
  double min_boundary_steps = 3.0;
};

/// Compare the closed form against best-response dynamics for one draw.
///
/// Judged draws must agree on the regime. Where the equilibrium is unique the
/// cold-start dynamics must settle within `tolerance_steps` of the closed
/// form, either at a fixed point or in a cycle all of whose profiles are that
/// close. In the shared-boundary regime equilibria form a segment, so the
/// closed form must instead be a fixed point itself: dynamics started there
/// settle within `tolerance_steps`.
AuditRow audit_draw(std::uint64_t index, const Draw& d, const AuditOptions& opts);

struct AuditSummary {
  std::size_t draws = 0;
  std::size_t judged = 0;
  std::size_t passed = 0;
  std::size_t regime_agreements = 0;
  double max_deviation_steps = 0.0;  // over judged draws
  std::array<std::size_t, 5> regime_counts{};  // by case_number

  double agreement_rate() const noexcept {
    return judged ? static_cast<double>(regime_agreements) / static_cast<double>(judged) : 1.0;
  }
  bool all_regimes_covered() const noexcept;
  bool ok() const noexcept { return passed == judged; }
};

AuditSummary summarize(const std::vector<AuditRow>& rows);

}  // namespace evcoop::oracle
