#pragma once

// EV station selection and the induced partition of the unit interval.

#include <optional>
#include <string_view>

#include "evcoop/model.hpp"

namespace evcoop {

/// Net attractiveness of both stations, ordered so that `first >= second`.
struct DeltaPair {
  PerStation<double> delta;  // by original label
  double first = 0.0;        // larger delta
  double second = 0.0;       // smaller delta
  double tau = 0.5;          // (1 + first - second) / 2
  bool swapped = false;      // true when B holds the larger delta

  StationId leader() const noexcept { return swapped ? StationId::B : StationId::A; }
};

DeltaPair make_delta_pair(const PriceProfile& p, const QosVector& q_eff,
                          const ModelParams& params) noexcept;
DeltaPair make_delta_pair(double delta_a, double delta_b) noexcept;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class MarketScenario { Bifurcated, Segmented, MonopolyA, MonopolyB, Empty };

std::string_view to_string(MarketScenario s) noexcept;

struct MarketPartition {
  std::optional<Interval> a;  // starts at 0 when present
  std::optional<Interval> b;  // ends at 1 when present
  MarketScenario scenario = MarketScenario::Empty;
};

/// Choice of the EV at x from the two deltas. Ties go to a station over opting out, and
/// to A over B.
EvChoice ev_select(double x, const PriceProfile& p, const QosVector& q_eff,
                   const ModelParams& params);
EvChoice ev_select(double x, double delta_a, double delta_b);

/// Equilibrium partition of [0, 1] for the given prices.
MarketPartition market_partition(const PriceProfile& p, const QosVector& q_eff,
                                 const ModelParams& params);
MarketPartition market_partition(double delta_a, double delta_b,
                                 double tol = kBoundaryTolerance);

/// Length of each station's interval.
PerStation<double> shares(const MarketPartition& partition) noexcept;

}  // namespace evcoop
