#pragma once

// The 2x2 FL participation game played on top of the pricing equilibrium.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "evcoop/model.hpp"

namespace evcoop {

/// Profit of each station for every participation profile, indexed
/// [r_A][r_B].
struct ProfitMatrix {
  std::array<std::array<PerStation<double>, 2>, 2> w{};

  PerStation<double>& operator()(ParticipationProfile r) {
    return w[r.r.a() ? 1 : 0][r.r.b() ? 1 : 0];
  }
  const PerStation<double>& operator()(ParticipationProfile r) const {
    return w[r.r.a() ? 1 : 0][r.r.b() ? 1 : 0];
  }
  double operator()(ParticipationProfile r, StationId i) const { return (*this)(r)[i]; }
};

/// Profiles in report order: 11, 10, 01, 00.
inline constexpr std::array<ParticipationProfile, 4> kProfiles{
    ParticipationProfile{true, true}, ParticipationProfile{true, false},
    ParticipationProfile{false, true}, ParticipationProfile{false, false}};

/// Deviation gains below this (scaled by max(1, |W|)) count as indifference.
inline constexpr double kProfitTolerance = 1e-9;

ProfitMatrix build_profit_matrix(const QosProfile& q, const ModelParams& params);

/// Profile reached when station i flips its own flag.
ParticipationProfile deviate(ParticipationProfile r, StationId i) noexcept;

/// Gain station i gets by flipping its flag away from r (positive: it wants to).
double deviation_gain(const ProfitMatrix& m, ParticipationProfile r, StationId i) noexcept;

struct NashProfile {
  ParticipationProfile profile;
  bool strict = false;  // both stations lose by deviating
  bool fl_happens = false;
};

struct ParticipationEquilibrium {
  std::vector<NashProfile> pure_ne;  // may be empty
  /// Set when one equilibrium weakly Pareto-dominates every other one.
  std::optional<ParticipationProfile> payoff_dominant;

  bool contains(ParticipationProfile r) const noexcept;
};

/// All pure-strategy equilibria under the weak no-deviation condition.
ParticipationEquilibrium pure_nash(const ProfitMatrix& m, double tol = kProfitTolerance);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Where to look for an instance in which FL helps both QoS values yet full
/// participation is not an equilibrium. q_high = q_low + gain, gain >= 0.
struct WitnessSearchSpace {
  PerStation<Range> q_low{Range{0.0, 6.0}, Range{0.0, 6.0}};
  PerStation<Range> gain{Range{0.0, 1.0}, Range{0.0, 1.0}};
  bool common_gain = false;  // same gain for both stations (draws gain.a only)
  bool directed = true;      // try the gap-shrinking construction first
};

struct RefusalWitness {
  QosProfile qos;
  ProfitMatrix profits;
  StationId deviator = StationId::A;  // strictly prefers leaving (1,1)
  double gain = 0.0;                  // its deviation gain
  bool from_directed = false;
  std::uint64_t draws_used = 0;
};

/// Search for a QoS profile in which FL weakly improves both stations yet
/// (1,1) is not an equilibrium. Returns nullopt after `budget` random draws.
std::optional<RefusalWitness> find_fl_refusal_witness(const ModelParams& params,
                                                      const WitnessSearchSpace& space,
                                                      std::uint64_t budget, std::uint64_t seed);

}  // namespace evcoop
