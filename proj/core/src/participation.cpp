#include "evcoop/participation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "evcoop/pricing.hpp"

namespace evcoop {

ProfitMatrix build_profit_matrix(const QosProfile& q, const ModelParams& params) {
  ProfitMatrix m;
  for (ParticipationProfile r : kProfiles) m(r) = profit(r, q, params);
  return m;
}

ParticipationProfile deviate(ParticipationProfile r, StationId i) noexcept {
  r.r[i] = !r.r[i];
  return r;
}

double deviation_gain(const ProfitMatrix& m, ParticipationProfile r, StationId i) noexcept {
  return m(deviate(r, i), i) - m(r, i);
}

bool ParticipationEquilibrium::contains(ParticipationProfile r) const noexcept {
  return std::any_of(pure_ne.begin(), pure_ne.end(),
                     [r](const NashProfile& n) { return n.profile == r; });
}

namespace {

double scaled_tol(double tol, double a, double b) {
  return tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

ParticipationEquilibrium pure_nash(const ProfitMatrix& m, double tol) {
  ParticipationEquilibrium eq;
  for (ParticipationProfile r : kProfiles) {
    bool stable = true;
    bool strict = true;
    for (StationId i : kStations) {
      const double stay = m(r, i);
      const double leave = m(deviate(r, i), i);
      const double slack = scaled_tol(tol, stay, leave);
      if (leave > stay + slack) stable = false;
      if (leave >= stay - slack) strict = false;
    }
    if (stable) eq.pure_ne.push_back({r, strict, r.collaborates()});
  }

  for (const NashProfile& cand : eq.pure_ne) {
    const bool dominates_all =
        std::all_of(eq.pure_ne.begin(), eq.pure_ne.end(), [&](const NashProfile& other_ne) {
          return std::all_of(kStations.begin(), kStations.end(), [&](StationId i) {
            const double mine = m(cand.profile, i);
            const double theirs = m(other_ne.profile, i);
            return mine >= theirs - scaled_tol(tol, mine, theirs);
          });
        });
    if (dominates_all) {
      eq.payoff_dominant = cand.profile;
      break;
    }
  }
  return eq;
}

namespace {

std::optional<RefusalWitness> check_instance(const QosProfile& q, const ModelParams& params) {
  const ProfitMatrix m = build_profit_matrix(q, params);
  const ParticipationProfile full{true, true};
  std::optional<RefusalWitness> best;
  for (StationId i : kStations) {
    const double gain = deviation_gain(m, full, i);
    const double slack = scaled_tol(kProfitTolerance, m(full, i), m(deviate(full, i), i));
    if (gain > slack && (!best || gain > best->gain)) {
      best = RefusalWitness{q, m, i, gain, false, 0};
    }
  }
  return best;
}

double lerp(const Range& r, double t) { return r.lo + (r.hi - r.lo) * t; }

}  // namespace

std::optional<RefusalWitness> find_fl_refusal_witness(const ModelParams& params,
                                                      const WitnessSearchSpace& space,
                                                      std::uint64_t budget, std::uint64_t seed) {
  params.validate();

  if (space.directed && !space.common_gain) {
    // Shrink the gap: the station with the lower quality margin improves the
    // most, the other the least.
    constexpr int kLattice = 9;
    for (int ia = 0; ia < kLattice; ++ia) {
      for (int ib = 0; ib < kLattice; ++ib) {
        QosProfile q;
        q.low = {lerp(space.q_low.a(), ia / double(kLattice - 1)),
                 lerp(space.q_low.b(), ib / double(kLattice - 1))};
        const StationId lead =
            quality_margin(StationId::B, q.low, params) > quality_margin(StationId::A, q.low, params)
                ? StationId::B
                : StationId::A;
        q.high = q.low;
        q.high[lead] += std::max(space.gain[lead].lo, 0.0);
        q.high[other(lead)] += std::max(space.gain[other(lead)].hi, 0.0);
        if (auto w = check_instance(q, params)) {
          w->from_directed = true;
          return w;
        }
      }
    }
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t k = 0; k < budget; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    std::mt19937_64 rng(seq);
    QosProfile q;
    q.low = {lerp(space.q_low.a(), unit(rng)), lerp(space.q_low.b(), unit(rng))};
    const double ga = std::max(lerp(space.gain.a(), unit(rng)), 0.0);
    const double gb = space.common_gain ? ga : std::max(lerp(space.gain.b(), unit(rng)), 0.0);
    q.high = {q.low.a() + ga, q.low.b() + gb};
    if (auto w = check_instance(q, params)) {
      w->draws_used = k + 1;
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace evcoop
