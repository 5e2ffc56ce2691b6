#pragma once

// Exogenous parameters and the elementary payoff/profit terms shared by all
// three stages of the station game.
//
// Two stations sit at the ends of the unit interval: A at x = 0, B at x = 1.
// EVs are uniformly distributed along the line (density 1); travel cost has
// unit weight.

#include <array>
#include <cstddef>
#include <string_view>

namespace evcoop {

enum class StationId { A = 0, B = 1 };

constexpr StationId other(StationId i) noexcept {
  return i == StationId::A ? StationId::B : StationId::A;
}

constexpr std::size_t index(StationId i) noexcept { return static_cast<std::size_t>(i); }

constexpr std::array<StationId, 2> kStations{StationId::A, StationId::B};

std::string_view to_string(StationId i) noexcept;

/// One value per station, addressable by StationId.
template <class T>
struct PerStation {
  std::array<T, 2> v{};

  constexpr PerStation() = default;
  constexpr PerStation(T a, T b) : v{a, b} {}

  constexpr T& operator[](StationId i) noexcept { return v[index(i)]; }
  constexpr const T& operator[](StationId i) const noexcept { return v[index(i)]; }

  constexpr T& a() noexcept { return v[0]; }
  constexpr T& b() noexcept { return v[1]; }
  constexpr const T& a() const noexcept { return v[0]; }
  constexpr const T& b() const noexcept { return v[1]; }

  /// Same values with the station labels exchanged.
  constexpr PerStation swapped() const { return {v[1], v[0]}; }

  friend constexpr bool operator==(const PerStation&, const PerStation&) = default;
};

using QosVector = PerStation<double>;
using PriceProfile = PerStation<double>;

/// Absolute tolerance used when classifying a value against a case boundary.
inline constexpr double kBoundaryTolerance = 1e-12;

struct ModelParams {
  double w_l = 10.0;  // utility per unit QoS
  double w_p = 1.0;   // disutility per unit price
  PerStation<double> o{1.0, 1.0};  // electricity cost per station
  double w_c = 0.1;   // FL participation cost
  double q_max = 100.0;
  double theta = 10.0;  // QoS lost per unit RMSE
  double boundary_tol = kBoundaryTolerance;

  /// Travel-cost weight; normalized away.
  static constexpr double w_d = 1.0;

  /// Throws std::invalid_argument on w_l <= 0, w_p <= 0, negative costs,
  /// negative theta or a negative tolerance.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct QosProfile {
  QosVector low;   // QoS from local data only
  QosVector high;  // QoS after FL collaboration

  void validate() const;

  friend bool operator==(const QosProfile&, const QosProfile&) = default;
};

struct ParticipationProfile {
  PerStation<bool> r;

  constexpr ParticipationProfile() = default;
  constexpr ParticipationProfile(bool ra, bool rb) : r{ra, rb} {}

  /// Collaboration only happens when both stations join.
  constexpr bool collaborates() const noexcept { return r.a() && r.b(); }

  friend constexpr bool operator==(const ParticipationProfile&,
                                   const ParticipationProfile&) = default;
};

/// "11", "10", "01" or "00" (A's flag first).
std::string_view to_string(ParticipationProfile r) noexcept;

enum class EvChoice { None, A, B };

std::string_view to_string(EvChoice c) noexcept;

constexpr EvChoice choice_for(StationId i) noexcept {
  return i == StationId::A ? EvChoice::A : EvChoice::B;
}

/// q_high for both stations iff both participate, q_low otherwise.
QosVector effective_qos(ParticipationProfile r, const QosProfile& q) noexcept;

/// Payoff of the EV at location x for choice s. Throws std::invalid_argument
/// for x outside [0, 1].
double ev_payoff(double x, EvChoice s, const PriceProfile& p, const QosVector& q_eff,
                 const ModelParams& params);

/// C_i = w_c * r_i.
PerStation<double> fl_cost(ParticipationProfile r, const ModelParams& params) noexcept;

/// w_l q_i - w_p p_i: payoff of an EV standing on top of station i.
double net_attractiveness(StationId i, const PriceProfile& p, const QosVector& q_eff,
                          const ModelParams& params) noexcept;

/// w_l q_i - w_p o_i: the margin between quality value and cost.
double quality_margin(StationId i, const QosVector& q_eff, const ModelParams& params) noexcept;

/// Tolerance-aware comparisons used for closed/open case boundaries.
constexpr bool approx_ge(double a, double b, double tol) noexcept { return a >= b - tol; }
constexpr bool approx_gt(double a, double b, double tol) noexcept { return a > b + tol; }
constexpr bool approx_le(double a, double b, double tol) noexcept { return a <= b + tol; }
constexpr bool approx_lt(double a, double b, double tol) noexcept { return a < b - tol; }

}  // namespace evcoop
