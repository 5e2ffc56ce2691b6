#include "evcoop/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace evcoop {

std::string_view to_string(StationId i) noexcept { return i == StationId::A ? "A" : "B"; }

std::string_view to_string(EvChoice c) noexcept {
  switch (c) {
    case EvChoice::A:
      return "A";
    case EvChoice::B:
      return "B";
    case EvChoice::None:
      break;
  }
  return "none";
}

std::string_view to_string(ParticipationProfile r) noexcept {
  if (r.r.a()) return r.r.b() ? "11" : "10";
  return r.r.b() ? "01" : "00";
}

void ModelParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid model parameter: ") + what);
  };
  require(std::isfinite(w_l) && w_l > 0.0, "w_l must be > 0");
  require(std::isfinite(w_p) && w_p > 0.0, "w_p must be > 0");
  require(std::isfinite(o.a()) && o.a() >= 0.0, "o_A must be >= 0");
  require(std::isfinite(o.b()) && o.b() >= 0.0, "o_B must be >= 0");
  require(std::isfinite(w_c) && w_c >= 0.0, "w_c must be >= 0");
  require(std::isfinite(q_max), "q_max must be finite");
  require(std::isfinite(theta) && theta >= 0.0, "theta must be >= 0");
  require(std::isfinite(boundary_tol) && boundary_tol >= 0.0, "boundary_tol must be >= 0");
}

void QosProfile::validate() const {
  for (StationId i : kStations) {
    if (!(low[i] >= 0.0) || !(high[i] >= 0.0) || !std::isfinite(low[i]) ||
        !std::isfinite(high[i])) {
      throw std::invalid_argument("QoS values must be finite and >= 0");
    }
  }
}

QosVector effective_qos(ParticipationProfile r, const QosProfile& q) noexcept {
  return r.collaborates() ? q.high : q.low;
}

double ev_payoff(double x, EvChoice s, const PriceProfile& p, const QosVector& q_eff,
                 const ModelParams& params) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("EV location must lie in [0, 1]");
  switch (s) {
    case EvChoice::A:
      return params.w_l * q_eff.a() - params.w_p * p.a() - ModelParams::w_d * x;
    case EvChoice::B:
      return params.w_l * q_eff.b() - params.w_p * p.b() - ModelParams::w_d * (1.0 - x);
    case EvChoice::None:
      break;
  }
  return 0.0;
}

PerStation<double> fl_cost(ParticipationProfile r, const ModelParams& params) noexcept {
  return {r.r.a() ? params.w_c : 0.0, r.r.b() ? params.w_c : 0.0};
}

double net_attractiveness(StationId i, const PriceProfile& p, const QosVector& q_eff,
                          const ModelParams& params) noexcept {
  return params.w_l * q_eff[i] - params.w_p * p[i];
}

double quality_margin(StationId i, const QosVector& q_eff, const ModelParams& params) noexcept {
  return params.w_l * q_eff[i] - params.w_p * params.o[i];
}

}  // namespace evcoop
