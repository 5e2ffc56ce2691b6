#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace evcoop::flsim {

template <class Rng>
std::vector<double> dirichlet(Rng& rng, double alpha, std::size_t k) {
  if (!(alpha > 0.0)) throw std::invalid_argument("Dirichlet concentration must be > 0");
  if (k == 0) return {};
  // log Gamma(alpha) = log Gamma(alpha + 1) + log(U) / alpha
  std::gamma_distribution<double> gamma(alpha + 1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> logs(k);
  for (double& l : logs) {
    double u = unit(rng);
    while (u <= 0.0) u = unit(rng);
    l = std::log(gamma(rng)) + std::log(u) / alpha;
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double& l : logs) {
    l = std::exp(l - top);
    sum += l;
  }
  for (double& l : logs) l /= sum;
  return logs;
}

}  // namespace evcoop::flsim
