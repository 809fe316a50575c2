#pragma once

#include <random>
#include <vector>

#include "stable_cluster/geometry.hpp"

namespace sc_test {

inline stable_cluster::PointSet random_points(std::size_t n, std::size_t d, std::mt19937_64& rng,
                                              double lo = -10.0, double hi = 10.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> c(n * d);
  for (auto& v : c) v = u(rng);
  return stable_cluster::PointSet(d, std::move(c));
}

inline std::vector<double> random_unit(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(d);
  double s = 0.0;
  do {
    s = 0.0;
    for (auto& c : v) {
      c = g(rng);
      s += c * c;
    }
  } while (s < 1e-12);
  for (auto& c : v) c /= std::sqrt(s);
  return v;
}

}  // namespace sc_test
