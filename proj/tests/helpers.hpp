#pragma once

#include <cmath>
#include <initializer_list>
#include <random>
#include <vector>

#include "rsgp/graph.hpp"
#include "rsgp/objective.hpp"

namespace testutil {

inline rsgp::Vector vec(std::initializer_list<double> xs) {
  rsgp::Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

inline rsgp::ObjectiveInstance make_instance(const std::vector<rsgp::Vector>& h, const std::vector<double>& s) {
  rsgp::ObjectiveInstance inst;
  inst.d = static_cast<std::size_t>(h.front().size());
  inst.x_o = rsgp::Vector::Zero(static_cast<Eigen::Index>(inst.d));
  for (std::size_t i = 0; i < h.size(); ++i) inst.rows.push_back({h[i], s[i]});
  return inst;
}

inline rsgp::DynamicDigraph connected_er(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  rsgp::DynamicDigraph g;
  do g = rsgp::gen_erdos_renyi(n, p, rng);
  while (!rsgp::is_strongly_connected(g));
  return g;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace testutil
