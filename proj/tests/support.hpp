#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "chebwkb/chebseries.hpp"
#include "chebwkb/potential.hpp"

namespace support {

using chebwkb::cheb::Interval;
using chebwkb::cheb::PiecewiseCheb;

inline PiecewiseCheb Q(const char* text, Interval dom = {-1.0, 1.0},
                       double tol = 1e-13) {
  return chebwkb::potential::to_series(chebwkb::potential::parse(text), dom,
                                       tol);
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline std::vector<double> random_points(Interval dom, std::size_t n,
                                         unsigned seed = 12345) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(dom.lo, dom.hi);
  std::vector<double> out(n);
  for (auto& x : out) x = u(rng);
  return out;
}

inline constexpr const char* kDoubleWell = "(38-96*x^2+240*x^4-128*x^6)/27";

}  // namespace support
