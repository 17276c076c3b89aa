#pragma once

// Chebyshev spectral collocation for eps^2 y'' = Q y: a dense, desk-scale
// reference solver used to measure forward errors.

#include <cstddef>
#include <span>
#include <vector>

#include "chebwkb/wkb.hpp"

namespace chebwkb::reference {

inline constexpr std::size_t kMinCollocation = 16;
inline constexpr std::size_t kMaxCollocation = 4096;

struct ReferenceSolution {
  std::vector<double> grid;    // Chebyshev points, ascending
  std::vector<double> values;  // solution at grid
  std::size_t n_colloc = 0;
  double est_error = 0.0;  // max difference from the n_colloc/2 solve

  /// Barycentric interpolation of the grid values.
  double operator()(double x) const;
  std::vector<double> operator()(std::span<const double> xs) const;
};

/// Smallest n that passes the resolution guard n >= 8 * phase / (pi eps),
/// phase = int sqrt|Q| over the domain.
std::size_t required_collocation(const wkb::Problem& problem);

/// Collocates at n_colloc + 1 points, replaces two rows by the conditions
/// and solves densely. Throws InvalidArgument outside [16, 4096],
/// UnderResolved below the guard and SingularSystem at an eigenvalue.
ReferenceSolution solve_reference(const wkb::Problem& problem,
                                  std::size_t n_colloc);

/// The (n+1) x (n+1) first-derivative matrix on [-1, 1] at the Chebyshev
/// points cos(pi j / n), j = 0..n, flattened row-major.
std::vector<double> differentiation_matrix(std::size_t n);

}  // namespace chebwkb::reference
