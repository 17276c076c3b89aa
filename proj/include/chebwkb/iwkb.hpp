#pragma once

// Iterated WKB: pre-subtract the backward-error perturbation N times so the
// solution built on Q_N has an O(eps^(2N+2)) residual in the original problem.

#include <vector>

#include "chebwkb/chebseries.hpp"
#include "chebwkb/wkb.hpp"

namespace chebwkb::iwkb {

using cheb::PiecewiseCheb;

inline constexpr int kMaxIterations = 10;

/// Q_0 = Q, Q_{n+1} = Q - eps^2 Q2(Q_n). Throws InvalidArgument for N outside
/// [0, 10] and IterationBlowup once max |Q_n - Q| exceeds max |Q|.
PiecewiseCheb iterate_potential(const PiecewiseCheb& q, double epsilon, int n);

/// Sign changes of qn at points where q itself is not zero.
std::vector<double> detect_spurious(const PiecewiseCheb& qn,
                                    const PiecewiseCheb& q);

/// |q|^(-1/4) exp(eps^2 q2 / (4 q)): the amplitude of (q - eps^2 q2)^(-1/4)
/// with the logarithm expanded, so zeros of q - eps^2 q2 do not reach it.
PiecewiseCheb renormalize_amplitude(const PiecewiseCheb& q,
                                    const PiecewiseCheb& q2, double epsilon);

/// q exp(-eps^2 q2 / q): the same expansion applied to q - eps^2 q2 itself.
/// Keeps the sign of q, and its |.|^(-1/4) is renormalize_amplitude.
PiecewiseCheb renormalized_potential(const PiecewiseCheb& q,
                                     const PiecewiseCheb& q2, double epsilon);

struct IwkbResult {
  PiecewiseCheb qn;
  wkb::WkbSolution solution;
  std::vector<double> spurious;
  int n_iterations = 0;
  bool renormalized = false;
};

/// Throws SpuriousTurningPoint when Q_N has spurious zeros and renormalize is
/// off. With renormalize on, the basis is built on renormalized_potential
/// with q2 = (Q - Q_N)/eps^2, so amplitude and phase both avoid the zeros;
/// the residual is then O(eps^4) whatever N >= 1 is.
IwkbResult solve_iwkb(const wkb::Problem& problem, int n, bool renormalize);

}  // namespace chebwkb::iwkb
