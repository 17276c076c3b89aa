#pragma once

// Closed-form backward-error coefficients, Green's-function conditioning and
// forward-error estimates.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "chebwkb/chebseries.hpp"
#include "chebwkb/wkb.hpp"

namespace chebwkb::analysis {

using cheb::PiecewiseCheb;

/// Q2 = 5 (Q'/4Q)^2 - Q''/(4Q): eps^2 Q2 is the potential perturbation the
/// WKB solution solves exactly. Throws DivisionNearZero near a zero of Q.
PiecewiseCheb q2_of(const PiecewiseCheb& q);

/// (4 Q^2 Q''' - 18 Q Q'' Q' + 15 Q'^3) / (32 Q^(7/2)), the odd-order term
/// that makes the two WKB branches differ at the next order. Needs Q > 0.
PiecewiseCheb q3_of(const PiecewiseCheb& q);

/// Relative residual / eps^4 of the once-iterated solution, measured against
/// Q: -(32 K1 + eps^2 K2) / (4096 Q^6 Qhat^2), Qhat = Q - eps^2 Q2.
/// eps = 0 gives the limit -K1 / (128 Q^8). Throws SpuriousTurningPoint if
/// Qhat vanishes.
PiecewiseCheb q4_of(const PiecewiseCheb& q, double epsilon);

struct StandardTerms {
  PiecewiseCheb s2prime;  // -Q2 / (2 sqrt Q)
  PiecewiseCheb s3;       // Q2 / (4 Q)
};
StandardTerms standard_wkb_terms(const PiecewiseCheb& q);

/// Green's function of eps^2 y'' - Q y on a samples x samples grid, with the
/// jump G_x(xi+, xi) - G_x(xi-, xi) = -1/eps^2. Dirichlet problems get the
/// two-point kernel, initial-value problems the causal one from x0.
struct GreensGrid {
  std::vector<double> xs;
  std::vector<double> values;  // row-major, values[i * n + j] = G(xs[i], xs[j])
  double gmax = 0.0;
  /// max |W(x) - W(mid)| / |W(mid)| over the grid.
  double wronskian_spread = 0.0;

  std::size_t size() const noexcept { return xs.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * xs.size() + j]; }
};

/// Throws SingularConditions at an eigenvalue, Overflow if G exceeds the
/// double range.
GreensGrid greens_condition(const wkb::Problem& problem,
                            std::size_t samples = 201);
GreensGrid greens_condition(const wkb::WkbBasis& basis,
                            const wkb::Conditions& conditions,
                            std::size_t samples = 201);

struct ForwardError {
  double direct = 0.0;  // max |y_wkb - y_ref| on the reference grid
  double bound = 0.0;   // gmax * max|dQ| * max|y_ref| * (b - a)
};

/// dQ is the solution's relative residual against the problem's Q.
ForwardError forward_error_estimate(const wkb::WkbSolution& sol,
                                    const wkb::Problem& problem,
                                    std::span<const double> xs,
                                    std::span<const double> y_ref);

struct BackwardErrorReport {
  PiecewiseCheb q2;
  double q2_max = 0.0;  // max |eps^2 Q2|
  PiecewiseCheb qn_perturbation;  // relative residual against the original Q
  double qn_perturbation_max = 0.0;
  std::vector<double> spurious;
  double condition_estimate = 0.0;
  std::optional<ForwardError> forward_error;
};

BackwardErrorReport backward_error_report(
    const wkb::Problem& problem, const wkb::WkbSolution& sol,
    std::vector<double> spurious, std::size_t green_samples = 201);

}  // namespace chebwkb::analysis
