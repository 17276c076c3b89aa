#pragma once

// Physical-optics WKB solutions of eps^2 y'' = Q(x) y for sign-definite Q,
// with boundary/initial condition fitting and residuals computed from the
// amplitude/phase structure.

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "chebwkb/chebseries.hpp"
#include "chebwkb/potential.hpp"

namespace chebwkb::wkb {

using cheb::Interval;
using cheb::PiecewiseCheb;

struct Dirichlet {
  double ya = 0.0;
  double yb = 0.0;
};

struct InitialValue {
  double x0 = 0.0;
  double y0 = 0.0;
  double yp0 = 0.0;
};

using Conditions = std::variant<Dirichlet, InitialValue>;

/// Checks an initial point lies in the domain; throws InvalidArgument.
void validate_conditions(const Conditions& c, Interval domain);

class Problem {
 public:
  /// Throws InvalidArgument for eps <= 0 and TurningPoint if Q vanishes
  /// or changes sign on its domain.
  Problem(double epsilon, PiecewiseCheb q, Conditions conditions);

  double epsilon() const noexcept { return epsilon_; }
  const PiecewiseCheb& q() const noexcept { return q_; }
  Interval domain() const noexcept { return q_.domain(); }
  const Conditions& conditions() const noexcept { return conditions_; }

 private:
  double epsilon_;
  PiecewiseCheb q_;
  Conditions conditions_;
};

/// Throws TurningPoint unless q is bounded away from zero on its domain.
void require_sign_definite(const PiecewiseCheb& q);

enum class Mode { exponential, oscillatory };
std::string_view mode_name(Mode m) noexcept;

struct WkbBasis {
  Mode mode = Mode::oscillatory;
  double sign = -1.0;  // sign of q
  double epsilon = 1.0;
  PiecewiseCheb q;          // potential the basis was built from
  PiecewiseCheb amplitude;  // |q|^(-1/4) unless overridden
  PiecewiseCheb amplitude_d1;
  PiecewiseCheb amplitude_d2;
  PiecewiseCheb root;  // f = sqrt|q|
  PiecewiseCheb root_d1;
  PiecewiseCheb phase;  // S0 = int f, zero at the domain midpoint
  double phase_min = 0.0;
  double phase_max = 0.0;

  Interval domain() const noexcept { return q.domain(); }
};

/// Throws TurningPoint if q is not sign-definite. `amplitude` replaces
/// |q|^(-1/4), e.g. by a renormalized amplitude.
WkbBasis build_basis(const PiecewiseCheb& q, double epsilon);
WkbBasis build_basis(const PiecewiseCheb& q, double epsilon,
                     const PiecewiseCheb& amplitude);

/// Values and first derivatives of both basis functions at x.
/// Oscillatory: A cos(S0/eps), A sin(S0/eps).
/// Exponential: A exp((S0 - S0max)/eps), A exp(-(S0 - S0min)/eps).
struct BasisPoint {
  double y1 = 0.0;
  double y2 = 0.0;
  double dy1 = 0.0;
  double dy2 = 0.0;
};
BasisPoint eval_basis_point(const WkbBasis& basis, double x);
double eval_basis(const WkbBasis& basis, int which, double x);
double eval_basis_derivative(const WkbBasis& basis, int which, double x);

struct WkbSolution {
  WkbBasis basis;
  double c1 = 0.0;
  double c2 = 0.0;

  double operator()(double x) const;
  double derivative(double x) const;
  std::vector<double> operator()(std::span<const double> xs) const;

  /// Coefficients of A exp(+S0/eps) and A exp(-S0/eps) without the
  /// overflow scaling; complex in oscillatory mode. Empty when a
  /// coefficient is not representable.
  std::optional<std::array<std::complex<double>, 2>> exponential_form() const;
};

/// Solves the 2x2 system for c1, c2. Throws SingularConditions if
/// |det| < 1e-12 * |row1| * |row2| (eps near an eigenvalue), Overflow if an
/// initial-value fit needs a coefficient beyond the double range.
WkbSolution fit_conditions(const WkbBasis& basis, const Conditions& conditions);

/// eps^2 A''/A + q_basis - q_measured, the part of y''/y - Q/eps^2 (times
/// eps^2) shared by both basis functions. With A = |q|^(-1/4) and
/// q_measured = q_basis this is eps^2 Q2 exactly.
PiecewiseCheb relative_residual(const WkbBasis& basis);
PiecewiseCheb relative_residual(const WkbBasis& basis,
                                const PiecewiseCheb& q_measured);

/// eps^2 y''/y - Q for the single branch A exp(branch * Phi), Phi = S0/eps
/// (exponential) or i S0/eps (oscillatory), branch = +1 or -1. Keeps the
/// O(1/eps) term that cancels analytically.
std::complex<double> branch_relative_residual(const WkbBasis& basis,
                                              int branch, double x);

/// r = eps^2 y'' - Q y at each x, from the amplitude/phase structure.
std::vector<double> absolute_residual(const WkbSolution& sol,
                                      std::span<const double> xs);
std::vector<double> absolute_residual(const WkbSolution& sol,
                                      std::span<const double> xs,
                                      const PiecewiseCheb& q_measured);

/// Normal form of y'' + a y' + b y = 0: v'' + c v = 0 with
/// y = v exp(-1/2 int_{x0}^x a).
struct SturmForm {
  PiecewiseCheb c;
  PiecewiseCheb half_integral_a;  // 1/2 int_{x0}^x a
  double x0 = 0.0;
  double a_at_x0 = 0.0;

  InitialValue transform(double y0, double yp0) const;
  /// y(x) from v(x).
  double to_original(double v, double x) const;
};

SturmForm sturm_normalize(const potential::PotentialExpr& a,
                          const potential::PotentialExpr& b, double x0,
                          Interval domain, double tol = 1e-13);

}  // namespace chebwkb::wkb
