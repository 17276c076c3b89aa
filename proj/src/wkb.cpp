#include "chebwkb/wkb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "chebwkb/error.hpp"

namespace chebwkb::wkb {

namespace {

std::string format_point(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

struct Local {
  double amp, amp_d1, amp_d2, root, root_d1, phase;
};

Local local_values(const WkbBasis& b, double x) {
  return {b.amplitude(x), b.amplitude_d1(x), b.amplitude_d2(x),
          b.root(x),      b.root_d1(x),      b.phase(x)};
}

// exp(log|c| + shift) with the sign of c; NaN when it does not fit a double.
double rescale(double c, double shift) {
  if (c == 0.0) return 0.0;
  const double log_mag = std::log(std::abs(c)) + shift;
  if (log_mag > std::log(std::numeric_limits<double>::max())) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (log_mag < std::log(std::numeric_limits<double>::denorm_min())) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::copysign(std::exp(log_mag), c);
}

}  // namespace

void validate_conditions(const Conditions& c, Interval domain) {
  if (const auto* ivp = std::get_if<InitialValue>(&c)) {
    const double slack = 1e-12 * domain.length();
    if (!(ivp->x0 >= domain.lo - slack && ivp->x0 <= domain.hi + slack)) {
      throw InvalidArgument("initial point " + format_point(ivp->x0) +
                            " lies outside the domain");
    }
  }
}

void require_sign_definite(const PiecewiseCheb& q) {
  const auto zeros = cheb::roots(q);
  if (!zeros.empty()) {
    std::string where;
    for (std::size_t i = 0; i < zeros.size() && i < 8; ++i) {
      where += (i ? ", " : "") + format_point(zeros[i]);
    }
    throw TurningPoint("potential changes sign at x = " + where);
  }
  const double lo = cheb::min_value(q);
  const double hi = cheb::max_value(q);
  const double smallest = (lo > 0.0) ? lo : (hi < 0.0 ? -hi : 0.0);
  const double largest = std::max(std::abs(lo), std::abs(hi));
  if (!(smallest > 1e-12 * largest)) {
    throw TurningPoint("potential vanishes on the domain");
  }
}

Problem::Problem(double epsilon, PiecewiseCheb q, Conditions conditions)
    : epsilon_(epsilon), q_(std::move(q)), conditions_(conditions) {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    throw InvalidArgument("epsilon must be positive and finite");
  }
  require_sign_definite(q_);
  validate_conditions(conditions_, q_.domain());
}

std::string_view mode_name(Mode m) noexcept {
  return m == Mode::exponential ? "exponential" : "oscillatory";
}

namespace {

WkbBasis assemble(const PiecewiseCheb& q, double epsilon,
                  const PiecewiseCheb& amplitude,
                  const PiecewiseCheb& amplitude_d1) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const double sign = cheb::max_value(q) > 0.0 ? 1.0 : -1.0;
  const Interval dom = q.domain();
  const PiecewiseCheb root = cheb::power(cheb::scale(q, sign), 0.5);
  const PiecewiseCheb phase = cheb::antiderivative(root, dom.midpoint());
  WkbBasis b{
      .mode = sign > 0.0 ? Mode::exponential : Mode::oscillatory,
      .sign = sign,
      .epsilon = epsilon,
      .q = q,
      .amplitude = amplitude,
      .amplitude_d1 = amplitude_d1,
      .amplitude_d2 = cheb::derivative(amplitude_d1),
      .root = root,
      .root_d1 = cheb::derivative(root),
      .phase = phase,
      .phase_min = phase(dom.lo),
      .phase_max = phase(dom.hi),
  };
  return b;
}

}  // namespace

WkbBasis build_basis(const PiecewiseCheb& q, double epsilon) {
  require_sign_definite(q);
  const double sign = cheb::max_value(q) > 0.0 ? 1.0 : -1.0;
  const PiecewiseCheb amplitude = cheb::power(cheb::scale(q, sign), -0.25);
  // A' = -A q'/(4q) refitted, so A'' needs one recurrence step instead of two.
  const PiecewiseCheb qd = cheb::derivative(q);
  const PiecewiseCheb amplitude_d1 = cheb::combine(
      {&amplitude, &qd, &q},
      [](std::span<const double> v, double) {
        return -0.25 * v[0] * v[1] / v[2];
      },
      cheb::FitOptions{.tol = std::min(q.tol(), 1e-15)});
  return assemble(q, epsilon, amplitude, amplitude_d1);
}

WkbBasis build_basis(const PiecewiseCheb& q, double epsilon,
                     const PiecewiseCheb& amplitude) {
  require_sign_definite(q);
  return assemble(q, epsilon, amplitude, cheb::derivative(amplitude));
}

BasisPoint eval_basis_point(const WkbBasis& b, double x) {
  const Local v = local_values(b, x);
  const double eps = b.epsilon;
  if (b.mode == Mode::exponential) {
    const double e1 = std::exp((v.phase - b.phase_max) / eps);
    const double e2 = std::exp(-(v.phase - b.phase_min) / eps);
    const double k = v.amp * v.root / eps;
    return {v.amp * e1, v.amp * e2, (v.amp_d1 + k) * e1, (v.amp_d1 - k) * e2};
  }
  const double theta = v.phase / eps;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double k = v.amp * v.root / eps;
  return {v.amp * c, v.amp * s, v.amp_d1 * c - k * s, v.amp_d1 * s + k * c};
}

double eval_basis(const WkbBasis& b, int which, double x) {
  const BasisPoint p = eval_basis_point(b, x);
  return which == 1 ? p.y1 : p.y2;
}

double eval_basis_derivative(const WkbBasis& b, int which, double x) {
  const BasisPoint p = eval_basis_point(b, x);
  return which == 1 ? p.dy1 : p.dy2;
}

double WkbSolution::operator()(double x) const {
  const BasisPoint p = eval_basis_point(basis, x);
  return c1 * p.y1 + c2 * p.y2;
}

double WkbSolution::derivative(double x) const {
  const BasisPoint p = eval_basis_point(basis, x);
  return c1 * p.dy1 + c2 * p.dy2;
}

std::vector<double> WkbSolution::operator()(std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
  return out;
}

std::optional<std::array<std::complex<double>, 2>>
WkbSolution::exponential_form() const {
  using C = std::complex<double>;
  if (basis.mode == Mode::oscillatory) {
    return std::array<C, 2>{C(0.5 * c1, -0.5 * c2), C(0.5 * c1, 0.5 * c2)};
  }
  const double u1 = rescale(c1, -basis.phase_max / basis.epsilon);
  const double u2 = rescale(c2, basis.phase_min / basis.epsilon);
  if (std::isnan(u1) || std::isnan(u2)) return std::nullopt;
  return std::array<C, 2>{C(u1, 0.0), C(u2, 0.0)};
}

WkbSolution fit_conditions(const WkbBasis& basis, const Conditions& conditions) {
  validate_conditions(conditions, basis.domain());
  double m[2][2];
  double rhs[2];
  // Exponential-mode IVP rows are renormalized at x0; the coefficients are
  // scaled back by these log factors after the solve.
  double shift1 = 0.0;
  double shift2 = 0.0;
  if (const auto* d = std::get_if<Dirichlet>(&conditions)) {
    const BasisPoint pa = eval_basis_point(basis, basis.domain().lo);
    const BasisPoint pb = eval_basis_point(basis, basis.domain().hi);
    m[0][0] = pa.y1;
    m[0][1] = pa.y2;
    m[1][0] = pb.y1;
    m[1][1] = pb.y2;
    rhs[0] = d->ya;
    rhs[1] = d->yb;
  } else {
    const auto& ivp = std::get<InitialValue>(conditions);
    const double x0 =
        std::clamp(ivp.x0, basis.domain().lo, basis.domain().hi);
    BasisPoint p = eval_basis_point(basis, x0);
    if (basis.mode == Mode::exponential) {
      const double s = basis.phase(x0);
      shift1 = (basis.phase_max - s) / basis.epsilon;
      shift2 = (s - basis.phase_min) / basis.epsilon;
      const Local v = local_values(basis, x0);
      const double k = v.amp * v.root / basis.epsilon;
      p = {v.amp, v.amp, v.amp_d1 + k, v.amp_d1 - k};
    }
    m[0][0] = p.y1;
    m[0][1] = p.y2;
    m[1][0] = p.dy1;
    m[1][1] = p.dy2;
    rhs[0] = ivp.y0;
    rhs[1] = ivp.yp0;
  }
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double n0 = std::hypot(m[0][0], m[0][1]);
  const double n1 = std::hypot(m[1][0], m[1][1]);
  if (!(std::abs(det) >= 1e-12 * n0 * n1) || n0 == 0.0 || n1 == 0.0) {
    throw SingularConditions(
        "condition matrix is singular (det = " + format_point(det) +
        "); epsilon is at or near an eigenvalue");
  }
  double c1 = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
  double c2 = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
  if (shift1 != 0.0 || shift2 != 0.0) {
    const double r1 = rescale(c1, shift1);
    const double r2 = rescale(c2, shift2);
    if (std::isnan(r1) || std::isnan(r2)) {
      throw Overflow("initial-value coefficients exceed the double range "
                     "(exponent " + format_point(std::max(shift1, shift2)) +
                     ")");
    }
    c1 = r1;
    c2 = r2;
  }
  return WkbSolution{basis, c1, c2};
}

PiecewiseCheb relative_residual(const WkbBasis& basis) {
  return relative_residual(basis, basis.q);
}

PiecewiseCheb relative_residual(const WkbBasis& basis,
                                const PiecewiseCheb& q_measured) {
  const double eps2 = basis.epsilon * basis.epsilon;
  cheb::FitOptions options{.tol = basis.q.tol(),
                           .scale_floor = cheb::max_abs(basis.q)};
  return cheb::combine(
      {&basis.amplitude, &basis.amplitude_d2, &basis.q, &q_measured},
      [eps2](std::span<const double> v, double) {
        return eps2 * v[1] / v[0] + (v[2] - v[3]);
      },
      options);
}

std::complex<double> branch_relative_residual(const WkbBasis& basis,
                                              int branch, double x) {
  const Local v = local_values(basis, x);
  const double eps = basis.epsilon;
  const std::complex<double> phi =
      basis.mode == Mode::exponential ? std::complex<double>(1.0, 0.0)
                                      : std::complex<double>(0.0, 1.0);
  const double s = branch >= 0 ? 1.0 : -1.0;
  const double odd = eps * (2.0 * v.amp_d1 * v.root + v.amp * v.root_d1) / v.amp;
  return eps * eps * v.amp_d2 / v.amp + s * phi * odd +
         phi * phi * v.root * v.root - basis.q(x);
}

std::vector<double> absolute_residual(const WkbSolution& sol,
                                      std::span<const double> xs) {
  return absolute_residual(sol, xs, sol.basis.q);
}

std::vector<double> absolute_residual(const WkbSolution& sol,
                                      std::span<const double> xs,
                                      const PiecewiseCheb& q_measured) {
  const WkbBasis& b = sol.basis;
  const double eps = b.epsilon;
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const Local v = local_values(b, x);
    const double even = eps * eps * v.amp_d2 +
                        v.amp * (b.sign * v.root * v.root - q_measured(x));
    const double odd = eps * (2.0 * v.amp_d1 * v.root + v.amp * v.root_d1);
    if (b.mode == Mode::exponential) {
      const double g1 = std::exp((v.phase - b.phase_max) / eps);
      const double g2 = std::exp(-(v.phase - b.phase_min) / eps);
      out[i] = sol.c1 * g1 * (even + odd) + sol.c2 * g2 * (even - odd);
    } else {
      const double theta = v.phase / eps;
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      out[i] = (sol.c1 * c + sol.c2 * s) * even +
               (-sol.c1 * s + sol.c2 * c) * odd;
    }
  }
  return out;
}

InitialValue SturmForm::transform(double y0, double yp0) const {
  return {x0, y0, yp0 + 0.5 * a_at_x0 * y0};
}

double SturmForm::to_original(double v, double x) const {
  return v * std::exp(-half_integral_a(x));
}

SturmForm sturm_normalize(const potential::PotentialExpr& a,
                          const potential::PotentialExpr& b, double x0,
                          Interval domain, double tol) {
  const PiecewiseCheb as = potential::to_series(a, domain, tol);
  const PiecewiseCheb bs = potential::to_series(b, domain, tol);
  const PiecewiseCheb ad = cheb::derivative(as);
  PiecewiseCheb c = cheb::combine(
      {&as, &ad, &bs},
      [](std::span<const double> v, double) {
        return v[2] - 0.25 * v[0] * v[0] - 0.5 * v[1];
      },
      cheb::FitOptions{.tol = tol,
                       .scale_floor = std::max({cheb::max_abs(bs),
                                                0.25 * std::pow(cheb::max_abs(as), 2),
                                                0.5 * cheb::max_abs(ad)})});
  return SturmForm{std::move(c), cheb::scale(cheb::antiderivative(as, x0), 0.5),
                   x0, as(x0)};
}

}  // namespace chebwkb::wkb
