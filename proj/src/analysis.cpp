#include "chebwkb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chebwkb/error.hpp"

namespace chebwkb::analysis {

namespace {

void require_nonvanishing(const PiecewiseCheb& q) {
  const double lo = cheb::min_value(q);
  const double hi = cheb::max_value(q);
  const double largest = std::max(std::abs(lo), std::abs(hi));
  const double smallest = (lo > 0.0) ? lo : (hi < 0.0 ? -hi : 0.0);
  if (!(smallest >= 1e3 * q.tol() * largest) || largest == 0.0) {
    throw DivisionNearZero("Q comes within " + std::to_string(smallest) +
                           " of zero");
  }
}

void require_positive(const PiecewiseCheb& q, const char* what) {
  if (!(cheb::min_value(q) > 0.0)) {
    throw NegativeBase(std::string(what) + " needs Q > 0 on the domain");
  }
}

struct Derivatives {
  PiecewiseCheb d1, d2, d3, d4;
};

Derivatives derivatives_of(const PiecewiseCheb& q, int order) {
  Derivatives d{cheb::derivative(q), q, q, q};
  if (order >= 2) d.d2 = cheb::derivative(d.d1);
  if (order >= 3) d.d3 = cheb::derivative(d.d2);
  if (order >= 4) d.d4 = cheb::derivative(d.d3);
  return d;
}

double stable_sinh_ratio(double s1, double s2, double delta) {
  // sinh(s1) sinh(s2) / sinh(delta) for 0 <= s1 + s2 <= delta.
  return 0.5 * std::exp(s1 + s2 - delta) * -std::expm1(-2.0 * s1) *
         -std::expm1(-2.0 * s2) / -std::expm1(-2.0 * delta);
}

}  // namespace

PiecewiseCheb q2_of(const PiecewiseCheb& q) {
  require_nonvanishing(q);
  const Derivatives d = derivatives_of(q, 2);
  return cheb::combine(
      {&q, &d.d1, &d.d2},
      [](std::span<const double> v, double) {
        const double r = v[1] / (4.0 * v[0]);
        return 5.0 * r * r - v[2] / (4.0 * v[0]);
      },
      cheb::FitOptions{.tol = q.tol()});
}

PiecewiseCheb q3_of(const PiecewiseCheb& q) {
  require_nonvanishing(q);
  require_positive(q, "q3_of");
  const Derivatives d = derivatives_of(q, 3);
  return cheb::combine(
      {&q, &d.d1, &d.d2, &d.d3},
      [](std::span<const double> v, double) {
        const double Q = v[0], Q1 = v[1], Q2 = v[2], Q3 = v[3];
        return (4.0 * Q * Q * Q3 - 18.0 * Q * Q2 * Q1 + 15.0 * Q1 * Q1 * Q1) /
               (32.0 * std::pow(Q, 3.5));
      },
      cheb::FitOptions{.tol = q.tol()});
}

PiecewiseCheb q4_of(const PiecewiseCheb& q, double epsilon) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
  const double eps2 = epsilon * epsilon;
  const PiecewiseCheb q2 = q2_of(q);
  const PiecewiseCheb qhat = q - cheb::scale(q2, eps2);
  if (eps2 > 0.0) {
    const auto zeros = cheb::roots(qhat, 8192);
    if (!zeros.empty()) throw SpuriousTurningPoint(zeros);
  }
  const Derivatives d = derivatives_of(q, 4);
  return cheb::combine(
      {&q, &d.d1, &d.d2, &d.d3, &d.d4, &qhat},
      [eps2](std::span<const double> v, double) {
        const double Q = v[0], Q1 = v[1], Q2 = v[2], Q3 = v[3], Q4 = v[4];
        const double Qh = v[5];
        const double Qp2 = Q * Q, Qp3 = Qp2 * Q, Qp4 = Qp3 * Q, Qp5 = Qp4 * Q,
                     Qp6 = Qp5 * Q;
        const double d1p2 = Q1 * Q1, d1p3 = d1p2 * Q1, d1p4 = d1p3 * Q1;
        const double k1 = 8.0 * Qp6 * Q4 - 56.0 * Qp5 * Q1 * Q3 -
                          36.0 * Q2 * Q2 * Qp5 + 216.0 * Q2 * Qp4 * d1p2 -
                          135.0 * Qp3 * d1p4;
        const double k2 = -288.0 * Q2 * Q2 * Q2 * Qp3 +
                          468.0 * Q2 * Q2 * Qp2 * d1p2 +
                          64.0 * Q2 * Qp4 * Q4 + 272.0 * Q2 * Qp3 * Q1 * Q3 -
                          540.0 * Q2 * Q * d1p4 - 80.0 * Qp4 * Q3 * Q3 -
                          80.0 * Qp3 * d1p2 * Q4 - 40.0 * Qp2 * d1p3 * Q3 +
                          225.0 * d1p4 * d1p2;
        return -(32.0 * k1 + eps2 * k2) / (4096.0 * Qp6 * Qh * Qh);
      },
      cheb::FitOptions{.tol = q.tol()});
}

StandardTerms standard_wkb_terms(const PiecewiseCheb& q) {
  require_positive(q, "standard_wkb_terms");
  const PiecewiseCheb q2 = q2_of(q);
  const cheb::FitOptions options{.tol = q.tol()};
  return {
      cheb::combine({&q, &q2},
                    [](std::span<const double> v, double) {
                      return -v[1] / (2.0 * std::sqrt(v[0]));
                    },
                    options),
      cheb::combine({&q, &q2},
                    [](std::span<const double> v, double) {
                      return v[1] / (4.0 * v[0]);
                    },
                    options),
  };
}

GreensGrid greens_condition(const wkb::Problem& problem, std::size_t samples) {
  return greens_condition(wkb::build_basis(problem.q(), problem.epsilon()),
                          problem.conditions(), samples);
}

GreensGrid greens_condition(const wkb::WkbBasis& basis,
                            const wkb::Conditions& conditions,
                            std::size_t samples) {
  if (samples < 2) throw InvalidArgument("greens_condition needs >= 2 samples");
  const cheb::Interval dom = basis.domain();
  const double eps = basis.epsilon;
  const bool oscillatory = basis.mode == wkb::Mode::oscillatory;

  GreensGrid g;
  g.xs = cheb::equispaced(dom, samples);
  const std::size_t n = samples;
  std::vector<double> amp(n), phase(n);
  for (std::size_t i = 0; i < n; ++i) {
    amp[i] = basis.amplitude(g.xs[i]);
    phase[i] = basis.phase(g.xs[i]) / eps;
  }
  // Wronskian of the (cos, sin) or (exp, exp) pair divided by its constant
  // factor: A^2 f / eps. Evaluated at the midpoint; its spread is reported.
  const auto wronskian = [&](double x) {
    const double a = basis.amplitude(x);
    return a * a * basis.root(x) / eps;
  };
  const double w = wronskian(dom.midpoint());
  for (double x : g.xs) {
    g.wronskian_spread =
        std::max(g.wronskian_spread, std::abs(wronskian(x) - w) / std::abs(w));
  }
  const double scale = 1.0 / (eps * eps * w);

  g.values.assign(n * n, 0.0);
  if (std::holds_alternative<wkb::Dirichlet>(conditions)) {
    const double theta_a = basis.phase(dom.lo) / eps;
    const double theta_b = basis.phase(dom.hi) / eps;
    const double delta = theta_b - theta_a;
    if (oscillatory && std::abs(std::sin(delta)) < 1e-12) {
      throw SingularConditions("Wronskian of the boundary solutions vanishes; "
                               "epsilon is at an eigenvalue");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double s1 = phase[i] - theta_a;
        const double s2 = theta_b - phase[j];
        const double ratio = oscillatory
                                 ? std::sin(s1) * std::sin(s2) / std::sin(delta)
                                 : stable_sinh_ratio(s1, s2, delta);
        const double v = amp[i] * amp[j] * ratio * scale;
        g.values[i * n + j] = v;
        g.values[j * n + i] = v;
      }
    }
  } else {
    const double x0 = std::get<wkb::InitialValue>(conditions).x0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.xs[i];
      for (std::size_t j = 0; j < n; ++j) {
        const double xi = g.xs[j];
        const bool forward = x0 <= xi && xi <= x;
        const bool backward = x <= xi && xi <= x0;
        if (!forward && !backward) continue;
        const double arg = phase[i] - phase[j];
        const double k = amp[i] * amp[j] *
                         (oscillatory ? std::sin(arg) : std::sinh(arg)) * scale;
        g.values[i * n + j] = forward ? -k : k;
      }
    }
  }
  for (double v : g.values) {
    if (!std::isfinite(v)) {
      throw Overflow("Green's function exceeds the double range");
    }
    g.gmax = std::max(g.gmax, std::abs(v));
  }
  return g;
}

ForwardError forward_error_estimate(const wkb::WkbSolution& sol,
                                    const wkb::Problem& problem,
                                    std::span<const double> xs,
                                    std::span<const double> y_ref) {
  if (xs.size() != y_ref.size() || xs.empty()) {
    throw InvalidArgument("forward_error_estimate: grid and values differ");
  }
  ForwardError fe;
  double yref_max = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fe.direct = std::max(fe.direct, std::abs(sol(xs[i]) - y_ref[i]));
    yref_max = std::max(yref_max, std::abs(y_ref[i]));
  }
  const GreensGrid g = greens_condition(problem);
  const double dq = cheb::max_abs(wkb::relative_residual(sol.basis, problem.q()));
  fe.bound = g.gmax * dq * yref_max * problem.domain().length();
  return fe;
}

BackwardErrorReport backward_error_report(const wkb::Problem& problem,
                                          const wkb::WkbSolution& sol,
                                          std::vector<double> spurious,
                                          std::size_t green_samples) {
  const double eps2 = problem.epsilon() * problem.epsilon();
  BackwardErrorReport r{
      .q2 = q2_of(problem.q()),
      .q2_max = 0.0,
      .qn_perturbation = wkb::relative_residual(sol.basis, problem.q()),
      .qn_perturbation_max = 0.0,
      .spurious = std::move(spurious),
      .condition_estimate = 0.0,
      .forward_error = std::nullopt,
  };
  r.q2_max = eps2 * cheb::max_abs(r.q2);
  r.qn_perturbation_max = cheb::max_abs(r.qn_perturbation);
  r.condition_estimate =
      greens_condition(problem, green_samples).gmax;
  return r;
}

}  // namespace chebwkb::analysis
