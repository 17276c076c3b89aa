#include "chebwkb/iwkb.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chebwkb/analysis.hpp"
#include "chebwkb/error.hpp"

namespace chebwkb::iwkb {

PiecewiseCheb iterate_potential(const PiecewiseCheb& q, double epsilon, int n) {
  if (n < 0 || n > kMaxIterations) {
    throw InvalidArgument("iterations must lie in [0, " +
                          std::to_string(kMaxIterations) + "], got " +
                          std::to_string(n));
  }
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const double qmax = cheb::max_abs(q);
  const double eps2 = epsilon * epsilon;
  PiecewiseCheb qn = q;
  for (int i = 0; i < n; ++i) {
    // The correction is fitted on its own and subtracted coefficientwise;
    // refitting Q - eps^2 Q2 as a whole would reintroduce Q's rounding tail.
    const PiecewiseCheb correction = analysis::q2_of(qn);
    const double drift = eps2 * cheb::max_abs(correction);
    if (!(drift <= qmax)) {
      throw IterationBlowup("iteration " + std::to_string(i + 1) +
                            ": perturbation " + std::to_string(drift) +
                            " exceeds max |Q| = " + std::to_string(qmax));
    }
    qn = q - cheb::scale(correction, eps2);
  }
  return qn;
}

std::vector<double> detect_spurious(const PiecewiseCheb& qn,
                                     const PiecewiseCheb& q) {
  // Spurious zeros appear in tangent pairs first; sample densely.
  const auto zeros = cheb::roots(qn, 8192);
  const double floor = 1e3 * q.tol() * cheb::max_abs(q);
  std::vector<double> out;
  for (double x : zeros) {
    if (std::abs(q(x)) > floor) out.push_back(x);
  }
  return out;
}

PiecewiseCheb renormalize_amplitude(const PiecewiseCheb& q,
                                    const PiecewiseCheb& q2, double epsilon) {
  const double eps2 = epsilon * epsilon;
  return cheb::combine(
      {&q, &q2},
      [eps2](std::span<const double> v, double) {
        return std::pow(std::abs(v[0]), -0.25) *
               std::exp(eps2 * v[1] / (4.0 * v[0]));
      },
      cheb::FitOptions{.tol = q.tol()});
}

PiecewiseCheb renormalized_potential(const PiecewiseCheb& q,
                                     const PiecewiseCheb& q2, double epsilon) {
  const double eps2 = epsilon * epsilon;
  return cheb::combine(
      {&q, &q2},
      [eps2](std::span<const double> v, double) {
        return v[0] * std::exp(-eps2 * v[1] / v[0]);
      },
      cheb::FitOptions{.tol = q.tol()});
}

IwkbResult solve_iwkb(const wkb::Problem& problem, int n, bool renormalize) {
  const double eps = problem.epsilon();
  const PiecewiseCheb& q = problem.q();
  PiecewiseCheb qn = iterate_potential(q, eps, n);
  std::vector<double> spurious = detect_spurious(qn, q);
  if (!spurious.empty() && !renormalize) throw SpuriousTurningPoint(spurious);

  wkb::WkbBasis basis = [&] {
    if (!renormalize) return wkb::build_basis(qn, eps);
    const PiecewiseCheb q2 = cheb::scale(q - qn, 1.0 / (eps * eps));
    return wkb::build_basis(renormalized_potential(q, q2, eps), eps);
  }();
  wkb::WkbSolution solution =
      wkb::fit_conditions(basis, problem.conditions());
  return IwkbResult{std::move(qn), std::move(solution), std::move(spurious), n,
                    renormalize};
}

}  // namespace chebwkb::iwkb
