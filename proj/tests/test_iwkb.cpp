#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>

#include "chebwkb/analysis.hpp"
#include "chebwkb/error.hpp"
#include "chebwkb/iwkb.hpp"
#include "chebwkb/wkb.hpp"
#include "support.hpp"

using namespace chebwkb;
using namespace chebwkb::iwkb;
using support::max_abs;
using support::Q;

namespace {

double residual_against(const wkb::WkbSolution& s, const PiecewiseCheb& q) {
  const auto xs = cheb::equispaced(q.domain(), 4001);
  return max_abs(wkb::absolute_residual(s, xs, q));
}

// y(x) for eps^2 y'' = Q(x) y from an adaptive Runge-Kutta integration.
double shoot(const PiecewiseCheb& q, double eps, double x0, double y0,
             double yp0, double x1) {
  using State = std::array<double, 2>;
  namespace ode = boost::numeric::odeint;
  State s{y0, yp0};
  const double inv = 1.0 / (eps * eps);
  ode::integrate_adaptive(
      ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-13, 1e-13),
      [&](const State& y, State& dy, double x) {
        dy[0] = y[1];
        dy[1] = inv * q(x) * y[0];
      },
      s, x0, x1, (x1 > x0 ? 1e-4 : -1e-4));
  return s[0];
}

}  // namespace

TEST_CASE("iteration count bounds") {
  const auto q = Q("1+x^2");
  CHECK_THROWS_AS(iterate_potential(q, 0.1, -1), InvalidArgument);
  CHECK_THROWS_AS(iterate_potential(q, 0.1, kMaxIterations + 1), InvalidArgument);
  CHECK_THROWS_AS(iterate_potential(q, 0.0, 1), InvalidArgument);
  CHECK_NOTHROW(iterate_potential(q, 0.1, kMaxIterations));
}

TEST_CASE("zero iterations and constants leave Q unchanged") {
  const auto q = Q("-cosh(x)");
  const PiecewiseCheb q0 = iterate_potential(q, 0.1, 0);
  for (double x : cheb::equispaced({-1, 1}, 41)) CHECK(q0(x) == q(x));

  const auto c = PiecewiseCheb::constant(-4.0, {-1, 1});
  for (int n : {1, 3, 10}) {
    const PiecewiseCheb cn = iterate_potential(c, 0.3, n);
    for (double x : cheb::equispaced({-1, 1}, 11)) CHECK(cn(x) == doctest::Approx(-4.0).epsilon(1e-15));
  }
}

TEST_CASE("one iteration on 1+x^2 matches the closed form") {
  const double eps = 0.2;
  const PiecewiseCheb q1 = iterate_potential(Q("1+x^2"), eps, 1);
  double err = 0.0;
  for (double x : support::random_points({-1, 1}, 200)) {
    const double d = 1 + x * x;
    const double expect = d - eps * eps * (3 * x * x - 2) / (4 * d * d);
    err = std::max(err, std::abs(q1(x) - expect));
  }
  CHECK(err < 1e-13);
  CHECK(std::abs(q1(0.0) - (1 + eps * eps / 2)) < 1e-14);
}

TEST_CASE("iteration blows up for large eps") {
  CHECK_THROWS_AS(iterate_potential(Q("1+x^2"), 3.0, 1), IterationBlowup);
  CHECK_THROWS_AS(iterate_potential(Q("-(1+x^8)"), 0.9, 1), IterationBlowup);
}

TEST_CASE("spurious turning points") {
  const auto q = Q("-(1+x^8)");
  CHECK(detect_spurious(iterate_potential(q, 0.6, 1), q).empty());
  const auto zeros = detect_spurious(iterate_potential(q, 0.7, 1), q);
  REQUIRE(zeros.size() == 4);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(zeros[i] == doctest::Approx(-zeros[3 - i]).epsilon(1e-10));
  }
  const auto q1 = iterate_potential(q, 0.7, 1);
  for (double z : zeros) CHECK(std::abs(q1(z)) < 1e-10);

  for (double eps : {0.05, 0.3, 1.0}) {
    const auto p = Q("1+x^2");
    CHECK(detect_spurious(iterate_potential(p, eps, 1), p).empty());
  }
  const wkb::Problem p(0.7, q, wkb::Dirichlet{1, 1});
  CHECK_THROWS_AS(solve_iwkb(p, 1, false), SpuriousTurningPoint);
}

TEST_CASE("renormalized amplitude") {
  const auto q = Q("1+x^2");
  const auto zero = PiecewiseCheb::constant(0.0, {-1, 1});
  const PiecewiseCheb plain = renormalize_amplitude(q, zero, 0.3);
  for (double x : cheb::equispaced({-1, 1}, 21)) {
    CHECK(std::abs(plain(x) - std::pow(1 + x * x, -0.25)) < 1e-14);
  }

  const PiecewiseCheb q2 = analysis::q2_of(q);
  const PiecewiseCheb tiny = renormalize_amplitude(q, q2, 1e-6);
  for (double x : cheb::equispaced({-1, 1}, 21)) {
    CHECK(std::abs(tiny(x) - std::pow(1 + x * x, -0.25)) < 1e-12);
  }

  // Agrees with (Q - eps^2 Q2)^(-1/4) up to O(eps^4).
  const double eps = 0.2;
  const PiecewiseCheb a = renormalize_amplitude(q, q2, eps);
  double dev = 0.0;
  for (double x : cheb::equispaced({-1, 1}, 101)) {
    dev = std::max(dev, std::abs(a(x) - std::pow(q(x) - eps * eps * q2(x), -0.25)));
  }
  CHECK(dev < 3e-3);
  CHECK(dev > 0.0);

  const PiecewiseCheb qr = renormalized_potential(q, q2, eps);
  for (double x : cheb::equispaced({-1, 1}, 21)) {
    CHECK(std::abs(std::pow(qr(x), -0.25) - a(x)) < 1e-13);
  }
}

TEST_CASE("renormalization survives spurious turning points") {
  const auto q = Q("-(1+x^8)");
  const wkb::Problem p(0.7, q, wkb::Dirichlet{1, 1});
  const IwkbResult r = solve_iwkb(p, 1, true);
  CHECK(r.renormalized);
  CHECK(r.spurious.size() == 4);
  CHECK(std::abs(r.solution(-1.0) - 1.0) < 1e-12);
  CHECK(std::abs(r.solution(1.0) - 1.0) < 1e-12);
  CHECK(std::isfinite(residual_against(r.solution, q)));

  // Renormalized residual is still O(eps^4) when no spurious zeros exist.
  std::vector<double> res;
  for (double eps : {0.1, 0.05, 0.025}) {
    const wkb::Problem pe(eps, q, wkb::InitialValue{0, 1, 0});
    res.push_back(cheb::max_abs(
        wkb::relative_residual(solve_iwkb(pe, 1, true).solution.basis, q)));
  }
  for (std::size_t i = 1; i < res.size(); ++i) {
    CHECK(std::log2(res[i - 1] / res[i]) == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("zero iterations reproduce the plain WKB solution") {
  const wkb::Problem p(0.1, Q("-cosh(x)"), wkb::Dirichlet{1, 2});
  const IwkbResult r = solve_iwkb(p, 0, false);
  const wkb::WkbSolution s = wkb::fit_conditions(wkb::build_basis(p.q(), 0.1), p.conditions());
  CHECK(r.solution.c1 == s.c1);
  CHECK(r.solution.c2 == s.c2);
  for (double x : cheb::equispaced({-1, 1}, 31)) CHECK(r.solution(x) == s(x));
}

TEST_CASE("iterating reduces the residual for -cosh") {
  const auto q = Q("-cosh(x)");
  const wkb::Problem p(0.1, q, wkb::Dirichlet{1, 2});
  const double r0 = residual_against(solve_iwkb(p, 0, false).solution, q);
  const double r8 = residual_against(solve_iwkb(p, 8, false).solution, q);
  CHECK(r0 > 1e-2);
  CHECK(r0 < 5e-2);
  CHECK(r8 < 3e-9);
}

TEST_CASE("residual order grows by two per iteration") {
  const auto q = Q("-cosh(x)");
  for (int n : {0, 1, 2}) {
    std::vector<double> ls, lr;
    for (double eps : {0.1, 0.07, 0.05}) {
      const wkb::Problem p(eps, q, wkb::InitialValue{0, 1, 0});
      const auto s = solve_iwkb(p, n, false).solution;
      ls.push_back(std::log(eps));
      lr.push_back(std::log(cheb::max_abs(wkb::relative_residual(s.basis, q))));
    }
    const double slope = (lr.back() - lr.front()) / (ls.back() - ls.front());
    CHECK(slope == doctest::Approx(2.0 * n + 2).epsilon(0.05));
  }
}

TEST_CASE("iterated solution approaches an independent ODE solve") {
  const auto q = Q("-cosh(x)");
  const double eps = 0.1;
  const wkb::Problem p(eps, q, wkb::InitialValue{0, 1, 0});
  double prev = 1.0;
  for (int n : {0, 1, 2, 3}) {
    const auto s = solve_iwkb(p, n, false).solution;
    double err = 0.0;
    for (double x : {-1.0, -0.5, 0.5, 1.0}) {
      err = std::max(err, std::abs(s(x) - shoot(q, eps, 0.0, 1.0, 0.0, x)));
    }
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("iteration on an exponential potential") {
  const auto q = Q("1+x^2");
  const double eps = 0.1;
  const wkb::Problem p(eps, q, wkb::InitialValue{-1, 1, 0});
  const auto s0 = solve_iwkb(p, 0, false).solution;
  const auto s2 = solve_iwkb(p, 2, false).solution;
  const double ref = shoot(q, eps, -1, 1, 0, 1);
  CHECK(std::abs(s2(1.0) - ref) / std::abs(ref) < std::abs(s0(1.0) - ref) / std::abs(ref));
  CHECK(std::abs(s2(1.0) - ref) / std::abs(ref) < 1e-5);
}
