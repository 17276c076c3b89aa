#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "chebwkb/analysis.hpp"
#include "chebwkb/error.hpp"
#include "chebwkb/wkb.hpp"
#include "support.hpp"

using namespace chebwkb;
using namespace chebwkb::wkb;
using support::max_abs;
using support::Q;

namespace {

double max_residual(const WkbSolution& s, const PiecewiseCheb& q) {
  const auto xs = cheb::equispaced(q.domain(), 4001);
  return max_abs(absolute_residual(s, xs, q));
}

}  // namespace

TEST_CASE("problem construction") {
  CHECK_THROWS_AS(Problem(0.0, Q("1"), Dirichlet{1, 1}), InvalidArgument);
  CHECK_THROWS_AS(Problem(-1.0, Q("1"), Dirichlet{1, 1}), InvalidArgument);
  CHECK_THROWS_AS(Problem(0.1, Q("x"), Dirichlet{1, 1}), TurningPoint);
  CHECK_THROWS_AS(Problem(0.1, Q("x^2"), Dirichlet{1, 1}), TurningPoint);
  CHECK_THROWS_AS(Problem(0.1, Q("1"), InitialValue{2, 1, 0}), InvalidArgument);
  CHECK_NOTHROW(Problem(0.1, Q("-cosh(x)"), InitialValue{1, 1, 0}));
}

TEST_CASE("basis construction") {
  const WkbBasis b = build_basis(Q("-cosh(x)"), 1.0 / 21);
  CHECK(b.mode == Mode::oscillatory);
  CHECK(b.sign == -1.0);
  CHECK(std::abs(b.amplitude(0.0) - 1.0) < 1e-13);
  CHECK(b.phase(0.0) == 0.0);
  CHECK(std::abs(eval_basis(b, 1, 0.0) - 1.0) < 1e-13);
  CHECK(std::abs(eval_basis(b, 2, 0.0)) < 1e-14);

  const double k = 3.0;
  const WkbBasis c = build_basis(PiecewiseCheb::constant(k * k, {0, 2}), 0.5);
  CHECK(c.mode == Mode::exponential);
  for (double x : cheb::equispaced({0, 2}, 11)) {
    CHECK(std::abs(c.amplitude(x) - 1 / std::sqrt(k)) < 1e-15);
    CHECK(std::abs(c.phase(x) - k * (x - 1)) < 1e-14);
  }
  CHECK_THROWS_AS(build_basis(Q("x"), 0.1), TurningPoint);
}

TEST_CASE("amplitude is positive and phase increasing") {
  for (const char* text : {"-cosh(x)", support::kDoubleWell, "-(1+abs(x))", "1+x^2"}) {
    const WkbBasis b = build_basis(Q(text), 0.05);
    CHECK(cheb::min_value(b.amplitude) > 0);
    const auto xs = cheb::equispaced({-1, 1}, 501);
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(b.phase(xs[i]) > b.phase(xs[i - 1]));
  }
}

TEST_CASE("exponential basis is scaled") {
  const WkbBasis b = build_basis(PiecewiseCheb::constant(1.0, {-1, 1}), 1.0);
  for (double x : cheb::equispaced({-1, 1}, 21)) {
    CHECK(std::abs(eval_basis(b, 1, x) - std::exp(x - 1)) < 1e-14);
    CHECK(std::abs(eval_basis(b, 2, x) - std::exp(-(x + 1))) < 1e-14);
    CHECK(std::abs(eval_basis_derivative(b, 1, x) - std::exp(x - 1)) < 1e-14);
    CHECK(std::abs(eval_basis_derivative(b, 2, x) + std::exp(-(x + 1))) < 1e-14);
  }
}

TEST_CASE("known constants for -cosh") {
  const Problem p(1.0 / 21, Q("-cosh(x)"), Dirichlet{1, 1});
  const WkbSolution s = fit_conditions(build_basis(p.q(), p.epsilon()), p.conditions());
  const auto c = *s.exponential_form();
  CHECK(std::abs(std::abs(c[0]) - 0.743437) < 1e-4);
  CHECK(std::abs(std::abs(c[1]) - 0.743437) < 1e-4);
  CHECK(std::abs(c[0] - c[1]) < 1e-12);
  // Rotation back to the real pair.
  CHECK(std::abs(2 * c[0].real() - s.c1) < 1e-14);
  CHECK(std::abs(2 * c[1].imag() - s.c2) < 1e-14);
}

TEST_CASE("pure cosine from an initial value at the midpoint") {
  const Problem p(1.0, PiecewiseCheb::constant(-1.0, {-1, 1}), InitialValue{0, 1, 0});
  const WkbSolution s = fit_conditions(build_basis(p.q(), 1.0), p.conditions());
  CHECK(std::abs(s.c1 - 1) < 1e-15);
  CHECK(std::abs(s.c2) < 1e-15);
}

TEST_CASE("exponential-form coefficients in exponential mode") {
  const Problem p(1.0, PiecewiseCheb::constant(1.0, {-1, 1}), Dirichlet{2, 3});
  const WkbSolution s = fit_conditions(build_basis(p.q(), 1.0), p.conditions());
  const auto c = *s.exponential_form();
  const double e = std::exp(1.0);
  CHECK(std::abs(c[0].real() / e + c[1].real() * e - 2) < 1e-13);
  CHECK(std::abs(c[0].real() * e + c[1].real() / e - 3) < 1e-13);
}

TEST_CASE("SingularConditions at a Dirichlet eigenvalue") {
  // Total phase by independent quadrature; eps_k = phase / (k pi) zeroes
  // the determinant.
  using boost::math::quadrature::gauss_kronrod;
  const double phase = gauss_kronrod<double, 61>::integrate(
      [](double x) { return std::sqrt(1 + std::pow(x, 8)); }, -1.0, 1.0, 15, 1e-15);
  const PiecewiseCheb q = Q("-(1+x^8)");
  const double eps = phase / (3 * std::numbers::pi);
  CHECK_THROWS_AS(fit_conditions(build_basis(q, eps), Dirichlet{1, 1}), SingularConditions);
  CHECK_NOTHROW(fit_conditions(build_basis(q, eps * 1.01), Dirichlet{1, 1}));
}

TEST_CASE("Overflow when an exponential IVP coefficient is not representable") {
  const PiecewiseCheb q = PiecewiseCheb::constant(1.0, {-1, 1});
  CHECK_THROWS_AS(fit_conditions(build_basis(q, 1e-3), InitialValue{-1, 1, 0}), Overflow);
  CHECK_NOTHROW(fit_conditions(build_basis(q, 1e-3), Dirichlet{1, 1}));
}

TEST_CASE("fitted solutions reproduce their conditions") {
  struct Case {
    const char* q;
    double eps;
    Conditions c;
  };
  const Case cases[] = {
      {"-cosh(x)", 0.1, Dirichlet{1, 2}},
      {"-cosh(x)", 0.01, InitialValue{0.3, -1, 4}},
      {support::kDoubleWell, 1.0 / 89, Dirichlet{1, 1}},
      {support::kDoubleWell, 1.0 / 8, InitialValue{0, 1, 0}},
      {"1+x^2", 0.05, InitialValue{-1, 2, -3}},
      {"-(1+abs(x))", 1.0 / 233, Dirichlet{-1, 0.5}},
  };
  for (const auto& c : cases) {
    const WkbSolution s = fit_conditions(build_basis(Q(c.q), c.eps), c.c);
    if (const auto* d = std::get_if<Dirichlet>(&c.c)) {
      CHECK(std::abs(s(-1.0) - d->ya) <= 1e-10 * std::abs(d->ya));
      CHECK(std::abs(s(1.0) - d->yb) <= 1e-10 * std::abs(d->yb));
    } else {
      const auto& v = std::get<InitialValue>(c.c);
      CHECK(std::abs(s(v.x0) - v.y0) <= 1e-10 * (std::abs(v.y0) + std::abs(v.yp0) * c.eps));
      CHECK(std::abs(s.derivative(v.x0) - v.yp0) <=
            1e-10 * (std::abs(v.yp0) + std::abs(v.y0) / c.eps));
    }
  }
}

TEST_CASE("double well spans forty orders of magnitude") {
  const WkbSolution s = fit_conditions(
      build_basis(Q(support::kDoubleWell, {-1, 1}, 1e-15), 1.0 / 89), Dirichlet{1, 1});
  const double y0 = s(0.0);
  CHECK(y0 > 0);
  CHECK(std::log10(y0) < -40);
  CHECK(std::log10(y0) > -46);
}

TEST_CASE("relative residual closed form for -(1+x^8)") {
  const PiecewiseCheb q = Q("-(1+x^8)");
  for (double eps : {0.1, 0.03}) {
    const PiecewiseCheb rel = relative_residual(build_basis(q, eps));
    const double e2 = eps * eps;
    for (double x : support::random_points({-1, 1}, 100)) {
      const double x8 = std::pow(x, 8);
      const double want = e2 * 2 * std::pow(x, 6) * (3 * x8 - 7) / ((x8 + 1) * (x8 + 1));
      CHECK(std::abs(rel(x) - want) < 1e-10 * e2);
    }
    CHECK(std::abs(rel(1.0) / e2 + 2) < 1e-10);
    CHECK(cheb::max_abs(rel) <= 3 * e2);
  }
  CHECK(cheb::max_abs(relative_residual(build_basis(PiecewiseCheb::constant(-4, {-1, 1}), 0.1))) == 0.0);
}

TEST_CASE("relative residual matches q2 by an independent path") {
  for (const char* text : {"1+x^2", "-(1+x^8)", "cosh(x)", "-cosh(x)", support::kDoubleWell}) {
    const PiecewiseCheb q = Q(text);
    const double eps = 0.07;
    const PiecewiseCheb rel = relative_residual(build_basis(q, eps));
    const PiecewiseCheb q2 = analysis::q2_of(q);
    for (double x : support::random_points({-1, 1}, 200)) {
      CHECK(std::abs(rel(x) / (eps * eps) - q2(x)) <= 1e3 * 1e-13 * cheb::max_abs(q2));
    }
  }
}

TEST_CASE("both branches see the same relative residual") {
  for (const char* text : {"1+x^2", "-cosh(x)", "-(1+x^8)"}) {
    const PiecewiseCheb q = Q(text);
    const WkbBasis b = build_basis(q, 0.05);
    const PiecewiseCheb rel = relative_residual(b);
    for (double x : support::random_points({-1, 1}, 50)) {
      const auto r1 = branch_relative_residual(b, +1, x);
      const auto r2 = branch_relative_residual(b, -1, x);
      const double scale = cheb::max_abs(q);
      CHECK(std::abs(r1 - r2) <= 1e2 * 1e-13 * scale);
      CHECK(std::abs(r1.real() - rel(x)) <= 1e2 * 1e-13 * scale);
    }
  }
}

TEST_CASE("absolute residual agrees with finite differences") {
  const PiecewiseCheb q = Q("-cosh(x)");
  const double eps = 0.1;
  const WkbSolution s = fit_conditions(build_basis(q, eps), Dirichlet{1, 2});
  const double h = 1e-3;
  const auto xs = cheb::equispaced({-0.99, 0.99}, 199);
  const auto r = absolute_residual(s, xs, q);
  double scale = 0;
  for (double x : xs) scale = std::max(scale, std::abs(q(x) * s(x)));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double ypp = (s(x + h) - 2 * s(x) + s(x - h)) / (h * h);
    const double fd = eps * eps * ypp - q(x) * s(x);
    CHECK(std::abs(fd - r[i]) < 5e-5 * scale);
  }
  // Derivative against a centered difference.
  for (double x : {-0.5, 0.1, 0.7}) {
    const double fd = (s(x + 1e-5) - s(x - 1e-5)) / 2e-5;
    CHECK(std::abs(fd - s.derivative(x)) < 1e-6 * std::abs(s.derivative(x)) + 1e-6);
  }
}

TEST_CASE("absolute residual equals relative residual times y") {
  const PiecewiseCheb q = Q("-cosh(x)");
  const WkbBasis b = build_basis(q, 0.05);
  const WkbSolution s = fit_conditions(b, Dirichlet{1, 2});
  const PiecewiseCheb rel = relative_residual(b);
  const auto xs = cheb::equispaced({-1, 1}, 301);
  const auto r = absolute_residual(s, xs);
  double ymax = 0;
  for (double x : xs) ymax = std::max(ymax, std::abs(s(x)));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(std::abs(r[i] - rel(xs[i]) * s(xs[i])) <= 1e2 * 1e-13 * ymax * cheb::max_abs(q));
  }
}

TEST_CASE("constant potentials are solved exactly") {
  for (double eps : {1.0, 0.1, 0.01}) {
    for (double k2 : {4.0, -4.0}) {
      const PiecewiseCheb q = PiecewiseCheb::constant(k2, {-1, 1});
      const WkbSolution s = fit_conditions(build_basis(q, eps), Dirichlet{1, 2});
      const auto xs = cheb::equispaced({-1, 1}, 1001);
      double ymax = 0;
      for (double x : xs) ymax = std::max(ymax, std::abs(s(x)));
      CHECK(max_abs(absolute_residual(s, xs, q)) <= 1e-12 * ymax);
    }
  }
}

TEST_CASE("residual levels for the sample potentials") {
  {
    const PiecewiseCheb q = Q("-(1+abs(x))");
    const WkbSolution s = fit_conditions(build_basis(q, 1.0 / 233), InitialValue{0, 1, 0});
    CHECK(max_residual(s, q) <= 6e-6);
  }
  {
    const PiecewiseCheb q = Q(support::kDoubleWell);
    const WkbSolution s = fit_conditions(build_basis(q, 1.0 / 8), InitialValue{0, 1, 0});
    const auto xs = cheb::equispaced({-1, 1}, 2001);
    const auto r = absolute_residual(s, xs, q);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(std::abs(r[i] / (s(xs[i]) * q(xs[i]))) < 0.05);
    }
  }
}

TEST_CASE("relative residual is second order") {
  const PiecewiseCheb q = Q("cosh(x)");
  const double eps = 0.1;
  const double r1 = cheb::max_abs(relative_residual(build_basis(q, eps)));
  const double r2 = cheb::max_abs(relative_residual(build_basis(q, eps / 2)));
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("Sturm normalization") {
  using potential::parse;
  const cheb::Interval d{-1, 1};
  {
    const SturmForm f = sturm_normalize(parse("0"), parse("1+x^2"), 0.0, d);
    for (double x : {-0.7, 0.0, 0.9}) CHECK(std::abs(f.c(x) - (1 + x * x)) < 1e-14);
  }
  {
    const SturmForm f = sturm_normalize(parse("2"), parse("0"), 0.0, d);
    CHECK(cheb::max_abs(f.c + PiecewiseCheb::constant(1.0, d)) < 1e-14);
  }
  {
    const SturmForm f = sturm_normalize(parse("2*x"), parse("1+x^2"), 0.0, d);
    CHECK(cheb::max_abs(f.c) < 1e-13);
  }
  {
    // y'' + 2y' + (1+k^2) y = 0, y(0) = 1, y'(0) = -1 has y = e^(-x) cos(kx).
    const double k = 3.0;
    const SturmForm f = sturm_normalize(parse("2"), parse("10"), 0.0, d);
    CHECK(std::abs(f.c(0.3) - k * k) < 1e-13);
    const InitialValue v = f.transform(1.0, -1.0);
    CHECK(v.y0 == 1.0);
    CHECK(std::abs(v.yp0) < 1e-15);
    for (double x : {-1.0, -0.2, 0.5, 1.0}) {
      CHECK(std::abs(f.to_original(std::cos(k * x), x) - std::exp(-x) * std::cos(k * x)) < 1e-13);
    }
  }
}
