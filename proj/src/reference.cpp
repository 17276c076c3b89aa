#include "chebwkb/reference.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "chebwkb/error.hpp"

namespace chebwkb::reference {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Barycentric weights for Chebyshev points of the second kind.
double weight(std::size_t j, std::size_t n) {
  const double w = (j % 2 == 0) ? 1.0 : -1.0;
  return (j == 0 || j == n) ? 0.5 * w : w;
}

// Lagrange basis values at t (in [-1, 1]) for nodes cos(pi j / n).
Eigen::RowVectorXd interpolation_row(std::span<const double> nodes, double t) {
  const std::size_t n = nodes.size() - 1;
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(n + 1));
  for (std::size_t j = 0; j <= n; ++j) {
    if (t == nodes[j]) {
      row(static_cast<Eigen::Index>(j)) = 1.0;
      return row;
    }
  }
  double denom = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double v = weight(j, n) / (t - nodes[j]);
    row(static_cast<Eigen::Index>(j)) = v;
    denom += v;
  }
  return row / denom;
}

struct Collocation {
  std::vector<double> t;  // descending nodes on [-1, 1]
  std::vector<double> y;  // solution at the nodes
};

Collocation collocate(const wkb::Problem& problem, std::size_t n) {
  const cheb::Interval dom = problem.domain();
  const double half = 0.5 * dom.length();
  const double eps2 = problem.epsilon() * problem.epsilon();
  const auto np = static_cast<Eigen::Index>(n + 1);

  std::vector<double> t(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    t[j] = std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
  }
  const auto dflat = differentiation_matrix(n);
  const Eigen::Map<const Matrix> d_ref(dflat.data(), np, np);
  const Matrix d = d_ref / half;
  Matrix a = eps2 * (d * d);
  for (std::size_t j = 0; j <= n; ++j) {
    const double x = dom.midpoint() + half * t[j];
    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) -= problem.q()(x);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np);

  if (const auto* bc = std::get_if<wkb::Dirichlet>(&problem.conditions())) {
    a.row(0).setZero();
    a(0, 0) = 1.0;
    rhs(0) = bc->yb;
    a.row(np - 1).setZero();
    a(np - 1, np - 1) = 1.0;
    rhs(np - 1) = bc->ya;
  } else {
    const auto& ivp = std::get<wkb::InitialValue>(problem.conditions());
    const double t0 = std::clamp((ivp.x0 - dom.midpoint()) / half, -1.0, 1.0);
    const Eigen::RowVectorXd value_row = interpolation_row(t, t0);
    a.row(0) = value_row;
    rhs(0) = ivp.y0;
    a.row(np - 1) = value_row * d;
    rhs(np - 1) = ivp.yp0;
  }

  // Row equilibration so rcond measures the problem, not the row scales.
  for (Eigen::Index i = 0; i < np; ++i) {
    const double s = a.row(i).cwiseAbs().maxCoeff();
    a.row(i) /= s;
    rhs(i) /= s;
  }
  const Eigen::PartialPivLU<Matrix> lu(a);
  const Eigen::VectorXd y = lu.solve(rhs);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-15) || !y.allFinite()) {
    throw SingularSystem("collocation matrix is singular (rcond " +
                         std::to_string(rcond) +
                         "); epsilon is at or near an eigenvalue");
  }
  return {std::move(t), std::vector<double>(y.data(), y.data() + y.size())};
}

}  // namespace

std::vector<double> differentiation_matrix(std::size_t n) {
  const std::size_t m = n + 1;
  std::vector<double> d(m * m, 0.0);
  if (n == 0) return d;
  std::vector<double> x(m), c(m);
  for (std::size_t j = 0; j <= n; ++j) {
    x[j] = std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
    c[j] = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2 == 0) ? 1.0 : -1.0);
  }
  for (std::size_t i = 0; i <= n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      if (i == j) continue;
      const double v = (c[i] / c[j]) / (x[i] - x[j]);
      d[i * m + j] = v;
      row_sum += v;
    }
    // Negative-sum trick: rows of D annihilate constants.
    d[i * m + i] = -row_sum;
  }
  return d;
}

std::size_t required_collocation(const wkb::Problem& problem) {
  const double sign = cheb::max_value(problem.q()) > 0.0 ? 1.0 : -1.0;
  const auto root = cheb::power(cheb::scale(problem.q(), sign), 0.5);
  const auto phase = cheb::antiderivative(root, problem.domain().lo);
  const double range = phase(problem.domain().hi);
  return static_cast<std::size_t>(
      std::ceil(8.0 * range / (std::numbers::pi * problem.epsilon())));
}

ReferenceSolution solve_reference(const wkb::Problem& problem,
                                  std::size_t n_colloc) {
  if (n_colloc < kMinCollocation || n_colloc > kMaxCollocation) {
    throw InvalidArgument("n_colloc must lie in [" +
                          std::to_string(kMinCollocation) + ", " +
                          std::to_string(kMaxCollocation) + "], got " +
                          std::to_string(n_colloc));
  }
  const std::size_t needed = required_collocation(problem);
  if (n_colloc < needed) {
    throw UnderResolved("n_colloc = " + std::to_string(n_colloc) +
                        " cannot resolve the solution; need at least " +
                        std::to_string(needed));
  }
  if (n_colloc % 2 != 0) ++n_colloc;
  n_colloc = std::min(n_colloc, kMaxCollocation);

  const Collocation fine = collocate(problem, n_colloc);
  const Collocation coarse = collocate(problem, n_colloc / 2);
  double est = 0.0;
  for (std::size_t j = 0; j < coarse.y.size(); ++j) {
    est = std::max(est, std::abs(fine.y[2 * j] - coarse.y[j]));
  }

  const cheb::Interval dom = problem.domain();
  ReferenceSolution out;
  out.n_colloc = n_colloc;
  out.est_error = est;
  out.grid.resize(fine.t.size());
  out.values.resize(fine.y.size());
  for (std::size_t j = 0; j < fine.t.size(); ++j) {
    const std::size_t k = fine.t.size() - 1 - j;
    out.grid[j] = dom.midpoint() + 0.5 * dom.length() * fine.t[k];
    out.values[j] = fine.y[k];
  }
  out.grid.front() = dom.lo;
  out.grid.back() = dom.hi;
  return out;
}

double ReferenceSolution::operator()(double x) const {
  // Grid is ascending, so node j carries the weight of position n - j; the
  // alternating sign pattern is symmetric up to a global sign that cancels.
  const std::size_t n = grid.size() - 1;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    if (x == grid[j]) return values[j];
    const double w = weight(j, n) / (x - grid[j]);
    num += w * values[j];
    den += w;
  }
  return num / den;
}

std::vector<double> ReferenceSolution::operator()(
    std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
  return out;
}

}  // namespace chebwkb::reference
