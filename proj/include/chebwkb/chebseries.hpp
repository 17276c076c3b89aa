#pragma once

// Piecewise Chebyshev approximation: adaptive fitting, Clenshaw evaluation,
// coefficient-recurrence calculus, pointwise algebra by refitting, and
// sign-change root finding.
//
// Every value here is immutable once constructed; all operations are pure.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace chebwkb::cheb {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;

  double length() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return 0.5 * (lo + hi); }
};

struct FitOptions {
  /// Relative tolerance; coefficients are judged against
  /// tol * max(max |f| on the samples, scale_floor).
  double tol = 1e-13;
  /// Absolute magnitude below which the sampled scale is not allowed to
  /// drop. Use it when fitting a small quantity that is a difference of
  /// larger ones, whose rounding noise lives at the larger scale.
  double scale_floor = 0.0;
  /// Largest degree tried per piece before NonConvergence.
  std::size_t max_degree = 65536;
};

using Function = std::function<double(double)>;

/// A single Chebyshev series sum_k c_k T_k(t), t the affine image of x in
/// [lo, hi] onto [-1, 1].
class ChebSeries {
 public:
  ChebSeries(std::vector<double> coeffs, Interval domain);

  static ChebSeries constant(double value, Interval domain);

  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  Interval domain() const noexcept { return domain_; }
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }

  /// Throws OutOfDomain if x is outside the domain by more than
  /// 1e-12 * length; points inside that slack are clamped.
  double operator()(double x) const;
  /// Clenshaw recurrence without the domain check.
  double evaluate_unchecked(double x) const noexcept;

  ChebSeries derivative() const;
  /// Antiderivative that vanishes at domain().lo.
  ChebSeries primitive() const;
  /// Exact re-expansion on a subinterval (interpolation at degree()+1 points).
  ChebSeries restricted(Interval sub) const;
  /// Sum of |c_k|, a cheap bound on max |s|.
  double coefficient_norm() const noexcept;

 private:
  std::vector<double> coeffs_;
  Interval domain_;
};

/// Chebyshev points of the second kind, x_j = mid + half*cos(pi*j/n),
/// j = 0..n (so the first point is domain.hi).
std::vector<double> chebyshev_points(std::size_t n, Interval domain);

/// Coefficients of the degree-n interpolant through values at
/// chebyshev_points(n, ...).
std::vector<double> values_to_coefficients(std::span<const double> values);

/// Values at chebyshev_points(n, ...) of the series with these
/// coefficients, by one DCT. Any degree is accepted.
std::vector<double> coefficients_to_values(std::span<const double> coeffs,
                                           std::size_t n);

/// Adaptive fit on a single interval. Samples at 9, 17, 33, ... points until
/// the tail of the coefficient sequence drops below tolerance, then chops.
ChebSeries fit_series(const Function& f, Interval domain,
                      const FitOptions& options = {});

class PiecewiseCheb {
 public:
  /// Pieces must tile their union: pieces[i].hi == pieces[i+1].lo.
  explicit PiecewiseCheb(std::vector<ChebSeries> pieces, double tol = 1e-13);

  static PiecewiseCheb constant(double value, Interval domain,
                                double tol = 1e-13);

  Interval domain() const noexcept;
  /// x_0 < x_1 < ... < x_m, including both domain ends.
  const std::vector<double>& breakpoints() const noexcept {
    return breakpoints_;
  }
  const std::vector<ChebSeries>& pieces() const noexcept { return pieces_; }
  std::size_t piece_count() const noexcept { return pieces_.size(); }
  /// Tolerance this function was fitted at; derived functions inherit it.
  double tol() const noexcept { return tol_; }
  std::size_t coefficient_count() const noexcept;

  /// Index of the piece containing x (the left one at a shared breakpoint).
  std::size_t piece_index(double x) const;

  /// Evaluates at x. At an interior breakpoint the mean of the two one-sided
  /// limits is returned.
  double operator()(double x) const;
  std::vector<double> operator()(std::span<const double> xs) const;

  /// Same function re-expanded on another breakpoint set spanning the same
  /// domain. Exact when the new set refines the current one.
  PiecewiseCheb with_breakpoints(std::span<const double> breakpoints) const;

  PiecewiseCheb with_tol(double tol) const;

 private:
  std::vector<ChebSeries> pieces_;
  std::vector<double> breakpoints_;
  double tol_;
};

/// Fits f on domain, one adaptive series per piece. Breakpoints outside the
/// open domain are ignored.
PiecewiseCheb fit(const Function& f, Interval domain, double tol,
                  std::span<const double> breakpoints = {});
PiecewiseCheb fit(const Function& f, Interval domain,
                  const FitOptions& options,
                  std::span<const double> breakpoints = {});

inline double eval(const PiecewiseCheb& s, double x) { return s(x); }
inline double eval(const ChebSeries& s, double x) { return s(x); }

/// Antiderivative F with F(anchor) = 0, continuous across breakpoints.
PiecewiseCheb antiderivative(const PiecewiseCheb& s, double anchor);
PiecewiseCheb derivative(const PiecewiseCheb& s);

enum class Op { add, sub, mul, div };

/// Pointwise a (op) b on the union of both breakpoint sets. add/sub are
/// exact coefficient operations; mul/div refit at the looser of the two
/// tolerances. div throws DivisionNearZero if min |b| < 1e3 * tol * max |b|.
PiecewiseCheb algebra(const PiecewiseCheb& a, const PiecewiseCheb& b, Op op);
PiecewiseCheb algebra(const PiecewiseCheb& a, double b, Op op);
PiecewiseCheb scale(const PiecewiseCheb& s, double factor);

PiecewiseCheb operator+(const PiecewiseCheb& a, const PiecewiseCheb& b);
PiecewiseCheb operator-(const PiecewiseCheb& a, const PiecewiseCheb& b);
PiecewiseCheb operator*(const PiecewiseCheb& a, const PiecewiseCheb& b);
PiecewiseCheb operator/(const PiecewiseCheb& a, const PiecewiseCheb& b);
PiecewiseCheb operator*(double factor, const PiecewiseCheb& s);
PiecewiseCheb operator-(const PiecewiseCheb& s);

/// Refit of x -> s(x)^p. Throws NegativeBase if p is not a nonnegative
/// integer and s is not strictly positive on a dense sample.
PiecewiseCheb power(const PiecewiseCheb& s, double p);

/// |s|. A sign-definite s is flipped exactly; otherwise s is split at its
/// roots and refitted.
PiecewiseCheb abs(const PiecewiseCheb& s);

/// Sign changes of s, refined by bisection, sorted ascending. Each piece is
/// sampled at no fewer than 2 * max(4 * (degree + 1), min_samples)
/// Chebyshev points.
std::vector<double> roots(const PiecewiseCheb& s, std::size_t min_samples = 512);

/// Max and min of s over at least 4 * (degree + 1) Chebyshev points per
/// piece.
double max_abs(const PiecewiseCheb& s);
double min_value(const PiecewiseCheb& s);
double max_value(const PiecewiseCheb& s);

/// Pointwise composition fn(values of inputs at x, x), refitted piece by
/// piece on the union of the inputs' breakpoints. Each input is evaluated on
/// its own matching piece, so one-sided limits at breakpoints are respected.
using Combiner = std::function<double(std::span<const double> values, double x)>;
PiecewiseCheb combine(std::initializer_list<const PiecewiseCheb*> inputs,
                      const Combiner& fn, const FitOptions& options);
PiecewiseCheb combine(std::initializer_list<const PiecewiseCheb*> inputs,
                      const Combiner& fn);

/// n equispaced points on [lo, hi], both ends included.
std::vector<double> equispaced(Interval domain, std::size_t n);

}  // namespace chebwkb::cheb
