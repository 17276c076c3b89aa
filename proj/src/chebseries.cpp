#include "chebwkb/chebseries.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "chebwkb/error.hpp"

namespace chebwkb::cheb {

namespace {

constexpr double kMachineEps = std::numeric_limits<double>::epsilon();
// Below this size the O(n^2) cosine sum beats FFTW planning.
constexpr std::size_t kDirectTransformLimit = 64;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// DCT-I: Y_k = X_0 + (-1)^k X_n + 2 sum_{j=1}^{n-1} X_j cos(pi j k / n).
std::vector<double> dct1(std::span<const double> x) {
  const std::size_t n = x.size() - 1;
  std::vector<double> y(x.size());
  if (n <= kDirectTransformLimit) {
    std::vector<double> cosines(2 * n);
    for (std::size_t m = 0; m < 2 * n; ++m) {
      cosines[m] = std::cos(std::numbers::pi * static_cast<double>(m) /
                            static_cast<double>(n));
    }
    for (std::size_t k = 0; k <= n; ++k) {
      double sum = x[0] + ((k % 2 == 0) ? x[n] : -x[n]);
      for (std::size_t j = 1; j < n; ++j) {
        sum += 2.0 * x[j] * cosines[(j * k) % (2 * n)];
      }
      y[k] = sum;
    }
    return y;
  }
  std::vector<double> in(x.begin(), x.end());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_r2r_1d(static_cast<int>(in.size()), in.data(), y.data(),
                            FFTW_REDFT00, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return y;
}

// Everything but the c[0] term of the Clenshaw sum.
double clenshaw_rest(std::span<const double> c, double t) noexcept {
  double b1 = 0.0;
  double b2 = 0.0;
  const double two_t = 2.0 * t;
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    const double b0 = c[k] + two_t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2;
}

double clenshaw(std::span<const double> c, double t) noexcept {
  return c[0] + clenshaw_rest(c, t);
}

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p *= 2;
  return p;
}

// Values at the n+1 Chebyshev points (descending, as chebyshev_points).
// T_k at those points equals T_k' with k' = k folded into [0, n], so a
// series of any degree maps exactly onto the grid.
std::vector<double> grid_values(std::span<const double> c, std::size_t n) {
  if (n == 0) {
    double sum = 0.0;
    for (std::size_t k = 0; k < c.size(); k += 2) sum += (k % 4 == 0 ? c[k] : -c[k]);
    return {sum};
  }
  std::vector<double> folded(n + 1, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    std::size_t r = k % (2 * n);
    if (r > n) r = 2 * n - r;
    folded[r] += c[k];
  }
  for (std::size_t k = 1; k < n; ++k) folded[k] *= 0.5;
  return dct1(folded);
}

std::size_t chop_index(std::span<const double> c, double level) {
  std::size_t keep = c.size();
  while (keep > 1 && std::abs(c[keep - 1]) <= level) --keep;
  return keep;
}

// Drops trailing coefficients while their summed magnitude, a bound on the
// pointwise change, stays within budget. Coefficients at rounding level
// (below `noise`) are dropped for free.
std::size_t chop_by_sum(std::span<const double> c, double budget,
                        double noise) {
  std::size_t keep = c.size();
  double dropped = 0.0;
  while (keep > 1) {
    const double a = std::abs(c[keep - 1]);
    if (a > noise) {
      if (dropped + a > budget) break;
      dropped += a;
    }
    --keep;
  }
  return keep;
}

std::string format_point(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::vector<double> merged_breakpoints(
    const std::vector<const PiecewiseCheb*>& inputs) {
  std::vector<double> all;
  for (const auto* s : inputs) {
    all.insert(all.end(), s->breakpoints().begin(), s->breakpoints().end());
  }
  std::sort(all.begin(), all.end());
  const Interval dom = inputs.front()->domain();
  const double merge_tol = 1e-14 * dom.length();
  std::vector<double> out;
  for (double b : all) {
    if (out.empty() || b - out.back() > merge_tol) out.push_back(b);
  }
  out.front() = dom.lo;
  out.back() = dom.hi;
  return out;
}

// Sampler: (n, points) -> values at the n+1 Chebyshev points.
template <class Sampler>
ChebSeries fit_sampled(const Sampler& sample, Interval domain,
                       const FitOptions& options) {
  const double tol = std::max(options.tol, 4.0 * kMachineEps);
  double previous_tail = std::numeric_limits<double>::infinity();
  for (std::size_t n = 8;; n *= 2) {
    if (n > options.max_degree) {
      throw NonConvergence(
          "no convergence below degree " + std::to_string(options.max_degree) +
          " on [" + format_point(domain.lo) + ", " + format_point(domain.hi) +
          "]; the function is probably singular inside this piece");
    }
    const auto xs = chebyshev_points(n, domain);
    const std::vector<double> values = sample(n, xs);
    double vscale = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (!std::isfinite(values[j])) {
        throw DomainError("non-finite sample at x = " + format_point(xs[j]));
      }
      vscale = std::max(vscale, std::abs(values[j]));
    }
    vscale = std::max(vscale, options.scale_floor);
    if (vscale == 0.0) return ChebSeries::constant(0.0, domain);

    auto c = values_to_coefficients(values);
    const double threshold = tol * vscale;
    const std::size_t window = std::max<std::size_t>(3, (n + 1) / 16);
    double tail = 0.0;
    for (std::size_t k = c.size() - window; k < c.size(); ++k) {
      tail = std::max(tail, std::abs(c[k]));
    }
    if (tail <= threshold) {
      c.resize(chop_by_sum(c, 0.25 * threshold, 4.0 * kMachineEps * vscale));
      return ChebSeries(std::move(c), domain);
    }
    // Rounding plateau: the tail stopped decreasing a little above the
    // requested level, so the samples carry no more information.
    if (n >= 64 && tail <= 100.0 * threshold && tail >= 0.5 * previous_tail) {
      c.resize(chop_index(c, 2.0 * tail));
      return ChebSeries(std::move(c), domain);
    }
    previous_tail = tail;
  }
}

PiecewiseCheb combine_impl(const std::vector<const PiecewiseCheb*>& inputs,
                           const Combiner& fn, const FitOptions& options) {
  const Interval dom = inputs.front()->domain();
  for (const auto* s : inputs) {
    const Interval d = s->domain();
    const double slack = 1e-12 * dom.length();
    if (std::abs(d.lo - dom.lo) > slack || std::abs(d.hi - dom.hi) > slack) {
      throw InvalidArgument("combine: operands live on different domains");
    }
  }
  const std::vector<double> breaks = merged_breakpoints(inputs);
  std::vector<PiecewiseCheb> aligned;
  aligned.reserve(inputs.size());
  for (const auto* s : inputs) aligned.push_back(s->with_breakpoints(breaks));

  std::vector<ChebSeries> pieces;
  pieces.reserve(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const Interval sub{breaks[i], breaks[i + 1]};
    std::vector<const ChebSeries*> operands;
    operands.reserve(aligned.size());
    for (const auto& a : aligned) operands.push_back(&a.pieces()[i]);
    pieces.push_back(fit_sampled(
        [&](std::size_t n, const std::vector<double>& xs) {
          std::vector<std::vector<double>> columns;
          columns.reserve(operands.size());
          for (const auto* op : operands) {
            columns.push_back(grid_values(op->coeffs(), n));
          }
          std::vector<double> row(operands.size());
          std::vector<double> out(xs.size());
          for (std::size_t j = 0; j < xs.size(); ++j) {
            for (std::size_t k = 0; k < operands.size(); ++k) {
              row[k] = columns[k][j];
            }
            out[j] = fn(row, xs[j]);
          }
          return out;
        },
        sub, options));
  }
  return PiecewiseCheb(std::move(pieces), options.tol);
}

double looser_tol(std::initializer_list<const PiecewiseCheb*> inputs) {
  double tol = 0.0;
  for (const auto* s : inputs) tol = std::max(tol, s->tol());
  return tol;
}

struct SampleRange {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
};

SampleRange sample_range(const PiecewiseCheb& s) {
  SampleRange r;
  for (const auto& piece : s.pieces()) {
    const std::size_t n = next_power_of_two(std::max<std::size_t>(4 * (piece.degree() + 1), 64));
    for (double v : grid_values(piece.coeffs(), n)) {
      r.min = std::min(r.min, v);
      r.max = std::max(r.max, v);
    }
  }
  return r;
}

bool is_nonnegative_integer(double p) {
  return p >= 0.0 && std::floor(p) == p;
}

}  // namespace

// ---------------------------------------------------------------- ChebSeries

ChebSeries::ChebSeries(std::vector<double> coeffs, Interval domain)
    : coeffs_(std::move(coeffs)), domain_(domain) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  if (!(domain_.lo < domain_.hi)) {
    throw InvalidArgument("ChebSeries: domain must satisfy lo < hi");
  }
}

ChebSeries ChebSeries::constant(double value, Interval domain) {
  return ChebSeries({value}, domain);
}

double ChebSeries::operator()(double x) const {
  const double slack = 1e-12 * domain_.length();
  if (x < domain_.lo - slack || x > domain_.hi + slack || std::isnan(x)) {
    throw OutOfDomain("x = " + format_point(x) + " outside [" +
                      format_point(domain_.lo) + ", " +
                      format_point(domain_.hi) + "]");
  }
  return evaluate_unchecked(std::clamp(x, domain_.lo, domain_.hi));
}

double ChebSeries::evaluate_unchecked(double x) const noexcept {
  const double t = (2.0 * x - domain_.lo - domain_.hi) / domain_.length();
  return clenshaw(coeffs_, t);
}

ChebSeries ChebSeries::derivative() const {
  const std::size_t n = coeffs_.size();
  if (n == 1) return constant(0.0, domain_);
  // c'_{k-1} = c'_{k+1} + 2 k c_k, with c'_0 halved at the end.
  std::vector<double> d(n - 1, 0.0);
  for (std::size_t k = n - 1; k >= 1; --k) {
    const double next = (k + 1 < n - 1) ? d[k + 1] : 0.0;
    d[k - 1] = next + 2.0 * static_cast<double>(k) * coeffs_[k];
  }
  d[0] *= 0.5;
  const double factor = 2.0 / domain_.length();
  for (double& v : d) v *= factor;
  return ChebSeries(std::move(d), domain_);
}

ChebSeries ChebSeries::primitive() const {
  const std::size_t n = coeffs_.size();
  const auto c = [&](std::size_t k) { return k < n ? coeffs_[k] : 0.0; };
  // int T_0 = T_1, int T_1 = T_2 / 4 (+ const),
  // int T_k = T_{k+1} / (2(k+1)) - T_{k-1} / (2(k-1)).
  std::vector<double> out(n + 1, 0.0);
  out[1] = c(0) - 0.5 * c(2);
  for (std::size_t j = 2; j <= n; ++j) {
    out[j] = (c(j - 1) - c(j + 1)) / (2.0 * static_cast<double>(j));
  }
  const double factor = 0.5 * domain_.length();
  for (double& v : out) v *= factor;
  ChebSeries result(std::move(out), domain_);
  // Value at t = -1 is sum (-1)^k C_k; cancel it through C_0.
  double at_lo = 0.0;
  for (std::size_t k = 0; k < result.coeffs_.size(); ++k) {
    at_lo += (k % 2 == 0) ? result.coeffs_[k] : -result.coeffs_[k];
  }
  result.coeffs_[0] -= at_lo;
  return result;
}

ChebSeries ChebSeries::restricted(Interval sub) const {
  const std::size_t n = std::max<std::size_t>(degree(), 1);
  const auto xs = chebyshev_points(n, sub);
  std::vector<double> values(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    values[j] = evaluate_unchecked(xs[j]);
  }
  auto c = values_to_coefficients(values);
  c.resize(degree() + 1);
  return ChebSeries(std::move(c), sub);
}

double ChebSeries::coefficient_norm() const noexcept {
  double s = 0.0;
  for (double c : coeffs_) s += std::abs(c);
  return s;
}

// ------------------------------------------------------------------ fitting

std::vector<double> chebyshev_points(std::size_t n, Interval domain) {
  std::vector<double> xs(n + 1);
  const double mid = domain.midpoint();
  const double half = 0.5 * domain.length();
  if (n == 0) {
    xs[0] = mid;
    return xs;
  }
  for (std::size_t j = 0; j <= n; ++j) {
    // sin form keeps the points symmetric about mid to rounding.
    const double theta = std::numbers::pi *
                         (static_cast<double>(n) - 2.0 * static_cast<double>(j)) /
                         (2.0 * static_cast<double>(n));
    xs[j] = mid + half * std::sin(theta);
  }
  xs.front() = domain.hi;
  xs.back() = domain.lo;
  return xs;
}

std::vector<double> values_to_coefficients(std::span<const double> values) {
  const std::size_t n = values.size() - 1;
  if (n == 0) return {values[0]};
  auto c = dct1(values);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& v : c) v *= inv_n;
  c.front() *= 0.5;
  c.back() *= 0.5;
  return c;
}

std::vector<double> coefficients_to_values(std::span<const double> coeffs,
                                           std::size_t n) {
  return grid_values(coeffs, n);
}

ChebSeries fit_series(const Function& f, Interval domain,
                      const FitOptions& options) {
  return fit_sampled(
      [&f](std::size_t, const std::vector<double>& xs) {
        std::vector<double> v(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) v[j] = f(xs[j]);
        return v;
      },
      domain, options);
}

// ------------------------------------------------------------ PiecewiseCheb

PiecewiseCheb::PiecewiseCheb(std::vector<ChebSeries> pieces, double tol)
    : pieces_(std::move(pieces)), tol_(tol) {
  if (pieces_.empty()) {
    throw InvalidArgument("PiecewiseCheb needs at least one piece");
  }
  breakpoints_.reserve(pieces_.size() + 1);
  breakpoints_.push_back(pieces_.front().domain().lo);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Interval d = pieces_[i].domain();
    const double slack = 1e-13 * std::max(1.0, std::abs(d.lo));
    if (std::abs(d.lo - breakpoints_.back()) > slack) {
      throw InvalidArgument("PiecewiseCheb pieces do not tile the domain");
    }
    breakpoints_.push_back(d.hi);
  }
}

PiecewiseCheb PiecewiseCheb::constant(double value, Interval domain,
                                      double tol) {
  return PiecewiseCheb({ChebSeries::constant(value, domain)}, tol);
}

Interval PiecewiseCheb::domain() const noexcept {
  return {breakpoints_.front(), breakpoints_.back()};
}

std::size_t PiecewiseCheb::coefficient_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : pieces_) n += p.coeffs().size();
  return n;
}

std::size_t PiecewiseCheb::piece_index(double x) const {
  const auto it =
      std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end() - 1, x);
  return static_cast<std::size_t>(it - (breakpoints_.begin() + 1));
}

double PiecewiseCheb::operator()(double x) const {
  const Interval dom = domain();
  const double slack = 1e-12 * dom.length();
  if (x < dom.lo - slack || x > dom.hi + slack || std::isnan(x)) {
    throw OutOfDomain("x = " + format_point(x) + " outside [" +
                      format_point(dom.lo) + ", " + format_point(dom.hi) + "]");
  }
  x = std::clamp(x, dom.lo, dom.hi);
  const std::size_t i = piece_index(x);
  const double value = pieces_[i].evaluate_unchecked(x);
  if (i + 1 < pieces_.size() && x == breakpoints_[i + 1]) {
    return 0.5 * (value + pieces_[i + 1].evaluate_unchecked(x));
  }
  return value;
}

std::vector<double> PiecewiseCheb::operator()(
    std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
  return out;
}

PiecewiseCheb PiecewiseCheb::with_breakpoints(
    std::span<const double> breakpoints) const {
  if (breakpoints.size() == breakpoints_.size() &&
      std::equal(breakpoints.begin(), breakpoints.end(),
                 breakpoints_.begin())) {
    return *this;
  }
  std::vector<ChebSeries> pieces;
  pieces.reserve(breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const Interval sub{breakpoints[i], breakpoints[i + 1]};
    const std::size_t k = piece_index(sub.midpoint());
    const Interval own = pieces_[k].domain();
    const double slack = 1e-13 * std::max(1.0, std::abs(sub.lo));
    if (sub.lo < own.lo - slack || sub.hi > own.hi + slack) {
      // A new piece straddles an old breakpoint; refit across it.
      const auto& self = *this;
      pieces.push_back(fit_series([&](double x) { return self(x); }, sub,
                                  FitOptions{.tol = tol_}));
    } else if (std::abs(sub.lo - own.lo) <= slack &&
               std::abs(sub.hi - own.hi) <= slack) {
      pieces.emplace_back(pieces_[k].coeffs(), sub);
    } else {
      pieces.push_back(pieces_[k].restricted(sub));
    }
  }
  return PiecewiseCheb(std::move(pieces), tol_);
}

PiecewiseCheb PiecewiseCheb::with_tol(double tol) const {
  PiecewiseCheb copy = *this;
  copy.tol_ = tol;
  return copy;
}

PiecewiseCheb fit(const Function& f, Interval domain, double tol,
                  std::span<const double> breakpoints) {
  return fit(f, domain, FitOptions{.tol = tol}, breakpoints);
}

PiecewiseCheb fit(const Function& f, Interval domain,
                  const FitOptions& options,
                  std::span<const double> breakpoints) {
  if (!(options.tol > 0.0)) throw InvalidArgument("fit: tol must be > 0");
  if (!(domain.lo < domain.hi)) {
    throw InvalidArgument("fit: domain must satisfy lo < hi");
  }
  std::vector<double> breaks{domain.lo};
  std::vector<double> interior(breakpoints.begin(), breakpoints.end());
  std::sort(interior.begin(), interior.end());
  const double min_gap = 1e-12 * domain.length();
  for (double b : interior) {
    if (b - breaks.back() > min_gap && domain.hi - b > min_gap) {
      breaks.push_back(b);
    }
  }
  breaks.push_back(domain.hi);
  std::vector<ChebSeries> pieces;
  pieces.reserve(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    pieces.push_back(fit_series(f, {breaks[i], breaks[i + 1]}, options));
  }
  return PiecewiseCheb(std::move(pieces), options.tol);
}

// ----------------------------------------------------------------- calculus

PiecewiseCheb antiderivative(const PiecewiseCheb& s, double anchor) {
  std::vector<ChebSeries> pieces;
  pieces.reserve(s.piece_count());
  double carry = 0.0;
  for (const auto& piece : s.pieces()) {
    ChebSeries p = piece.primitive();
    auto c = p.coeffs();
    c[0] += carry;
    ChebSeries shifted(std::move(c), p.domain());
    carry = shifted.evaluate_unchecked(p.domain().hi);
    pieces.push_back(std::move(shifted));
  }
  PiecewiseCheb unanchored(std::move(pieces), s.tol());
  const double offset = unanchored(anchor);
  std::vector<ChebSeries> anchored;
  anchored.reserve(unanchored.piece_count());
  for (const auto& piece : unanchored.pieces()) {
    auto c = piece.coeffs();
    c[0] -= offset;
    anchored.emplace_back(std::move(c), piece.domain());
  }
  // Pin the constant so the anchor evaluates to exactly zero: Clenshaw
  // returns c0 + rest, and c0 = -rest makes that sum exact. Other pieces
  // move by the same amount; a piece sharing the anchor as breakpoint is
  // pinned too.
  const auto pin = [&](std::size_t i) {
    const ChebSeries& piece = anchored[i];
    const Interval d = piece.domain();
    const double t = (2.0 * anchor - d.lo - d.hi) / d.length();
    auto c = piece.coeffs();
    const double shift = -clenshaw_rest(c, t) - c[0];
    c[0] += shift;
    anchored[i] = ChebSeries(std::move(c), d);
    return shift;
  };
  const double clamped = std::clamp(anchor, s.domain().lo, s.domain().hi);
  anchor = clamped;
  const std::size_t k = unanchored.piece_index(anchor);
  const double shift = pin(k);
  for (std::size_t i = 0; i < anchored.size(); ++i) {
    if (i == k) continue;
    auto c = anchored[i].coeffs();
    c[0] += shift;
    anchored[i] = ChebSeries(std::move(c), anchored[i].domain());
  }
  if (k + 1 < anchored.size() && anchor == anchored[k + 1].domain().lo) {
    pin(k + 1);
  }
  return PiecewiseCheb(std::move(anchored), s.tol());
}

PiecewiseCheb derivative(const PiecewiseCheb& s) {
  std::vector<ChebSeries> pieces;
  pieces.reserve(s.piece_count());
  for (const auto& piece : s.pieces()) pieces.push_back(piece.derivative());
  return PiecewiseCheb(std::move(pieces), s.tol());
}

// ------------------------------------------------------------------ algebra

namespace {

PiecewiseCheb linear_combination(const PiecewiseCheb& a, double wa,
                                 const PiecewiseCheb& b, double wb) {
  const std::vector<const PiecewiseCheb*> inputs{&a, &b};
  const auto breaks = merged_breakpoints(inputs);
  const PiecewiseCheb ra = a.with_breakpoints(breaks);
  const PiecewiseCheb rb = b.with_breakpoints(breaks);
  std::vector<ChebSeries> pieces;
  pieces.reserve(ra.piece_count());
  for (std::size_t i = 0; i < ra.piece_count(); ++i) {
    const auto& ca = ra.pieces()[i].coeffs();
    const auto& cb = rb.pieces()[i].coeffs();
    std::vector<double> c(std::max(ca.size(), cb.size()), 0.0);
    for (std::size_t k = 0; k < ca.size(); ++k) c[k] += wa * ca[k];
    for (std::size_t k = 0; k < cb.size(); ++k) c[k] += wb * cb[k];
    pieces.emplace_back(std::move(c), ra.pieces()[i].domain());
  }
  return PiecewiseCheb(std::move(pieces), std::max(a.tol(), b.tol()));
}

}  // namespace

PiecewiseCheb algebra(const PiecewiseCheb& a, const PiecewiseCheb& b, Op op) {
  switch (op) {
    case Op::add:
      return linear_combination(a, 1.0, b, 1.0);
    case Op::sub:
      return linear_combination(a, 1.0, b, -1.0);
    case Op::mul:
      return combine({&a, &b},
                     [](std::span<const double> v, double) { return v[0] * v[1]; });
    case Op::div: {
      const SampleRange r = sample_range(b);
      const double big = std::max(std::abs(r.min), std::abs(r.max));
      const double tol = std::max(a.tol(), b.tol());
      double small = std::min(std::abs(r.min), std::abs(r.max));
      if (r.min <= 0.0 && r.max >= 0.0) small = 0.0;
      if (small < 1e3 * tol * big || big == 0.0) {
        throw DivisionNearZero("divisor comes within " +
                               format_point(small) + " of zero");
      }
      return combine({&a, &b},
                     [](std::span<const double> v, double) { return v[0] / v[1]; });
    }
  }
  throw InvalidArgument("algebra: unknown operation");
}

PiecewiseCheb algebra(const PiecewiseCheb& a, double b, Op op) {
  switch (op) {
    case Op::add:
    case Op::sub: {
      const double shift = (op == Op::add) ? b : -b;
      std::vector<ChebSeries> pieces;
      for (const auto& piece : a.pieces()) {
        auto c = piece.coeffs();
        c[0] += shift;
        pieces.emplace_back(std::move(c), piece.domain());
      }
      return PiecewiseCheb(std::move(pieces), a.tol());
    }
    case Op::mul:
      return scale(a, b);
    case Op::div:
      if (b == 0.0) throw DivisionNearZero("division by the constant 0");
      return scale(a, 1.0 / b);
  }
  throw InvalidArgument("algebra: unknown operation");
}

PiecewiseCheb scale(const PiecewiseCheb& s, double factor) {
  std::vector<ChebSeries> pieces;
  pieces.reserve(s.piece_count());
  for (const auto& piece : s.pieces()) {
    auto c = piece.coeffs();
    for (double& v : c) v *= factor;
    pieces.emplace_back(std::move(c), piece.domain());
  }
  return PiecewiseCheb(std::move(pieces), s.tol());
}

PiecewiseCheb operator+(const PiecewiseCheb& a, const PiecewiseCheb& b) {
  return algebra(a, b, Op::add);
}
PiecewiseCheb operator-(const PiecewiseCheb& a, const PiecewiseCheb& b) {
  return algebra(a, b, Op::sub);
}
PiecewiseCheb operator*(const PiecewiseCheb& a, const PiecewiseCheb& b) {
  return algebra(a, b, Op::mul);
}
PiecewiseCheb operator/(const PiecewiseCheb& a, const PiecewiseCheb& b) {
  return algebra(a, b, Op::div);
}
PiecewiseCheb operator*(double factor, const PiecewiseCheb& s) {
  return scale(s, factor);
}
PiecewiseCheb operator-(const PiecewiseCheb& s) { return scale(s, -1.0); }

PiecewiseCheb power(const PiecewiseCheb& s, double p) {
  if (!is_nonnegative_integer(p)) {
    const SampleRange r = sample_range(s);
    if (!(r.min > 0.0)) {
      throw NegativeBase("power " + format_point(p) +
                         " of a function reaching " + format_point(r.min));
    }
  }
  if (p == 0.0) {
    return PiecewiseCheb::constant(1.0, s.domain(), s.tol());
  }
  if (p == 1.0) return s;
  return combine({&s}, [p](std::span<const double> v, double) {
    return std::pow(v[0], p);
  });
}

PiecewiseCheb abs(const PiecewiseCheb& s) {
  const auto zeros = roots(s);
  if (zeros.empty()) {
    const SampleRange r = sample_range(s);
    return (r.max <= 0.0) ? scale(s, -1.0) : s;
  }
  std::vector<double> breaks = s.breakpoints();
  breaks.insert(breaks.end(), zeros.begin(), zeros.end());
  std::sort(breaks.begin(), breaks.end());
  return fit([&](double x) { return std::abs(s(x)); }, s.domain(), s.tol(),
             breaks);
}

// -------------------------------------------------------------------- roots

std::vector<double> roots(const PiecewiseCheb& s, std::size_t min_samples) {
  std::vector<double> found;
  for (const auto& piece : s.pieces()) {
    // Chebyshev points are sparser than equispaced ones mid-interval by
    // pi/2, so take twice as many.
    const std::size_t n = next_power_of_two(
        2 * std::max<std::size_t>(4 * (piece.degree() + 1), min_samples));
    auto xs = chebyshev_points(n, piece.domain());
    auto ys = grid_values(piece.coeffs(), n);
    std::reverse(xs.begin(), xs.end());
    std::reverse(ys.begin(), ys.end());
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (ys[j] == 0.0) {
        found.push_back(xs[j]);
        continue;
      }
      if (j + 1 < xs.size() && ys[j + 1] != 0.0 &&
          std::signbit(ys[j]) != std::signbit(ys[j + 1])) {
        double lo = xs[j];
        double hi = xs[j + 1];
        const bool lo_negative = ys[j] < 0.0;
        for (int it = 0; it < 200 && hi - lo > 4.0 * kMachineEps * std::max(1.0, std::abs(lo)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double v = piece.evaluate_unchecked(mid);
          if (v == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((v < 0.0) == lo_negative) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        found.push_back(0.5 * (lo + hi));
      }
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<double> out;
  const double dedupe = 1e-12 * s.domain().length();
  for (double r : found) {
    if (out.empty() || r - out.back() > dedupe) out.push_back(r);
  }
  return out;
}

double max_abs(const PiecewiseCheb& s) {
  const SampleRange r = sample_range(s);
  return std::max(std::abs(r.min), std::abs(r.max));
}

double min_value(const PiecewiseCheb& s) { return sample_range(s).min; }
double max_value(const PiecewiseCheb& s) { return sample_range(s).max; }

PiecewiseCheb combine(std::initializer_list<const PiecewiseCheb*> inputs,
                      const Combiner& fn, const FitOptions& options) {
  return combine_impl(std::vector<const PiecewiseCheb*>(inputs), fn, options);
}

PiecewiseCheb combine(std::initializer_list<const PiecewiseCheb*> inputs,
                      const Combiner& fn) {
  return combine_impl(std::vector<const PiecewiseCheb*>(inputs), fn,
                      FitOptions{.tol = looser_tol(inputs)});
}

std::vector<double> equispaced(Interval domain, std::size_t n) {
  if (n < 2) return {domain.midpoint()};
  std::vector<double> xs(n);
  const double h = domain.length() / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = domain.lo + h * static_cast<double>(i);
  }
  xs.back() = domain.hi;
  return xs;
}

}  // namespace chebwkb::cheb
