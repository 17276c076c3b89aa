#pragma once

// Potential expressions: a small grammar over x, real literals, + - * / ^,
// unary minus and {abs, cosh, sinh, exp, sqrt, sin, cos}. See docs/grammar.md.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "chebwkb/chebseries.hpp"

namespace chebwkb::potential {

enum class Func { abs, cosh, sinh, exp, sqrt, sin, cos };

std::string_view func_name(Func f) noexcept;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// One AST node. Which fields are meaningful depends on `kind`:
/// number uses value; neg and call use lhs; pow uses lhs and value
/// (the exponent, folded to a literal at parse time); binary ops use lhs/rhs.
struct Node {
  enum class Kind { number, var, neg, add, sub, mul, div, pow, call };

  Kind kind = Kind::number;
  double value = 0.0;
  Func func = Func::abs;
  NodePtr lhs;
  NodePtr rhs;
  std::size_t offset = 0;  // byte offset of the node in the source text
};

bool structurally_equal(const Node& a, const Node& b) noexcept;

class PotentialExpr {
 public:
  PotentialExpr(std::string text, NodePtr root,
                std::vector<std::string> warnings = {});

  const std::string& text() const noexcept { return text_; }
  const Node& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }
  /// Non-fatal findings, e.g. a fractional power of a base that may be
  /// negative somewhere.
  const std::vector<std::string>& warnings() const noexcept {
    return warnings_;
  }

  friend bool operator==(const PotentialExpr& a, const PotentialExpr& b) {
    return structurally_equal(*a.root_, *b.root_);
  }

 private:
  std::string text_;
  NodePtr root_;
  std::vector<std::string> warnings_;
};

/// Throws SyntaxError with the byte offset and the set of tokens that would
/// have been accepted there.
PotentialExpr parse(std::string_view text);

/// Fully parenthesized rendering; parse(to_string(e)) == e.
std::string to_string(const PotentialExpr& e);
std::string to_string(const Node& n);

/// Throws DomainError where the expression is undefined (sqrt or fractional
/// power of a negative number, division by zero, non-finite result).
double eval_expr(const PotentialExpr& e, double x);
double eval_node(const Node& n, double x);

/// Interior points of the domain where an abs argument, a sqrt argument or
/// the base of a fractional power vanishes. Sorted, without duplicates.
std::vector<double> nonsmooth_points(const PotentialExpr& e,
                                     cheb::Interval domain);

/// fit(e, domain, tol, nonsmooth_points(e, domain)).
cheb::PiecewiseCheb to_series(const PotentialExpr& e, cheb::Interval domain,
                              double tol);

}  // namespace chebwkb::potential
