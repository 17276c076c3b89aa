#include "chebwkb/potential.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

#include "chebwkb/error.hpp"

namespace chebwkb::potential {

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 7> kFunctions{{
    {"abs", Func::abs},
    {"cosh", Func::cosh},
    {"sinh", Func::sinh},
    {"exp", Func::exp},
    {"sqrt", Func::sqrt},
    {"sin", Func::sin},
    {"cos", Func::cos},
}};

bool is_integer(double p) { return std::isfinite(p) && std::floor(p) == p; }

NodePtr make(Node::Kind kind, std::size_t offset, NodePtr lhs = nullptr,
             NodePtr rhs = nullptr, double value = 0.0, Func func = Func::abs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->offset = offset;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->value = value;
  n->func = func;
  return n;
}

bool depends_on_x(const Node& n) {
  if (n.kind == Node::Kind::var) return true;
  return (n.lhs && depends_on_x(*n.lhs)) || (n.rhs && depends_on_x(*n.rhs));
}

// Conservative: true only when n >= 0 for every x.
bool provably_nonnegative(const Node& n) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::number:
      return n.value >= 0.0;
    case K::var:
    case K::neg:
    case K::sub:
      return false;
    case K::add:
    case K::mul:
    case K::div:
      return provably_nonnegative(*n.lhs) && provably_nonnegative(*n.rhs);
    case K::pow:
      return (is_integer(n.value) && std::fmod(n.value, 2.0) == 0.0) ||
             provably_nonnegative(*n.lhs);
    case K::call:
      return n.func == Func::abs || n.func == Func::cosh ||
             n.func == Func::exp || n.func == Func::sqrt;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    NodePtr e = expression();
    skip_space();
    if (pos_ != text_.size()) {
      fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    }
    return e;
  }

  std::vector<std::string> take_warnings() { return std::move(warnings_); }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string found;
    if (pos_ < text_.size()) found = std::string(1, text_[pos_]);
    throw SyntaxError(pos_, std::move(expected), found);
  }

  void expect(char c) {
    if (!accept(c)) fail({std::string("'") + c + "'"});
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make(Node::Kind::add, at, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Kind::sub, at, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make(Node::Kind::mul, at, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Node::Kind::div, at, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) return make(Node::Kind::neg, at, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    skip_space();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    skip_space();
    const std::size_t exponent_at = pos_;
    // Right-associative, and the exponent may carry its own unary minus.
    NodePtr exponent = unary();
    if (depends_on_x(*exponent)) {
      pos_ = exponent_at;
      fail({"constant exponent"});
    }
    double p = 0.0;
    try {
      p = eval_node(*exponent, 0.0);
    } catch (const DomainError&) {
      pos_ = exponent_at;
      fail({"finite constant exponent"});
    }
    if (!is_integer(p) && !provably_nonnegative(*base)) {
      warnings_.push_back("offset " + std::to_string(at) +
                          ": fractional power of a base that may be negative");
    }
    return make(Node::Kind::pow, at, base, nullptr, p);
  }

  NodePtr primary() {
    skip_space();
    const std::size_t at = pos_;
    if (pos_ >= text_.size()) fail(primary_expected());
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expression();
      expect(')');
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
      const std::string_view word = text_.substr(pos_, end - pos_);
      if (word == "x") {
        pos_ = end;
        return make(Node::Kind::var, at);
      }
      for (const auto& [name, func] : kFunctions) {
        if (word == name) {
          pos_ = end;
          expect('(');
          NodePtr arg = expression();
          expect(')');
          if (func == Func::sqrt && !provably_nonnegative(*arg)) {
            warnings_.push_back("offset " + std::to_string(at) +
                                ": sqrt of an argument that may be negative");
          }
          return make(Node::Kind::call, at, arg, nullptr, 0.0, func);
        }
      }
    }
    fail(primary_expected());
  }

  static std::vector<std::string> primary_expected() {
    std::vector<std::string> out{"number", "'x'", "'('", "'-'"};
    for (const auto& [name, func] : kFunctions) out.emplace_back(name);
    return out;
  }

  NodePtr number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    const auto digits = [&] {
      while (end < text_.size() && text_[end] >= '0' && text_[end] <= '9') ++end;
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
      if (e < text_.size() && text_[e] >= '0' && text_[e] <= '9') {
        end = e;
        digits();
      }
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text_.data() + pos_, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end ||
        !std::isfinite(value)) {
      fail({"finite number"});
    }
    pos_ = end;
    return make(Node::Kind::number, at, nullptr, nullptr, value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::string> warnings_;
};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void collect_nonsmooth_args(const Node& n, std::vector<const Node*>& out) {
  if (n.kind == Node::Kind::call &&
      (n.func == Func::abs || n.func == Func::sqrt)) {
    out.push_back(n.lhs.get());
  }
  if (n.kind == Node::Kind::pow && !is_integer(n.value)) {
    out.push_back(n.lhs.get());
  }
  if (n.lhs) collect_nonsmooth_args(*n.lhs, out);
  if (n.rhs) collect_nonsmooth_args(*n.rhs, out);
}

// Sample value of g, or NaN where g itself is undefined.
double try_eval(const Node& g, double x) {
  try {
    return eval_node(g, x);
  } catch (const DomainError&) {
    return std::nan("");
  }
}

}  // namespace

std::string_view func_name(Func f) noexcept {
  for (const auto& [name, func] : kFunctions) {
    if (func == f) return name;
  }
  return "?";
}

bool structurally_equal(const Node& a, const Node& b) noexcept {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::number:
      return a.value == b.value;
    case Node::Kind::var:
      return true;
    case Node::Kind::neg:
      return structurally_equal(*a.lhs, *b.lhs);
    case Node::Kind::call:
      return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
    case Node::Kind::pow:
      return a.value == b.value && structurally_equal(*a.lhs, *b.lhs);
    default:
      return structurally_equal(*a.lhs, *b.lhs) &&
             structurally_equal(*a.rhs, *b.rhs);
  }
}

PotentialExpr::PotentialExpr(std::string text, NodePtr root,
                             std::vector<std::string> warnings)
    : text_(std::move(text)),
      root_(std::move(root)),
      warnings_(std::move(warnings)) {
  if (!root_) throw InvalidArgument("PotentialExpr: empty tree");
}

PotentialExpr parse(std::string_view text) {
  Parser p(text);
  NodePtr root = p.parse_all();
  return PotentialExpr(std::string(text), std::move(root), p.take_warnings());
}

std::string to_string(const Node& n) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::number:
      return format_number(n.value);
    case K::var:
      return "x";
    case K::neg:
      return "(-" + to_string(*n.lhs) + ")";
    case K::add:
      return "(" + to_string(*n.lhs) + "+" + to_string(*n.rhs) + ")";
    case K::sub:
      return "(" + to_string(*n.lhs) + "-" + to_string(*n.rhs) + ")";
    case K::mul:
      return "(" + to_string(*n.lhs) + "*" + to_string(*n.rhs) + ")";
    case K::div:
      return "(" + to_string(*n.lhs) + "/" + to_string(*n.rhs) + ")";
    case K::pow:
      return "(" + to_string(*n.lhs) + "^(" + format_number(n.value) + "))";
    case K::call:
      return std::string(func_name(n.func)) + "(" + to_string(*n.lhs) + ")";
  }
  return "";
}

std::string to_string(const PotentialExpr& e) { return to_string(e.root()); }

double eval_node(const Node& n, double x) {
  using K = Node::Kind;
  double r = 0.0;
  switch (n.kind) {
    case K::number:
      return n.value;
    case K::var:
      return x;
    case K::neg:
      return -eval_node(*n.lhs, x);
    case K::add:
      r = eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
      break;
    case K::sub:
      r = eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
      break;
    case K::mul:
      r = eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
      break;
    case K::div: {
      const double d = eval_node(*n.rhs, x);
      if (d == 0.0) {
        throw DomainError("division by zero at x = " + format_number(x));
      }
      r = eval_node(*n.lhs, x) / d;
      break;
    }
    case K::pow: {
      const double base = eval_node(*n.lhs, x);
      if (base < 0.0 && !is_integer(n.value)) {
        throw DomainError("fractional power " + format_number(n.value) +
                          " of negative base " + format_number(base) +
                          " at x = " + format_number(x));
      }
      if (base == 0.0 && n.value < 0.0) {
        throw DomainError("negative power of zero at x = " + format_number(x));
      }
      r = std::pow(base, n.value);
      break;
    }
    case K::call: {
      const double a = eval_node(*n.lhs, x);
      switch (n.func) {
        case Func::abs: r = std::abs(a); break;
        case Func::cosh: r = std::cosh(a); break;
        case Func::sinh: r = std::sinh(a); break;
        case Func::exp: r = std::exp(a); break;
        case Func::sin: r = std::sin(a); break;
        case Func::cos: r = std::cos(a); break;
        case Func::sqrt:
          if (a < 0.0) {
            throw DomainError("sqrt of " + format_number(a) +
                              " at x = " + format_number(x));
          }
          r = std::sqrt(a);
          break;
      }
      break;
    }
  }
  if (!std::isfinite(r)) {
    throw DomainError("non-finite value at x = " + format_number(x));
  }
  return r;
}

double eval_expr(const PotentialExpr& e, double x) {
  return eval_node(e.root(), x);
}

std::vector<double> nonsmooth_points(const PotentialExpr& e,
                                     cheb::Interval domain) {
  std::vector<const Node*> args;
  collect_nonsmooth_args(e.root(), args);
  std::vector<double> found;
  constexpr std::size_t kSamples = 4097;
  const auto xs = cheb::equispaced(domain, kSamples);
  for (const Node* g : args) {
    if (!depends_on_x(*g)) continue;
    std::vector<double> ys(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) ys[j] = try_eval(*g, xs[j]);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (ys[j] == 0.0) {
        found.push_back(xs[j]);
        continue;
      }
      if (j + 1 >= xs.size() || std::isnan(ys[j]) || std::isnan(ys[j + 1]) ||
          ys[j + 1] == 0.0 || (ys[j] < 0.0) == (ys[j + 1] < 0.0)) {
        continue;
      }
      double lo = xs[j];
      double hi = xs[j + 1];
      const bool lo_negative = ys[j] < 0.0;
      for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo));
           ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = try_eval(*g, mid);
        if (v == 0.0 || std::isnan(v)) {
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
  const double edge = 1e-12 * domain.length();
  std::vector<double> interior;
  for (double p : found) {
    if (p > domain.lo + edge && p < domain.hi - edge) interior.push_back(p);
  }
  std::sort(interior.begin(), interior.end());
  std::vector<double> out;
  for (double p : interior) {
    if (out.empty() || p - out.back() > edge) out.push_back(p);
  }
  return out;
}

cheb::PiecewiseCheb to_series(const PotentialExpr& e, cheb::Interval domain,
                              double tol) {
  const auto breaks = nonsmooth_points(e, domain);
  return cheb::fit([&](double x) { return eval_expr(e, x); }, domain, tol,
                   breaks);
}

}  // namespace chebwkb::potential
