#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chebwkb {

/// Every failure the library reports carries one of these kinds. The CLI
/// prints `kind_name()` so scripts can match on it.
enum class ErrorKind {
  non_convergence,
  out_of_domain,
  division_near_zero,
  negative_base,
  syntax_error,
  domain_error,
  turning_point,
  overflow,
  singular_conditions,
  iteration_blowup,
  spurious_turning_point,
  under_resolved,
  singular_system,
  invalid_argument,
};

std::string_view kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class KindError : public Error {
 public:
  explicit KindError(const std::string& what) : Error(K, what) {}
};

using NonConvergence = KindError<ErrorKind::non_convergence>;
using OutOfDomain = KindError<ErrorKind::out_of_domain>;
using DivisionNearZero = KindError<ErrorKind::division_near_zero>;
using NegativeBase = KindError<ErrorKind::negative_base>;
using DomainError = KindError<ErrorKind::domain_error>;
using TurningPoint = KindError<ErrorKind::turning_point>;
using Overflow = KindError<ErrorKind::overflow>;
using SingularConditions = KindError<ErrorKind::singular_conditions>;
using IterationBlowup = KindError<ErrorKind::iteration_blowup>;
using UnderResolved = KindError<ErrorKind::under_resolved>;
using SingularSystem = KindError<ErrorKind::singular_system>;
using InvalidArgument = KindError<ErrorKind::invalid_argument>;

/// Parse failure in a potential expression. `offset` is the byte offset into
/// the source text where the parser gave up.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected,
              const std::string& found);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept {
    return expected_;
  }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// The iterated potential vanishes where the original one does not.
class SpuriousTurningPoint : public Error {
 public:
  explicit SpuriousTurningPoint(std::vector<double> locations);

  const std::vector<double>& locations() const noexcept { return locations_; }

 private:
  std::vector<double> locations_;
};

}  // namespace chebwkb
