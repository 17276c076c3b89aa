#include "chebwkb/error.hpp"

#include <sstream>
#include <utility>

namespace chebwkb {

std::string_view kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::non_convergence: return "NonConvergence";
    case ErrorKind::out_of_domain: return "OutOfDomain";
    case ErrorKind::division_near_zero: return "DivisionNearZero";
    case ErrorKind::negative_base: return "NegativeBase";
    case ErrorKind::syntax_error: return "SyntaxError";
    case ErrorKind::domain_error: return "DomainError";
    case ErrorKind::turning_point: return "TurningPoint";
    case ErrorKind::overflow: return "Overflow";
    case ErrorKind::singular_conditions: return "SingularConditions";
    case ErrorKind::iteration_blowup: return "IterationBlowup";
    case ErrorKind::spurious_turning_point: return "SpuriousTurningPoint";
    case ErrorKind::under_resolved: return "UnderResolved";
    case ErrorKind::singular_system: return "SingularSystem";
    case ErrorKind::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

namespace {

std::string syntax_message(std::size_t offset,
                           const std::vector<std::string>& expected,
                           const std::string& found) {
  std::ostringstream os;
  os << "at offset " << offset << ": expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) os << (i + 1 == expected.size() ? " or " : ", ");
    os << expected[i];
  }
  os << ", found " << (found.empty() ? "end of input" : "'" + found + "'");
  return os.str();
}

std::string spurious_message(const std::vector<double>& locations) {
  std::ostringstream os;
  os.precision(10);
  os << "iterated potential vanishes at x =";
  for (std::size_t i = 0; i < locations.size(); ++i) {
    os << (i == 0 ? " " : ", ") << locations[i];
  }
  return os.str();
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& found)
    : Error(ErrorKind::syntax_error, syntax_message(offset, expected, found)),
      offset_(offset),
      expected_(std::move(expected)) {}

SpuriousTurningPoint::SpuriousTurningPoint(std::vector<double> locations)
    : Error(ErrorKind::spurious_turning_point, spurious_message(locations)),
      locations_(std::move(locations)) {}

}  // namespace chebwkb
