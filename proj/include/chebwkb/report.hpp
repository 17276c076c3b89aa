#pragma once

// One CLI run as a library call: solve, measure, and assemble the JSON
// report plus the sampled solution and residual.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chebwkb/chebseries.hpp"
#include "chebwkb/error.hpp"
#include "chebwkb/wkb.hpp"

namespace chebwkb::report {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kDefaultResidualSamples = 2001;

struct RunConfig {
  std::string potential;
  double epsilon = 0.0;
  cheb::Interval domain{-1.0, 1.0};
  wkb::Conditions conditions = wkb::Dirichlet{};
  int iterations = 0;
  bool renormalize = false;
  /// Reference collocation size; 0 picks one from the resolution guard.
  std::optional<std::size_t> reference;
  /// Points for the CSV output and the residual maxima; 0 means
  /// kDefaultResidualSamples for the maxima and no CSVs.
  std::size_t samples = 0;
  double tol = 1e-13;
  std::size_t green_samples = 201;
  bool timings = true;
};

struct RunOutput {
  nlohmann::json report;
  std::vector<double> xs;
  std::vector<double> solution;
  std::vector<double> residual;
};

/// Throws whatever the pipeline throws; everything is an Error subclass.
RunOutput run(const RunConfig& config);

/// Collocation size used when RunConfig::reference holds 0: the next power
/// of two at or above the guard, at least 64. Throws UnderResolved past 4096.
std::size_t auto_collocation(const wkb::Problem& problem);

/// "eps=a:b:n" -> n equispaced values from a to b. Throws InvalidArgument.
std::vector<double> parse_sweep(std::string_view spec);

/// Runs base with each epsilon on up to `workers` threads. Failures are
/// recorded per run, never thrown.
nlohmann::json run_sweep(const RunConfig& base, std::span<const double> eps,
                         unsigned workers);

nlohmann::json error_json(const Error& e);

/// Header "x,value", %.17g.
void write_csv(const std::filesystem::path& path, std::span<const double> xs,
               std::span<const double> values);

}  // namespace chebwkb::report
