#include "chebwkb/report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "chebwkb/analysis.hpp"
#include "chebwkb/iwkb.hpp"
#include "chebwkb/potential.hpp"
#include "chebwkb/reference.hpp"

namespace chebwkb::report {

using nlohmann::json;

namespace {

class StageClock {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

json conditions_json(const wkb::Conditions& c) {
  if (const auto* d = std::get_if<wkb::Dirichlet>(&c)) {
    return {{"type", "dirichlet"}, {"ya", d->ya}, {"yb", d->yb}};
  }
  const auto& ivp = std::get<wkb::InitialValue>(c);
  return {{"type", "initial_value"},
          {"x0", ivp.x0},
          {"y0", ivp.y0},
          {"yp0", ivp.yp0}};
}

double max_abs_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw InvalidArgument("sweep: bad " + std::string(what) + " '" +
                          std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::size_t auto_collocation(const wkb::Problem& problem) {
  const std::size_t needed = reference::required_collocation(problem);
  if (needed > reference::kMaxCollocation) {
    throw UnderResolved("the reference solve needs " + std::to_string(needed) +
                        " points, above the cap of " +
                        std::to_string(reference::kMaxCollocation));
  }
  std::size_t n = 64;
  while (n < needed) n *= 2;
  return n;
}

RunOutput run(const RunConfig& config) {
  StageClock clock;
  json timings = json::object();

  const potential::PotentialExpr expr = potential::parse(config.potential);
  timings["parse"] = clock.lap();
  cheb::PiecewiseCheb q = potential::to_series(expr, config.domain, config.tol);
  timings["fit"] = clock.lap();

  const wkb::Problem problem(config.epsilon, q, config.conditions);
  const iwkb::IwkbResult result =
      iwkb::solve_iwkb(problem, config.iterations, config.renormalize);
  const wkb::WkbSolution& sol = result.solution;
  timings["solve"] = clock.lap();

  RunOutput out;
  const std::size_t m =
      config.samples > 0 ? config.samples : kDefaultResidualSamples;
  out.xs = cheb::equispaced(config.domain, m);
  out.solution = sol(out.xs);
  out.residual = wkb::absolute_residual(sol, out.xs, problem.q());
  const double res_abs = max_abs_of(out.residual);
  const double y_max = max_abs_of(out.solution);
  timings["residual"] = clock.lap();

  analysis::BackwardErrorReport bea = analysis::backward_error_report(
      problem, sol, result.spurious, config.green_samples);
  timings["analysis"] = clock.lap();

  json forward = nullptr;
  if (config.reference) {
    const std::size_t n =
        *config.reference == 0 ? auto_collocation(problem) : *config.reference;
    const reference::ReferenceSolution ref =
        reference::solve_reference(problem, n);
    const analysis::ForwardError fe =
        analysis::forward_error_estimate(sol, problem, ref.grid, ref.values);
    forward = {{"direct", fe.direct},
               {"bound", fe.bound},
               {"n_colloc", ref.n_colloc},
               {"reference_est_error", ref.est_error}};
    timings["reference"] = clock.lap();
  }

  json complex_form = nullptr;
  if (const auto c = sol.exponential_form()) {
    complex_form = {{"C1", {(*c)[0].real(), (*c)[0].imag()}},
                    {"C2", {(*c)[1].real(), (*c)[1].imag()}}};
  }

  json& r = out.report;
  r["schema_version"] = kSchemaVersion;
  r["problem"] = {
      {"potential", config.potential},
      {"potential_parsed", potential::to_string(expr)},
      {"epsilon", config.epsilon},
      {"domain", {config.domain.lo, config.domain.hi}},
      {"conditions", conditions_json(config.conditions)},
      {"tol", config.tol},
  };
  r["warnings"] = expr.warnings();
  r["mode"] = std::string(wkb::mode_name(sol.basis.mode));
  r["n_iterations"] = result.n_iterations;
  r["renormalized"] = result.renormalized;
  r["c1"] = sol.c1;
  r["c2"] = sol.c2;
  r["complex_form"] = complex_form;
  r["residual_samples"] = m;
  r["residual_max_abs"] = res_abs;
  r["residual_max_rel"] = y_max > 0.0 ? res_abs / y_max : 0.0;
  r["q2_max"] = bea.q2_max;
  r["qn_perturbation_max"] = bea.qn_perturbation_max;
  r["spurious"] = bea.spurious;
  r["condition_estimate"] = bea.condition_estimate;
  r["forward_error"] = forward;
  r["timings"] = config.timings ? timings : json(nullptr);
  return out;
}

std::vector<double> parse_sweep(std::string_view spec) {
  constexpr std::string_view prefix = "eps=";
  if (!spec.starts_with(prefix)) {
    throw InvalidArgument("sweep must look like eps=a:b:n");
  }
  spec.remove_prefix(prefix.size());
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw InvalidArgument("sweep must look like eps=a:b:n");
  }
  const double a = parse_double(spec.substr(0, c1), "start");
  const double b = parse_double(spec.substr(c1 + 1, c2 - c1 - 1), "stop");
  const std::string_view count = spec.substr(c2 + 1);
  std::size_t n = 0;
  const auto [end, ec] =
      std::from_chars(count.data(), count.data() + count.size(), n);
  if (ec != std::errc() || end != count.data() + count.size() || n == 0) {
    throw InvalidArgument("sweep: bad count '" + std::string(count) + "'");
  }
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InvalidArgument("sweep: epsilon must be positive");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? a
                    : a + (b - a) * static_cast<double>(i) /
                              static_cast<double>(n - 1);
  }
  return out;
}

json error_json(const Error& e) {
  json j = {{"kind", std::string(kind_name(e.kind()))}, {"message", e.what()}};
  if (const auto* s = dynamic_cast<const SpuriousTurningPoint*>(&e)) {
    j["locations"] = s->locations();
  }
  return j;
}

json run_sweep(const RunConfig& base, std::span<const double> eps,
               unsigned workers) {
  std::vector<json> runs(eps.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < eps.size(); i = next++) {
      RunConfig cfg = base;
      cfg.epsilon = eps[i];
      json entry = {{"epsilon", eps[i]}};
      try {
        entry["status"] = "ok";
        entry["report"] = run(cfg).report;
      } catch (const Error& e) {
        entry["status"] = "error";
        entry["error"] = error_json(e);
      }
      runs[i] = std::move(entry);
    }
  };
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(
                                                 std::max<std::size_t>(1, eps.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return {{"schema_version", kSchemaVersion},
          {"sweep", {{"parameter", "eps"},
                     {"values", std::vector<double>(eps.begin(), eps.end())}}},
          {"runs", runs}};
}

void write_csv(const std::filesystem::path& path, std::span<const double> xs,
               std::span<const double> values) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) {
    throw InvalidArgument("cannot write " + path.string());
  }
  std::fputs("x,value\n", f);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::fprintf(f, "%.17g,%.17g\n", xs[i], values[i]);
  }
  if (std::fclose(f) != 0) throw InvalidArgument("cannot write " + path.string());
}

}  // namespace chebwkb::report
