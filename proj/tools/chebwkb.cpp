// chebwkb: solve eps^2 y'' = Q(x) y by the Chebyshev-WKB method and report
// residuals, backward error and conditioning.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "chebwkb/error.hpp"
#include "chebwkb/iwkb.hpp"
#include "chebwkb/potential.hpp"
#include "chebwkb/reference.hpp"
#include "chebwkb/report.hpp"

namespace fs = std::filesystem;
using namespace chebwkb;

namespace {

constexpr int kUsage = 1;
constexpr int kSolver = 2;

int usage(const std::string& msg) {
  std::cerr << "chebwkb: " << msg << "\nRun with --help for usage.\n";
  return kUsage;
}

void print_summary(const nlohmann::json& r) {
  std::printf("mode                %s\n", r["mode"].get<std::string>().c_str());
  std::printf("iterations          %d%s\n", r["n_iterations"].get<int>(),
              r["renormalized"].get<bool>() ? " (renormalized)" : "");
  std::printf("c1, c2              %.12g, %.12g\n", r["c1"].get<double>(),
              r["c2"].get<double>());
  std::printf("residual max abs    %.6e\n", r["residual_max_abs"].get<double>());
  std::printf("residual max rel    %.6e\n", r["residual_max_rel"].get<double>());
  std::printf("max |eps^2 Q2|      %.6e\n", r["q2_max"].get<double>());
  std::printf("max |G|             %.6e\n", r["condition_estimate"].get<double>());
  if (!r["forward_error"].is_null()) {
    std::printf("forward error       %.6e (bound %.6e)\n",
                r["forward_error"]["direct"].get<double>(),
                r["forward_error"]["bound"].get<double>());
  }
  for (const auto& w : r["warnings"]) {
    std::printf("warning: %s\n", w.get<std::string>().c_str());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw InvalidArgument("cannot write " + path.string());
  const std::string text = j.dump(2) + "\n";
  std::fputs(text.c_str(), f);
  std::fclose(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Solve eps^2 y'' = Q(x) y for sign-definite Q by Chebyshev-WKB.\n"
      "Q is given with its sign: Q < 0 oscillates, Q > 0 grows/decays."};
  app.option_defaults()->always_capture_default();

  std::string potential_text;
  std::optional<double> eps;
  std::vector<double> domain{-1.0, 1.0};
  std::vector<double> bc;
  std::vector<double> ivp;
  int iterations = 0;
  bool renormalize = false;
  std::optional<std::size_t> reference_n;
  std::size_t samples = 0;
  std::string out_dir = ".";
  double tol = 1e-13;
  bool json_only = false;
  bool no_timings = false;
  std::string sweep;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());

  app.add_option("--potential", potential_text, "Q(x); see docs/grammar.md")
      ->required();
  app.add_option("--eps", eps, "epsilon > 0")->check(CLI::PositiveNumber);
  app.add_option("--domain", domain, "a b")->expected(2);
  auto* bc_opt = app.add_option("--bc", bc, "Dirichlet data y(a) y(b)")->expected(2);
  auto* ivp_opt =
      app.add_option("--ivp", ivp, "initial data x0 y(x0) y'(x0)")->expected(3);
  bc_opt->excludes(ivp_opt);
  app.add_option("--iterations", iterations, "iterated WKB steps N")
      ->check(CLI::Range(0, iwkb::kMaxIterations));
  app.add_flag("--renormalize", renormalize,
               "build the basis on Q exp(-(Q - Q_N)/Q), which keeps the sign of Q");
  app.add_option("--reference", reference_n,
                 "spectral reference solve with n points (auto if omitted)")
      ->expected(0, 1)
      ->default_str("0");
  app.add_option("--samples", samples, "write M-point solution/residual CSVs")
      ->check(CLI::Range(std::size_t{2}, std::size_t{10'000'000}));
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--tol", tol, "Chebyshev fit tolerance")
      ->check(CLI::Range(1e-16, 1e-2));
  app.add_flag("--json-only", json_only,
               "print the report JSON to stdout and write no files");
  app.add_flag("--no-timings", no_timings, "report timings as null");
  app.add_option("--sweep", sweep, "eps=a:b:n, run n epsilons in parallel");
  app.add_option("--workers", workers, "threads for --sweep")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (!(domain[0] < domain[1])) return usage("--domain needs a < b");
  if (bc.empty() && ivp.empty()) return usage("one of --bc or --ivp is required");
  if (!eps && sweep.empty()) return usage("--eps is required without --sweep");
  if (reference_n && *reference_n != 0 &&
      (*reference_n < reference::kMinCollocation ||
       *reference_n > reference::kMaxCollocation)) {
    return usage("--reference must lie in [16, 4096]");
  }
  try {
    potential::parse(potential_text);
  } catch (const SyntaxError& e) {
    return usage(std::string("--potential: ") + e.what());
  }

  report::RunConfig cfg;
  cfg.potential = potential_text;
  cfg.epsilon = eps.value_or(0.0);
  cfg.domain = {domain[0], domain[1]};
  if (!bc.empty()) {
    cfg.conditions = wkb::Dirichlet{bc[0], bc[1]};
  } else {
    if (ivp[0] < domain[0] || ivp[0] > domain[1]) {
      return usage("--ivp x0 must lie in the domain");
    }
    cfg.conditions = wkb::InitialValue{ivp[0], ivp[1], ivp[2]};
  }
  cfg.iterations = iterations;
  cfg.renormalize = renormalize;
  cfg.reference = reference_n;
  cfg.samples = samples;
  cfg.tol = tol;
  cfg.timings = !no_timings;

  try {
    if (!sweep.empty()) {
      std::vector<double> values;
      try {
        values = report::parse_sweep(sweep);
      } catch (const Error& e) {
        return usage(std::string("--sweep: ") + e.what());
      }
      const nlohmann::json j = report::run_sweep(cfg, values, workers);
      if (json_only) {
        std::cout << j.dump(2) << "\n";
      } else {
        fs::create_directories(out_dir);
        write_json(fs::path(out_dir) / "sweep.json", j);
        std::size_t failed = 0;
        for (const auto& r : j["runs"]) failed += r["status"] != "ok";
        std::printf("%zu runs, %zu failed; wrote %s\n", values.size(), failed,
                    (fs::path(out_dir) / "sweep.json").c_str());
      }
      return 0;
    }

    const report::RunOutput out = report::run(cfg);
    if (json_only) {
      std::cout << out.report.dump(2) << "\n";
      return 0;
    }
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    write_json(dir / "report.json", out.report);
    if (samples > 0) {
      report::write_csv(dir / "solution.csv", out.xs, out.solution);
      report::write_csv(dir / "residual.csv", out.xs, out.residual);
    }
    print_summary(out.report);
    std::printf("wrote %s\n", (dir / "report.json").c_str());
    return 0;
  } catch (const Error& e) {
    std::cerr << "chebwkb: error: " << kind_name(e.kind()) << ": " << e.what()
              << "\n";
    return kSolver;
  } catch (const fs::filesystem_error& e) {
    return usage(e.what());
  }
}
