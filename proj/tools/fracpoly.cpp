// fracpoly: global optimization of polynomial and fractional polynomial problems.

#include <iostream>

#include <CLI11.hpp>

#include "fracpoly/cli.hpp"

int main(int argc, char** argv) {
  fracpoly::RunConfig cfg;
  CLI::App app{"Global optimization of polynomial ratios via Dinkelbach and moment relaxations"};
  app.set_version_flag("--version", fracpoly::kToolVersion);
  app.require_subcommand(1, 1);

  struct Spec {
    const char* name;
    const char* help;
    bool needs_input;
  };
  const Spec specs[] = {
      {"solve-poly", "minimize or maximize a polynomial over a semialgebraic set", true},
      {"solve-frac", "maximize a ratio of polynomials with the Dinkelbach iteration", true},
      {"solve-ee", "energy-efficiency dimensioning of users K and antennas M", true},
      {"certify-sos", "SOS bound with a Putinar certificate and the moment cross-check", true},
      {"example1", "walk through the two-variable quadratic example", false},
      {"validate-report", "check a run report against the report schema", true},
  };

  for (const auto& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    if (s.needs_input) sub->add_option("input", cfg.input, "problem, config or report file")->required()->check(CLI::ExistingFile);
    sub->add_option("--order", cfg.order, "relaxation half-order d")->check(CLI::PositiveNumber);
    sub->add_option("--eps", cfg.eps, "Dinkelbach stopping tolerance");
    sub->add_option("--feas-tol", cfg.feas_tol, "SDP feasibility tolerance");
    sub->add_option("--gap-tol", cfg.gap_tol, "SDP relative gap tolerance");
    sub->add_option("--max-outer", cfg.max_outer, "maximum Dinkelbach iterations");
    sub->add_flag("--oracle", cfg.oracle, "run the exhaustive integer-grid oracle (solve-ee)");
    sub->add_option("--report", cfg.report_path, "write the JSON run report here");
    sub->add_option("--trace", cfg.trace_path, "write the iteration trace CSV here");
    sub->add_option("--grid", cfg.grid_path, "write the EE grid CSV here (solve-ee)");
    sub->add_option("--seed", cfg.seed, "seed for randomized checks");
    sub->callback([&cfg, name = std::string(s.name)] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return fracpoly::run(cfg, std::cout, std::cerr);
}
