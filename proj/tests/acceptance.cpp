// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "fracpoly/cli.hpp"
#include "oracles.hpp"

using namespace fracpoly;

namespace {

struct Outcome {
  enum Kind { Pass, Fail, Skip } kind = Pass;
  std::string detail;
};

class Check {
public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os.precision(12);
    os << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::abs(got - want) <= tol, os.str());
  }
  Outcome outcome(std::string summary) const {
    if (failures_.empty()) return {Outcome::Pass, std::move(summary)};
    std::string s = failures_.front();
    if (failures_.size() > 1) s += " (+" + std::to_string(failures_.size() - 1) + " more)";
    return {Outcome::Fail, s};
  }

private:
  std::vector<std::string> failures_;
};

int failures = 0;

void criterion(const char* id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {Outcome::Fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.kind == Outcome::Pass && limit_s > 0 && secs > limit_s) {
    o = {Outcome::Fail, "runtime " + std::to_string(secs) + " s exceeds " + std::to_string(limit_s) + " s"};
  }
  const char* tag = o.kind == Outcome::Pass ? "PASS" : o.kind == Outcome::Fail ? "FAIL" : "SKIP";
  if (o.kind == Outcome::Fail) ++failures;
  std::printf("[%s] %s %s: %s (%.3f s)\n", tag, id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

PolyProblem example1() {
  PolyProblem p;
  p.objective = Polynomial(2, {{MultiIndex{0, 0}, 9.0},
                               {MultiIndex{0, 1}, -4.0},
                               {MultiIndex{2, 0}, 2.0},
                               {MultiIndex{1, 1}, 1.0},
                               {MultiIndex{0, 2}, 1.0}});
  return p;
}

FractionalProblem bundled_fraction(const std::string& file) {
  return std::get<FractionalProblem>(load_problem(oracle::data_file(file)).problem);
}

SdpOptions tight() {
  SdpOptions o;
  o.feas_tol = 1e-12;
  o.gap_tol = 1e-12;
  return o;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

int main() {
  std::filesystem::create_directories(FRACPOLY_TEST_OUT);
  const auto ex1 = oracle::stationary_quadratic(9, 0, -4, 4, 1, 2);

  criterion("AC1", "Example-1 pipeline", 1.0, [&] {
    RunConfig cfg;
    cfg.command = "example1";
    cfg.report_path = oracle::out_file("ac1-report.json");
    std::ostringstream out, err;
    const int code = run(cfg, out, err);
    const Json rep = Json::parse(read_text_file(cfg.report_path));
    Check c;
    c.expect(code == 0, "exit code " + std::to_string(code) + " " + err.str());
    c.expect(ex1.value == oracle::Rational(31, 7), "oracle value is not 31/7");
    c.near(rep["bound"].get<double>(), ex1.value.value(), 1e-6, "bound");
    c.near(rep["point"][0].get<double>(), ex1.x1.value(), 1e-6, "x1");
    c.near(rep["point"][1].get<double>(), ex1.x2.value(), 1e-6, "x2");
    c.expect(rep["certified"].get<bool>(), "point not certified");
    const std::string text = out.str();
    c.expect(text.find("Erratum") != std::string::npos && text.find("(-1, 2)") != std::string::npos &&
                 text.find("[9, 0, -4, 2, 1, 2]") != std::string::npos,
             "erratum note missing from output");
    return c.outcome("bound " + fmt(rep["bound"].get<double>()) + " vs 31/7, point (" +
                     fmt(rep["point"][0].get<double>()) + ", " + fmt(rep["point"][1].get<double>()) +
                     ") vs (-4/7, 16/7), erratum printed");
  });

  criterion("AC2", "Extraction mechanics", 0.1, [&] {
    const std::array<double, 2> x{-1, 2};
    const Extraction e = extract_minimizer(moments_from_point(x, 1), 2, 1);
    Check c;
    c.expect(e.point.has_value(), "no point extracted");
    if (e.point) {
      c.near((*e.point)[0], -1.0, 1e-9, "x1");
      c.near((*e.point)[1], 2.0, 1e-9, "x2");
    }
    return c.outcome("y = (1, -1, 2, 1, -2, 4) gives (-1, 2), rank ratio " + fmt(e.rank_ratio));
  });

  criterion("AC3", "Scalar fractional benchmark", 5.0, [&] {
    const FractionalProblem p = bundled_fraction("scalar-ratio.json");
    DinkelbachOptions o;
    o.eps = 1e-6;
    o.order = 2;
    const DinkelbachResult r = dinkelbach_solve(p, o);
    double grid = -1;
    for (int i = 0; i < 1000000; ++i) {
      const std::vector<double> pt{2.0 * i / 999999.0};
      grid = std::max(grid, oracle::eval_terms(p.numerator, pt) / oracle::eval_terms(p.denominator, pt));
    }
    Check c;
    c.near(r.lambda, 0.5, 1e-6, "lambda*");
    c.near(r.lambda, grid, 1e-6, "lambda* vs grid oracle");
    c.near(r.x[0], 1.0, 1e-4, "x*");
    c.expect(r.trace.size() <= 8, "outer iterations " + std::to_string(r.trace.size()));
    c.expect(r.status == DinkelbachStatus::Converged, "not converged");
    const std::vector<double> prefix{0.0, 0.4, 0.4878048780487805};
    for (std::size_t k = 0; k < prefix.size() && k < r.trace.size(); ++k)
      c.near(r.trace[k].lambda, prefix[k], 1e-3, "lambda_" + std::to_string(k));
    c.expect(r.trace.size() >= prefix.size(), "trace shorter than prefix");
    return c.outcome("lambda* " + fmt(r.lambda) + ", x* " + fmt(r.x[0]) + ", " + std::to_string(r.trace.size()) +
                     " outer iterations, grid max " + fmt(grid));
  });

  criterion("AC4", "Strong duality", 10.0, [&] {
    Check c;
    const DualityReport a = strong_duality_check(example1(), 1, tight());
    c.expect(a.gap <= 1e-6, "Example 1 gap " + fmt(a.gap));
    c.near(a.r_sos, ex1.value.value(), 1e-6, "Example 1 r_sos");
    double worst = a.gap;
    // every parametric subproblem of the scalar benchmark, at its order d = 2
    const FractionalProblem fp = bundled_fraction("scalar-ratio.json");
    DinkelbachOptions o;
    o.order = 2;
    const DinkelbachResult r = dinkelbach_solve(fp, o);
    for (const auto& rec : r.trace) {
      const PolyProblem sub{Sense::Maximize, fp.numerator - rec.lambda * fp.denominator, fp.constraints};
      const DualityReport d = strong_duality_check(sub, 2, tight());
      c.expect(d.gap <= 1e-6, "scalar subproblem k=" + std::to_string(rec.k) + " gap " + fmt(d.gap));
      worst = std::max(worst, d.gap);
    }
    return c.outcome("max |r_sos - r_mom| = " + fmt(worst) + " over Example 1 and " + std::to_string(r.trace.size()) +
                     " scalar subproblems");
  });

  criterion("AC5", "Hierarchy monotonicity and bound validity", 120.0, [&] {
    std::mt19937_64 rng(2024);
    Check c;
    int violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
      const std::size_t n = 1 + i % 2;
      const unsigned deg = 2 + i % 3;
      const PolyProblem p = oracle::random_box_problem(rng, n, deg);
      const double grid = oracle::box_grid_minimum(p.objective, 100000);
      double prev = -std::numeric_limits<double>::infinity();
      for (unsigned d = 2; d <= 3; ++d) {
        const RelaxationResult r = solve_relaxation(p, d);
        if (!r.solved()) {
          ++violations;
          c.expect(false, "problem " + std::to_string(i) + " d=" + std::to_string(d) + " " + to_string(r.solver.status));
          continue;
        }
        worst = std::max(worst, r.bound - grid);
        if (r.bound > grid + 1e-5) {
          ++violations;
          c.expect(false, "problem " + std::to_string(i) + " d=" + std::to_string(d) + " bound above grid optimum");
        }
        if (r.bound < prev - 1e-5) {
          ++violations;
          c.expect(false, "problem " + std::to_string(i) + " bound decreased from d=2 to d=3");
        }
        prev = r.bound;
      }
    }
    return c.outcome("20 problems, " + std::to_string(violations) + " violations, max bound - grid = " + fmt(worst));
  });

  criterion("AC6", "Dinkelbach properties on bundled problems", 0, [&] {
    Check c;
    struct Item {
      std::string name;
      FractionalProblem prob;
      DinkelbachOptions opts;
    };
    std::vector<Item> items;
    for (const char* f : {"scalar-ratio.json", "disk-ratio.json"}) {
      const ProblemFile pf = load_problem(oracle::data_file(f));
      DinkelbachOptions o;
      if (pf.options.order) o.order = *pf.options.order;
      if (pf.options.eps) o.eps = *pf.options.eps;
      items.push_back({f, std::get<FractionalProblem>(pf.problem), o});
    }
    {
      DinkelbachOptions o;
      o.order = 6;
      items.push_back({"ee-synthetic.json", scaled_fractional(load_objective(oracle::data_file("ee-synthetic.json"))), o});
    }
    std::string summary;
    for (const auto& it : items) {
      const DinkelbachResult r = dinkelbach_solve(it.prob, it.opts);
      c.expect(r.status == DinkelbachStatus::Converged, it.name + ": not converged");
      for (std::size_t k = 2; k < r.trace.size(); ++k)
        c.expect(r.trace[k].lambda >= r.trace[k - 1].lambda - 1e-9, it.name + ": lambda decreased at k=" + std::to_string(k));
      const double gx = it.prob.denominator(r.x);
      c.expect(std::abs(r.trace.back().F) <= it.opts.eps * std::max(1.0, gx), it.name + ": terminal |F| too large");
      DinkelbachOptions again = it.opts;
      again.initial_lambda = r.lambda;
      const DinkelbachResult s = dinkelbach_solve(it.prob, again);
      c.expect(s.trace.size() == 1, it.name + ": restart took " + std::to_string(s.trace.size()) + " iterations");
      summary += (summary.empty() ? "" : "; ") + it.name + " lambda* " + fmt(r.lambda) + " in " +
                 std::to_string(r.trace.size());
    }
    return c.outcome(summary);
  });

  std::optional<EEResult> synthetic;
  criterion("AC7", "EE application, synthetic config", 120.0, [&] {
    const EEProblem p = load_objective(oracle::data_file("ee-synthetic.json"));
    EEOptions o;
    o.order = 6;
    o.oracle = true;
    synthetic = solve_ee(p, o);
    const EEResult& r = *synthetic;
    Check c;
    c.expect(r.feasible, "rounded point infeasible");
    const double rel = std::abs(1.0 - r.ee_round / r.oracle->ee);
    c.expect(rel <= 1e-3, "relative EE error " + fmt(rel));
    return c.outcome("rounded (" + std::to_string(r.k_round) + ", " + std::to_string(r.m_round) + ") vs oracle (" +
                     std::to_string(r.oracle->k) + ", " + std::to_string(r.oracle->m) + "), relative error " +
                     fmt(rel) + ", " + std::to_string(r.dinkelbach.trace.size()) + " outer iterations");
  });

  criterion("AC8", "EE application, externally sourced config", 0, [&] {
    const std::string external = oracle::data_file("ee-external.json");
    const bool have = std::filesystem::exists(external);
    const EEProblem p = load_objective(have ? external : oracle::data_file("ee-synthetic.json"));
    EEOptions o;
    o.oracle = true;
    const EEResult r = have ? solve_ee(p, o) : *synthetic;
    write_text_file(oracle::out_file("ee-grid.csv"), grid_csv(evaluate_grid(p)));
    write_text_file(oracle::out_file("ee-trace.csv"), trace_csv(r.dinkelbach.trace));
    std::ostringstream eps;
    eps << "k,epsilon\n";
    for (std::size_t k = 0; k < r.epsilon_trace.size(); ++k) eps << k << ',' << format_double(r.epsilon_trace[k]) << '\n';
    write_text_file(oracle::out_file("ee-epsilon.csv"), eps.str());
    if (!have)
      return Outcome{Outcome::Skip,
                     "no externally sourced config (data/ee-external.json); grid and trace CSVs written from the "
                     "synthetic config to " FRACPOLY_TEST_OUT};
    Check c;
    c.expect(p.externally_sourced, "config is not marked externally_sourced");
    c.expect(std::abs(r.k_round - r.oracle->k) <= 1 && std::abs(r.m_round - r.oracle->m) <= 1,
             "rounded point more than one unit from the grid oracle");
    c.expect(r.epsilon && *r.epsilon <= 1e-3, "terminal epsilon above 1e-3");
    return c.outcome("rounded (" + std::to_string(r.k_round) + ", " + std::to_string(r.m_round) + "), oracle (" +
                     std::to_string(r.oracle->k) + ", " + std::to_string(r.oracle->m) + ")");
  });

  criterion("AC9", "SOS certification", 5.0, [&] {
    Check c;
    const Polynomial x = Polynomial::variable(1, 0);
    const Polynomial sq = poly_pow(x - Polynomial::constant(1, 1.0), 2);
    const SosDecomposition a = sos_decompose(sq);
    double err = std::numeric_limits<double>::infinity();
    c.expect(std::holds_alternative<SosCertificate>(a), "(x-1)^2 rejected");
    if (auto* cert = std::get_if<SosCertificate>(&a)) err = max_coeff_error(cert->polynomial(), sq);
    c.expect(err <= 1e-7, "(x-1)^2 reconstruction error " + fmt(err));
    const Polynomial u = Polynomial::variable(2, 0), v = Polynomial::variable(2, 1);
    const Polynomial motzkin =
        poly_pow(u, 4) * v * v + u * u * poly_pow(v, 4) - 3.0 * u * u * v * v + Polynomial::constant(2, 1.0);
    c.expect(std::holds_alternative<NotSos>(sos_decompose(motzkin)), "Motzkin accepted");
    c.expect(std::holds_alternative<NotSos>(sos_decompose(Polynomial::constant(1, -1.0))), "-1 accepted");
    return c.outcome("(x-1)^2 accepted with error " + fmt(err) + ", Motzkin and -1 rejected");
  });

  criterion("AC10", "Combinatorics", 0, [&] {
    Check c;
    int cases = 0;
    for (unsigned n = 1; n <= 6; ++n)
      for (unsigned v = 0; v <= 10; ++v, ++cases) {
        const MonomialBasis b(n, v);
        c.expect(b.size() == oracle::binomial(n + v, v) && basis_size(n, v) == b.size(),
                 "size mismatch at n=" + std::to_string(n) + " v=" + std::to_string(v));
      }
    const CostEstimate actual = estimate_cost(2, 2, 6);
    const CostEstimate quoted = estimate_cost_for_basis(2, 2, 15);
    c.expect(basis_size(2, 6) == 28 && basis_size(2, 4) == 15, "s_{2,6} or s_{2,4} wrong");
    return c.outcome(std::to_string(cases) + " (n, v) pairs match C(n+v, v); discrepancy: quoted s = 15 = s_{2,4}, "
                     "but n = 2, d = 6 gives s_{2,6} = 28; cost model with m = 2: " +
                     std::to_string(actual.operations) + " operations at s = 28 vs " +
                     std::to_string(quoted.operations) + " at s = 15");
  });

  std::printf("%s\n", failures == 0 ? "acceptance: all criteria passed or skipped" : "acceptance: FAILURES present");
  return failures == 0 ? 0 : 1;
}
