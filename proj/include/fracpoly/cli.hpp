#pragma once

// Command dispatch for the fracpoly executable. Kept in a header so tests can
// drive complete runs in-process.
//
// Exit codes: 0 solved and certified, 2 solved but not certified, 1 error.

#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracpoly/dinkelbach.hpp"
#include "fracpoly/ee.hpp"
#include "fracpoly/io.hpp"
#include "fracpoly/lasserre.hpp"
#include "fracpoly/report.hpp"
#include "fracpoly/sos.hpp"

namespace fracpoly {

inline const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> c{"solve-poly", "solve-frac", "solve-ee", "certify-sos", "example1", "validate-report"};
  return c;
}

struct RunConfig {
  std::string command;
  std::string input;
  std::optional<unsigned> order;
  std::optional<double> eps;
  std::optional<double> feas_tol;
  std::optional<double> gap_tol;
  std::optional<int> max_outer;
  bool oracle = false;
  std::string report_path;
  std::string trace_path;
  std::string grid_path;
  std::uint64_t seed = 0;

  void validate() const {
    if (std::find(cli_commands().begin(), cli_commands().end(), command) == cli_commands().end())
      throw std::invalid_argument("unknown command \"" + command + "\"");
    if (command != "example1" && input.empty()) throw std::invalid_argument(command + " needs an input file");
    if (order && *order < 1) throw std::invalid_argument("--order must be at least 1");
    for (const auto& [name, v] : {std::pair{"--eps", eps}, {"--feas-tol", feas_tol}, {"--gap-tol", gap_tol}})
      if (v && !(*v > 0)) throw std::invalid_argument(std::string(name) + " must be positive");
    if (eps && !(*eps < 1)) throw std::invalid_argument("--eps must be below 1");
    if (max_outer && *max_outer < 1) throw std::invalid_argument("--max-outer must be at least 1");
    if (!trace_path.empty() && command != "solve-frac" && command != "solve-ee")
      throw std::invalid_argument("--trace applies to solve-frac and solve-ee");
    if (!grid_path.empty() && command != "solve-ee") throw std::invalid_argument("--grid applies to solve-ee");
    if (oracle && command != "solve-ee") throw std::invalid_argument("--oracle applies to solve-ee");
  }
};

namespace detail {

inline SdpOptions sdp_options(const RunConfig& cfg, const FileOptions& fo, SdpOptions base = {}) {
  if (auto v = cfg.feas_tol ? cfg.feas_tol : fo.feas_tol) base.feas_tol = *v;
  if (auto v = cfg.gap_tol ? cfg.gap_tol : fo.gap_tol) base.gap_tol = *v;
  return base;
}

inline std::string point_str(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << std::setprecision(10) << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  return os.str() + ')';
}

inline std::string monomial_str(const MultiIndex& a) {
  if (a.is_zero()) return "1";
  std::string s;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (a[i] == 0) continue;
    if (!s.empty()) s += ' ';
    s += "x" + std::to_string(i + 1);
    if (a[i] > 1) s += "^" + std::to_string(a[i]);
  }
  return s;
}

inline std::string moment_label(const MultiIndex& a) {
  std::string s = "y";
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::to_string(a[i]);
  return s;
}

struct Outputs {
  Json report;
  std::string trace;
  std::string grid;
};

inline void write_outputs(const RunConfig& cfg, Outputs& o, int code, const std::string& status) {
  o.report["exit_code"] = code;
  o.report["status"] = status;
  o.report["seed"] = cfg.seed;
  if (!cfg.report_path.empty()) write_text_file(cfg.report_path, dump_report(o.report));
  if (!cfg.trace_path.empty()) write_text_file(cfg.trace_path, o.trace);
  if (!cfg.grid_path.empty()) write_text_file(cfg.grid_path, o.grid);
}

inline int run_solve_poly(const RunConfig& cfg, std::ostream& out) {
  const ProblemFile pf = load_problem(cfg.input);
  if (pf.is_fractional()) throw std::invalid_argument(cfg.input + ": fractional objective; use solve-frac");
  const auto& prob = std::get<PolyProblem>(pf.problem);
  const unsigned d = cfg.order ? *cfg.order : pf.options.order.value_or(default_order(prob));
  RelaxationOptions ro;
  ro.sdp = sdp_options(cfg, pf.options);
  const RelaxationResult r = solve_relaxation(prob, d, ro);
  if (!r.solved())
    throw std::runtime_error("relaxation of order " + std::to_string(d) + " ended with status " + to_string(r.solver.status));

  const int code = r.certified ? 0 : 2;
  out << std::setprecision(12) << "order d = " << d << "\nbound = " << r.bound << "\n";
  if (r.extracted) out << "extracted point = " << point_str(*r.extracted) << "\n";
  else out << "no rank-one moment matrix; first moments = " << point_str(r.first_moments) << "\n";
  out << "rank ratio = " << r.rank_ratio << "\ncertified = " << (r.certified ? "yes" : "no") << "\n";

  Outputs o{report_header(cfg.command), {}, {}};
  o.report["input"] = cfg.input;
  o.report["order"] = d;
  o.report["sense"] = prob.sense == Sense::Minimize ? "min" : "max";
  o.report["bound"] = number_json(r.bound);
  o.report["point"] = vector_json(r.point());
  o.report["point_extracted"] = r.extracted.has_value();
  o.report["objective_at_point"] = number_json(prob.objective(r.point()));
  o.report["rank_ratio"] = number_json(r.rank_ratio);
  o.report["certified"] = r.certified;
  o.report["moments"] = vector_json(r.y);
  o.report["solver"] = {{"status", to_string(r.solver.status)},
                        {"iterations", r.solver.iterations},
                        {"duality_gap", number_json(r.solver.duality_gap)}};
  write_outputs(cfg, o, code, r.certified ? "certified" : "uncertified");
  return code;
}

inline void fill_dinkelbach_report(Json& rep, const DinkelbachResult& dr) {
  rep["order"] = dr.order;
  rep["lambda"] = number_json(dr.lambda);
  rep["point"] = vector_json(dr.x);
  rep["outer_iterations"] = static_cast<int>(dr.trace.size());
  rep["converged"] = dr.status == DinkelbachStatus::Converged;
  rep["certified"] = dr.certified();
  rep["trace"] = trace_json(dr.trace);
}

inline void print_trace(std::ostream& out, const std::vector<IterationRecord>& trace) {
  out << std::setprecision(10);
  for (const auto& r : trace)
    out << "  k=" << r.k << "  lambda=" << r.lambda << "  F=" << r.F << "  x=" << point_str(r.x)
        << (r.certified ? "" : "  (uncertified)") << "\n";
}

inline int run_solve_frac(const RunConfig& cfg, std::ostream& out) {
  const ProblemFile pf = load_problem(cfg.input);
  if (!pf.is_fractional()) throw std::invalid_argument(cfg.input + ": objective is not a ratio; use solve-poly");
  const auto& prob = std::get<FractionalProblem>(pf.problem);
  DinkelbachOptions opt;
  if (auto v = cfg.eps ? cfg.eps : pf.options.eps) opt.eps = *v;
  if (auto v = cfg.order ? cfg.order : pf.options.order) opt.order = *v;
  if (auto v = cfg.max_outer ? cfg.max_outer : pf.options.max_outer) opt.max_outer = *v;
  opt.inner.sdp = sdp_options(cfg, pf.options);
  const DinkelbachResult dr = dinkelbach_solve(prob, opt);

  const bool ok = dr.status == DinkelbachStatus::Converged && dr.certified();
  const int code = ok ? 0 : 2;
  out << std::setprecision(12) << "order d = " << dr.order << "\n";
  print_trace(out, dr.trace);
  out << std::setprecision(12) << "lambda* = " << dr.lambda << "\nx* = " << point_str(dr.x) << "\nstatus = "
      << to_string(dr.status) << (dr.certified() ? ", certified" : ", not certified") << "\n";

  Outputs o{report_header(cfg.command), trace_csv(dr.trace), {}};
  o.report["input"] = cfg.input;
  o.report["eps"] = opt.eps;
  fill_dinkelbach_report(o.report, dr);
  write_outputs(cfg, o, code, ok ? "certified" : (dr.status == DinkelbachStatus::Converged ? "uncertified" : "max_outer"));
  return code;
}

inline int run_solve_ee(const RunConfig& cfg, std::ostream& out) {
  const EEProblem prob = load_objective(cfg.input);
  EEOptions opt;
  opt.oracle = cfg.oracle;
  if (cfg.order) opt.order = *cfg.order;
  if (cfg.eps) opt.eps = *cfg.eps;
  if (cfg.max_outer) opt.max_outer = *cfg.max_outer;
  opt.inner.sdp = sdp_options(cfg, {});
  const EEResult r = solve_ee(prob, opt);

  const bool ok = r.dinkelbach.status == DinkelbachStatus::Converged && r.dinkelbach.certified() && r.feasible;
  const int code = ok ? 0 : 2;
  out << std::setprecision(10) << "EE config " << cfg.input << (prob.externally_sourced ? " (externally sourced)" : "")
      << "\norder d = " << r.dinkelbach.order << "\n";
  print_trace(out, r.dinkelbach.trace);
  out << std::setprecision(10) << "continuous optimum (K, M) = (" << r.k_cont << ", " << r.m_cont << "), EE = " << r.ee_cont
      << "\nrounded (K, M) = (" << r.k_round << ", " << r.m_round << "), EE = " << r.ee_round
      << (r.used_fallback ? " [axis-neighbour fallback]" : "") << (r.feasible ? "" : " [infeasible]") << "\n";
  if (r.oracle)
    out << "exhaustive optimum (K, M) = (" << r.oracle->k << ", " << r.oracle->m << "), EE = " << r.oracle->ee
        << "\nrelative error epsilon = " << *r.epsilon << "\n";

  // Interior-point cost model for the two application constraints, next to the degree-4 basis figure.
  const CostEstimate cost = estimate_cost(2, 2, r.dinkelbach.order);
  const CostEstimate cost4 = estimate_cost(2, 2, 4);
  out << "cost model n^2 m s^3 + n m s^4 (n = 2, m = 2): s = " << cost.basis_size << " gives " << cost.operations
      << " operations; a degree-4 basis (s = " << cost4.basis_size << ") would give " << cost4.operations << "\n";

  Outputs o{report_header(cfg.command), trace_csv(r.dinkelbach.trace), {}};
  if (!cfg.grid_path.empty()) o.grid = grid_csv(evaluate_grid(prob));
  auto& rep = o.report;
  rep["complexity"] = {{"n", 2},
                       {"m", 2},
                       {"basis_size", cost.basis_size},
                       {"operations", cost.operations},
                       {"basis_size_degree4", cost4.basis_size},
                       {"operations_degree4", cost4.operations}};
  rep["input"] = cfg.input;
  rep["externally_sourced"] = prob.externally_sourced;
  rep["eps"] = opt.eps;
  fill_dinkelbach_report(rep, r.dinkelbach);
  rep["continuous"] = {{"K", r.k_cont}, {"M", r.m_cont}, {"EE", number_json(r.ee_cont)}};
  rep["rounded"] = {{"K", r.k_round},
                    {"M", r.m_round},
                    {"EE", number_json(r.ee_round)},
                    {"feasible", r.feasible},
                    {"fallback", r.used_fallback}};
  if (r.oracle) {
    Json eps_trace = Json::array();
    for (double e : r.epsilon_trace) eps_trace.push_back(number_json(e));
    rep["oracle"] = {{"K", r.oracle->k},
                     {"M", r.oracle->m},
                     {"EE", r.oracle->ee},
                     {"feasible_points", r.oracle->feasible_points},
                     {"epsilon", number_json(*r.epsilon)},
                     {"epsilon_trace", std::move(eps_trace)}};
  }
  write_outputs(cfg, o, code, ok ? "certified" : "uncertified");
  return code;
}

inline int run_certify_sos(const RunConfig& cfg, std::ostream& out) {
  const ProblemFile pf = load_problem(cfg.input);
  if (pf.is_fractional()) throw std::invalid_argument(cfg.input + ": certify-sos expects a polynomial objective");
  const auto& prob = std::get<PolyProblem>(pf.problem);
  const unsigned d = cfg.order ? *cfg.order : pf.options.order.value_or(default_order(prob));
  const SdpOptions so = sdp_options(cfg, pf.options);
  const DualityReport rep = strong_duality_check(prob, d, so);
  if (rep.consistently_infeasible())
    throw std::runtime_error("feasible set is empty: moment relaxation infeasible, SOS bound unbounded");
  if (rep.mom_status != SdpStatus::Optimal || rep.sos_status != SdpStatus::Optimal)
    throw std::runtime_error(std::string("order ") + std::to_string(d) + ": moment side " + to_string(rep.mom_status) +
                             ", SOS side " + to_string(rep.sos_status));

  const std::size_t n = prob.dim();
  const Polynomial q = prob.sense == Sense::Minimize ? prob.objective : -prob.objective;
  const double t = prob.sense == Sense::Minimize ? rep.r_sos : -rep.r_sos;
  const bool verified = rep.certificate && verify_putinar(*rep.certificate, prob.constraints, q - Polynomial::constant(n, t));
  const bool tight = rep.gap <= 1e-6 * std::max(1.0, std::abs(rep.r_mom));

  Outputs o{report_header(cfg.command), {}, {}};
  o.report["input"] = cfg.input;
  o.report["order"] = d;
  o.report["r_sos"] = number_json(rep.r_sos);
  o.report["r_mom"] = number_json(rep.r_mom);
  o.report["gap"] = number_json(rep.gap);
  o.report["verified"] = verified;
  o.report["certificate"] = rep.certificate ? putinar_json(*rep.certificate) : Json(nullptr);

  out << std::setprecision(12) << "order d = " << d << "\nSOS bound = " << rep.r_sos << "\nmoment bound = " << rep.r_mom
      << "\n|gap| = " << rep.gap << "\nPutinar certificate " << (verified ? "verified" : "NOT verified") << "\n";

  // Unconstrained even-degree input: also test the objective itself for an SOS decomposition.
  if (prob.constraints.empty() && prob.objective.degree() % 2 == 0) {
    const SosDecomposition dec = sos_decompose(q, so);
    Json j{{"polynomial", polynomial_to_json(q)}};
    if (const auto* c = std::get_if<SosCertificate>(&dec)) {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> unif(-3.0, 3.0);
      double lo = std::numeric_limits<double>::infinity();
      Eigen::VectorXd x(static_cast<Eigen::Index>(n));
      for (int s = 0; s < 1000; ++s) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = unif(rng);
        lo = std::min(lo, q(x));
      }
      j["is_sos"] = true;
      j["squares"] = c->squares.size();
      j["reconstruction_error"] = max_coeff_error(c->polynomial(), q);
      j["sampled_min"] = lo;
      j["certificate"] = sos_certificate_json(*c);
      out << "objective is SOS with " << c->squares.size() << " squares (sampled minimum " << lo << ")\n";
    } else {
      j["is_sos"] = false;
      j["reason"] = std::get<NotSos>(dec).reason;
      out << "objective is not SOS: " << std::get<NotSos>(dec).reason << "\n";
    }
    o.report["decomposition"] = std::move(j);
  }

  const int code = verified && tight ? 0 : 2;
  write_outputs(cfg, o, code, code == 0 ? "certified" : "uncertified");
  return code;
}

inline int run_example1(const RunConfig& cfg, std::ostream& out) {
  const std::size_t n = 2;
  const Polynomial x1 = Polynomial::variable(n, 0), x2 = Polynomial::variable(n, 1);
  const Polynomial five = Polynomial::constant(n, 5.0);
  const Polynomial p = poly_pow(x2 - Polynomial::constant(n, 2.0), 2) + 2.0 * x1 * x1 + x1 * x2 + five;
  const PolyProblem prob{Sense::Minimize, p, {}};

  RelaxationOptions ro;
  ro.sdp.feas_tol = cfg.feas_tol.value_or(1e-12);
  ro.sdp.gap_tol = cfg.gap_tol.value_or(1e-12);
  const unsigned d = cfg.order.value_or(1);
  const RelaxationResult r = solve_relaxation(prob, d, ro);
  if (!r.solved()) throw std::runtime_error(std::string("example relaxation ended with status ") + to_string(r.solver.status));

  // Stationary point of the quadratic: Q x = -g.
  auto stationary = [&](const Polynomial& q) {
    Eigen::Matrix2d hess;
    hess << 2 * q.coeff({2, 0}), q.coeff({1, 1}), q.coeff({1, 1}), 2 * q.coeff({0, 2});
    const Eigen::Vector2d grad(q.coeff({1, 0}), q.coeff({0, 1}));
    const Eigen::VectorXd xs = hess.ldlt().solve(-grad);
    return std::pair{xs, q(xs)};
  };
  const auto [xs, vs] = stationary(p);

  const MonomialBasis b1(n, d), b2(n, 2), y_basis(n, 2 * d);
  out << "minimize p(x) = (x2 - 2)^2 + 2 x1^2 + x1 x2 + 5\n";
  out << "monomial basis m_" << d << "(x):";
  for (const auto& a : b1) out << ' ' << monomial_str(a);
  out << "\nexponents of N^2_2:";
  for (const auto& a : b2) out << ' ' << a.str();
  out << "\ncoefficients p_alpha: " << vector_json(to_coeff_vector(p, b2)).dump();
  const MatrixSpec spec = moment_matrix_spec(n, d);
  out << "\nmoment matrix M_" << d << "(y): " << spec.side() << "x" << spec.side() << "\n";
  for (std::size_t i = 0; i < spec.side(); ++i) {
    out << "  [";
    for (std::size_t j = 0; j < spec.side(); ++j) out << (j ? " " : "") << moment_label(y_basis[spec.terms(i, j)[0].pos]);
    out << "]\n";
  }
  out << std::setprecision(15) << "relaxation bound = " << r.bound << "   (analytic 31/7 = " << vs << ")\n";
  if (r.extracted) out << "extracted point = " << point_str(*r.extracted) << "   (analytic (-4/7, 16/7))\n";
  out << "moment vector y* = " << vector_json(r.y).dump() << "\n";
  out << "certified = " << (r.certified ? "yes" : "no") << "\n";

  // Checks the answer (-1, 2) and the coefficient list [9, 0, -4, 2, 1, 2] against p.
  Polynomial alt = p + x2 * x2;
  const auto [xa, va] = stationary(alt);
  std::ostringstream note;
  note << std::setprecision(10) << "Erratum: (-1, 2) is not a minimizer of p; p(-1, 2) = "
       << p(Eigen::Vector2d(-1.0, 2.0)) << " > 31/7. The coefficient list [9, 0, -4, 2, 1, 2] has x2^2 coefficient 2, "
       << "but p expands to [9, 0, -4, 2, 1, 1]. With the doubled x2^2 term the minimizer would be "
       << point_str(xa) << " = (-4/15, 16/15) with value " << va << " = 103/15, so neither reading yields (-1, 2). "
       << "The moment vector (1, -1, 2, *, *, *) is therefore not optimal for this relaxation.";
  out << note.str() << "\n";

  const int code = r.certified ? 0 : 2;
  Outputs o{report_header(cfg.command), {}, {}};
  o.report["order"] = d;
  o.report["bound"] = r.bound;
  o.report["analytic_bound"] = vs;
  o.report["point"] = vector_json(r.point());
  o.report["analytic_point"] = vector_json(xs);
  o.report["moments"] = vector_json(r.y);
  o.report["moment_matrix_shape"] = {spec.side(), spec.side()};
  o.report["certified"] = r.certified;
  o.report["erratum"] = note.str();
  write_outputs(cfg, o, code, r.certified ? "certified" : "uncertified");
  return code;
}

inline int run_validate_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LocatedJson lj = load_located(cfg.input);
  const auto errs = validate_report(lj.doc);
  if (errs.empty()) {
    out << cfg.input << ": valid " << lj.doc["command"].get<std::string>() << " report\n";
    return 0;
  }
  for (const auto& e : errs) err << cfg.input << ":" << lj.line_of(e.substr(0, e.find(':'))) << ": " << e << "\n";
  return 1;
}

}  // namespace detail

/// Runs one command. Output files are written only when the run produces a result (exit 0 or 2).
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    if (cfg.command == "solve-poly") return detail::run_solve_poly(cfg, out);
    if (cfg.command == "solve-frac") return detail::run_solve_frac(cfg, out);
    if (cfg.command == "solve-ee") return detail::run_solve_ee(cfg, out);
    if (cfg.command == "certify-sos") return detail::run_certify_sos(cfg, out);
    if (cfg.command == "example1") return detail::run_example1(cfg, out);
    return detail::run_validate_report(cfg, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fracpoly
