#pragma once

// Dinkelbach iteration for max f(x)/g(x) over {h_i(x) >= 0}, g > 0.
//
// Each outer step maximizes f - lambda_k g globally through the moment
// relaxation and updates lambda_{k+1} = f(x_k)/g(x_k). Iteration stops once
// two consecutive lambdas differ by less than eps.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracpoly/lasserre.hpp"
#include "fracpoly/polynomial.hpp"

namespace fracpoly {

struct FractionalProblem {
  Polynomial numerator;
  Polynomial denominator;
  std::vector<Polynomial> constraints;

  std::size_t dim() const { return numerator.dim(); }

  void validate() const {
    require_same_dim(numerator, denominator);
    for (const auto& h : constraints) require_same_dim(numerator, h);
    if (denominator.is_zero()) throw std::invalid_argument("fractional problem: denominator is identically zero");
  }

  unsigned max_degree() const {
    unsigned v = std::max(numerator.degree(), denominator.degree());
    for (const auto& h : constraints) v = std::max(v, h.degree());
    return v;
  }

  double ratio(const Eigen::VectorXd& x) const { return numerator(x) / denominator(x); }
};

class DenominatorNonPositive : public std::runtime_error {
public:
  explicit DenominatorNonPositive(const std::string& what)
      : std::runtime_error(what + "; rewrite f/g as (f*g)/g^2 with transform_positive_denominator") {}
};

class InnerSolveError : public std::runtime_error {
public:
  InnerSolveError(int k, SdpStatus status)
      : std::runtime_error("inner relaxation failed at outer iteration " + std::to_string(k) + ": " +
                           to_string(status)),
        status_(status) {}
  SdpStatus status() const { return status_; }

private:
  SdpStatus status_;
};

struct DinkelbachOptions {
  double eps = 1e-6;
  std::optional<unsigned> order;  // defaults to ceil(v/2) + 1
  int max_outer = 50;
  double initial_lambda = 0.0;
  RelaxationOptions inner;
  // Flag iterations whose relaxation bound and F(lambda_k) disagree by more than this.
  double bound_mismatch_tol = 1e-4;
};

struct IterationRecord {
  int k = 0;
  double lambda = 0;  // lambda_k used to form f - lambda_k g
  Eigen::VectorXd x;
  double F = 0;       // f(x_k) - lambda_k g(x_k)
  double ratio = 0;   // f(x_k)/g(x_k) = lambda_{k+1}
  double bound = 0;   // relaxation bound on max f - lambda_k g
  double rank_ratio = 0;
  bool certified = false;
  int inner_iterations = 0;
  bool bound_mismatch = false;
};

enum class DinkelbachStatus { Converged, MaxOuter };

inline const char* to_string(DinkelbachStatus s) {
  return s == DinkelbachStatus::Converged ? "converged" : "max_outer";
}

struct DinkelbachResult {
  Eigen::VectorXd x;
  double lambda = 0;
  DinkelbachStatus status = DinkelbachStatus::MaxOuter;
  std::vector<IterationRecord> trace;
  unsigned order = 0;

  bool certified() const {
    if (trace.empty()) return false;
    for (const auto& r : trace)
      if (!r.certified) return false;
    return true;
  }
};

inline DinkelbachResult dinkelbach_solve(const FractionalProblem& prob, const DinkelbachOptions& opts = {}) {
  prob.validate();
  if (!(opts.eps > 0.0 && opts.eps < 1.0)) throw std::invalid_argument("dinkelbach: eps must lie in (0, 1)");
  const unsigned v = prob.max_degree();
  const unsigned d = opts.order.value_or(ceil_half(v) + 1);
  if (d < 1 || 2 * d < v) throw OrderTooSmall("dinkelbach: relaxation order " + std::to_string(d) + " too small");

  DinkelbachResult out;
  out.order = d;
  double lambda_prev = opts.initial_lambda - 1.0;
  double lambda = opts.initial_lambda;
  int k = 0;
  while (std::abs(lambda - lambda_prev) >= opts.eps && k < opts.max_outer) {
    PolyProblem sub{Sense::Maximize, prob.numerator - lambda * prob.denominator, prob.constraints};
    const RelaxationResult rel = solve_relaxation(sub, d, opts.inner);
    if (!rel.solved()) throw InnerSolveError(k, rel.solver.status);

    IterationRecord rec;
    rec.k = k;
    rec.lambda = lambda;
    rec.x = rel.point();
    const double gx = prob.denominator(rec.x);
    if (!(gx > 0.0))
      throw DenominatorNonPositive("denominator g(x_" + std::to_string(k) + ") = " + std::to_string(gx) + " <= 0");
    const double fx = prob.numerator(rec.x);
    rec.F = fx - lambda * gx;
    rec.ratio = fx / gx;
    rec.bound = rel.bound;
    rec.rank_ratio = rel.rank_ratio;
    rec.certified = rel.certified;
    rec.inner_iterations = rel.solver.iterations;
    rec.bound_mismatch = std::abs(rel.bound - rec.F) > opts.bound_mismatch_tol * std::max(1.0, std::abs(rel.bound));
    out.trace.push_back(rec);

    lambda_prev = lambda;
    lambda = rec.ratio;
    ++k;
  }
  out.status = std::abs(lambda - lambda_prev) < opts.eps ? DinkelbachStatus::Converged : DinkelbachStatus::MaxOuter;
  out.lambda = lambda;
  if (!out.trace.empty()) out.x = out.trace.back().x;
  return out;
}

/// (f, g) -> (f g, g^2): same ratio wherever g != 0, with a nonnegative denominator.
inline std::pair<Polynomial, Polynomial> transform_positive_denominator(const Polynomial& f, const Polynomial& g) {
  require_same_dim(f, g);
  if (g.is_zero()) throw std::invalid_argument("transform_positive_denominator: zero denominator");
  return {poly_mul(f, g), poly_mul(g, g)};
}

/// eps_k = 1 - ratio_k / reference for every recorded iteration.
inline std::vector<double> relative_error(const std::vector<IterationRecord>& trace, double reference) {
  if (reference == 0.0) throw std::invalid_argument("relative_error: reference value is zero");
  std::vector<double> e;
  e.reserve(trace.size());
  for (const auto& r : trace) e.push_back(1.0 - r.ratio / reference);
  return e;
}

}  // namespace fracpoly
