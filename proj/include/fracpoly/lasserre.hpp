#pragma once

// Order-d moment relaxation of a polynomial optimization problem
//
//   min / max  p(x)   s.t.  h_i(x) >= 0
//
// The relaxation minimizes sum_alpha p_alpha y_alpha over moment vectors with
// y_0 = 1, a PSD moment matrix and PSD localizing matrices. Maximization is
// carried out as minimization of -p, so the returned bound is a lower bound
// for Minimize and an upper bound for Maximize.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracpoly/moment.hpp"
#include "fracpoly/polynomial.hpp"
#include "fracpoly/sdp.hpp"

namespace fracpoly {

enum class Sense { Minimize, Maximize };

struct PolyProblem {
  Sense sense = Sense::Minimize;
  Polynomial objective;
  std::vector<Polynomial> constraints;  // h_i(x) >= 0

  std::size_t dim() const { return objective.dim(); }

  void validate() const {
    for (const auto& h : constraints)
      if (h.dim() != objective.dim()) throw DimensionError("constraint dimension differs from objective dimension");
  }

  /// max{deg p, deg h_i}
  unsigned max_degree() const {
    unsigned v = objective.degree();
    for (const auto& h : constraints) v = std::max(v, h.degree());
    return v;
  }
};

/// Default half-order ceil(v/2) + 1.
inline unsigned default_order(const PolyProblem& p) { return ceil_half(p.max_degree()) + 1; }

inline unsigned minimal_order(const PolyProblem& p) { return std::max(1u, ceil_half(p.max_degree())); }

inline SdpProblem build_relaxation(const PolyProblem& prob, unsigned d) {
  prob.validate();
  if (d < 1) throw OrderTooSmall("relaxation order must be at least 1");
  if (2 * d < prob.max_degree())
    throw OrderTooSmall("relaxation order " + std::to_string(d) + " is below ceil(" +
                        std::to_string(prob.max_degree()) + "/2)");
  const std::size_t n = prob.dim();
  const MomentIndexMap ymap(n, d);
  SdpProblem sdp;
  sdp.num_vars = ymap.size();
  sdp.objective = to_coeff_vector(prob.objective, ymap.basis());
  if (prob.sense == Sense::Maximize) sdp.objective = -sdp.objective;
  sdp.blocks.push_back(moment_matrix_spec(n, d));
  for (const auto& h : prob.constraints) sdp.blocks.push_back(localizing_matrix_spec(h, n, d));
  sdp.equalities.emplace_back(ymap.position(MultiIndex(n)), 1.0);
  return sdp;
}

struct Extraction {
  std::optional<Eigen::VectorXd> point;
  double rank_ratio = 1.0;  // lambda_2 / lambda_1 of the full moment matrix
  unsigned order_used = 0;  // truncation order that passed the rank test, 0 if none
};

namespace detail {

inline double rank_ratio_of(const Eigen::MatrixXd& m, Eigen::VectorXd* top = nullptr) {
  if (m.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const auto& ev = es.eigenvalues();  // ascending
  const Eigen::Index k = ev.size();
  const double l1 = ev[k - 1];
  if (top) *top = std::sqrt(std::max(l1, 0.0)) * es.eigenvectors().col(k - 1);
  if (l1 <= 0) return 1.0;
  if (k == 1) return 0.0;
  return std::max(ev[k - 2], 0.0) / l1;
}

}  // namespace detail

/// Recovers x from a numerically rank-one moment matrix M = v v', x = v(2:n+1)
/// with v scaled so that v(1) = 1.
///
/// The full matrix M_d(y) is tried first, then its leading truncations
/// M_{d-1}(y), ..., M_1(y). Above the order the problem needs, optimal
/// high-degree moments are often not pinned down and M_d has rank > 1 even
/// though the lower-order block is exactly rank one.
inline Extraction extract_minimizer(const Eigen::VectorXd& y, std::size_t n, unsigned d, double rank_tol = 1e-6) {
  Extraction ex;
  const Eigen::MatrixXd full = assemble(moment_matrix_spec(n, d), y);
  for (unsigned t = d; t >= 1; --t) {
    const auto side = static_cast<Eigen::Index>(basis_size(n, t));
    Eigen::VectorXd v;
    const double ratio = detail::rank_ratio_of(full.topLeftCorner(side, side), &v);
    if (t == d) ex.rank_ratio = ratio;
    if (ratio <= rank_tol && std::abs(v[0]) > 1e-12) {
      v /= v[0];
      ex.point = v.segment(1, static_cast<Eigen::Index>(n));
      ex.order_used = t;
      return ex;
    }
  }
  return ex;
}

/// Feasibility within tol and objective value matching the bound to tol * max(1, |bound|).
inline bool certify(const PolyProblem& prob, const Eigen::VectorXd& x, double bound, double tol) {
  if (static_cast<std::size_t>(x.size()) != prob.dim()) throw DimensionError("certify: point has wrong dimension");
  if (!x.allFinite()) return false;
  for (const auto& h : prob.constraints)
    if (h(x) < -tol) return false;
  return std::abs(prob.objective(x) - bound) <= tol * std::max(1.0, std::abs(bound));
}

struct RelaxationOptions {
  SdpOptions sdp;
  double rank_tol = 1e-6;
  double certify_tol = 1e-5;
};

struct RelaxationResult {
  unsigned order_d = 0;
  double bound = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd y;
  double rank_ratio = 1.0;
  std::optional<Eigen::VectorXd> extracted;
  Eigen::VectorXd first_moments;  // fallback point (y_{e_1}, ..., y_{e_n})
  unsigned extraction_order = 0;
  bool certified = false;
  SdpSolution solver;

  bool solved() const { return solver.status == SdpStatus::Optimal; }

  /// Extracted point when available, otherwise the first-order moments.
  const Eigen::VectorXd& point() const { return extracted ? *extracted : first_moments; }
};

inline RelaxationResult solve_relaxation(const PolyProblem& prob, unsigned d, const RelaxationOptions& opts = {}) {
  const SdpProblem sdp = build_relaxation(prob, d);
  RelaxationResult r;
  r.order_d = d;
  r.solver = solve(sdp, opts.sdp);
  if (r.solver.status != SdpStatus::Optimal) return r;

  r.y = r.solver.y;
  r.bound = prob.sense == Sense::Maximize ? -r.solver.objective_value : r.solver.objective_value;
  const std::size_t n = prob.dim();
  r.first_moments = r.y.segment(1, static_cast<Eigen::Index>(n));
  const Extraction ex = extract_minimizer(r.y, n, d, opts.rank_tol);
  r.rank_ratio = ex.rank_ratio;
  r.extracted = ex.point;
  r.extraction_order = ex.order_used;
  r.certified = r.extracted && certify(prob, *r.extracted, r.bound, opts.certify_tol);
  return r;
}

// ---------------------------------------------------------------------------
// Interior-point cost model n^2 m s^3 + n m s^4 with s = C(n+d, d).

struct CostEstimate {
  std::uint64_t basis_size = 0;
  std::uint64_t operations = 0;
  bool saturated = false;
};

inline CostEstimate estimate_cost_for_basis(std::uint64_t n, std::uint64_t m, std::uint64_t s) {
  CostEstimate c;
  c.basis_size = s;
  using u128 = unsigned __int128;
  const u128 s2 = u128(s) * s;
  const u128 s3 = s2 * s;
  const u128 s4 = s3 * s;
  const u128 limit = std::numeric_limits<std::uint64_t>::max();
  // s^4 itself can overflow 128 bits only for s > 2^32, far outside any usable basis
  if (s > (1ull << 31)) {
    c.operations = std::numeric_limits<std::uint64_t>::max();
    c.saturated = true;
    return c;
  }
  const u128 a = u128(n) * n * m;
  const u128 b = u128(n) * m;
  u128 total = 0;
  bool sat = false;
  if (a != 0 && s3 > limit / a) sat = true;
  else total += a * s3;
  if (!sat && b != 0 && s4 > limit / b) sat = true;
  else if (!sat) total += b * s4;
  if (!sat && total > limit) sat = true;
  c.operations = sat ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(total);
  c.saturated = sat;
  return c;
}

inline CostEstimate estimate_cost(std::uint64_t n, std::uint64_t m, unsigned d) {
  if (n == 0 || d == 0) throw std::invalid_argument("estimate_cost: n and d must be positive");
  return estimate_cost_for_basis(n, m, basis_size(n, d));
}

}  // namespace fracpoly
