#pragma once

// Dense primal-dual interior-point solver for small semidefinite programs.
//
// The engine works on the standard pair
//
//   (P)  min  sum_j <C_j, X_j>      s.t.  sum_j <A_ij, X_j> = b_i,  X_j >= 0
//   (D)  max  b'y                   s.t.  C_j - sum_i y_i A_ij = Z_j >= 0
//
// with an infeasible start, the HKM search direction and a Mehrotra
// predictor-corrector step. Constraint matrices A_ij are sparse and stored
// with both triangles, which keeps the Schur complement assembly at
// (nnz per block)^2 work instead of cubic dense products.
//
// SdpProblem is the user-facing form: minimize c'y subject to affine PSD
// blocks in y and a handful of fixed coordinates. It maps onto (D) after
// the fixed coordinates are eliminated.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracpoly/moment.hpp"

namespace fracpoly {

struct SdpOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;
  // A ray whose normalized objective exceeds its normalized residual by this
  // factor is accepted as an infeasibility certificate.
  double infeasibility_ratio = 1e6;
};

enum class SdpStatus { Optimal, Infeasible, Unbounded, IterLimit, NumericalFailure };

inline const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Unbounded: return "unbounded";
    case SdpStatus::IterLimit: return "iteration_limit";
    case SdpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

struct IterateLog {
  int iter = 0;
  double pobj = 0, dobj = 0;  // (P) and (D) objectives of the standard pair
  double pinf = 0, dinf = 0;  // relative residual norms
  double rel_gap = 0;
  double mu = 0;
  double step_p = 0, step_d = 0;
};

// ---------------------------------------------------------------------------
// Standard form engine

struct SparseEntry {
  int row, col;
  double val;
};

using SparseSym = std::vector<SparseEntry>;

struct StandardSdp {
  std::vector<int> block_sizes;
  std::vector<Eigen::MatrixXd> c;       // c[j]
  std::vector<std::vector<SparseSym>> a;  // a[j][i]: constraint i restricted to block j
  Eigen::VectorXd b;
  // Callers that report objectives as (shift - objective) set this so the
  // relative gap is normalized by the magnitudes they actually report.
  double report_shift = 0.0;

  std::size_t num_constraints() const { return static_cast<std::size_t>(b.size()); }
  std::size_t num_blocks() const { return block_sizes.size(); }
};

enum class StandardStatus { Optimal, PrimalInfeasible, DualInfeasible, IterLimit, NumericalFailure };

struct StandardSolution {
  StandardStatus status = StandardStatus::NumericalFailure;
  std::vector<Eigen::MatrixXd> x, z;
  Eigen::VectorXd y;
  double pobj = 0, dobj = 0, pinf = 0, dinf = 0, rel_gap = 0;
  int iterations = 0;
  std::vector<IterateLog> history;
};

namespace detail {

inline double frob(const SparseSym& a) {
  double s = 0.0;
  for (const auto& e : a) s += e.val * e.val;
  return std::sqrt(s);
}

inline Eigen::MatrixXd sym(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Predictor-corrector iteration carried out in scalar type S.
template <class S>
class StandardSolver {
public:
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  using Blocks = std::vector<Mat>;

  StandardSolver(const StandardSdp& p, const SdpOptions& o) : p_(p), o_(o) {
    m_ = p_.num_constraints();
    nb_ = p_.num_blocks();
    for (int s : p_.block_sizes) total_dim_ += s;
    b_ = p_.b.template cast<S>();
    for (const auto& c : p_.c) c_.push_back(c.template cast<S>());
    norm_b_ = b_.norm();
    norm_c_ = norm(c_);
    norm_a_ = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < nb_; ++j) {
        const double f = frob(p_.a[j][i]);
        s += f * f;
      }
      norm_a_ = std::max(norm_a_, S(std::sqrt(s)));
    }
    build_constraint_gram();
  }

  StandardSolution run();

private:
  static Mat symm(const Mat& m) { return S(0.5) * (m + m.transpose()); }

  static S inner(const SparseSym& a, const Mat& m) {
    S s = 0;
    for (const auto& e : a) s += S(e.val) * m(e.row, e.col);
    return s;
  }

  Vec apply_a(const Blocks& x) const {
    Vec r = Vec::Zero(static_cast<Eigen::Index>(m_));
    for (std::size_t j = 0; j < nb_; ++j)
      for (std::size_t i = 0; i < m_; ++i) r[static_cast<Eigen::Index>(i)] += inner(p_.a[j][i], x[j]);
    return r;
  }

  Blocks apply_at(const Vec& y) const {
    Blocks out;
    out.reserve(nb_);
    for (std::size_t j = 0; j < nb_; ++j) {
      Mat r = Mat::Zero(p_.block_sizes[j], p_.block_sizes[j]);
      for (std::size_t i = 0; i < m_; ++i) {
        const S yi = y[static_cast<Eigen::Index>(i)];
        if (yi == S(0)) continue;
        for (const auto& e : p_.a[j][i]) r(e.row, e.col) += yi * S(e.val);
      }
      out.push_back(std::move(r));
    }
    return out;
  }

  // M_ik = sum_j tr(A_ij X_j A_kj Zinv_j)
  Mat schur(const Blocks& x, const Blocks& zinv) const {
    const auto m = static_cast<Eigen::Index>(m_);
    Mat s = Mat::Zero(m, m);
    for (std::size_t j = 0; j < nb_; ++j) {
      const auto& X = x[j];
      const auto& Zi = zinv[j];
      const auto& blk = p_.a[j];
      for (std::size_t i = 0; i < m_; ++i) {
        const auto& ai = blk[i];
        if (ai.empty()) continue;
        for (std::size_t k = i; k < m_; ++k) {
          const auto& ak = blk[k];
          if (ak.empty()) continue;
          S acc = 0;
          for (const auto& ea : ai)
            for (const auto& eb : ak) acc += S(ea.val * eb.val) * X(ea.col, eb.row) * Zi(eb.col, ea.row);
          s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) += acc;
        }
      }
    }
    return s.template selfadjointView<Eigen::Upper>();
  }

  // G_ik = <A_i, A_k>, used to pull a search direction back onto A(dX) = r_p.
  void build_constraint_gram() {
    const auto m = static_cast<Eigen::Index>(m_);
    Mat g = Mat::Zero(m, m);
    for (std::size_t j = 0; j < nb_; ++j) {
      const int n = p_.block_sizes[j];
      Mat flat = Mat::Zero(m, static_cast<Eigen::Index>(n) * n);
      for (std::size_t i = 0; i < m_; ++i)
        for (const auto& e : p_.a[j][i]) flat(static_cast<Eigen::Index>(i), e.row * n + e.col) += S(e.val);
      g.noalias() += flat * flat.transpose();
    }
    gram_llt_.compute(g);
    have_gram_ = m > 0 && gram_llt_.info() == Eigen::Success;
  }

  // Minimum-norm change to dx that restores A(dx) = rp.
  void project_primal(Blocks& dx, const Vec& rp) const {
    if (!have_gram_) return;
    const Vec w = gram_llt_.solve(rp - apply_a(dx));
    const auto corr = apply_at(w);
    for (std::size_t j = 0; j < nb_; ++j) dx[j] += corr[j];
  }

  // Largest step in [0, 1] keeping x + t*dx positive definite, scaled by the step fraction.
  S step_length(const Blocks& x, const Blocks& dx, bool& ok) const {
    S amax = std::numeric_limits<S>::infinity();
    for (std::size_t j = 0; j < nb_; ++j) {
      Eigen::LLT<Mat> llt(x[j]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        return 0;
      }
      const Mat linv_dx = llt.matrixL().solve(dx[j]);
      const Mat w = llt.matrixL().solve(linv_dx.transpose());
      Eigen::SelfAdjointEigenSolver<Mat> es(symm(w), Eigen::EigenvaluesOnly);
      const S lmin = es.eigenvalues().minCoeff();
      if (lmin < 0) amax = std::min(amax, S(-1) / lmin);
    }
    return std::min(S(1), S(o_.step_fraction) * amax);
  }

  static S dot(const Blocks& a, const Blocks& b) {
    S s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j].cwiseProduct(b[j]).sum();
    return s;
  }

  static S norm(const Blocks& a) {
    using std::sqrt;
    return sqrt(dot(a, a));
  }

  static std::vector<Eigen::MatrixXd> to_double(const Blocks& b) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(b.size());
    for (const auto& m : b) out.push_back(m.template cast<double>());
    return out;
  }

  const StandardSdp& p_;
  const SdpOptions& o_;
  std::size_t m_ = 0, nb_ = 0;
  int total_dim_ = 0;
  Vec b_;
  Blocks c_;
  S norm_b_ = 0, norm_c_ = 0, norm_a_ = 0;
  Eigen::LLT<Mat> gram_llt_;
  bool have_gram_ = false;
};

template <class S>
StandardSolution StandardSolver<S>::run() {
  using std::abs;
  using std::pow;
  StandardSolution out;
  const auto m = static_cast<Eigen::Index>(m_);

  // Starting point scaled to the data.
  Blocks X, Z;
  for (std::size_t j = 0; j < nb_; ++j) {
    const int n = p_.block_sizes[j];
    const double rn = std::sqrt(static_cast<double>(n));
    double xi = std::max(10.0, rn), eta = std::max(10.0, rn);
    eta = std::max(eta, p_.c[j].norm());
    for (std::size_t i = 0; i < m_; ++i) {
      const double fa = frob(p_.a[j][i]);
      xi = std::max(xi, rn * (1.0 + std::abs(p_.b[static_cast<Eigen::Index>(i)])) / (1.0 + fa));
      eta = std::max(eta, fa);
    }
    X.push_back(S(xi) * Mat::Identity(n, n));
    Z.push_back(S(eta) * Mat::Identity(n, n));
  }
  Vec y = Vec::Zero(m);

  auto finish = [&](StandardStatus st, const IterateLog& log) {
    out.history.push_back(log);
    out.status = st;
    return out;
  };

  int stall = 0;
  for (int iter = 0;; ++iter) {
    const Vec ax = apply_a(X);
    const Vec rp = b_ - ax;
    const auto aty = apply_at(y);
    Blocks rd(nb_);
    for (std::size_t j = 0; j < nb_; ++j) rd[j] = c_[j] - Z[j] - aty[j];

    const S pobj = dot(c_, X);
    const S dobj = b_.dot(y);
    const S xz = dot(X, Z);
    const S mu = xz / S(total_dim_);
    const S pinf = rp.norm() / (S(1) + norm_b_);
    const S dinf = norm(rd) / (S(1) + norm_c_);
    const S shift = S(p_.report_shift);
    const S rel_gap = std::max(abs(pobj - dobj), abs(xz)) / (S(1) + abs(shift - pobj) + abs(shift - dobj));

    IterateLog log{iter, double(pobj), double(dobj), double(pinf), double(dinf), double(rel_gap), double(mu), 0.0, 0.0};
    out.pobj = log.pobj;
    out.dobj = log.dobj;
    out.pinf = log.pinf;
    out.dinf = log.dinf;
    out.rel_gap = log.rel_gap;
    out.iterations = iter;
    out.x = to_double(X);
    out.z = to_double(Z);
    out.y = y.template cast<double>();

    if (log.pinf <= o_.feas_tol && log.dinf <= o_.feas_tol && log.rel_gap <= o_.gap_tol)
      return finish(StandardStatus::Optimal, log);

    if (iter >= 1) {
      // (D) ray: b'y > 0 with A'y + Z nearly zero certifies that (P) is infeasible.
      Blocks aty_z(nb_);
      for (std::size_t j = 0; j < nb_; ++j) aty_z[j] = aty[j] + Z[j];
      if (dobj > 0 && norm_b_ > 0) {
        const S lhs = dobj / norm_b_;
        const S rhs = norm(aty_z) / std::max(norm_a_, S(1e-300));
        if (lhs > S(o_.infeasibility_ratio) * rhs) return finish(StandardStatus::PrimalInfeasible, log);
      }
      // (P) ray: <C, X> < 0 with A(X) nearly zero certifies that (D) is infeasible.
      if (pobj < 0 && norm_c_ > 0) {
        const S lhs = -pobj / norm_c_;
        const S rhs = ax.norm() / std::max(norm_a_, S(1e-300));
        if (lhs > S(o_.infeasibility_ratio) * rhs) return finish(StandardStatus::DualInfeasible, log);
      }
    }

    if (iter >= o_.max_iter) return finish(StandardStatus::IterLimit, log);

    Blocks zinv(nb_);
    for (std::size_t j = 0; j < nb_; ++j) {
      Eigen::LLT<Mat> llt(Z[j]);
      if (llt.info() != Eigen::Success) return finish(StandardStatus::NumericalFailure, log);
      zinv[j] = llt.solve(Mat::Identity(Z[j].rows(), Z[j].cols()));
    }

    const Mat schur_m = schur(X, zinv);
    Eigen::LLT<Mat> schur_llt(schur_m);
    Eigen::LDLT<Mat> schur_ldlt;
    const bool use_llt = schur_llt.info() == Eigen::Success;
    if (!use_llt && m > 0) {
      schur_ldlt.compute(schur_m);
      if (schur_ldlt.info() != Eigen::Success) return finish(StandardStatus::NumericalFailure, log);
    }
    auto solve_schur = [&](const Vec& rhs) -> Vec {
      if (m == 0) return Vec(0);
      Vec sol = use_llt ? Vec(schur_llt.solve(rhs)) : Vec(schur_ldlt.solve(rhs));
      // one step of iterative refinement
      const Vec res = rhs - schur_m * sol;
      sol += use_llt ? Vec(schur_llt.solve(res)) : Vec(schur_ldlt.solve(res));
      return sol;
    };

    // Direction for complementarity target sigma*mu with optional second-order term.
    auto direction = [&](S target, const Blocks* corr, Blocks& dx, Vec& dy, Blocks& dz) {
      Blocks g(nb_);
      for (std::size_t j = 0; j < nb_; ++j) {
        g[j] = target * zinv[j] - X[j] - X[j] * rd[j] * zinv[j];
        if (corr) g[j] -= (*corr)[j] * zinv[j];
      }
      dy = solve_schur(rp - apply_a(g));
      const auto atdy = apply_at(dy);
      dz.resize(nb_);
      dx.resize(nb_);
      for (std::size_t j = 0; j < nb_; ++j) {
        dz[j] = rd[j] - atdy[j];
        Mat t = target * zinv[j] - X[j] - X[j] * dz[j] * zinv[j];
        if (corr) t -= (*corr)[j] * zinv[j];
        dx[j] = symm(t);
      }
      project_primal(dx, rp);
    };

    Blocks dx, dz;
    Vec dy;
    direction(S(0), nullptr, dx, dy, dz);
    bool ok = true;
    S ap = step_length(X, dx, ok);
    S ad = step_length(Z, dz, ok);
    if (!ok) return finish(StandardStatus::NumericalFailure, log);
    S xz_aff = 0;
    for (std::size_t j = 0; j < nb_; ++j) xz_aff += (X[j] + ap * dx[j]).cwiseProduct(Z[j] + ad * dz[j]).sum();
    const S mu_aff = xz_aff / S(total_dim_);
    const S ratio = std::clamp(mu_aff / mu, S(0), S(1));
    const S sigma = pow(ratio, std::min(ap, ad) > S(0.5) ? S(3) : S(2));

    Blocks corr(nb_);
    for (std::size_t j = 0; j < nb_; ++j) corr[j] = dx[j] * dz[j];
    direction(sigma * mu, &corr, dx, dy, dz);
    ap = step_length(X, dx, ok);
    ad = step_length(Z, dz, ok);
    if (!ok) return finish(StandardStatus::NumericalFailure, log);
    if (!std::isfinite(double(ap)) || !std::isfinite(double(ad)) || !dy.allFinite())
      return finish(StandardStatus::NumericalFailure, log);

    log.step_p = double(ap);
    log.step_d = double(ad);
    out.history.push_back(log);

    for (std::size_t j = 0; j < nb_; ++j) {
      X[j] = symm(X[j] + ap * dx[j]);
      Z[j] = symm(Z[j] + ad * dz[j]);
    }
    y += ad * dy;

    stall = (ap < S(1e-8) && ad < S(1e-8)) ? stall + 1 : 0;
    if (stall >= 5) {
      out.status = StandardStatus::NumericalFailure;
      out.iterations = iter + 1;
      return out;
    }
  }
}

}  // namespace detail

inline StandardSolution solve_standard(const StandardSdp& p, const SdpOptions& opts = {}) {
  if (p.c.size() != p.num_blocks() || p.a.size() != p.num_blocks())
    throw std::invalid_argument("standard SDP: block count mismatch");
  for (std::size_t j = 0; j < p.num_blocks(); ++j) {
    if (p.c[j].rows() != p.block_sizes[j] || p.c[j].cols() != p.block_sizes[j])
      throw std::invalid_argument("standard SDP: C block has wrong shape");
    if (p.a[j].size() != p.num_constraints())
      throw std::invalid_argument("standard SDP: constraint count mismatch in block " + std::to_string(j));
  }
  return detail::StandardSolver<long double>(p, opts).run();
}

// ---------------------------------------------------------------------------
// Moment-form problems

struct SdpProblem {
  std::size_t num_vars = 0;
  Eigen::VectorXd objective;  // minimize objective' y
  std::vector<MatrixSpec> blocks;
  std::vector<std::pair<std::size_t, double>> equalities;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  Eigen::VectorXd y;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  std::vector<Eigen::MatrixXd> multipliers;  // dual matrices, one per block
  std::vector<IterateLog> history;
};

struct PsdCheck {
  bool is_psd;
  double min_eigenvalue;
};

inline PsdCheck psd_check(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("psd_check: matrix is not square");
  if (!m.allFinite()) throw std::domain_error("psd_check: non-finite entry");
  if (m.size() == 0) return {true, 0.0};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::sym(m), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return {lmin >= -tol, lmin};
}

inline void validate(const SdpProblem& p) {
  if (static_cast<std::size_t>(p.objective.size()) != p.num_vars)
    throw std::invalid_argument("SdpProblem: objective length differs from num_vars");
  if (p.equalities.empty()) throw std::invalid_argument("SdpProblem: missing normalization equality");
  for (const auto& [idx, v] : p.equalities)
    if (idx >= p.num_vars) throw std::invalid_argument("SdpProblem: equality index out of range");
  for (const auto& b : p.blocks) {
    if (!b.is_symmetric()) throw std::invalid_argument("SdpProblem: block spec is not symmetric");
    if (b.side() > 0 && b.max_position() >= p.num_vars)
      throw std::invalid_argument("SdpProblem: block references a variable out of range");
  }
}

inline SdpSolution solve(const SdpProblem& prob, const SdpOptions& opts = {}) {
  validate(prob);
  const std::size_t nv = prob.num_vars;
  std::map<std::size_t, double> fixed;
  for (const auto& [idx, v] : prob.equalities) {
    auto [it, inserted] = fixed.emplace(idx, v);
    if (!inserted && it->second != v) {
      SdpSolution s;
      s.status = SdpStatus::Infeasible;
      return s;
    }
  }

  std::vector<bool> used(nv, false);
  for (const auto& blk : prob.blocks)
    for (std::size_t i = 0; i < blk.side(); ++i)
      for (std::size_t j = 0; j < blk.side(); ++j)
        for (const auto& t : blk.terms(i, j)) used[t.pos] = true;

  // Free variables that touch no block only enter the objective.
  std::vector<long> std_index(nv, -1);
  std::vector<std::size_t> free_vars;
  for (std::size_t k = 0; k < nv; ++k) {
    if (fixed.count(k)) continue;
    if (!used[k]) {
      if (prob.objective[static_cast<Eigen::Index>(k)] != 0.0) {
        SdpSolution s;
        s.status = SdpStatus::Unbounded;
        return s;
      }
      continue;
    }
    std_index[k] = static_cast<long>(free_vars.size());
    free_vars.push_back(k);
  }

  StandardSdp sp;
  const std::size_t m = free_vars.size();
  for (const auto& [k, v] : fixed) sp.report_shift += prob.objective[static_cast<Eigen::Index>(k)] * v;
  sp.b.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    sp.b[static_cast<Eigen::Index>(i)] = -prob.objective[static_cast<Eigen::Index>(free_vars[i])];
  for (const auto& blk : prob.blocks) {
    const int s = static_cast<int>(blk.side());
    sp.block_sizes.push_back(s);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(s, s);
    std::vector<SparseSym> a(m);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        for (const auto& t : blk.terms(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
          if (auto f = fixed.find(t.pos); f != fixed.end()) {
            c(i, j) += t.coeff * f->second;
          } else {
            a[static_cast<std::size_t>(std_index[t.pos])].push_back({i, j, -t.coeff});
          }
        }
    sp.c.push_back(std::move(c));
    sp.a.push_back(std::move(a));
  }

  const StandardSolution ss = solve_standard(sp, opts);

  SdpSolution sol;
  switch (ss.status) {
    case StandardStatus::Optimal: sol.status = SdpStatus::Optimal; break;
    case StandardStatus::PrimalInfeasible: sol.status = SdpStatus::Unbounded; break;
    case StandardStatus::DualInfeasible: sol.status = SdpStatus::Infeasible; break;
    case StandardStatus::IterLimit: sol.status = SdpStatus::IterLimit; break;
    case StandardStatus::NumericalFailure: sol.status = SdpStatus::NumericalFailure; break;
  }
  sol.y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  double fixed_obj = 0.0;
  for (const auto& [k, v] : fixed) {
    sol.y[static_cast<Eigen::Index>(k)] = v;
    fixed_obj += prob.objective[static_cast<Eigen::Index>(k)] * v;
  }
  for (std::size_t i = 0; i < m; ++i) sol.y[static_cast<Eigen::Index>(free_vars[i])] = ss.y[static_cast<Eigen::Index>(i)];
  sol.objective_value = prob.objective.dot(sol.y);
  sol.dual_objective = fixed_obj - ss.pobj;
  // objective_value is recomputed from y, so report the gap on the same footing
  sol.duality_gap = std::abs(sol.objective_value - sol.dual_objective) /
                    (1.0 + std::abs(sol.objective_value) + std::abs(sol.dual_objective));
  sol.iterations = ss.iterations;
  sol.multipliers = ss.x;
  sol.history = ss.history;
  return sol;
}

struct Residuals {
  double primal_infeas;
  double min_block_eig;
  double gap;
};

inline Residuals residuals(const SdpProblem& prob, const SdpSolution& sol) {
  if (static_cast<std::size_t>(sol.y.size()) != prob.num_vars)
    throw std::invalid_argument("residuals: solution length does not match problem");
  Residuals r{0.0, std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& [idx, v] : prob.equalities)
    r.primal_infeas = std::max(r.primal_infeas, std::abs(sol.y[static_cast<Eigen::Index>(idx)] - v));
  for (const auto& blk : prob.blocks)
    r.min_block_eig = std::min(r.min_block_eig, psd_check(assemble(blk, sol.y), 0.0).min_eigenvalue);
  const double obj = prob.objective.dot(sol.y);
  r.gap = std::abs(obj - sol.dual_objective) / (1.0 + std::abs(obj) + std::abs(sol.dual_objective));
  return r;
}

}  // namespace fracpoly
