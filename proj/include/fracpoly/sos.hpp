#pragma once

// Sum-of-squares side of the relaxation.
//
// A polynomial p of degree 2d is SOS iff p(x) = m_d(x)' W m_d(x) for some
// W >= 0; matching coefficients gives one linear equation in W per
// monomial of degree <= 2d. The same Gram-matrix encoding yields Putinar
// certificates  sigma_0 h_0 = sigma + sum_i sigma_i h_i  and the SOS lower
// bound used to cross-check the moment relaxation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fracpoly/lasserre.hpp"
#include "fracpoly/polynomial.hpp"
#include "fracpoly/sdp.hpp"

namespace fracpoly {

class DegreeBoundError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// m(x)' W m(x) expanded over the monomials.
inline Polynomial gram_polynomial(const MonomialBasis& basis, const Eigen::MatrixXd& w) {
  if (static_cast<std::size_t>(w.rows()) != basis.size() || w.rows() != w.cols())
    throw DimensionError("gram_polynomial: Gram matrix does not match basis");
  Polynomial p(basis.dim());
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t s = 0; s < basis.size(); ++s)
      p.add_term(basis[r] + basis[s], w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)));
  return p;
}

/// theta_j = sqrt(lambda_j) u_j' m(x) for eigenpairs of W with lambda_j > clip.
inline std::vector<Polynomial> gram_squares(const MonomialBasis& basis, const Eigen::MatrixXd& w,
                                            double clip = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (w + w.transpose()));
  std::vector<Polynomial> out;
  for (Eigen::Index j = es.eigenvalues().size(); j-- > 0;) {
    const double lam = es.eigenvalues()[j];
    if (lam <= clip) break;
    out.push_back(from_coeff_vector(std::sqrt(lam) * es.eigenvectors().col(j), basis));
  }
  return out;
}

struct SosCertificate {
  MonomialBasis basis;
  Eigen::MatrixXd gram;
  std::vector<Polynomial> squares;

  Polynomial polynomial() const { return gram_polynomial(basis, gram); }

  static SosCertificate constant_one(std::size_t n) {
    return {MonomialBasis(n, 0), Eigen::MatrixXd::Identity(1, 1), {Polynomial::constant(n, 1.0)}};
  }
};

struct NotSos {
  std::string reason;
  std::optional<SdpStatus> status;
};

using SosDecomposition = std::variant<SosCertificate, NotSos>;

inline double max_coeff_error(const Polynomial& a, const Polynomial& b) {
  return max_abs_coeff(a - b);
}

inline SosDecomposition sos_decompose(const Polynomial& p, const SdpOptions& opts = {}) {
  const unsigned deg = p.degree();
  if (deg % 2 != 0) return NotSos{"odd degree " + std::to_string(deg), std::nullopt};
  const std::size_t n = p.dim();
  const unsigned d = deg / 2;
  const MonomialBasis basis(n, d);
  const MonomialBasis coeffs(n, 2 * d);
  const int side = static_cast<int>(basis.size());

  // minimize tr(W)  s.t.  <A_alpha, W> = p_alpha
  StandardSdp sp;
  sp.block_sizes = {side};
  sp.c = {Eigen::MatrixXd::Identity(side, side)};
  sp.a.assign(1, std::vector<SparseSym>(coeffs.size()));
  for (int r = 0; r < side; ++r)
    for (int s = 0; s < side; ++s)
      sp.a[0][coeffs.position(basis[static_cast<std::size_t>(r)] + basis[static_cast<std::size_t>(s)])].push_back(
          {r, s, 1.0});
  sp.b = to_coeff_vector(p, coeffs);

  const StandardSolution ss = solve_standard(sp, opts);
  switch (ss.status) {
    case StandardStatus::Optimal: break;
    case StandardStatus::PrimalInfeasible: return NotSos{"no positive semidefinite Gram matrix exists", SdpStatus::Infeasible};
    case StandardStatus::DualInfeasible: return NotSos{"Gram program reported unbounded", SdpStatus::Unbounded};
    case StandardStatus::IterLimit: return NotSos{"Gram program hit the iteration limit", SdpStatus::IterLimit};
    case StandardStatus::NumericalFailure: return NotSos{"Gram program broke down numerically", SdpStatus::NumericalFailure};
  }

  SosCertificate cert{basis, 0.5 * (ss.x[0] + ss.x[0].transpose()), {}};
  const double scale = std::max(1.0, max_abs_coeff(p));
  if (!psd_check(cert.gram, 1e-8 * scale).is_psd) return NotSos{"Gram matrix is not PSD", SdpStatus::NumericalFailure};
  if (max_coeff_error(cert.polynomial(), p) > 1e-7 * scale)
    return NotSos{"Gram reconstruction is inaccurate", SdpStatus::NumericalFailure};
  cert.squares = gram_squares(basis, cert.gram);
  return cert;
}

// ---------------------------------------------------------------------------
// Putinar certificates

struct PutinarCertificate {
  SosCertificate sigma;                // free SOS term, degree <= order
  SosCertificate sigma_0;              // multiplier of h_0, degree <= order - v
  std::vector<SosCertificate> sigma_i; // multiplier of h_i, degree <= order - deg(h_i)
  unsigned order = 0;
};

/// Checks sigma_0 h_0 = sigma + sum_i sigma_i h_i coefficientwise, with every
/// multiplier PSD and within its degree budget. Throws DegreeBoundError when a
/// multiplier is too large for the stated order.
inline bool verify_putinar(const PutinarCertificate& cert, const std::vector<Polynomial>& h, const Polynomial& h0,
                           double tol = 1e-6) {
  if (cert.sigma_i.size() != h.size()) throw std::invalid_argument("verify_putinar: one multiplier per constraint expected");
  unsigned v = h0.degree();
  for (const auto& hi : h) v = std::max(v, hi.degree());
  const unsigned ell = cert.order;
  if (ell < v) throw DegreeBoundError("order " + std::to_string(ell) + " is below the problem degree " + std::to_string(v));

  auto check_budget = [](const SosCertificate& c, unsigned budget, const std::string& name) {
    if (c.basis.degree() > ceil_half(budget))
      throw DegreeBoundError(name + " uses monomials of degree " + std::to_string(c.basis.degree()) +
                             ", budget allows " + std::to_string(ceil_half(budget)));
  };
  check_budget(cert.sigma, ell, "sigma");
  check_budget(cert.sigma_0, ell - v, "sigma_0");
  for (std::size_t i = 0; i < h.size(); ++i) check_budget(cert.sigma_i[i], ell - h[i].degree(), "sigma_" + std::to_string(i + 1));

  auto psd = [](const SosCertificate& c) {
    return psd_check(c.gram, 1e-8 * std::max(1.0, c.gram.cwiseAbs().maxCoeff())).is_psd;
  };
  if (!psd(cert.sigma) || !psd(cert.sigma_0)) return false;
  for (const auto& s : cert.sigma_i)
    if (!psd(s)) return false;

  const Polynomial lhs = poly_mul(cert.sigma_0.polynomial(), h0);
  Polynomial rhs = cert.sigma.polynomial();
  for (std::size_t i = 0; i < h.size(); ++i) rhs = rhs + poly_mul(cert.sigma_i[i].polynomial(), h[i]);
  return max_coeff_error(lhs, rhs) <= tol * std::max(1.0, max_abs_coeff(lhs));
}

// ---------------------------------------------------------------------------
// SOS bound and the duality cross-check

struct SosBound {
  SdpStatus status = SdpStatus::NumericalFailure;
  double value = std::numeric_limits<double>::quiet_NaN();  // in the problem's own sense
  std::optional<PutinarCertificate> certificate;             // for min q: q - t = sigma + sum sigma_i h_i
};

/// Best SOS bound of order 2d: for Minimize, max t s.t. p - t = sigma + sum sigma_i h_i.
/// Coefficients are matched by explicit polynomial products, independent of
/// the moment-matrix index machinery.
inline SosBound sos_bound(const PolyProblem& prob, unsigned d, const SdpOptions& opts = {}) {
  prob.validate();
  if (2 * d < prob.max_degree()) throw OrderTooSmall("sos_bound: order too small");
  const std::size_t n = prob.dim();
  const Polynomial q = prob.sense == Sense::Minimize ? prob.objective : -prob.objective;
  const MonomialBasis coeffs(n, 2 * d);
  const std::size_t m = coeffs.size() - 1;  // the constant coefficient defines t

  std::vector<Polynomial> mult{Polynomial::constant(n, 1.0)};
  for (const auto& h : prob.constraints) mult.push_back(h);

  StandardSdp sp;
  std::vector<MonomialBasis> bases;
  for (const auto& h : mult) {
    const unsigned hd = ceil_half(h.degree());
    if (hd > d) throw OrderTooSmall("sos_bound: constraint degree exceeds order");
    bases.emplace_back(n, d - hd);
    const auto& b = bases.back();
    const int side = static_cast<int>(b.size());
    sp.block_sizes.push_back(side);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(side, side);
    std::vector<SparseSym> a(m);
    for (int r = 0; r < side; ++r)
      for (int s = 0; s < side; ++s) {
        Polynomial mono(n);
        mono.add_term(b[static_cast<std::size_t>(r)] + b[static_cast<std::size_t>(s)], 1.0);
        const Polynomial prod = poly_mul(h, mono);
        for (const auto& [alpha, coef] : prod.terms()) {
          const std::size_t pos = coeffs.position(alpha);
          if (pos == 0) c(r, s) += coef;
          else a[pos - 1].push_back({r, s, coef});
        }
      }
    sp.c.push_back(std::move(c));
    sp.a.push_back(std::move(a));
  }
  const Eigen::VectorXd qv = to_coeff_vector(q, coeffs);
  sp.b = qv.tail(static_cast<Eigen::Index>(m));
  sp.report_shift = qv[0];

  const StandardSolution ss = solve_standard(sp, opts);
  SosBound out;
  const double sign = prob.sense == Sense::Minimize ? 1.0 : -1.0;
  switch (ss.status) {
    case StandardStatus::Optimal: out.status = SdpStatus::Optimal; break;
    case StandardStatus::PrimalInfeasible:
      out.status = SdpStatus::Infeasible;
      out.value = -sign * std::numeric_limits<double>::infinity();
      return out;
    case StandardStatus::DualInfeasible:
      out.status = SdpStatus::Unbounded;
      out.value = sign * std::numeric_limits<double>::infinity();
      return out;
    case StandardStatus::IterLimit: out.status = SdpStatus::IterLimit; return out;
    case StandardStatus::NumericalFailure: out.status = SdpStatus::NumericalFailure; return out;
  }
  const double t = qv[0] - ss.pobj;
  out.value = sign * t;

  PutinarCertificate cert;
  cert.order = 2 * d;
  cert.sigma_0 = SosCertificate::constant_one(n);
  auto make = [&](std::size_t j) {
    SosCertificate s{bases[j], 0.5 * (ss.x[j] + ss.x[j].transpose()), {}};
    s.squares = gram_squares(s.basis, s.gram);
    return s;
  };
  cert.sigma = make(0);
  for (std::size_t j = 1; j < mult.size(); ++j) cert.sigma_i.push_back(make(j));
  out.certificate = std::move(cert);
  return out;
}

struct DualityReport {
  double r_sos = std::numeric_limits<double>::quiet_NaN();
  double r_mom = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  SdpStatus sos_status = SdpStatus::NumericalFailure;
  SdpStatus mom_status = SdpStatus::NumericalFailure;
  std::optional<PutinarCertificate> certificate;

  /// Empty feasible set: the moment side is infeasible and the SOS bound unbounded.
  bool consistently_infeasible() const {
    return mom_status == SdpStatus::Infeasible && sos_status == SdpStatus::Unbounded;
  }
};

inline DualityReport strong_duality_check(const PolyProblem& prob, unsigned d, const SdpOptions& opts = {}) {
  DualityReport rep;
  RelaxationOptions ro;
  ro.sdp = opts;
  const RelaxationResult mom = solve_relaxation(prob, d, ro);
  rep.mom_status = mom.solver.status;
  if (mom.solved()) rep.r_mom = mom.bound;
  SosBound sos = sos_bound(prob, d, opts);
  rep.sos_status = sos.status;
  rep.r_sos = sos.value;
  rep.certificate = std::move(sos.certificate);
  if (mom.solved() && sos.status == SdpStatus::Optimal) rep.gap = std::abs(rep.r_sos - rep.r_mom);
  return rep;
}

}  // namespace fracpoly
