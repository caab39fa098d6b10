#pragma once

// Multivariate polynomials over the reals with a graded monomial order.
//
// A polynomial in n variables is stored as a sparse map from exponent
// vectors to coefficients. The canonical order on exponent vectors is
// graded: lower total degree first, and within one degree the vector with
// the larger leading exponent first, e.g. for n = 2, v = 2
//
//   (0,0) (1,0) (0,1) (2,0) (1,1) (0,2)
//
// The same order indexes coefficient vectors, moment vectors and the rows
// of moment matrices throughout the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fracpoly {

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class DegreeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : exps_(n, 0) {}
  explicit MultiIndex(std::vector<unsigned> exps) : exps_(std::move(exps)) {}
  MultiIndex(std::initializer_list<unsigned> exps) : exps_(exps) {}

  std::size_t dim() const { return exps_.size(); }
  unsigned operator[](std::size_t i) const { return exps_[i]; }
  unsigned& operator[](std::size_t i) { return exps_[i]; }
  const std::vector<unsigned>& exponents() const { return exps_; }

  unsigned degree() const {
    return std::accumulate(exps_.begin(), exps_.end(), 0u);
  }

  bool is_zero() const {
    return std::all_of(exps_.begin(), exps_.end(), [](unsigned e) { return e == 0; });
  }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    if (a.dim() != b.dim()) throw DimensionError("multi-index dimension mismatch");
    MultiIndex r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) r.exps_[i] = a.exps_[i] + b.exps_[i];
    return r;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  // Graded order; see the file comment.
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
    const unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return std::lexicographical_compare(b.exps_.begin(), b.exps_.end(),
                                        a.exps_.begin(), a.exps_.end());
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(exps_[i]);
    }
    return s + ")";
  }

private:
  std::vector<unsigned> exps_;
};

/// Number of monomials of degree at most v in n variables, C(n+v, v).
/// Exact for n + v <= 64; throws std::range_error beyond that.
inline std::uint64_t basis_size(std::size_t n, std::size_t v) {
  if (n < 1) throw std::range_error("basis_size: dimension must be >= 1");
  if (n + v > 64) throw std::range_error("basis_size: n + v exceeds 64");
  // C(n+v, k) built incrementally; every intermediate is itself a binomial.
  const std::size_t k = std::min(n, v);
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n + v - k + i) / i;
  return static_cast<std::uint64_t>(r);
}

class MonomialBasis {
public:
  MonomialBasis() = default;

  MonomialBasis(std::size_t n, unsigned v) : n_(n), v_(v) {
    const auto size = basis_size(n, v);
    if (size > (1u << 24)) throw std::range_error("monomial basis too large to enumerate");
    entries_.reserve(size);
    MultiIndex cur(n);
    for (unsigned deg = 0; deg <= v; ++deg) fill(cur, 0, deg);
    for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i], i);
  }

  std::size_t dim() const { return n_; }
  unsigned degree() const { return v_; }
  std::size_t size() const { return entries_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<MultiIndex>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Position of alpha, or size() when alpha is not in the basis.
  std::size_t position(const MultiIndex& alpha) const {
    auto it = index_.find(alpha);
    return it == index_.end() ? entries_.size() : it->second;
  }

  bool contains(const MultiIndex& alpha) const { return index_.count(alpha) > 0; }

  /// Monomial values m(x) in basis order.
  Eigen::VectorXd evaluate(std::span<const double> x) const;

private:
  // Exponent vectors of total degree `remaining` on variables i.., larger
  // leading exponents first.
  void fill(MultiIndex& cur, std::size_t i, unsigned remaining) {
    if (i + 1 == n_) {
      cur[i] = remaining;
      entries_.push_back(cur);
      return;
    }
    for (unsigned e = remaining + 1; e-- > 0;) {
      cur[i] = e;
      fill(cur, i + 1, remaining - e);
    }
    cur[i] = 0;
  }

  std::size_t n_ = 0;
  unsigned v_ = 0;
  std::vector<MultiIndex> entries_;
  std::map<MultiIndex, std::size_t> index_;
};

inline MonomialBasis enumerate_basis(std::size_t n, unsigned v) { return MonomialBasis(n, v); }

namespace detail {

// pow_table[i][e] = x_i^e for e <= max_degree
inline std::vector<std::vector<double>> power_table(std::span<const double> x, unsigned max_degree) {
  std::vector<std::vector<double>> t(x.size(), std::vector<double>(max_degree + 1, 1.0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (unsigned e = 1; e <= max_degree; ++e) t[i][e] = t[i][e - 1] * x[i];
  return t;
}

inline double monomial_value(const MultiIndex& a, const std::vector<std::vector<double>>& pw) {
  double r = 1.0;
  for (std::size_t i = 0; i < a.dim(); ++i) r *= pw[i][a[i]];
  return r;
}

}  // namespace detail

inline Eigen::VectorXd MonomialBasis::evaluate(std::span<const double> x) const {
  if (x.size() != n_) throw DimensionError("basis evaluation: point has wrong dimension");
  const auto pw = detail::power_table(x, v_);
  Eigen::VectorXd m(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) m[i] = detail::monomial_value(entries_[i], pw);
  return m;
}

class Polynomial {
public:
  using TermMap = std::map<MultiIndex, double>;

  Polynomial() = default;
  explicit Polynomial(std::size_t n) : n_(n) {}

  Polynomial(std::size_t n, std::initializer_list<std::pair<MultiIndex, double>> terms) : n_(n) {
    for (const auto& [a, c] : terms) add_term(a, c);
  }

  static Polynomial constant(std::size_t n, double c) {
    Polynomial p(n);
    p.add_term(MultiIndex(n), c);
    return p;
  }

  /// The coordinate polynomial x_i (0-based).
  static Polynomial variable(std::size_t n, std::size_t i) {
    if (i >= n) throw DimensionError("variable index out of range");
    MultiIndex a(n);
    a[i] = 1;
    Polynomial p(n);
    p.add_term(a, 1.0);
    return p;
  }

  std::size_t dim() const { return n_; }
  const TermMap& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [a, c] : terms_) d = std::max(d, a.degree());
    return d;
  }

  double coeff(const MultiIndex& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? 0.0 : it->second;
  }

  /// Adds c to the coefficient of x^a; exact zeros are dropped.
  void add_term(const MultiIndex& a, double c) {
    if (a.dim() != n_) throw DimensionError("term dimension " + std::to_string(a.dim()) +
                                            " does not match polynomial dimension " + std::to_string(n_));
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(a, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != n_) throw DimensionError("evaluation point has dimension " + std::to_string(x.size()) +
                                             ", polynomial has " + std::to_string(n_));
    if (terms_.empty()) return 0.0;
    const auto pw = detail::power_table(x, degree());
    double s = 0.0;
    for (const auto& [a, c] : terms_) s += c * detail::monomial_value(a, pw);
    return s;
  }

  double operator()(const Eigen::VectorXd& x) const {
    return (*this)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [a, c] : terms_) {
      if (!first) os << (c < 0 ? " - " : " + ");
      else if (c < 0) os << "-";
      first = false;
      os << std::abs(c);
      for (std::size_t i = 0; i < a.dim(); ++i) {
        if (a[i] == 0) continue;
        os << "*x" << (i + 1);
        if (a[i] > 1) os << "^" << a[i];
      }
    }
    return os.str();
  }

private:
  std::size_t n_ = 0;
  TermMap terms_;
};

inline double eval(const Polynomial& p, std::span<const double> x) { return p(x); }

inline void require_same_dim(const Polynomial& p, const Polynomial& q) {
  if (p.dim() != q.dim())
    throw DimensionError("polynomial dimensions differ (" + std::to_string(p.dim()) + " vs " +
                         std::to_string(q.dim()) + ")");
}

inline Polynomial poly_add(const Polynomial& p, const Polynomial& q) {
  require_same_dim(p, q);
  Polynomial r = p;
  for (const auto& [a, c] : q.terms()) r.add_term(a, c);
  return r;
}

inline Polynomial poly_scale(const Polynomial& p, double s) {
  Polynomial r(p.dim());
  if (s == 0.0) return r;
  for (const auto& [a, c] : p.terms()) r.add_term(a, c * s);
  return r;
}

inline Polynomial poly_mul(const Polynomial& p, const Polynomial& q) {
  require_same_dim(p, q);
  Polynomial r(p.dim());
  for (const auto& [a, c] : p.terms())
    for (const auto& [b, d] : q.terms()) r.add_term(a + b, c * d);
  return r;
}

inline Polynomial operator+(const Polynomial& p, const Polynomial& q) { return poly_add(p, q); }
inline Polynomial operator-(const Polynomial& p, const Polynomial& q) { return poly_add(p, poly_scale(q, -1.0)); }
inline Polynomial operator-(const Polynomial& p) { return poly_scale(p, -1.0); }
inline Polynomial operator*(const Polynomial& p, const Polynomial& q) { return poly_mul(p, q); }
inline Polynomial operator*(double s, const Polynomial& p) { return poly_scale(p, s); }
inline Polynomial operator*(const Polynomial& p, double s) { return poly_scale(p, s); }

inline Polynomial poly_pow(const Polynomial& p, unsigned e) {
  Polynomial r = Polynomial::constant(p.dim(), 1.0);
  for (unsigned i = 0; i < e; ++i) r = poly_mul(r, p);
  return r;
}

/// Dense coefficients of p aligned with the basis order.
inline Eigen::VectorXd to_coeff_vector(const Polynomial& p, const MonomialBasis& basis) {
  if (p.dim() != basis.dim()) throw DimensionError("to_coeff_vector: dimension mismatch");
  if (p.degree() > basis.degree())
    throw DegreeError("to_coeff_vector: polynomial degree " + std::to_string(p.degree()) +
                      " exceeds basis degree " + std::to_string(basis.degree()));
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& [a, c] : p.terms()) v[static_cast<Eigen::Index>(basis.position(a))] = c;
  return v;
}

inline Polynomial from_coeff_vector(const Eigen::VectorXd& v, const MonomialBasis& basis) {
  if (static_cast<std::size_t>(v.size()) != basis.size())
    throw DimensionError("from_coeff_vector: length does not match basis");
  Polynomial p(basis.dim());
  for (std::size_t i = 0; i < basis.size(); ++i) p.add_term(basis[i], v[static_cast<Eigen::Index>(i)]);
  return p;
}

/// p(center + diag(radius) u) as a polynomial in u.
inline Polynomial affine_substitute(const Polynomial& p, std::span<const double> center,
                                    std::span<const double> radius) {
  const std::size_t n = p.dim();
  if (center.size() != n || radius.size() != n) throw DimensionError("affine_substitute: dimension mismatch");
  const unsigned deg = p.degree();
  // powers[i][e] = (c_i + r_i u_i)^e
  std::vector<std::vector<Polynomial>> powers(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Polynomial lin = Polynomial::constant(n, center[i]) + radius[i] * Polynomial::variable(n, i);
    powers[i].push_back(Polynomial::constant(n, 1.0));
    for (unsigned e = 1; e <= deg; ++e) powers[i].push_back(poly_mul(powers[i].back(), lin));
  }
  Polynomial r(n);
  for (const auto& [a, c] : p.terms()) {
    Polynomial t = Polynomial::constant(n, c);
    for (std::size_t i = 0; i < n; ++i)
      if (a[i] > 0) t = poly_mul(t, powers[i][a[i]]);
    r = poly_add(r, t);
  }
  return r;
}

inline double max_abs_coeff(const Polynomial& p) {
  double m = 0.0;
  for (const auto& [a, c] : p.terms()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace fracpoly
