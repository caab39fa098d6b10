#pragma once

// Moment and localizing matrices as affine images of a moment vector y.
//
// y is indexed by the graded basis of degree 2d, so y_alpha stands for the
// monomial x^alpha. The moment matrix of order d has entry (i, j) equal to
// y at beta_i + beta_j, where beta ranges over the degree-d basis. The
// localizing matrix of h uses the basis of degree d - ceil(deg h / 2) and
// entry (i, j) = sum_alpha h_alpha * y at alpha + beta_i + beta_j.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracpoly/polynomial.hpp"

namespace fracpoly {

class OrderTooSmall : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class MomentIndexMap {
public:
  MomentIndexMap(std::size_t n, unsigned d) : d_(d), y_basis_(n, 2 * d) {}

  std::size_t dim() const { return y_basis_.dim(); }
  unsigned order() const { return d_; }
  std::size_t size() const { return y_basis_.size(); }
  const MonomialBasis& basis() const { return y_basis_; }

  std::size_t position(const MultiIndex& a) const {
    const auto p = y_basis_.position(a);
    if (p == y_basis_.size())
      throw std::out_of_range("moment index " + a.str() + " exceeds degree " + std::to_string(2 * d_));
    return p;
  }

private:
  unsigned d_;
  MonomialBasis y_basis_;
};

struct MatrixTerm {
  double coeff;
  std::size_t pos;
  friend bool operator==(const MatrixTerm&, const MatrixTerm&) = default;
};

/// Symmetric matrix whose entries are linear forms in y.
class MatrixSpec {
public:
  MatrixSpec() = default;
  explicit MatrixSpec(std::size_t side) : side_(side), entries_(side * side) {}

  std::size_t side() const { return side_; }

  const std::vector<MatrixTerm>& terms(std::size_t i, std::size_t j) const { return entries_[i * side_ + j]; }

  /// Adds coeff * y[pos] to entries (i, j) and (j, i).
  void add(std::size_t i, std::size_t j, double coeff, std::size_t pos) {
    if (coeff == 0.0) return;
    push(entries_[i * side_ + j], coeff, pos);
    if (i != j) push(entries_[j * side_ + i], coeff, pos);
  }

  std::size_t max_position() const {
    std::size_t m = 0;
    for (const auto& e : entries_)
      for (const auto& t : e) m = std::max(m, t.pos);
    return m;
  }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < side_; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (terms(i, j) != terms(j, i)) return false;
    return true;
  }

private:
  static void push(std::vector<MatrixTerm>& v, double coeff, std::size_t pos) {
    for (auto& t : v)
      if (t.pos == pos) {
        t.coeff += coeff;
        return;
      }
    v.push_back({coeff, pos});
  }

  std::size_t side_ = 0;
  std::vector<std::vector<MatrixTerm>> entries_;
};

inline unsigned ceil_half(unsigned k) { return (k + 1) / 2; }

/// Localizing matrix of h at relaxation order d; h = 1 gives the moment matrix.
inline MatrixSpec localizing_matrix_spec(const Polynomial& h, std::size_t n, unsigned d) {
  if (h.dim() != n) throw DimensionError("localizing_matrix_spec: polynomial dimension mismatch");
  const unsigned hd = h.degree();
  if (ceil_half(hd) > d)
    throw OrderTooSmall("relaxation order " + std::to_string(d) + " too small for a constraint of degree " +
                        std::to_string(hd));
  const MonomialBasis rows(n, d - ceil_half(hd));
  const MomentIndexMap ymap(n, d);
  MatrixSpec spec(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i; j < rows.size(); ++j) {
      const MultiIndex bij = rows[i] + rows[j];
      for (const auto& [a, c] : h.terms()) spec.add(i, j, c, ymap.position(a + bij));
    }
  return spec;
}

inline MatrixSpec moment_matrix_spec(std::size_t n, unsigned d) {
  return localizing_matrix_spec(Polynomial::constant(n, 1.0), n, d);
}

/// y_alpha = x^alpha for all |alpha| <= 2d.
inline Eigen::VectorXd moments_from_point(std::span<const double> x, unsigned d) {
  return MonomialBasis(x.size(), 2 * d).evaluate(x);
}

inline Eigen::MatrixXd assemble(const MatrixSpec& spec, const Eigen::VectorXd& y) {
  const std::size_t k = spec.side();
  if (k > 0 && spec.max_position() >= static_cast<std::size_t>(y.size()))
    throw DimensionError("assemble: moment vector of length " + std::to_string(y.size()) +
                         " is too short for the matrix spec");
  Eigen::MatrixXd m(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (const auto& t : spec.terms(i, j)) s += t.coeff * y[static_cast<Eigen::Index>(t.pos)];
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
    }
  return m;
}

}  // namespace fracpoly
