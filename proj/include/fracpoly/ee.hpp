#pragma once

// Energy-efficiency dimensioning of a multi-cell massive MIMO network.
//
// Decision variables are x1 = K (users per cell) and x2 = M (antennas per BS).
// The objective EE(K, M) = f(K, M) / g(K, M) has a fixed monomial support and
// user-supplied coefficients; the SINR constraint is encoded by two
// polynomials h1, h2 >= 0 whose coefficients follow from (gamma, tau, alpha, SNR).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracpoly/dinkelbach.hpp"
#include "fracpoly/io.hpp"
#include "fracpoly/polynomial.hpp"

namespace fracpoly {

struct EEParams {
  double gamma = 1.0;  // SINR target
  double tau = 400.0;  // coherence block length in symbols
  double alpha = 3.7;  // pathloss exponent
  double snr = 1.0;    // linear scale
  std::optional<double> bandwidth_hz;
  std::optional<double> bs_density;

  void validate() const {
    if (!(gamma > 0)) throw std::invalid_argument("EE parameters: gamma must be positive");
    if (!(tau >= 1)) throw std::invalid_argument("EE parameters: tau must be at least 1");
    if (!(alpha > 2)) throw std::invalid_argument("EE parameters: alpha must exceed 2");
    if (!(snr > 0)) throw std::invalid_argument("EE parameters: snr must be positive");
  }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct EEConstraints {
  Polynomial h1, h2;
};

/// h1 = h1_00 + h1_10 K + h1_01 M + h1_11 K M + h1_20 K^2,
/// h2 = h2_00 + h2_10 K + h2_01 M.
inline EEConstraints constraint_coeffs(const EEParams& p) {
  p.validate();
  const double g = p.gamma, t = p.tau, a = p.alpha, inv_snr = 1.0 / p.snr;
  const double c = 1.0 + 2.0 / (a - 2.0);
  const double q = 4.0 / ((a - 2.0) * (a - 2.0)) + 1.0 / (a - 1.0) + 2.0 / (a - 2.0);
  EEConstraints h{Polynomial(2), Polynomial(2)};
  h.h1.add_term({0, 0}, -g * t * c);
  h.h1.add_term({1, 0}, -g * inv_snr * 2.0 / (a - 2.0) - g * t * c * (1.0 + inv_snr));
  h.h1.add_term({0, 1}, t);
  h.h1.add_term({1, 1}, -g / (a - 1.0));
  h.h1.add_term({2, 0}, -g * q);
  h.h2.add_term({0, 0}, g * inv_snr * (2.0 / (a - 2.0) + 1.0 + inv_snr));
  h.h2.add_term({1, 0}, g * q + g * c * (1.0 + inv_snr));
  h.h2.add_term({0, 1}, g * (1.0 / (a - 1.0) - 1.0));
  return h;
}

inline const std::vector<MultiIndex>& ee_numerator_support() {
  static const std::vector<MultiIndex> s{{1, 0}, {2, 0}, {1, 1}, {2, 1}, {3, 0}};
  return s;
}

inline const std::vector<MultiIndex>& ee_denominator_support() {
  static const std::vector<MultiIndex> s{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {2, 1}, {1, 2}, {3, 0}};
  return s;
}

struct EEGrid {
  long k_max = 0;
  long m_max = 1024;
};

struct EEProblem {
  EEParams params;
  Polynomial f{2}, g{2};
  Polynomial h1{2}, h2{2};
  EEGrid grid;
  bool externally_sourced = false;
  std::string source;

  bool feasible(double k, double m) const {
    const std::array<double, 2> x{k, m};
    return h1(x) >= 0.0 && h2(x) >= 0.0;
  }
  double ee(double k, double m) const {
    const std::array<double, 2> x{k, m};
    return f(x) / g(x);
  }
};

class EmptyFeasibleGrid : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct GridPoint {
  long k = 0, m = 0;
  double ee = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
};

/// Visits every point of [1, k_max] x [1, m_max] in K-major order.
template <class Fn>
void for_each_grid_point(const EEProblem& prob, long k_max, long m_max, Fn&& fn) {
  for (long k = 1; k <= k_max; ++k)
    for (long m = 1; m <= m_max; ++m) {
      const auto kd = static_cast<double>(k), md = static_cast<double>(m);
      fn(GridPoint{k, m, prob.ee(kd, md), prob.feasible(kd, md)});
    }
}

inline std::vector<GridPoint> evaluate_grid(const EEProblem& prob) {
  std::vector<GridPoint> out;
  out.reserve(static_cast<std::size_t>(prob.grid.k_max * prob.grid.m_max));
  for_each_grid_point(prob, prob.grid.k_max, prob.grid.m_max, [&](const GridPoint& p) { out.push_back(p); });
  return out;
}

struct GridOptimum {
  long k = 0, m = 0;
  double ee = 0;
  std::size_t feasible_points = 0;
};

/// Feasible maximizer of f/g over the integer box; ties go to the smallest K, then M.
inline GridOptimum exhaustive_search(const EEProblem& prob, long k_lo, long k_hi, long m_lo, long m_hi) {
  GridOptimum best;
  bool found = false;
  for (long k = k_lo; k <= k_hi; ++k)
    for (long m = m_lo; m <= m_hi; ++m) {
      const auto kd = static_cast<double>(k), md = static_cast<double>(m);
      if (!prob.feasible(kd, md)) continue;
      ++best.feasible_points;
      const double v = prob.ee(kd, md);
      if (!found || v > best.ee) {
        best.k = k;
        best.m = m;
        best.ee = v;
        found = true;
      }
    }
  if (!found)
    throw EmptyFeasibleGrid("no feasible integer point in K in [" + std::to_string(k_lo) + ", " + std::to_string(k_hi) +
                            "], M in [" + std::to_string(m_lo) + ", " + std::to_string(m_hi) + "]");
  return best;
}

inline GridOptimum exhaustive_search(const EEProblem& prob) {
  return exhaustive_search(prob, 1, prob.grid.k_max, 1, prob.grid.m_max);
}

// ---------------------------------------------------------------------------
// Config loading

namespace detail {

inline MultiIndex parse_monomial_key(const LocatedJson& lj, const std::string& key, const std::string& ptr) {
  static const std::regex pattern(R"(\s*\(\s*(\d{1,3})\s*,\s*(\d{1,3})\s*\)\s*)");
  std::smatch m;
  if (!std::regex_match(key, m, pattern)) lj.fail(ptr, "monomial key \"" + key + "\" is not of the form \"(i,j)\"");
  return {static_cast<unsigned>(std::stoul(m[1])), static_cast<unsigned>(std::stoul(m[2]))};
}

inline Polynomial parse_support(const LocatedJson& lj, const Json& obj, const std::string& ptr,
                                const std::vector<MultiIndex>& support, const char* name) {
  if (!obj.is_object()) lj.fail(ptr, std::string("expected an object of ") + name + " coefficients");
  Polynomial p(2);
  std::vector<bool> seen(support.size(), false);
  for (const auto& [key, val] : obj.items()) {
    const std::string kp = ptr + "/" + escape_pointer_token(key);
    const MultiIndex a = parse_monomial_key(lj, key, kp);
    const auto it = std::find(support.begin(), support.end(), a);
    if (it == support.end()) lj.fail(kp, std::string("monomial ") + key + " is outside the " + name + " support");
    const auto idx = static_cast<std::size_t>(it - support.begin());
    if (seen[idx]) lj.fail(kp, "duplicate monomial " + key);
    seen[idx] = true;
    p.add_term(a, require_number(lj, val, kp));
  }
  for (std::size_t i = 0; i < support.size(); ++i)
    if (!seen[i])
      lj.fail(ptr, std::string("missing ") + name + " coefficient \"(" + std::to_string(support[i][0]) + "," +
                       std::to_string(support[i][1]) + ")\"");
  return p;
}

}  // namespace detail

/// Reads {"params": {...}, "objective": {"f": {...}, "g": {...}}, "grid": {...}}.
/// Every monomial of both supports must be listed (zeros allowed).
inline EEProblem load_objective(const LocatedJson& lj) {
  const Json& doc = lj.doc;
  if (!doc.is_object()) lj.fail("", "EE config must be a JSON object");
  EEProblem prob;
  prob.source = lj.source;

  const Json& par = detail::require(lj, doc, "", "params");
  auto num = [&](const char* key) {
    return detail::require_number(lj, detail::require(lj, par, "/params", key), std::string("/params/") + key);
  };
  prob.params.gamma = num("gamma");
  prob.params.tau = num("tau");
  prob.params.alpha = num("alpha");
  const double snr = num("snr");
  const Json& unit = detail::require(lj, par, "/params", "snr_unit");
  if (unit == "dB") prob.params.snr = db_to_linear(snr);
  else if (unit == "linear") prob.params.snr = snr;
  else lj.fail("/params/snr_unit", "snr_unit must be \"dB\" or \"linear\"");
  if (par.contains("bandwidth_hz")) prob.params.bandwidth_hz = num("bandwidth_hz");
  if (par.contains("bs_density")) prob.params.bs_density = num("bs_density");
  try {
    prob.params.validate();
  } catch (const std::invalid_argument& e) {
    lj.fail("/params", e.what());
  }

  const Json& obj = detail::require(lj, doc, "", "objective");
  prob.f = detail::parse_support(lj, detail::require(lj, obj, "/objective", "f"), "/objective/f", ee_numerator_support(), "f");
  prob.g = detail::parse_support(lj, detail::require(lj, obj, "/objective", "g"), "/objective/g", ee_denominator_support(), "g");
  if (prob.f.is_zero()) lj.fail("/objective/f", "numerator is identically zero");

  prob.grid.k_max = static_cast<long>(std::floor(prob.params.tau));
  if (auto it = doc.find("grid"); it != doc.end()) {
    for (const auto& [key, val] : it->items()) {
      const std::string kp = "/grid/" + detail::escape_pointer_token(key);
      if (key != "K_max" && key != "M_max") lj.fail(kp, "unknown grid field \"" + key + "\"");
      if (!val.is_number_integer() || val.get<long long>() < 1) lj.fail(kp, "grid bound must be a positive integer");
      (key == "K_max" ? prob.grid.k_max : prob.grid.m_max) = val.get<long>();
    }
  }
  if (auto it = doc.find("externally_sourced"); it != doc.end()) {
    if (!it->is_boolean()) lj.fail("/externally_sourced", "expected true or false");
    prob.externally_sourced = it->get<bool>();
  }

  const EEConstraints h = constraint_coeffs(prob.params);
  prob.h1 = h.h1;
  prob.h2 = h.h2;

  for (long k = 1; k <= prob.grid.k_max; ++k)
    for (long m = 1; m <= prob.grid.m_max; ++m) {
      const auto kd = static_cast<double>(k), md = static_cast<double>(m);
      if (!prob.feasible(kd, md)) continue;
      const std::array<double, 2> x{kd, md};
      if (!(prob.g(x) > 0.0))
        lj.fail("/objective/g", "denominator is not positive at feasible point (" + std::to_string(k) + ", " +
                                    std::to_string(m) + ")");
    }
  return prob;
}

inline EEProblem load_objective(const std::string& path) { return load_objective(load_located(path)); }

// ---------------------------------------------------------------------------
// Solver

struct EEOptions {
  unsigned order = 6;
  double eps = 1e-6;
  int max_outer = 50;
  bool oracle = false;
  RelaxationOptions inner;
};

struct EEResult {
  double k_cont = 0, m_cont = 0;  // continuous maximizer
  double ee_cont = 0;
  long k_round = 0, m_round = 0;  // reported integer deployment
  double ee_round = 0;
  bool rounded_feasible = false;  // nearest-integer point itself feasible
  bool used_fallback = false;     // an axis neighbour replaced the rounded point
  bool feasible = false;          // reported integer point feasible
  DinkelbachResult dinkelbach;    // trace in original (K, M) units
  std::optional<GridOptimum> oracle;
  std::optional<double> epsilon;  // 1 - EE(rounded) / EE(oracle)
  std::vector<double> epsilon_trace;
};

namespace detail {

inline std::array<double, 2> box_center(const EEGrid& g) {
  return {0.5 * (1.0 + static_cast<double>(g.k_max)), 0.5 * (1.0 + static_cast<double>(g.m_max))};
}
inline std::array<double, 2> box_radius(const EEGrid& g) {
  return {0.5 * (static_cast<double>(g.k_max) - 1.0), 0.5 * (static_cast<double>(g.m_max) - 1.0)};
}

}  // namespace detail

/// Fractional problem in u in [-1, 1]^2 with (K, M) = center + radius * u. Numerator
/// and denominator share one scale factor, constraints are each normalized, and
/// the box itself enters as 1 - u_i^2 >= 0.
inline FractionalProblem scaled_fractional(const EEProblem& prob, double* common_scale = nullptr) {
  const auto c = detail::box_center(prob.grid);
  const auto r = detail::box_radius(prob.grid);
  Polynomial fs = affine_substitute(prob.f, c, r);
  Polynomial gs = affine_substitute(prob.g, c, r);
  const double s = max_abs_coeff(gs);
  fs = (1.0 / s) * fs;
  gs = (1.0 / s) * gs;
  if (common_scale) *common_scale = s;
  std::vector<Polynomial> cons;
  for (const auto* h : {&prob.h1, &prob.h2}) {
    Polynomial hs = affine_substitute(*h, c, r);
    cons.push_back((1.0 / max_abs_coeff(hs)) * hs);
  }
  const Polynomial one = Polynomial::constant(2, 1.0);
  for (std::size_t i = 0; i < 2; ++i) {
    const Polynomial u = Polynomial::variable(2, i);
    cons.push_back(one - u * u);
  }
  return {std::move(fs), std::move(gs), std::move(cons)};
}

inline EEResult solve_ee(const EEProblem& prob, const EEOptions& opts = {}) {
  if (prob.grid.k_max < 2 || prob.grid.m_max < 2) throw std::invalid_argument("solve_ee: grid must span at least 2 values per axis");
  double scale = 1.0;
  const FractionalProblem fp = scaled_fractional(prob, &scale);
  DinkelbachOptions dopt;
  dopt.eps = opts.eps;
  dopt.order = opts.order;
  dopt.max_outer = opts.max_outer;
  dopt.inner = opts.inner;

  EEResult out;
  out.dinkelbach = dinkelbach_solve(fp, dopt);

  // Report the trace in (K, M) units; F and the bound carry the shared scale.
  const auto c = detail::box_center(prob.grid);
  const auto r = detail::box_radius(prob.grid);
  auto to_km = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd x(2);
    x << c[0] + r[0] * u[0], c[1] + r[1] * u[1];
    return x;
  };
  for (auto& rec : out.dinkelbach.trace) {
    rec.x = to_km(rec.x);
    rec.F *= scale;
    rec.bound *= scale;
  }
  out.dinkelbach.x = to_km(out.dinkelbach.x);

  out.k_cont = out.dinkelbach.x[0];
  out.m_cont = out.dinkelbach.x[1];
  out.ee_cont = prob.ee(out.k_cont, out.m_cont);
  out.k_round = std::clamp(std::lround(out.k_cont), 1L, prob.grid.k_max);
  out.m_round = std::clamp(std::lround(out.m_cont), 1L, prob.grid.m_max);
  out.rounded_feasible = prob.feasible(static_cast<double>(out.k_round), static_cast<double>(out.m_round));
  out.feasible = out.rounded_feasible;
  if (!out.rounded_feasible) {
    const long dk[4] = {-1, 0, 0, 1}, dm[4] = {0, -1, 1, 0};
    std::optional<GridPoint> best;
    for (int i = 0; i < 4; ++i) {
      const long k = out.k_round + dk[i], m = out.m_round + dm[i];
      if (k < 1 || m < 1 || k > prob.grid.k_max || m > prob.grid.m_max) continue;
      const auto kd = static_cast<double>(k), md = static_cast<double>(m);
      if (!prob.feasible(kd, md)) continue;
      const double v = prob.ee(kd, md);
      if (!best || v > best->ee) best = GridPoint{k, m, v, true};
    }
    if (best) {
      out.k_round = best->k;
      out.m_round = best->m;
      out.used_fallback = true;
      out.feasible = true;
    }
  }
  out.ee_round = prob.ee(static_cast<double>(out.k_round), static_cast<double>(out.m_round));

  if (opts.oracle) {
    out.oracle = exhaustive_search(prob);
    out.epsilon = 1.0 - out.ee_round / out.oracle->ee;
    out.epsilon_trace = relative_error(out.dinkelbach.trace, out.oracle->ee);
  }
  return out;
}

}  // namespace fracpoly
