#pragma once

// Run reports (JSON) and figure-data CSVs.
//
// Output is deterministic: no timestamps, object keys in sorted order and
// doubles printed in shortest round-trip form.

#include <charconv>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <Eigen/Dense>

#include "fracpoly/dinkelbach.hpp"
#include "fracpoly/ee.hpp"
#include "fracpoly/io.hpp"
#include "fracpoly/sos.hpp"

namespace fracpoly {

inline constexpr const char* kToolName = "fracpoly";
inline constexpr const char* kToolVersion = "0.1.0";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kTraceHeader = "k,lambda,F,ratio,bound,rank_ratio,certified,inner_iterations";
inline constexpr const char* kGridHeader = "K,M,EE,feasible";

inline void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace)
    os << r.k << ',' << format_double(r.lambda) << ',' << format_double(r.F) << ',' << format_double(r.ratio) << ','
       << format_double(r.bound) << ',' << format_double(r.rank_ratio) << ',' << (r.certified ? 1 : 0) << ','
       << r.inner_iterations << '\n';
}

inline std::string trace_csv(const std::vector<IterationRecord>& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

inline void write_grid_csv(std::ostream& os, const std::vector<GridPoint>& grid) {
  os << kGridHeader << '\n';
  for (const auto& g : grid) os << g.k << ',' << g.m << ',' << format_double(g.ee) << ',' << (g.feasible ? 1 : 0) << '\n';
}

inline std::string grid_csv(const std::vector<GridPoint>& grid) {
  std::ostringstream os;
  write_grid_csv(os, grid);
  return os.str();
}

// ---------------------------------------------------------------------------
// JSON fragments

/// Non-finite values become null so the report stays valid JSON.
inline Json number_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_json(v[i]));
  return a;
}

inline Json sos_certificate_json(const SosCertificate& c) {
  Json basis = Json::array();
  for (const auto& a : c.basis) basis.push_back(a.exponents());
  Json gram = Json::array();
  for (Eigen::Index i = 0; i < c.gram.rows(); ++i)
    for (Eigen::Index j = 0; j < c.gram.cols(); ++j) gram.push_back(number_json(c.gram(i, j)));
  return {{"basis", std::move(basis)}, {"gram", std::move(gram)}, {"size", c.basis.size()}};
}

inline Json putinar_json(const PutinarCertificate& c) {
  Json mult = Json::array();
  for (const auto& s : c.sigma_i) mult.push_back(sos_certificate_json(s));
  return {{"order", c.order},
          {"sigma", sos_certificate_json(c.sigma)},
          {"sigma_0", sos_certificate_json(c.sigma_0)},
          {"sigma_i", std::move(mult)}};
}

inline Json trace_json(const std::vector<IterationRecord>& trace) {
  Json a = Json::array();
  for (const auto& r : trace)
    a.push_back({{"k", r.k},
                 {"lambda", number_json(r.lambda)},
                 {"F", number_json(r.F)},
                 {"ratio", number_json(r.ratio)},
                 {"bound", number_json(r.bound)},
                 {"rank_ratio", number_json(r.rank_ratio)},
                 {"certified", r.certified},
                 {"inner_iterations", r.inner_iterations},
                 {"x", vector_json(r.x)}});
  return a;
}

inline Json report_header(const std::string& command) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"command", command}};
}

inline std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Validation

namespace detail {

class ReportChecker {
public:
  explicit ReportChecker(std::vector<std::string>& errs) : errs_(errs) {}

  const Json* field(const Json& obj, const std::string& ptr, const char* key) {
    if (!obj.is_object()) {
      errs_.push_back(ptr + ": expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      errs_.push_back(ptr + "/" + key + ": missing");
      return nullptr;
    }
    return &*it;
  }

  void number(const Json& obj, const std::string& ptr, const char* key, bool nullable = false) {
    if (const Json* v = field(obj, ptr, key); v && !(v->is_number() || (nullable && v->is_null())))
      errs_.push_back(ptr + "/" + key + ": expected a number");
  }
  void integer(const Json& obj, const std::string& ptr, const char* key) {
    if (const Json* v = field(obj, ptr, key); v && !v->is_number_integer())
      errs_.push_back(ptr + "/" + key + ": expected an integer");
  }
  void boolean(const Json& obj, const std::string& ptr, const char* key) {
    if (const Json* v = field(obj, ptr, key); v && !v->is_boolean()) errs_.push_back(ptr + "/" + key + ": expected a boolean");
  }
  void string(const Json& obj, const std::string& ptr, const char* key) {
    if (const Json* v = field(obj, ptr, key); v && !v->is_string()) errs_.push_back(ptr + "/" + key + ": expected a string");
  }
  void vector(const Json& obj, const std::string& ptr, const char* key, bool nullable = false) {
    const Json* v = field(obj, ptr, key);
    if (!v) return;
    if (nullable && v->is_null()) return;
    if (!v->is_array()) {
      errs_.push_back(ptr + "/" + key + ": expected an array");
      return;
    }
    for (const auto& e : *v)
      if (!e.is_number() && !e.is_null()) {
        errs_.push_back(ptr + "/" + key + ": expected an array of numbers");
        return;
      }
  }
  void trace(const Json& obj, const std::string& ptr) {
    const Json* t = field(obj, ptr, "trace");
    if (!t) return;
    if (!t->is_array()) {
      errs_.push_back(ptr + "/trace: expected an array");
      return;
    }
    for (std::size_t i = 0; i < t->size(); ++i) {
      const std::string p = ptr + "/trace/" + std::to_string(i);
      const Json& r = (*t)[i];
      integer(r, p, "k");
      for (const char* k : {"lambda", "F", "ratio", "bound", "rank_ratio"}) number(r, p, k, true);
      boolean(r, p, "certified");
      integer(r, p, "inner_iterations");
      vector(r, p, "x");
    }
  }
  void certificate(const Json& c, const std::string& ptr) {
    for (const char* part : {"sigma", "sigma_0"})
      if (const Json* s = field(c, ptr, part)) sos(*s, ptr + "/" + part);
    integer(c, ptr, "order");
    if (const Json* m = field(c, ptr, "sigma_i")) {
      if (!m->is_array()) errs_.push_back(ptr + "/sigma_i: expected an array");
      else
        for (std::size_t i = 0; i < m->size(); ++i) sos((*m)[i], ptr + "/sigma_i/" + std::to_string(i));
    }
  }
  void sos(const Json& s, const std::string& ptr) {
    integer(s, ptr, "size");
    vector(s, ptr, "gram");
    const Json* b = field(s, ptr, "basis");
    if (!b || !s.contains("size") || !s["size"].is_number_integer() || !s["gram"].is_array()) return;
    const auto n = s["size"].get<std::size_t>();
    if (!b->is_array() || b->size() != n) errs_.push_back(ptr + "/basis: length differs from size");
    if (s["gram"].size() != n * n) errs_.push_back(ptr + "/gram: expected size*size entries");
  }

private:
  std::vector<std::string>& errs_;
};

}  // namespace detail

/// Structural check of a run report; returns one message per problem found.
inline std::vector<std::string> validate_report(const Json& r) {
  std::vector<std::string> errs;
  detail::ReportChecker c(errs);
  if (!r.is_object()) return {"report must be a JSON object"};
  c.string(r, "", "tool");
  c.string(r, "", "version");
  c.string(r, "", "command");
  c.string(r, "", "status");
  c.integer(r, "", "exit_code");
  if (!errs.empty()) return errs;
  if (r["tool"] != kToolName) errs.push_back("/tool: unexpected tool name");
  const int code = r["exit_code"].get<int>();
  if (code != 0 && code != 2) errs.push_back("/exit_code: reports are written only for exit codes 0 and 2");

  const std::string cmd = r["command"].get<std::string>();
  if (cmd == "solve-poly") {
    c.integer(r, "", "order");
    c.number(r, "", "bound");
    c.vector(r, "", "point");
    c.number(r, "", "rank_ratio");
    c.boolean(r, "", "certified");
    c.vector(r, "", "moments");
  } else if (cmd == "solve-frac" || cmd == "solve-ee") {
    c.integer(r, "", "order");
    c.number(r, "", "lambda");
    c.vector(r, "", "point");
    c.integer(r, "", "outer_iterations");
    c.boolean(r, "", "converged");
    c.boolean(r, "", "certified");
    c.trace(r, "");
    if (cmd == "solve-ee") {
      for (const char* part : {"continuous", "rounded"}) {
        const Json* p = c.field(r, "", part);
        if (!p) continue;
        const std::string ptr = std::string("/") + part;
        c.number(*p, ptr, "K");
        c.number(*p, ptr, "M");
        c.number(*p, ptr, "EE");
      }
      if (r.contains("rounded")) c.boolean(r["rounded"], "/rounded", "feasible");
      if (r.contains("oracle")) {
        c.integer(r["oracle"], "/oracle", "K");
        c.integer(r["oracle"], "/oracle", "M");
        c.number(r["oracle"], "/oracle", "EE");
        c.number(r["oracle"], "/oracle", "epsilon");
        c.vector(r["oracle"], "/oracle", "epsilon_trace");
      }
    }
  } else if (cmd == "certify-sos") {
    c.integer(r, "", "order");
    c.number(r, "", "r_sos", true);
    c.number(r, "", "r_mom", true);
    c.number(r, "", "gap", true);
    c.boolean(r, "", "verified");
    if (r.contains("certificate") && !r["certificate"].is_null()) c.certificate(r["certificate"], "/certificate");
  } else if (cmd == "example1") {
    c.number(r, "", "bound");
    c.vector(r, "", "point");
    c.boolean(r, "", "certified");
    c.string(r, "", "erratum");
  } else {
    errs.push_back("/command: unknown command \"" + cmd + "\"");
  }
  return errs;
}

}  // namespace fracpoly
