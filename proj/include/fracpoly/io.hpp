#pragma once

// Structured problem files and their diagnostics.
//
// Polynomials are stored as {"n": 2, "terms": [{"exp": [1, 0], "c": 2.5}, ...]}.
// A problem file wraps them:
//   {"n": 2, "sense": "min" | "max",
//    "objective": <poly> | {"numerator": <poly>, "denominator": <poly>},
//    "constraints": [<poly>, ...], "options": {...}}
// Every schema failure names the offending JSON pointer and the line it sits on.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fracpoly/dinkelbach.hpp"
#include "fracpoly/lasserre.hpp"
#include "fracpoly/polynomial.hpp"

namespace fracpoly {

using Json = nlohmann::json;

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
public:
  SchemaError(const std::string& source, std::size_t line, std::string pointer, const std::string& msg)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + (pointer.empty() ? "" : pointer + ": ") + msg),
        pointer_(std::move(pointer)),
        line_(line) {}

  const std::string& pointer() const { return pointer_; }
  std::size_t line() const { return line_; }

private:
  std::string pointer_;
  std::size_t line_;
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path);
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

namespace detail {

/// Character iterator that reports how far the parser has read.
class CountingIterator {
public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator() = default;
  CountingIterator(const char* p, std::size_t* consumed) : p_(p), consumed_(consumed) {}

  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    ++p_;
    if (consumed_) ++*consumed_;
    return *this;
  }
  CountingIterator operator++(int) {
    auto t = *this;
    ++*this;
    return t;
  }
  friend bool operator==(const CountingIterator& a, const CountingIterator& b) { return a.p_ == b.p_; }
  friend bool operator!=(const CountingIterator& a, const CountingIterator& b) { return a.p_ != b.p_; }

private:
  const char* p_ = nullptr;
  std::size_t* consumed_ = nullptr;
};

inline std::string escape_pointer_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

/// Records the line on which each value starts, keyed by JSON pointer.
class LineRecorder : public nlohmann::json_sax<Json> {
public:
  LineRecorder(const std::string& text, const std::size_t* consumed) : text_(text), consumed_(consumed) {}

  std::map<std::string, std::size_t> lines;

  bool null() override { return scalar(1); }
  bool boolean(bool) override { return scalar(1); }
  // The lexer has already looked one character past the end of a number.
  bool number_integer(number_integer_t) override { return scalar(2); }
  bool number_unsigned(number_unsigned_t) override { return scalar(2); }
  bool number_float(number_float_t, const string_t&) override { return scalar(2); }
  bool string(string_t&) override { return scalar(1); }
  bool binary(binary_t&) override { return scalar(1); }

  bool start_object(std::size_t) override {
    open();
    frames_.push_back({true, 0, {}});
    return true;
  }
  bool key(string_t& k) override {
    frames_.back().key = k;
    return true;
  }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override {
    open();
    frames_.push_back({false, 0, {}});
    return true;
  }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

private:
  struct Frame {
    bool object;
    std::size_t index;
    std::string key;
  };

  std::string current_pointer() const {
    std::string p;
    for (const auto& f : frames_) p += "/" + (f.object ? escape_pointer_token(f.key) : std::to_string(f.index));
    return p;
  }

  std::size_t line_at(std::size_t back) const {
    const std::size_t end = *consumed_ >= back ? *consumed_ - back : 0;
    std::size_t line = 1;
    for (std::size_t i = 0; i < end && i < text_.size(); ++i)
      if (text_[i] == '\n') ++line;
    return line;
  }

  void open() { lines.emplace(current_pointer(), line_at(1)); }

  bool scalar(std::size_t back) {
    lines.emplace(current_pointer(), line_at(back));
    advance();
    return true;
  }

  bool close() {
    frames_.pop_back();
    advance();
    return true;
  }

  void advance() {
    if (!frames_.empty() && !frames_.back().object) ++frames_.back().index;
  }

  const std::string& text_;
  const std::size_t* consumed_;
  std::vector<Frame> frames_;
};

}  // namespace detail

/// A parsed document that remembers where each value came from.
struct LocatedJson {
  Json doc;
  std::string source;
  std::map<std::string, std::size_t> lines;

  /// Line of the value at pointer, or of its nearest recorded ancestor.
  std::size_t line_of(std::string pointer) const {
    while (true) {
      if (auto it = lines.find(pointer); it != lines.end()) return it->second;
      const auto cut = pointer.rfind('/');
      if (cut == std::string::npos) return 1;
      pointer.erase(cut);
    }
  }

  [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
    throw SchemaError(source, line_of(pointer), pointer, msg);
  }
};

inline LocatedJson parse_located(const std::string& text, const std::string& source) {
  LocatedJson out;
  out.source = source;
  try {
    out.doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw SchemaError(source, line, "", std::string("malformed JSON: ") + e.what());
  }
  std::size_t consumed = 0;
  detail::LineRecorder rec(text, &consumed);
  const char* b = text.data();
  Json::sax_parse(detail::CountingIterator(b, &consumed), detail::CountingIterator(b + text.size(), nullptr), &rec);
  out.lines = std::move(rec.lines);
  return out;
}

inline LocatedJson load_located(const std::string& path) { return parse_located(read_text_file(path), path); }

// ---------------------------------------------------------------------------
// Polynomials

inline Json polynomial_to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [a, c] : p.terms()) terms.push_back({{"exp", a.exponents()}, {"c", c}});
  return {{"n", p.dim()}, {"terms", std::move(terms)}};
}

namespace detail {

inline const Json& require(const LocatedJson& lj, const Json& obj, const std::string& ptr, const char* key) {
  if (!obj.is_object()) lj.fail(ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) lj.fail(ptr, std::string("missing field \"") + key + "\"");
  return *it;
}

inline double require_number(const LocatedJson& lj, const Json& v, const std::string& ptr) {
  if (!v.is_number()) lj.fail(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) lj.fail(ptr, "number is not finite");
  return x;
}

inline std::size_t require_dimension(const LocatedJson& lj, const Json& v, const std::string& ptr) {
  if (!v.is_number_integer() || v.get<long long>() < 1) lj.fail(ptr, "expected a positive integer dimension");
  return v.get<std::size_t>();
}

}  // namespace detail

/// Parses the polynomial at ptr; duplicate exponents are summed.
inline Polynomial parse_polynomial(const LocatedJson& lj, const Json& v, const std::string& ptr,
                                   std::optional<std::size_t> expected_n = std::nullopt) {
  const std::size_t n = detail::require_dimension(lj, detail::require(lj, v, ptr, "n"), ptr + "/n");
  if (expected_n && *expected_n != n)
    lj.fail(ptr + "/n", "dimension " + std::to_string(n) + " differs from problem dimension " + std::to_string(*expected_n));
  const Json& terms = detail::require(lj, v, ptr, "terms");
  if (!terms.is_array()) lj.fail(ptr + "/terms", "expected an array of terms");
  Polynomial p(n);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string tp = ptr + "/terms/" + std::to_string(k);
    const Json& t = terms[k];
    const Json& e = detail::require(lj, t, tp, "exp");
    if (!e.is_array()) lj.fail(tp + "/exp", "expected an exponent array");
    if (e.size() != n)
      lj.fail(tp + "/exp", "exponent array has length " + std::to_string(e.size()) + ", expected " + std::to_string(n));
    MultiIndex a(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string ep = tp + "/exp/" + std::to_string(i);
      if (!e[i].is_number_integer()) lj.fail(ep, "exponent must be an integer");
      const long long ei = e[i].get<long long>();
      if (ei < 0) lj.fail(ep, "negative exponent");
      if (ei > 1000) lj.fail(ep, "exponent too large");
      a[i] = static_cast<unsigned>(ei);
    }
    p.add_term(a, detail::require_number(lj, detail::require(lj, t, tp, "c"), tp + "/c"));
  }
  return p;
}

/// Convenience overload for standalone text.
inline Polynomial parse_polynomial(const std::string& text, const std::string& source = "<input>") {
  const LocatedJson lj = parse_located(text, source);
  return parse_polynomial(lj, lj.doc, "");
}

inline std::string serialize_polynomial(const Polynomial& p) { return polynomial_to_json(p).dump(); }

// ---------------------------------------------------------------------------
// Problem files

struct FileOptions {
  std::optional<unsigned> order;
  std::optional<double> eps;
  std::optional<double> feas_tol;
  std::optional<double> gap_tol;
  std::optional<int> max_outer;
};

struct ProblemFile {
  std::size_t n = 0;
  Sense sense = Sense::Minimize;
  std::variant<PolyProblem, FractionalProblem> problem;
  FileOptions options;

  bool is_fractional() const { return std::holds_alternative<FractionalProblem>(problem); }
};

inline ProblemFile parse_problem(const LocatedJson& lj) {
  const Json& doc = lj.doc;
  if (!doc.is_object()) lj.fail("", "problem file must be a JSON object");
  for (const auto& [k, v] : doc.items())
    if (k != "n" && k != "sense" && k != "objective" && k != "constraints" && k != "options")
      lj.fail("/" + detail::escape_pointer_token(k), "unknown field \"" + k + "\"");

  ProblemFile pf;
  pf.n = detail::require_dimension(lj, detail::require(lj, doc, "", "n"), "/n");
  const Json& sense = detail::require(lj, doc, "", "sense");
  if (sense == "min") pf.sense = Sense::Minimize;
  else if (sense == "max") pf.sense = Sense::Maximize;
  else lj.fail("/sense", "sense must be \"min\" or \"max\"");

  std::vector<Polynomial> cons;
  if (auto it = doc.find("constraints"); it != doc.end()) {
    if (!it->is_array()) lj.fail("/constraints", "expected an array of polynomials");
    for (std::size_t i = 0; i < it->size(); ++i)
      cons.push_back(parse_polynomial(lj, (*it)[i], "/constraints/" + std::to_string(i), pf.n));
  }

  const Json& obj = detail::require(lj, doc, "", "objective");
  if (obj.is_object() && obj.contains("numerator")) {
    if (pf.sense != Sense::Maximize) lj.fail("/sense", "fractional objectives are maximized; use \"max\"");
    Polynomial f = parse_polynomial(lj, obj["numerator"], "/objective/numerator", pf.n);
    Polynomial g = parse_polynomial(lj, detail::require(lj, obj, "/objective", "denominator"), "/objective/denominator", pf.n);
    if (g.is_zero()) lj.fail("/objective/denominator", "denominator is identically zero");
    pf.problem = FractionalProblem{std::move(f), std::move(g), std::move(cons)};
  } else {
    pf.problem = PolyProblem{pf.sense, parse_polynomial(lj, obj, "/objective", pf.n), std::move(cons)};
  }

  if (auto it = doc.find("options"); it != doc.end()) {
    if (!it->is_object()) lj.fail("/options", "expected an object");
    for (const auto& [k, v] : it->items()) {
      const std::string p = "/options/" + detail::escape_pointer_token(k);
      if (k == "order") {
        if (!v.is_number_integer() || v.get<long long>() < 1) lj.fail(p, "order must be a positive integer");
        pf.options.order = v.get<unsigned>();
      } else if (k == "max_outer") {
        if (!v.is_number_integer() || v.get<long long>() < 1) lj.fail(p, "max_outer must be a positive integer");
        pf.options.max_outer = v.get<int>();
      } else if (k == "eps" || k == "feas_tol" || k == "gap_tol") {
        const double x = detail::require_number(lj, v, p);
        if (!(x > 0)) lj.fail(p, k + " must be positive");
        (k == "eps" ? pf.options.eps : k == "feas_tol" ? pf.options.feas_tol : pf.options.gap_tol) = x;
      } else {
        lj.fail(p, "unknown option \"" + k + "\"");
      }
    }
  }
  return pf;
}

inline ProblemFile load_problem(const std::string& path) { return parse_problem(load_located(path)); }

}  // namespace fracpoly
