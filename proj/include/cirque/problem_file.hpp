#ifndef CIRQUE_PROBLEM_FILE_HPP
#define CIRQUE_PROBLEM_FILE_HPP

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "cirque/bounds.hpp"
#include "cirque/errors.hpp"
#include "cirque/expr.hpp"
#include "cirque/problem.hpp"

// Problem files are line-oriented `key = value` text. `#` starts a comment,
// `[bounds]` opens the bounds-override section:
//
//   a      = 1
//   b      = 2
//   l_expr = x^2/5
//   u_expr = x^3/5
//   g_expr = exp(4*x*y)
//
//   [bounds]
//   M           = 1.4*exp(12.8)
//   D           = 4/7
//   deriv_sup_x = 6.4^4
//   deriv_sup_y = 11.2^4
//
// Numeric fields accept constant expressions. A bounds file has the same
// syntax; its keys may appear with or without the [bounds] header.

namespace cirque {

/// Problem definition as text, before parsing the expressions.
struct ProblemText {
  std::string a;
  std::string b;
  std::string l_expr;
  std::string u_expr;
  std::string g_expr;
  BoundOverrides bounds;
};

struct Problem {
  Region region;
  Integrand integrand;
  expr::Expression lower;
  expr::Expression upper;
  expr::Expression g;
};

namespace detail {

using Sections = std::map<std::string, std::map<std::string, std::string>>;

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline Sections parse_sections(std::string_view text) {
  Sections out;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": malformed section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    if (!out[section].emplace(key, value).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                        key + "'");
    }
  }
  return out;
}

}  // namespace detail

/// Value of a constant expression such as "18/26" or "1.4*exp(12.8)".
inline double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  try {
    v = expr::parse(text)();
  } catch (const ParseError& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
  if (!std::isfinite(v)) {
    throw ConfigError(std::string(what) + " is not a finite number");
  }
  return v;
}

namespace detail {

inline void read_bound_keys(const std::map<std::string, std::string>& kv,
                            BoundOverrides& out, const std::string& where) {
  for (const auto& [key, value] : kv) {
    const std::string what = where + key;
    if (key == "M") {
      out.big_M = parse_number(value, what);
    } else if (key == "D") {
      out.breadth = parse_number(value, what);
    } else if (key == "deriv_sup_x") {
      out.deriv_sup_x = parse_number(value, what);
    } else if (key == "deriv_sup_y") {
      out.deriv_sup_y = parse_number(value, what);
    } else {
      throw ConfigError("unknown bounds key '" + key +
                        "' (expected M, D, deriv_sup_x, deriv_sup_y)");
    }
  }
}

}  // namespace detail

/// Parses a bounds-override document.
inline BoundOverrides parse_bounds_text(std::string_view text) {
  const detail::Sections sections = detail::parse_sections(text);
  BoundOverrides out;
  for (const auto& [name, kv] : sections) {
    if (name != "" && name != "bounds") {
      throw ConfigError("unknown section [" + name + "] in bounds file");
    }
    detail::read_bound_keys(kv, out, "bounds.");
  }
  return out;
}

/// Parses a problem document.
inline ProblemText parse_problem_text(std::string_view text) {
  const detail::Sections sections = detail::parse_sections(text);
  ProblemText out;
  for (const auto& [name, kv] : sections) {
    if (name == "bounds") {
      detail::read_bound_keys(kv, out.bounds, "bounds.");
      continue;
    }
    if (!name.empty()) {
      throw ConfigError("unknown section [" + name + "] in problem file");
    }
    for (const auto& [key, value] : kv) {
      if (key == "a") {
        out.a = value;
      } else if (key == "b") {
        out.b = value;
      } else if (key == "l_expr") {
        out.l_expr = value;
      } else if (key == "u_expr") {
        out.u_expr = value;
      } else if (key == "g_expr") {
        out.g_expr = value;
      } else {
        throw ConfigError("unknown problem key '" + key + "'");
      }
    }
  }
  for (auto [field, name] : {std::pair{&out.a, "a"}, std::pair{&out.b, "b"},
                             std::pair{&out.l_expr, "l_expr"},
                             std::pair{&out.u_expr, "u_expr"},
                             std::pair{&out.g_expr, "g_expr"}}) {
    if (field->empty()) {
      throw ConfigError(std::string("problem file is missing key '") + name + "'");
    }
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses the expressions of `text` into an integrable problem. The limit
/// expressions may use x only; the integrand x and y.
inline Problem build_problem(const ProblemText& text) {
  Problem p;
  auto parse_field = [](const std::string& src, std::vector<std::string> vars,
                        const char* field) {
    try {
      return expr::parse(src, std::move(vars));
    } catch (const ParseError& e) {
      throw ParseError(std::string(field) + ": " + e.message(), e.position());
    }
  };
  p.lower = parse_field(text.l_expr, {"x"}, "l_expr");
  p.upper = parse_field(text.u_expr, {"x"}, "u_expr");
  p.g = parse_field(text.g_expr, {"x", "y"}, "g_expr");
  p.region.a = parse_number(text.a, "a");
  p.region.b = parse_number(text.b, "b");
  p.region.lower = [e = p.lower](double x) { return e(x); };
  p.region.upper = [e = p.upper](double x) { return e(x); };
  p.integrand.eval = [e = p.g](double x, double y) { return e(x, y); };
  p.integrand.analytic_bounds = text.bounds;
  return p;
}

}  // namespace cirque

#endif  // CIRQUE_PROBLEM_FILE_HPP
