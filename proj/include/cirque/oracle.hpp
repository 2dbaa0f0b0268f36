#ifndef CIRQUE_ORACLE_HPP
#define CIRQUE_ORACLE_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "cirque/errors.hpp"
#include "cirque/problem.hpp"
#include "cirque/rules.hpp"

// Reference integrator for tests and for generating expected values.
//
// Every row gets the same number of 2-point Gauss-Legendre panels as the outer
// axis, independent of the row breadth, so it shares no planning code with the
// engine. Sums run in long double. The panel count doubles until two
// successive Richardson-extrapolated values (error ~ N^-4 for composite
// Gauss-Legendre 2) agree.

namespace cirque {

struct OracleOptions {
  std::size_t initial_panels = 8;
  int max_doublings = 8;
};

struct OracleResult {
  double value = 0.0;
  /// Raw (panels per axis, value) pairs, panels strictly increasing.
  std::vector<std::pair<std::size_t, double>> resolution_sequence;
  std::vector<double> extrapolated;
  bool converged = false;
};

namespace detail {

struct OracleLevel {
  long double value = 0.0L;
  long double mass = 0.0L;
};

template <class L, class U, class G>
OracleLevel oracle_level(const RuleSpec& rule, std::size_t panels, double a,
                         double b, L& lower, U& upper, G& f) {
  const QuadratureGrid outer = composite_expansion(rule, panels, a, b);
  QuadratureGrid inner;
  OracleLevel level;
  for (std::size_t i = 0; i < outer.nodes.size(); ++i) {
    const double x = outer.nodes[i];
    const double lo = lower(x);
    const double hi = upper(x);
    if (!(lo <= hi)) {
      throw NumericalError("oracle: lower limit exceeds upper limit at x = " +
                           format_g(x, 17));
    }
    if (lo == hi) continue;
    composite_expansion_into(rule, panels, lo, hi, inner.nodes, inner.weights);
    long double row = 0.0L;
    long double row_mass = 0.0L;
    for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
      const double v = f(x, inner.nodes[j]);
      if (!std::isfinite(v)) {
        throw NumericalError("oracle: non-finite integrand at (" +
                             format_g(x, 17) + ", " +
                             format_g(inner.nodes[j], 17) + ")");
      }
      row += static_cast<long double>(inner.weights[j]) * v;
      row_mass += static_cast<long double>(inner.weights[j]) * std::fabs(v);
    }
    level.value += static_cast<long double>(outer.weights[i]) * row;
    level.mass += static_cast<long double>(outer.weights[i]) * row_mass;
  }
  return level;
}

}  // namespace detail

/// Reference value of the integral of f over a <= x <= b,
/// lower(x) <= y <= upper(x), to relative accuracy rel_target (>= 1e-13).
template <class L, class U, class G>
OracleResult reference_integral(double a, double b, L lower, U upper, G f,
                                double rel_target, const OracleOptions& opts = {}) {
  if (!(rel_target >= 1e-13)) {
    throw ConfigError("oracle rel_target must be >= 1e-13");
  }
  if (!(a < b)) throw ConfigError("oracle needs a < b");
  const RuleSpec rule = get_rule("gauss_legendre_2");

  OracleResult out;
  std::size_t panels = opts.initial_panels == 0 ? 1 : opts.initial_panels;
  long double previous_raw = 0.0L;
  long double previous_extrapolated = 0.0L;
  for (int level = 0; level <= opts.max_doublings; ++level, panels *= 2) {
    const detail::OracleLevel q =
        detail::oracle_level(rule, panels, a, b, lower, upper, f);
    out.resolution_sequence.emplace_back(panels, static_cast<double>(q.value));
    if (level >= 1) {
      const long double extrapolated = (16.0L * q.value - previous_raw) / 15.0L;
      out.extrapolated.push_back(static_cast<double>(extrapolated));
      if (level >= 2) {
        const long double diff = std::fabs(extrapolated - previous_extrapolated);
        const long double roundoff =
            64.0L * std::numeric_limits<double>::epsilon() * q.mass;
        if (diff <= rel_target * std::fabs(extrapolated) || diff <= roundoff) {
          out.value = static_cast<double>(extrapolated);
          out.converged = true;
          return out;
        }
      }
      previous_extrapolated = extrapolated;
    }
    previous_raw = q.value;
  }
  throw NumericalError("oracle did not converge to relative accuracy " +
                       detail::format_g(rel_target) + " after " +
                       std::to_string(opts.max_doublings) + " doublings");
}

inline OracleResult reference_integral(const Region& region,
                                       const Integrand& integrand,
                                       double rel_target,
                                       const OracleOptions& opts = {}) {
  return reference_integral(region.a, region.b, region.lower, region.upper,
                            integrand.eval, rel_target, opts);
}

}  // namespace cirque

#endif  // CIRQUE_ORACLE_HPP
