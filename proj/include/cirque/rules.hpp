#ifndef CIRQUE_RULES_HPP
#define CIRQUE_RULES_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cirque/errors.hpp"

namespace cirque {

/// A positive-weight interpolatory panel rule.
///
/// `panel_nodes` are positions relative to one panel of unit length and
/// `panel_weights` the matching weights for that unit panel (they sum to 1).
/// The composite error bound is `error_constant * (q - p) * h^order * max|f^(order)|`
/// with h the panel length.
struct RuleSpec {
  std::string name;
  int order = 0;
  double error_constant = 0.0;
  std::vector<double> panel_nodes;
  std::vector<double> panel_weights;

  /// True when the first and last panel nodes sit on the panel endpoints, so
  /// adjacent panels share a node in a composite expansion.
  bool shares_endpoints() const {
    return !panel_nodes.empty() && panel_nodes.front() == 0.0 &&
           panel_nodes.back() == 1.0;
  }

  /// Number of distinct nodes in a composite expansion over n panels.
  std::size_t composite_node_count(std::size_t n_panels) const {
    if (n_panels == 0) return 0;
    const std::size_t m = panel_nodes.size();
    return shares_endpoints() ? n_panels * (m - 1) + 1 : n_panels * m;
  }
};

inline const std::array<std::string_view, 3>& rule_names() {
  static const std::array<std::string_view, 3> names{"trapezium", "simpson",
                                                      "gauss_legendre_2"};
  return names;
}

/// Looks up one of the registered rules by name.
///
/// Simpson uses A = 16/180 with h the panel length. The sharp composite
/// constant for that convention is 1/2880, so the Simpson bound carries a
/// factor of 256 of slack. Trapezium and Gauss-Legendre use the sharp values.
inline RuleSpec get_rule(std::string_view name) {
  if (name == "trapezium") {
    return {"trapezium", 2, 1.0 / 12.0, {0.0, 1.0}, {0.5, 0.5}};
  }
  if (name == "simpson") {
    return {"simpson", 4, 16.0 / 180.0, {0.0, 0.5, 1.0},
            {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0}};
  }
  if (name == "gauss_legendre_2") {
    const double offset = 0.5 / std::sqrt(3.0);
    return {"gauss_legendre_2", 4, 1.0 / 4320.0, {0.5 - offset, 0.5 + offset},
            {0.5, 0.5}};
  }
  std::string known;
  for (auto n : rule_names()) {
    if (!known.empty()) known += ", ";
    known += n;
  }
  throw ConfigError("unknown rule '" + std::string(name) +
                    "' (known rules: " + known + ")");
}

/// Nodes and weights of a one-dimensional quadrature.
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Writes the composite expansion of `rule` over `n_panels` equal panels of
/// [p, q] into `nodes`/`weights` (cleared first). Shared panel endpoints are
/// merged. Node positions go through std::lerp so p and q are hit exactly.
inline void composite_expansion_into(const RuleSpec& rule, std::size_t n_panels,
                                     double p, double q,
                                     std::vector<double>& nodes,
                                     std::vector<double>& weights) {
  if (n_panels == 0) {
    throw ConfigError("composite expansion needs at least one subinterval");
  }
  if (!(p < q)) {
    throw ConfigError("composite expansion needs p < q");
  }
  nodes.clear();
  weights.clear();
  const std::size_t count = rule.composite_node_count(n_panels);
  nodes.reserve(count);
  weights.reserve(count);

  const double n = static_cast<double>(n_panels);
  const double panel = (q - p) / n;
  const bool shared = rule.shares_endpoints();
  const std::size_t m = rule.panel_nodes.size();

  for (std::size_t i = 0; i < n_panels; ++i) {
    const double base = static_cast<double>(i);
    for (std::size_t j = 0; j < m; ++j) {
      const double w = panel * rule.panel_weights[j];
      if (shared && j == 0 && i > 0) {
        weights.back() += w;
        continue;
      }
      nodes.push_back(std::lerp(p, q, (base + rule.panel_nodes[j]) / n));
      weights.push_back(w);
    }
  }
}

inline QuadratureGrid composite_expansion(const RuleSpec& rule,
                                          std::size_t n_panels, double p,
                                          double q) {
  QuadratureGrid grid;
  composite_expansion_into(rule, n_panels, p, q, grid.nodes, grid.weights);
  return grid;
}

}  // namespace cirque

#endif  // CIRQUE_RULES_HPP
