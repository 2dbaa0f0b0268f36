#ifndef CIRQUE_ENGINE_HPP
#define CIRQUE_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "cirque/bounds.hpp"
#include "cirque/errors.hpp"
#include "cirque/problem.hpp"
#include "cirque/rules.hpp"

namespace cirque {

/// Stepsizes and node counts for one composite cubature.
///
/// Rows are indexed by the composite outer nodes x_i (every node of the outer
/// expansion, not every panel); row i integrates over
/// [row_lower[i], row_upper[i]] with row_counts[i] panels of length k_star[i].
/// Row nodes are expanded on demand by row_grid().
struct GridPlan {
  RuleSpec rule;
  double a = 0.0;
  double b = 1.0;
  double h = 0.0;
  double h_star = 0.0;
  std::size_t N1 = 0;
  std::vector<double> outer_nodes;
  std::vector<double> outer_weights;
  std::vector<double> row_lower;
  std::vector<double> row_upper;
  std::vector<std::size_t> row_counts;
  std::vector<double> k_star;

  std::size_t rows() const { return outer_nodes.size(); }

  double breadth(std::size_t i) const { return row_upper[i] - row_lower[i]; }

  double max_breadth() const {
    double d = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) d = std::max(d, breadth(i));
    return d;
  }

  double max_k_star() const {
    return k_star.empty() ? 0.0 : *std::max_element(k_star.begin(), k_star.end());
  }

  std::size_t row_node_count(std::size_t i) const {
    return rule.composite_node_count(row_counts[i]);
  }

  std::size_t total_nodes() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < rows(); ++i) n += row_node_count(i);
    return n;
  }

  /// Nodes and weights of row i; empty for rows with no panels.
  QuadratureGrid row_grid(std::size_t i) const {
    if (row_counts[i] == 0) return {};
    return composite_expansion(rule, row_counts[i], row_lower[i], row_upper[i]);
  }
};

struct CubatureValue {
  double value = 0.0;
  std::size_t nodes_evaluated = 0;
  double roundoff_bound = 0.0;
};

struct EvaluateOptions {
  double mu = kDefaultMu;
  /// D for the roundoff bound; defaults to the plan's largest row breadth.
  std::optional<double> breadth;
  /// Neumaier-compensated sums instead of plain left-to-right sums.
  bool compensated = false;
  /// Worker threads for row quadratures; 0 picks hardware concurrency.
  unsigned threads = 0;
};

/// Roundoff bound 4 (b - a) D mu of a positive-weight cubature of a function
/// bounded by 1.
inline double roundoff_bound(double extent, double breadth, double mu) {
  return 4.0 * extent * breadth * mu;
}

/// Stepsize h = ((eps - 4 (b-a) D mu) / (A(r) (b-a) D (Sx + Sy)))^(1/r).
///
/// A zero breadth or zero derivative sum (nothing to resolve) gives h = extent.
inline double select_stepsize(double eps, double mu, const RuleSpec& rule,
                              double extent, const BoundSet& bounds) {
  if (!(extent > 0.0)) throw ConfigError("extent must be positive");
  const double D = bounds.breadth.value;
  const double floor = roundoff_bound(extent, D, mu);
  if (!(eps > floor)) throw RoundoffFloorError(eps, floor);

  const double denom =
      rule.error_constant * extent * D * bounds.derivative_sum();
  if (!(denom > 0.0)) return extent;
  const double h = std::pow((eps - floor) / denom, 1.0 / rule.order);
  if (!std::isfinite(h)) return extent;
  return h;
}

namespace detail {

inline constexpr double kMaxPanels = 1e9;

inline std::size_t panel_count(double length, double h, const char* what) {
  const double n = std::ceil(length / h);
  if (!(n <= kMaxPanels)) {
    throw NumericalError(std::string("stepsize ") + format_g(h) +
                         " needs more than 1e9 panels along " + what);
  }
  return static_cast<std::size_t>(n);
}

template <class L, class U>
void fill_rows(GridPlan& plan, L&& lower, U&& upper) {
  const std::size_t n = plan.outer_nodes.size();
  plan.row_lower.resize(n);
  plan.row_upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = plan.outer_nodes[i];
    const double lo = lower(x);
    const double hi = upper(x);
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw NumericalError("non-finite row limits at outer node " +
                           format_g(x, 17));
    }
    if (lo > hi) {
      throw NumericalError("crossing limits unsupported: lower > upper at " +
                           format_g(x, 17));
    }
    plan.row_lower[i] = lo;
    plan.row_upper[i] = hi;
  }
}

}  // namespace detail

/// Plans a grid on a <= x <= b, lower(x) <= y <= upper(x) for stepsize h,
/// using k = h on every row: N1 = ceil((b-a)/h), h* = (b-a)/N1,
/// N2,i = ceil((u(x_i) - l(x_i))/h), k*_i = (u(x_i) - l(x_i))/N2,i.
/// Rows of zero breadth get N2,i = 0 and k*_i = 0.
template <class L, class U>
GridPlan plan_grid(double h, double a, double b, L&& lower, U&& upper,
                   const RuleSpec& rule) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ConfigError("stepsize must be positive and finite");
  }
  if (!(a < b)) throw ConfigError("plan_grid needs a < b");
  GridPlan plan;
  plan.rule = rule;
  plan.a = a;
  plan.b = b;
  plan.h = h;
  plan.N1 = detail::panel_count(b - a, h, "the outer axis");
  plan.h_star = (b - a) / static_cast<double>(plan.N1);
  composite_expansion_into(rule, plan.N1, a, b, plan.outer_nodes,
                           plan.outer_weights);
  detail::fill_rows(plan, lower, upper);

  const std::size_t n = plan.rows();
  plan.row_counts.resize(n);
  plan.k_star.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double breadth = plan.breadth(i);
    if (breadth > 0.0) {
      plan.row_counts[i] = detail::panel_count(breadth, h, "a row");
      plan.k_star[i] = breadth / static_cast<double>(plan.row_counts[i]);
    } else {
      plan.row_counts[i] = 0;
      plan.k_star[i] = 0.0;
    }
  }
  return plan;
}

/// Grid on the normalized region of `np` (a = 0, b = 1, l~, u~).
inline GridPlan plan_grid(double h, const NormalizedProblem& np,
                          const RuleSpec& rule) {
  return plan_grid(
      h, 0.0, 1.0, [&np](double w) { return np.l_tilde(w); },
      [&np](double w) { return np.u_tilde(w); }, rule);
}

/// Same construction with explicit panel counts (N1 and one N2,i per outer
/// node), e.g. to replay a normalized plan on the original region.
template <class L, class U>
GridPlan plan_from_counts(double a, double b, L&& lower, U&& upper,
                          const RuleSpec& rule, std::size_t n1,
                          std::span<const std::size_t> row_counts) {
  if (n1 == 0) throw ConfigError("N1 must be positive");
  GridPlan plan;
  plan.rule = rule;
  plan.a = a;
  plan.b = b;
  plan.N1 = n1;
  plan.h_star = (b - a) / static_cast<double>(n1);
  plan.h = plan.h_star;
  composite_expansion_into(rule, n1, a, b, plan.outer_nodes, plan.outer_weights);
  if (row_counts.size() != plan.rows()) {
    throw ConfigError("row count list does not match the outer node count");
  }
  detail::fill_rows(plan, lower, upper);
  plan.row_counts.assign(row_counts.begin(), row_counts.end());
  plan.k_star.resize(plan.rows());
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    const double breadth = plan.breadth(i);
    if (breadth > 0.0 && plan.row_counts[i] == 0) {
      throw ConfigError("row with positive breadth needs at least one panel");
    }
    plan.k_star[i] = (breadth > 0.0 && plan.row_counts[i] > 0)
                         ? breadth / static_cast<double>(plan.row_counts[i])
                         : 0.0;
    if (breadth <= 0.0) plan.row_counts[i] = 0;
  }
  return plan;
}

namespace detail {

struct Accumulator {
  bool compensated = false;
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    if (!compensated) {
      sum += v;
      return;
    }
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }

  double total() const { return sum + carry; }
};

}  // namespace detail

/// Composite cubature of f over `plan`: a composite quadrature along every
/// row, then one across the row results. Summation order is fixed (ascending
/// node index within a row, ascending row index across rows), so the value
/// does not depend on the thread count.
template <class F>
CubatureValue evaluate(F&& f, const GridPlan& plan,
                       const EvaluateOptions& opts = {}) {
  const std::size_t n = plan.rows();
  std::vector<double> row_values(n, 0.0);

  auto run_rows = [&](std::size_t begin, std::size_t end) {
    std::vector<double> nodes;
    std::vector<double> weights;
    for (std::size_t i = begin; i < end; ++i) {
      if (plan.row_counts[i] == 0) continue;
      composite_expansion_into(plan.rule, plan.row_counts[i], plan.row_lower[i],
                               plan.row_upper[i], nodes, weights);
      const double x = plan.outer_nodes[i];
      detail::Accumulator acc{opts.compensated};
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double v = f(x, nodes[j]);
        if (!std::isfinite(v)) {
          throw NumericalError("non-finite integrand value at node (" +
                               detail::format_g(x, 17) + ", " +
                               detail::format_g(nodes[j], 17) + ")");
        }
        acc.add(weights[j] * v);
      }
      row_values[i] = acc.total();
    }
  };

  unsigned threads = opts.threads ? opts.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    run_rows(0, n);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = n * t / threads;
      const std::size_t end = n * (t + 1) / threads;
      pool.emplace_back([&, t, begin, end] {
        try {
          run_rows(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    // Chunks are ordered, so the first failing chunk holds the lowest row.
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  detail::Accumulator outer{opts.compensated};
  for (std::size_t i = 0; i < n; ++i) outer.add(plan.outer_weights[i] * row_values[i]);

  CubatureValue out;
  out.value = outer.total();
  out.nodes_evaluated = plan.total_nodes();
  out.roundoff_bound = roundoff_bound(plan.b - plan.a,
                                      opts.breadth.value_or(plan.max_breadth()),
                                      opts.mu);
  return out;
}

/// Sum of the scaled weights k*_i v_j,i of row i; equals the row breadth for a
/// positive-weight rule.
inline double row_weight_sum(const GridPlan& plan, std::size_t i) {
  const QuadratureGrid grid = plan.row_grid(i);
  double s = 0.0;
  for (double w : grid.weights) s += w;
  return s;
}

/// Total coefficient mass sum |C_j,i| = sum_i |c_i| sum_j |k_i v_j,i|.
inline double coefficient_mass(const GridPlan& plan) {
  double total = 0.0;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    if (plan.row_counts[i] == 0) continue;
    const QuadratureGrid grid = plan.row_grid(i);
    double row = 0.0;
    for (double w : grid.weights) row += std::abs(w);
    total += std::abs(plan.outer_weights[i]) * row;
  }
  return total;
}

}  // namespace cirque

#endif  // CIRQUE_ENGINE_HPP
