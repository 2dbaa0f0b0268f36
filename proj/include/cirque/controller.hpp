#ifndef CIRQUE_CONTROLLER_HPP
#define CIRQUE_CONTROLLER_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cirque/bounds.hpp"
#include "cirque/engine.hpp"
#include "cirque/errors.hpp"
#include "cirque/problem.hpp"
#include "cirque/rules.hpp"

namespace cirque {

enum class ErrorMode { relative, absolute };

inline const char* to_string(ErrorMode m) {
  return m == ErrorMode::relative ? "relative" : "absolute";
}

struct Target {
  enum class Kind { absolute, relative };
  Kind kind = Kind::relative;
  double value = 0.0;
};

inline const char* to_string(Target::Kind k) {
  return k == Target::Kind::relative ? "relative" : "absolute";
}

struct ControlConfig {
  /// Working tolerance on |I[g] - Qc[g]|. Unset: the relative target when one
  /// is given, otherwise 1e-6.
  std::optional<double> eps;
  double mu = kDefaultMu;
  std::string rule_name = "simpson";
  std::optional<Target> target;
  int max_refinements = 5;
  SamplingConfig sampling;
  /// Replace estimated M, D or derivative suprema.
  BoundOverrides overrides;
  bool compensated = false;
  unsigned threads = 0;

  double resolved_eps() const {
    if (eps) return *eps;
    if (target && target->kind == Target::Kind::relative) return target->value;
    return 1e-6;
  }
};

struct PlanSummary {
  std::size_t N1 = 0;
  std::size_t outer_nodes = 0;
  std::size_t total_nodes = 0;
  double h = 0.0;
  double h_star = 0.0;
  double max_k_star = 0.0;
};

/// One pass of the algorithm; `eta` is the factor the previous tolerance was
/// divided by (1 for the first pass).
struct RefinementStep {
  double eps = 0.0;
  double eta = 1.0;
  double qc_g = 0.0;
  double rel_estimate = 0.0;
  double abs_bound = 0.0;
  std::size_t N1 = 0;
  std::size_t nodes = 0;
};

struct CubatureReport {
  double value = 0.0;  // M * Qc[g]
  ErrorMode mode = ErrorMode::absolute;
  double abs_bound = 0.0;     // M * eps
  double rel_estimate = 0.0;  // eps / |Qc[g]|
  double qc_g = 0.0;
  double big_M = 1.0;
  Provenance big_M_provenance = Provenance::grid_estimated;
  double eps = 0.0;
  double mu = 0.0;
  double roundoff_bound = 0.0;

  double m1 = 0.0;
  double m2 = 0.0;
  double l1 = 0.0;
  double u1 = 0.0;

  std::string rule;
  int order = 0;
  double error_constant = 0.0;

  PlanSummary plan;
  BoundSet bounds;

  std::optional<Target> target;
  std::vector<RefinementStep> history;
  bool converged = true;
  std::vector<std::string> warnings;
};

/// Everything that does not depend on the tolerance: rule, normalization and
/// bounds. Refinement passes reuse it.
struct PreparedProblem {
  RuleSpec rule;
  NormalizedProblem np;
  BoundSet bounds;
  Provenance big_M_provenance = Provenance::grid_estimated;
};

inline PreparedProblem prepare(const Region& region, const Integrand& integrand,
                               const ControlConfig& cfg) {
  RuleSpec rule = get_rule(cfg.rule_name);
  NormalizedProblem np = normalize(region, integrand, cfg.sampling, cfg.overrides);
  BoundSet bounds = estimate_bounds(np, rule.order, cfg.sampling, cfg.overrides);
  const Provenance mp = np.injected().big_M ? Provenance::injected
                                            : Provenance::grid_estimated;
  return {std::move(rule), std::move(np), bounds, mp};
}

/// Single pass at tolerance eps on a prepared problem.
inline CubatureReport run_pass(const PreparedProblem& prep, double eps,
                               const ControlConfig& cfg) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ConfigError("tolerance eps must be positive and finite");
  }
  const NormalizedProblem& np = prep.np;
  const double h = select_stepsize(eps, cfg.mu, prep.rule, 1.0, prep.bounds);
  const GridPlan plan = plan_grid(h, np, prep.rule);

  EvaluateOptions opts;
  opts.mu = cfg.mu;
  opts.breadth = prep.bounds.breadth.value;
  opts.compensated = cfg.compensated;
  opts.threads = cfg.threads;
  const CubatureValue cv =
      evaluate([&np](double w, double z) { return np.g(w, z); }, plan, opts);

  CubatureReport r;
  r.qc_g = cv.value;
  r.big_M = np.big_M();
  r.big_M_provenance = prep.big_M_provenance;
  r.value = r.big_M * r.qc_g;
  r.eps = eps;
  r.mu = cfg.mu;
  r.abs_bound = r.big_M * eps;
  r.rel_estimate = r.qc_g != 0.0 ? eps / std::abs(r.qc_g)
                                 : std::numeric_limits<double>::infinity();
  r.mode = std::abs(r.value) > 1.0 ? ErrorMode::relative : ErrorMode::absolute;
  r.roundoff_bound = cv.roundoff_bound;
  r.m1 = np.m1();
  r.m2 = np.m2();
  r.l1 = np.l1();
  r.u1 = np.u1();
  r.rule = prep.rule.name;
  r.order = prep.rule.order;
  r.error_constant = prep.rule.error_constant;
  r.plan = {plan.N1, plan.rows(), cv.nodes_evaluated, plan.h, plan.h_star,
            plan.max_k_star()};
  r.bounds = prep.bounds;
  r.target = cfg.target;
  r.history.push_back({eps, 1.0, r.qc_g, r.rel_estimate, r.abs_bound, plan.N1,
                       cv.nodes_evaluated});
  if (r.qc_g == 0.0) {
    r.warnings.push_back("Qc[g] = 0: the relative error estimate is infinite");
  }
  return r;
}

/// normalize -> bounds -> stepsize -> plan -> evaluate, once, at
/// cfg.resolved_eps().
namespace detail {

inline void note_relative_on_small(CubatureReport& r) {
  if (r.target && r.target->kind == Target::Kind::relative &&
      std::abs(r.value) <= 1.0) {
    r.warnings.push_back(
        "|I| <= 1: absolute error control is favoured; abs_bound = " +
        format_g(r.abs_bound) + " is the governing estimate");
  }
}

}  // namespace detail

inline CubatureReport run_once(const Region& region, const Integrand& integrand,
                               const ControlConfig& cfg) {
  CubatureReport r = run_pass(prepare(region, integrand, cfg), cfg.resolved_eps(), cfg);
  detail::note_relative_on_small(r);
  return r;
}

/// Runs passes until the governing estimate meets cfg.target.
///
/// Relative targets divide eps by eta = ceil(rel_estimate / target) and rerun,
/// at most max_refinements times. Absolute targets need no rerun because M is
/// known before the first pass: eps is set to target / M less one part in 10^3
/// unless the given eps already satisfies M eps <= target.
inline CubatureReport refine_until(const Region& region,
                                   const Integrand& integrand,
                                   const ControlConfig& cfg) {
  if (!cfg.target) throw ConfigError("refine_until needs a target");
  if (!(cfg.target->value > 0.0)) throw ConfigError("target must be positive");
  if (cfg.max_refinements < 0) {
    throw ConfigError("max_refinements must be >= 0");
  }
  const Target target = *cfg.target;
  const PreparedProblem prep = prepare(region, integrand, cfg);

  if (target.kind == Target::Kind::absolute) {
    const double M = prep.np.big_M();
    double eps = cfg.resolved_eps();
    if (!cfg.eps || M * eps > target.value) {
      eps = target.value / M * (1.0 - 1e-3);
    }
    CubatureReport r = run_pass(prep, eps, cfg);
    r.converged = r.abs_bound <= target.value;
    return r;
  }

  CubatureReport r = run_pass(prep, cfg.resolved_eps(), cfg);
  int refinements = 0;
  while (r.rel_estimate > target.value && refinements < cfg.max_refinements) {
    if (r.qc_g == 0.0) break;
    const double eta = std::ceil(r.rel_estimate / target.value);
    const double eps = r.eps / eta;
    std::vector<RefinementStep> history = std::move(r.history);
    r = run_pass(prep, eps, cfg);
    r.history.back().eta = eta;
    history.push_back(r.history.back());
    r.history = std::move(history);
    ++refinements;
  }
  r.converged = r.rel_estimate <= target.value;
  if (!r.converged) {
    r.warnings.push_back("relative target not met after " +
                         std::to_string(refinements) + " refinement(s)");
  }
  detail::note_relative_on_small(r);
  return r;
}

}  // namespace cirque

#endif  // CIRQUE_CONTROLLER_HPP
