#ifndef CIRQUE_PROBLEM_HPP
#define CIRQUE_PROBLEM_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "cirque/bounds.hpp"
#include "cirque/errors.hpp"

namespace cirque {

/// Integration domain a <= x <= b, lower(x) <= y <= upper(x).
struct Region {
  double a = 0.0;
  double b = 1.0;
  std::function<double(double)> lower;
  std::function<double(double)> upper;
};

struct Integrand {
  std::function<double(double, double)> eval;
  /// Suprema known analytically; used verbatim instead of grid estimates.
  BoundOverrides analytic_bounds;
};

namespace detail {

struct NormalizedState {
  Region region;
  Integrand integrand;
  BoundOverrides injected;
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 0.0;
  double u1 = 1.0;
  double big_M = 1.0;
  double g_scale = 1.0;
};

}  // namespace detail

/// The problem after the affine maps x = m1 w + a, y = m2 z + l1 and scaling
/// by M, so that the region lies in the unit square and |g| <= 1.
///
/// g is evaluated by composition with the original integrand (nothing is
/// tabulated). Copies share the immutable state.
class NormalizedProblem {
 public:
  double a() const { return s_->region.a; }
  double b() const { return s_->region.b; }
  double m1() const { return s_->m1; }
  double m2() const { return s_->m2; }
  double l1() const { return s_->l1; }
  double u1() const { return s_->u1; }
  double big_M() const { return s_->big_M; }
  const BoundOverrides& injected() const { return s_->injected; }
  const Region& region() const { return s_->region; }
  const Integrand& integrand() const { return s_->integrand; }

  double x_of(double w) const { return std::lerp(s_->region.a, s_->region.b, w); }
  double y_of(double z) const { return std::lerp(s_->l1, s_->u1, z); }

  /// G~(w, z) m1 m2, the integrand of the transformed (unscaled) integral.
  double scaled_G(double w, double z) const {
    return s_->integrand.eval(x_of(w), y_of(z)) * s_->m1 * s_->m2;
  }

  double g(double w, double z) const {
    return s_->integrand.eval(x_of(w), y_of(z)) * s_->g_scale;
  }

  double l_tilde(double w) const {
    return (s_->region.lower(x_of(w)) - s_->l1) / s_->m2;
  }
  double u_tilde(double w) const {
    return (s_->region.upper(x_of(w)) - s_->l1) / s_->m2;
  }

  /// Limits of the normalized region; the functions keep the problem alive.
  UnitRegion unit_region() const {
    auto self = s_;
    return {[self](double w) {
              return (self->region.lower(std::lerp(self->region.a, self->region.b, w)) -
                      self->l1) / self->m2;
            },
            [self](double w) {
              return (self->region.upper(std::lerp(self->region.a, self->region.b, w)) -
                      self->l1) / self->m2;
            }};
  }

 private:
  using State = detail::NormalizedState;
  explicit NormalizedProblem(std::shared_ptr<const State> s) : s_(std::move(s)) {}

  friend NormalizedProblem normalize(const Region&, const Integrand&,
                                     const SamplingConfig&,
                                     const BoundOverrides&);

  std::shared_ptr<const State> s_;
};

/// g(w, z) = G~(w, z) m1 m2 / M.
inline double eval_g(const NormalizedProblem& np, double w, double z) {
  return np.g(w, z);
}

/// Applies the affine normalization and the scaling by
/// M = max{1, max over the region of |G~ m1 m2|}.
///
/// l1 and u1 are the grid-refined minimum of l(x) and maximum of u(x) on
/// [a, b]; M is the grid-refined maximum without safety factor unless it is
/// supplied in `overrides` or the integrand's analytic bounds.
inline NormalizedProblem normalize(const Region& region,
                                   const Integrand& integrand,
                                   const SamplingConfig& cfg,
                                   const BoundOverrides& overrides = {}) {
  if (!std::isfinite(region.a) || !std::isfinite(region.b) ||
      !(region.a < region.b)) {
    throw ConfigError("integration limits must satisfy a < b (got a = " +
                      detail::format_g(region.a) +
                      ", b = " + detail::format_g(region.b) + ")");
  }
  if (!region.lower || !region.upper || !integrand.eval) {
    throw ConfigError("region limits and integrand must all be provided");
  }

  const double a = region.a;
  const double b = region.b;

  // Limits are checked for crossing on the coarse sampling grid.
  const int n = std::max(cfg.grid_points_per_axis, 2);
  for (double t : detail::linspace(0.0, 1.0, n)) {
    const double x = std::lerp(a, b, t);
    const double lo = region.lower(x);
    const double hi = region.upper(x);
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw NumericalError("non-finite limit function value at x = " +
                           detail::format_g(x, 17));
    }
    if (lo > hi) {
      throw NumericalError(
          "crossing limits unsupported: l(x) > u(x) at x = " +
          detail::format_g(x, 17));
    }
  }

  auto check_limits = [&](double x) {
    const double lo = region.lower(x);
    const double hi = region.upper(x);
    if (lo > hi) {
      throw NumericalError("crossing limits unsupported: l(x) > u(x) at x = " +
                           detail::format_g(x, 17));
    }
    return std::pair{lo, hi};
  };
  const double l1 =
      -detail::maximize_1d(a, b,
                           [&](double x) {
                             auto [lo, hi] = check_limits(x);
                             return -std::min(lo, hi);
                           },
                           cfg)
           .second;
  const double u1 = detail::maximize_1d(a, b,
                                        [&](double x) {
                                          auto [lo, hi] = check_limits(x);
                                          return std::max(lo, hi);
                                        },
                                        cfg)
                        .second;

  auto state = std::make_shared<detail::NormalizedState>();
  state->region = region;
  state->integrand = integrand;
  state->injected = overrides.over(integrand.analytic_bounds);
  state->m1 = b - a;
  state->l1 = l1;
  state->u1 = u1;
  // l == u everywhere: empty region, any m2 gives empty rows.
  state->m2 = (u1 > l1) ? (u1 - l1) : 1.0;
  if (!(u1 > l1)) state->u1 = l1 + 1.0;

  if (state->injected.big_M) {
    const double M = *state->injected.big_M;
    if (!std::isfinite(M) || M < 1.0) {
      throw ConfigError("injected M must be finite and >= 1, got " +
                        detail::format_g(M));
    }
    state->big_M = M;
  } else {
    SamplingConfig raw = cfg;
    raw.safety_factor = 1.0;
    const detail::NormalizedState& st = *state;
    auto scaled = [&st](double w, double z) {
      const double x = std::lerp(st.region.a, st.region.b, w);
      const double y = std::lerp(st.l1, st.u1, z);
      return st.integrand.eval(x, y) * st.m1 * st.m2;
    };
    const UnitRegion unit{
        [&st](double w) {
          return (st.region.lower(std::lerp(st.region.a, st.region.b, w)) - st.l1) /
                 st.m2;
        },
        [&st](double w) {
          return (st.region.upper(std::lerp(st.region.a, st.region.b, w)) - st.l1) /
                 st.m2;
        }};
    state->big_M = std::max(1.0, sup_abs_on_region(scaled, unit, raw));
  }
  state->g_scale = state->m1 * state->m2 / state->big_M;

  return NormalizedProblem(std::move(state));
}

}  // namespace cirque

#endif  // CIRQUE_PROBLEM_HPP
