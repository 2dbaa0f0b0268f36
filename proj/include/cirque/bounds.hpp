#ifndef CIRQUE_BOUNDS_HPP
#define CIRQUE_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cirque/errors.hpp"

namespace cirque {

/// Controls the grid searches that estimate suprema over a normalized region.
struct SamplingConfig {
  int grid_points_per_axis = 201;
  /// Each round re-grids a neighborhood of every candidate maximizer at 10x
  /// the previous density.
  int refine_rounds = 2;
  double safety_factor = 1.1;
  /// Finite-difference step; defaults to mu^(1/(r+2)) on the unit axis.
  std::optional<double> fd_step;
  /// Number of distinct coarse-grid maxima that get refined.
  int refine_candidates = 8;
};

/// Region l~(w) <= z <= u~(w), 0 <= w <= 1, of a normalized problem.
struct UnitRegion {
  std::function<double(double)> lower;
  std::function<double(double)> upper;
};

enum class Axis { w, z };

enum class Provenance { injected, grid_estimated };

inline const char* to_string(Provenance p) {
  return p == Provenance::injected ? "injected" : "grid-estimated";
}

struct BoundValue {
  double value = 0.0;
  Provenance provenance = Provenance::grid_estimated;
};

/// Suprema entering the stepsize formula: breadth D = max(u~ - l~) and the
/// maxima of |d^r g/dw^r| and |d^r g/dz^r|.
struct BoundSet {
  BoundValue breadth;
  BoundValue deriv_sup_x;
  BoundValue deriv_sup_y;

  double derivative_sum() const {
    return deriv_sup_x.value + deriv_sup_y.value;
  }
};

/// User-supplied values that replace estimation. Any field that is set is used
/// verbatim.
struct BoundOverrides {
  std::optional<double> big_M;
  std::optional<double> breadth;
  std::optional<double> deriv_sup_x;
  std::optional<double> deriv_sup_y;

  /// Fields set here win; unset fields fall back to `base`.
  BoundOverrides over(const BoundOverrides& base) const {
    return {big_M ? big_M : base.big_M, breadth ? breadth : base.breadth,
            deriv_sup_x ? deriv_sup_x : base.deriv_sup_x,
            deriv_sup_y ? deriv_sup_y : base.deriv_sup_y};
  }

  bool empty() const {
    return !big_M && !breadth && !deriv_sup_x && !deriv_sup_y;
  }
};

/// Default machine-precision bound.
inline constexpr double kDefaultMu = 1e-16;

namespace detail {

struct Sample {
  double w = 0.0;
  double z = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 1 || lo == hi) {
    out.push_back(lo);
    return out;
  }
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(std::lerp(lo, hi, static_cast<double>(i) / (n - 1)));
  }
  return out;
}

/// Visits sample points column by column. `zrange(w)` gives the admissible
/// z-interval of column w (or nullopt); it is clipped to [zlo, zhi], sampled
/// on an n-point grid over [zlo, zhi], and both ends of the clipped interval
/// are always visited so maxima on the boundary curves are hit exactly.
template <class ZRange, class Visit>
void visit_columns(std::span<const double> columns, double zlo, double zhi,
                   int n, ZRange& zrange, Visit& visit) {
  const std::vector<double> zgrid = linspace(zlo, zhi, n);
  for (double w : columns) {
    const std::optional<std::pair<double, double>> range = zrange(w);
    if (!range) continue;
    const double lo = std::max(range->first, zlo);
    const double hi = std::min(range->second, zhi);
    if (!(lo <= hi)) continue;
    visit(w, lo);
    for (double z : zgrid) {
      if (z > lo && z < hi) visit(w, z);
    }
    if (hi != lo) visit(w, hi);
  }
}

/// Maximizes value(w, z) over columns w in [wlo, whi] with admissible
/// z-intervals zrange(w): a coarse grid, then refinement around the best
/// `refine_candidates` well-separated coarse samples.
template <class ZRange, class Value>
Sample grid_maximize(double wlo, double whi, ZRange zrange, Value value,
                     const SamplingConfig& cfg) {
  const int n = std::max(cfg.grid_points_per_axis, 2);
  std::vector<Sample> coarse;
  auto collect = [&](double w, double z) {
    coarse.push_back({w, z, value(w, z)});
  };
  const std::vector<double> columns = linspace(wlo, whi, n);
  visit_columns(std::span<const double>(columns), 0.0, 1.0, n, zrange,
                collect);
  if (coarse.empty()) return {};

  std::sort(coarse.begin(), coarse.end(),
            [](const Sample& x, const Sample& y) { return x.value > y.value; });

  const double cell = 1.0 / (n - 1);
  std::vector<Sample> candidates;
  const auto wanted = static_cast<std::size_t>(std::max(cfg.refine_candidates, 1));
  for (const Sample& s : coarse) {
    const bool distinct = std::all_of(
        candidates.begin(), candidates.end(), [&](const Sample& c) {
          return std::abs(c.w - s.w) > 2 * cell || std::abs(c.z - s.z) > 2 * cell;
        });
    if (distinct) candidates.push_back(s);
    if (candidates.size() == wanted) break;
  }

  Sample best = candidates.front();
  for (Sample cand : candidates) {
    double radius = cell;
    for (int round = 0; round < cfg.refine_rounds; ++round) {
      const double w0 = std::max(wlo, cand.w - radius);
      const double w1 = std::min(whi, cand.w + radius);
      const std::vector<double> cols = linspace(w0, w1, 21);
      Sample local = cand;
      auto keep = [&](double w, double z) {
        const double v = value(w, z);
        if (v > local.value) local = {w, z, v};
      };
      visit_columns(std::span<const double>(cols), cand.z - radius,
                    cand.z + radius, 21, zrange, keep);
      cand = local;
      radius /= 10.0;
    }
    if (cand.value > best.value) best = cand;
  }
  return best;
}

/// One-dimensional version over [lo, hi].
template <class F>
std::pair<double, double> maximize_1d(double lo, double hi, F f,
                                      const SamplingConfig& cfg) {
  auto zrange = [](double) {
    return std::optional<std::pair<double, double>>({0.0, 0.0});
  };
  auto value = [&](double t, double) { return f(std::lerp(lo, hi, t)); };
  const Sample s = grid_maximize(0.0, 1.0, zrange, value, cfg);
  return {std::lerp(lo, hi, s.w), s.value};
}

inline std::string point_name(double w, double z) {
  return "(w, z) = (" + format_g(w, 17) + ", " + format_g(z, 17) + ")";
}

inline std::vector<double> difference_coefficients(int r) {
  std::vector<double> c(static_cast<std::size_t>(r) + 1);
  double binom = 1.0;
  for (int k = 0; k <= r; ++k) {
    c[static_cast<std::size_t>(k)] = ((r - k) % 2 == 0) ? binom : -binom;
    binom = binom * (r - k) / (k + 1);
  }
  return c;
}

}  // namespace detail

/// safety_factor times the grid-refined maximum of |f| over the region.
template <class F>
double sup_abs_on_region(F&& f, const UnitRegion& region,
                         const SamplingConfig& cfg) {
  auto zrange = [&](double w) -> std::optional<std::pair<double, double>> {
    const double lo = region.lower(w);
    const double hi = region.upper(w);
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw NumericalError("non-finite region limit at w = " +
                           detail::format_g(w, 17));
    }
    if (lo > hi) return std::nullopt;
    return std::pair{lo, hi};
  };
  auto value = [&](double w, double z) {
    const double v = f(w, z);
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite integrand value at " +
                           detail::point_name(w, z));
    }
    return std::abs(v);
  };
  const detail::Sample best = detail::grid_maximize(0.0, 1.0, zrange, value, cfg);
  if (!std::isfinite(best.value)) {
    throw NumericalError("region has no admissible sample points");
  }
  return cfg.safety_factor * best.value;
}

/// Grid-refined max of u_t - l_t over [0, 1]. No safety factor: the result is
/// a geometric quantity, and it stays <= 1 for normalized problems.
template <class L, class U>
double breadth_D(L&& l_t, U&& u_t, const SamplingConfig& cfg) {
  auto breadth = [&](double w) {
    const double d = u_t(w) - l_t(w);
    if (!std::isfinite(d)) {
      throw NumericalError("non-finite region limit at w = " +
                           detail::format_g(w, 17));
    }
    if (d < 0.0) {
      throw NumericalError("negative breadth u~ - l~ = " + detail::format_g(d) +
                           " at w = " + detail::format_g(w, 17));
    }
    return d;
  };
  return detail::maximize_1d(0.0, 1.0, breadth, cfg).second;
}

/// Raw (no safety factor) maximum of |Delta_s^r g / s^r| along `axis` over
/// stencil centers whose whole stencil lies inside the region; nullopt when no
/// stencil fits.
template <class G>
std::optional<double> difference_sup_at_step(G&& g, const UnitRegion& region,
                                             Axis axis, int r, double step,
                                             const SamplingConfig& cfg) {
  const std::vector<double> coef = detail::difference_coefficients(r);
  const double half = 0.5 * r * step;
  const double scale = std::pow(step, r);

  auto check = [](double v, double w, double z) {
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite integrand value at " +
                           detail::point_name(w, z));
    }
    return v;
  };

  detail::Sample best;
  if (axis == Axis::z) {
    auto zrange = [&](double w) -> std::optional<std::pair<double, double>> {
      const double lo = region.lower(w) + half;
      const double hi = region.upper(w) - half;
      if (lo > hi) return std::nullopt;
      return std::pair{lo, hi};
    };
    auto value = [&](double w, double z) {
      double acc = 0.0;
      for (int k = 0; k <= r; ++k) {
        const double zk = z + (k - r / 2) * step;
        acc += coef[static_cast<std::size_t>(k)] * check(g(w, zk), w, zk);
      }
      return std::abs(acc) / scale;
    };
    best = detail::grid_maximize(0.0, 1.0, zrange, value, cfg);
  } else {
    if (1.0 - half < half) return std::nullopt;
    auto zrange = [&](double w) -> std::optional<std::pair<double, double>> {
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= r; ++k) {
        const double wk = w + (k - r / 2) * step;
        lo = std::max(lo, region.lower(wk));
        hi = std::min(hi, region.upper(wk));
      }
      if (lo > hi) return std::nullopt;
      return std::pair{lo, hi};
    };
    auto value = [&](double w, double z) {
      double acc = 0.0;
      for (int k = 0; k <= r; ++k) {
        const double wk = w + (k - r / 2) * step;
        acc += coef[static_cast<std::size_t>(k)] * check(g(wk, z), wk, z);
      }
      return std::abs(acc) / scale;
    };
    best = detail::grid_maximize(half, 1.0 - half, zrange, value, cfg);
  }
  if (!std::isfinite(best.value)) return std::nullopt;
  return best.value;
}

inline double default_fd_step(int r, double mu = kDefaultMu) {
  return std::pow(mu, 1.0 / (r + 2));
}

/// Estimates max |d^r g / d axis^r| over the region.
///
/// Difference maxima are taken at steps s, s/2 and s/4. Stencils must stay
/// inside the region, so when the supremum sits on the boundary each
/// estimate is biased low by a term smooth in s; the three values are
/// extrapolated to s = 0 and the larger of the extrapolant and the finest raw
/// value is scaled by safety_factor.
template <class G>
double derivative_sup(G&& g, const UnitRegion& region, Axis axis, int r,
                      const SamplingConfig& cfg) {
  if (r < 2 || r % 2 != 0) {
    throw ConfigError("derivative order must be even and >= 2, got " +
                      std::to_string(r));
  }
  const double s = cfg.fd_step.value_or(default_fd_step(r));
  if (!(s > 0.0)) throw ConfigError("finite-difference step must be positive");

  const std::optional<double> e1 = difference_sup_at_step(g, region, axis, r, s, cfg);
  const std::optional<double> e2 =
      difference_sup_at_step(g, region, axis, r, s / 2, cfg);
  const std::optional<double> e4 =
      difference_sup_at_step(g, region, axis, r, s / 4, cfg);

  if (!e4) {
    throw NumericalError(
        std::string("finite-difference stencil along ") +
        (axis == Axis::w ? "w" : "z") +
        " does not fit inside the region at any grid point; supply analytic "
        "derivative bounds instead");
  }
  double extrapolated = *e4;
  if (e1 && e2) {
    extrapolated = (8.0 * *e4 - 6.0 * *e2 + *e1) / 3.0;
  } else if (e2) {
    extrapolated = 2.0 * *e4 - *e2;
  }
  return cfg.safety_factor * std::max(*e4, extrapolated);
}

/// Anything that looks like a normalized problem: g on the unit square, the
/// limit functions l~, u~ and user-injected bounds.
template <class P>
concept NormalizedLike = requires(const P& p, double v) {
  { p.g(v, v) } -> std::convertible_to<double>;
  { p.l_tilde(v) } -> std::convertible_to<double>;
  { p.u_tilde(v) } -> std::convertible_to<double>;
  { p.injected() } -> std::convertible_to<const BoundOverrides&>;
};

template <NormalizedLike P>
UnitRegion unit_region_of(const P& np) {
  return {[&np](double w) { return np.l_tilde(w); },
          [&np](double w) { return np.u_tilde(w); }};
}

/// Derivative supremum of a normalized problem; injected analytic bounds pass
/// through unchanged.
template <NormalizedLike P>
double derivative_sup(const P& np, Axis axis, int r, const SamplingConfig& cfg) {
  const auto& inj = np.injected();
  const std::optional<double>& given =
      axis == Axis::w ? inj.deriv_sup_x : inj.deriv_sup_y;
  if (given) return *given;
  return derivative_sup([&np](double w, double z) { return np.g(w, z); },
                        unit_region_of(np), axis, r, cfg);
}

/// Assembles D and both derivative suprema for a normalized problem.
/// `extra` overrides take precedence over the problem's injected bounds.
template <NormalizedLike P>
BoundSet estimate_bounds(const P& np, int r, const SamplingConfig& cfg,
                         const BoundOverrides& extra = {}) {
  const BoundOverrides inj = extra.over(np.injected());
  const UnitRegion region = unit_region_of(np);
  auto g = [&np](double w, double z) { return np.g(w, z); };

  auto pick = [](const std::optional<double>& given, auto estimate) {
    if (given) {
      if (!std::isfinite(*given) || *given < 0.0) {
        throw ConfigError("injected bound must be finite and >= 0");
      }
      return BoundValue{*given, Provenance::injected};
    }
    return BoundValue{estimate(), Provenance::grid_estimated};
  };

  BoundSet out;
  out.breadth = pick(inj.breadth, [&] {
    return breadth_D(region.lower, region.upper, cfg);
  });
  out.deriv_sup_x = pick(inj.deriv_sup_x, [&] {
    return derivative_sup(g, region, Axis::w, r, cfg);
  });
  out.deriv_sup_y = pick(inj.deriv_sup_y, [&] {
    return derivative_sup(g, region, Axis::z, r, cfg);
  });
  return out;
}

}  // namespace cirque

#endif  // CIRQUE_BOUNDS_HPP
