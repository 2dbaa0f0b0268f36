#ifndef CIRQUE_TESTS_FIXTURES_HPP
#define CIRQUE_TESTS_FIXTURES_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cirque/problem.hpp"

namespace fixtures {

inline cirque::Region example1_region() {
  return {1.0, 2.0, [](double x) { return x * x / 5; }, [](double x) { return x * x * x / 5; }};
}
inline cirque::Integrand example1_integrand() {
  return {[](double x, double y) { return std::exp(4 * x * y); }, {}};
}

/// The analytic suprema of Example I with D as injected in the reproduction
/// run.
inline cirque::BoundOverrides example1_bounds() {
  cirque::BoundOverrides b;
  b.big_M = 1.4 * std::exp(12.8);
  b.breadth = 18.0 / 26.0;
  b.deriv_sup_x = std::pow(6.4, 4);
  b.deriv_sup_y = std::pow(11.2, 4);
  return b;
}

inline cirque::Region example2_region() {
  return {1.0, 4.0, [](double x) { return x; }, [](double x) { return 2 * x * x; }};
}
inline cirque::Integrand example2_integrand() {
  return {[](double x, double y) { return std::sin(x * y) / 5; }, {}};
}

inline cirque::Region unit_square_exp_region() {
  return {0.0, 1.0, [](double) { return 0.0; }, [](double) { return 1.0; }};
}
inline cirque::Integrand unit_square_exp_integrand() {
  return {[](double x, double y) { return std::exp(x + y); }, {}};
}

struct Fixture {
  std::string name;
  cirque::Region region;
  cirque::Integrand integrand;
  /// min l and max u fall on [a, b]'s endpoints (so a uniform grid hits them).
  bool region_has_endpoint_extrema = true;
  /// Some rows have zero breadth.
  bool has_degenerate_rows = false;
  /// The error bound only sees derivatives of g. When the limit functions'
  /// curvature dominates the outer error the bound can be exceeded.
  bool limits_drive_error = false;
};

inline std::vector<Fixture> all() {
  using std::numbers::pi;
  std::vector<Fixture> f;
  f.push_back({"example1", example1_region(), example1_integrand(), true, true});
  f.push_back({"example2", example2_region(), example2_integrand(), true, false});
  f.push_back({"unit_square_exp", unit_square_exp_region(), unit_square_exp_integrand(), true,
               false});
  // l = u on [0, 1/2]; u is C^4 across the join
  f.push_back({"pinched",
               {0.0, 1.0, [](double) { return 0.0; },
                [](double x) { return x > 0.5 ? 32 * std::pow(x - 0.5, 5) : 0.0; }},
               {[](double x, double y) { return std::cos(x) + y; }, {}},
               true,
               true,
               true});
  f.push_back({"wavy",
               {-1.0, 2.0, [](double x) { return -0.3 * std::sin(pi * x / 3); },
                [](double x) { return 1.5 + 0.2 * std::sin(2 * pi * x / 3); }},
               {[](double x, double y) { return std::exp(-x) * std::sin(3 * y) * 40; }, {}},
               false,
               false});
  f.push_back({"lens",
               {0.0, 1.0, [](double x) { return x * x; }, [](double x) { return x; }},
               {[](double x, double y) { return x * y + 0.25; }, {}},
               true,
               true,
               true});
  return f;
}

}  // namespace fixtures

#endif  // CIRQUE_TESTS_FIXTURES_HPP
