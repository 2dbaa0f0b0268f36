#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "cirque/rules.hpp"

using cirque::composite_expansion;
using cirque::get_rule;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double quad(const cirque::RuleSpec& rule, std::size_t n, double p, double q, auto f) {
  const auto grid = composite_expansion(rule, n, p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) s += grid.weights[i] * f(grid.nodes[i]);
  return s;
}

}  // namespace

TEST(Rules, RegistryConstants) {
  const auto s = get_rule("simpson");
  EXPECT_EQ(s.order, 4);
  EXPECT_DOUBLE_EQ(s.error_constant, 16.0 / 180.0);
  const auto t = get_rule("trapezium");
  EXPECT_EQ(t.order, 2);
  EXPECT_DOUBLE_EQ(t.error_constant, 1.0 / 12.0);
  const auto g = get_rule("gauss_legendre_2");
  EXPECT_EQ(g.order, 4);
  EXPECT_DOUBLE_EQ(g.error_constant, 1.0 / 4320.0);
}

TEST(Rules, UnknownNameListsKnownRules) {
  try {
    get_rule("boole");
    FAIL() << "expected ConfigError";
  } catch (const cirque::ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("boole"), std::string::npos);
    EXPECT_NE(msg.find("simpson"), std::string::npos);
  }
}

TEST(Rules, SingleSimpsonPanel) {
  const auto g = composite_expansion(get_rule("simpson"), 1, 0.0, 1.0);
  ASSERT_EQ(g.nodes.size(), 3u);
  EXPECT_EQ(g.nodes[0], 0.0);
  EXPECT_EQ(g.nodes[1], 0.5);
  EXPECT_EQ(g.nodes[2], 1.0);
  EXPECT_DOUBLE_EQ(g.weights[0], 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(g.weights[1], 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(g.weights[2], 1.0 / 6.0);
}

TEST(Rules, UniformTrapezium) {
  const auto g = composite_expansion(get_rule("trapezium"), 2, 0.0, 2.0);
  ASSERT_EQ(g.nodes.size(), 3u);
  EXPECT_EQ(g.nodes, (std::vector<double>{0.0, 1.0, 2.0}));
  EXPECT_EQ(g.weights, (std::vector<double>{0.5, 1.0, 0.5}));
}

TEST(Rules, Simpson1810PanelsHas3621Nodes) {
  const auto g = composite_expansion(get_rule("simpson"), 1810, 0.0, 1.0);
  ASSERT_EQ(g.nodes.size(), 3621u);
  EXPECT_NEAR(g.nodes[1] - g.nodes[0], 0.5 / 1810.0, 1e-15);
  EXPECT_NEAR((g.nodes[1] - g.nodes[0]) / 2.76243e-4, 1.0, 1e-5);
}

TEST(Rules, GaussPanelsDoNotShareNodes) {
  const auto rule = get_rule("gauss_legendre_2");
  EXPECT_FALSE(rule.shares_endpoints());
  const auto g = composite_expansion(rule, 5, 0.0, 1.0);
  EXPECT_EQ(g.nodes.size(), 10u);
  for (double x : g.nodes) {
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Rules, ZeroPanelsAndEmptyIntervalRejected) {
  const auto rule = get_rule("simpson");
  EXPECT_THROW(composite_expansion(rule, 0, 0.0, 1.0), cirque::ConfigError);
  EXPECT_THROW(composite_expansion(rule, 3, 1.0, 1.0), cirque::ConfigError);
  EXPECT_THROW(composite_expansion(rule, 3, 2.0, 1.0), cirque::ConfigError);
}

TEST(RulesProperty, WeightSumsPositivityAndOrdering) {
  for (auto name : cirque::rule_names()) {
    const auto rule = get_rule(name);
    for (double L : {1.0, 0.5, 7.0 / 5.0}) {
      for (std::size_t n = 1; n <= 50; ++n) {
        const auto g = composite_expansion(rule, n, 0.0, L);
        ASSERT_EQ(g.nodes.size(), rule.composite_node_count(n));
        EXPECT_NEAR(sum(g.weights), L, 1e-13 * std::max(1.0, L)) << name << " n=" << n;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
          ASSERT_GT(g.weights[i], 0.0);
          ASSERT_GE(g.nodes[i], 0.0);
          ASSERT_LE(g.nodes[i], L);
          if (i > 0) {
            ASSERT_LT(g.nodes[i - 1], g.nodes[i]);
          }
        }
      }
    }
  }
}

TEST(RulesProperty, MonomialsBelowOrderAreExact) {
  for (auto name : cirque::rule_names()) {
    const auto rule = get_rule(name);
    for (int p = 0; p < rule.order; ++p) {
      for (std::size_t n : {1u, 2u, 7u, 30u}) {
        const double q = quad(rule, n, 0.0, 1.0, [p](double x) { return std::pow(x, p); });
        EXPECT_NEAR(q, 1.0 / (p + 1), 1e-12) << name << " p=" << p << " n=" << n;
      }
    }
  }
}

// For smooth f the composite error behaves like C h^r (f^(r-1)(q) - f^(r-1)(p))
// with C the sharp constant; for e^x on [0, 1] that is C h^r (e - 1).
TEST(RulesProperty, ErrorConstantsAgainstAsymptoticError) {
  const double exact = std::exp(1.0) - 1.0;
  auto ratio = [&](const char* name, std::size_t n) {
    const auto rule = get_rule(name);
    const double h = 1.0 / static_cast<double>(n);
    const double err = std::abs(quad(rule, n, 0.0, 1.0, [](double x) { return std::exp(x); }) - exact);
    return err / (rule.error_constant * std::pow(h, rule.order) * exact);
  };
  EXPECT_NEAR(ratio("trapezium", 64), 1.0, 1e-3);
  EXPECT_NEAR(ratio("gauss_legendre_2", 16), 1.0, 1e-2);
  // Simpson's constant is 256 times the sharp one.
  EXPECT_NEAR(ratio("simpson", 16) * 256.0, 1.0, 1e-2);
}

TEST(RulesProperty, OrderOfConvergenceOneDimensional) {
  const double exact = std::exp(1.0) - 1.0;
  for (auto name : cirque::rule_names()) {
    const auto rule = get_rule(name);
    auto err = [&](std::size_t n) {
      return std::abs(quad(rule, n, 0.0, 1.0, [](double x) { return std::exp(x); }) - exact);
    };
    const double observed = std::log2(err(8) / err(16));
    EXPECT_NEAR(observed, rule.order, 0.05) << name;
  }
}
