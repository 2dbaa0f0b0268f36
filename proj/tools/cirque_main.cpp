#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cirque/cirque.hpp"
#include "cirque/problem_file.hpp"
#include "cirque/report.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct ProblemFlags {
  std::string problem_file;
  std::string g, a, b, l, u;
  std::string bounds_file;
};

struct ControlFlags {
  std::optional<double> eps;
  double mu = cirque::kDefaultMu;
  std::string rule = "simpson";
  std::optional<double> target_rel;
  std::optional<double> target_abs;
  int max_refine = 5;
  int grid = cirque::SamplingConfig{}.grid_points_per_axis;
  double safety = cirque::SamplingConfig{}.safety_factor;
  unsigned threads = 0;
  bool compensated = false;
};

void add_problem_flags(CLI::App& cmd, ProblemFlags& p) {
  auto* file = cmd.add_option("--problem", p.problem_file,
                              "problem file (a, b, l_expr, u_expr, g_expr, [bounds])")
                   ->check(CLI::ExistingFile);
  auto* g = cmd.add_option("--g", p.g, "integrand G(x, y)");
  auto* a = cmd.add_option("--a", p.a, "lower x limit");
  auto* b = cmd.add_option("--b", p.b, "upper x limit");
  auto* l = cmd.add_option("--l", p.l, "lower y limit l(x)");
  auto* u = cmd.add_option("--u", p.u, "upper y limit u(x)");
  for (auto* opt : {g, a, b, l, u}) file->excludes(opt);
  cmd.add_option("--bounds-file", p.bounds_file,
                 "override M, D, deriv_sup_x, deriv_sup_y from a file")
      ->check(CLI::ExistingFile);
}

void add_sampling_flags(CLI::App& cmd, ControlFlags& c) {
  cmd.add_option("--rule", c.rule, "trapezium, simpson or gauss_legendre_2")
      ->capture_default_str();
  cmd.add_option("--grid", c.grid, "grid points per axis for bound estimation")
      ->capture_default_str()
      ->check(CLI::Range(3, 100000));
  cmd.add_option("--safety", c.safety, "safety factor on estimated derivative suprema")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd.add_option("--mu", c.mu, "machine precision used for the roundoff floor")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

cirque::Problem load_problem(const ProblemFlags& p) {
  cirque::ProblemText text;
  if (!p.problem_file.empty()) {
    text = cirque::parse_problem_text(cirque::read_file(p.problem_file));
  } else {
    const std::pair<const std::string*, const char*> fields[] = {
        {&p.g, "--g"}, {&p.a, "--a"}, {&p.b, "--b"}, {&p.l, "--l"}, {&p.u, "--u"}};
    for (const auto& [value, flag] : fields) {
      if (value->empty()) {
        throw cirque::ConfigError(std::string("missing ") + flag +
                                  " (give --problem or all of --g --a --b --l --u)");
      }
    }
    text.a = p.a;
    text.b = p.b;
    text.l_expr = p.l;
    text.u_expr = p.u;
    text.g_expr = p.g;
  }
  if (!p.bounds_file.empty()) {
    text.bounds = cirque::parse_bounds_text(cirque::read_file(p.bounds_file))
                      .over(text.bounds);
  }
  return cirque::build_problem(text);
}

cirque::ControlConfig make_config(const ControlFlags& c) {
  cirque::ControlConfig cfg;
  cfg.eps = c.eps;
  cfg.mu = c.mu;
  cfg.rule_name = c.rule;
  if (c.target_rel) cfg.target = cirque::Target{cirque::Target::Kind::relative, *c.target_rel};
  if (c.target_abs) cfg.target = cirque::Target{cirque::Target::Kind::absolute, *c.target_abs};
  cfg.max_refinements = c.max_refine;
  cfg.sampling.grid_points_per_axis = c.grid;
  cfg.sampling.safety_factor = c.safety;
  cfg.threads = c.threads;
  cfg.compensated = c.compensated;
  return cfg;
}

ordered_json optional_number(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

ordered_json config_json(const cirque::Problem& p, const cirque::ControlConfig& cfg) {
  const cirque::BoundOverrides& ov = p.integrand.analytic_bounds;
  ordered_json j;
  j["problem"] = {{"a", p.region.a},
                  {"b", p.region.b},
                  {"l_expr", p.lower.to_string()},
                  {"u_expr", p.upper.to_string()},
                  {"g_expr", p.g.to_string()}};
  j["rule"] = cfg.rule_name;
  j["eps"] = cfg.resolved_eps();
  j["mu"] = cfg.mu;
  if (cfg.target) {
    j["target"] = {{"kind", cirque::to_string(cfg.target->kind)},
                   {"value", cfg.target->value}};
  } else {
    j["target"] = nullptr;
  }
  j["max_refine"] = cfg.max_refinements;
  j["grid"] = cfg.sampling.grid_points_per_axis;
  j["safety"] = cfg.sampling.safety_factor;
  j["threads"] = cfg.threads;
  j["compensated"] = cfg.compensated;
  j["injected_bounds"] = {{"M", optional_number(ov.big_M)},
                          {"D", optional_number(ov.breadth)},
                          {"deriv_sup_x", optional_number(ov.deriv_sup_x)},
                          {"deriv_sup_y", optional_number(ov.deriv_sup_y)}};
  return j;
}

void write_config_text(std::ostream& os, const ordered_json& cfg) {
  os << "config\n";
  for (const auto& [key, value] : cfg.items()) {
    if (value.is_object()) {
      for (const auto& [k2, v2] : value.items()) {
        os << "  " << key << "." << k2 << " = " << v2.dump() << "\n";
      }
    } else {
      os << "  " << key << " = " << value.dump() << "\n";
    }
  }
}

int run_integrate(const ProblemFlags& pf, const ControlFlags& cf, const std::string& out) {
  const cirque::Problem problem = load_problem(pf);
  const cirque::ControlConfig cfg = make_config(cf);
  const ordered_json config = config_json(problem, cfg);

  const auto t0 = std::chrono::steady_clock::now();
  const cirque::CubatureReport report =
      cfg.target ? cirque::refine_until(problem.region, problem.integrand, cfg)
                 : cirque::run_once(problem.region, problem.integrand, cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::size_t nodes = 0;
  for (const auto& step : report.history) nodes += step.nodes;

  if (out == "structured") {
    ordered_json j;
    j["config"] = config;
    j["report"] = cirque::to_json(report);
    j["wall_time_s"] = seconds;
    j["nodes_evaluated"] = nodes;
    std::cout << j.dump(2) << "\n";
  } else {
    write_config_text(std::cout, config);
    cirque::write_text(std::cout, report);
    std::cout << "wall_time_s        " << seconds << "\n";
    std::cout << "nodes_evaluated    " << nodes << "\n";
  }
  return 0;
}

int run_describe_rule(const std::string& name, const std::string& out) {
  const cirque::RuleSpec rule = cirque::get_rule(name);
  if (out == "structured") {
    ordered_json j;
    j["name"] = rule.name;
    j["order"] = rule.order;
    j["error_constant"] = rule.error_constant;
    j["panel_nodes"] = rule.panel_nodes;
    j["panel_weights"] = rule.panel_weights;
    j["shares_endpoints"] = rule.shares_endpoints();
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::printf("rule            %s\n", rule.name.c_str());
  std::printf("order           %d\n", rule.order);
  std::printf("error_constant  %.17g\n", rule.error_constant);
  std::printf("panel nodes/weights on [0, 1]:\n");
  for (std::size_t i = 0; i < rule.panel_nodes.size(); ++i) {
    std::printf("  %.17g  %.17g\n", rule.panel_nodes[i], rule.panel_weights[i]);
  }
  return 0;
}

int run_check_bounds(const ProblemFlags& pf, const ControlFlags& cf, const std::string& out) {
  const cirque::Problem problem = load_problem(pf);
  const cirque::ControlConfig cfg = make_config(cf);
  const cirque::PreparedProblem prep = cirque::prepare(problem.region, problem.integrand, cfg);
  const cirque::BoundSet& bs = prep.bounds;

  ordered_json j;
  j["rule"] = {{"name", prep.rule.name}, {"order", prep.rule.order}};
  j["transform"] = {{"m1", prep.np.m1()},
                    {"m2", prep.np.m2()},
                    {"l1", prep.np.l1()},
                    {"u1", prep.np.u1()}};
  j["big_M"] = {{"value", prep.np.big_M()},
                {"provenance", cirque::to_string(prep.big_M_provenance)}};
  j["D"] = {{"value", bs.breadth.value},
            {"provenance", cirque::to_string(bs.breadth.provenance)}};
  j["deriv_sup_x"] = {{"value", bs.deriv_sup_x.value},
                      {"provenance", cirque::to_string(bs.deriv_sup_x.provenance)}};
  j["deriv_sup_y"] = {{"value", bs.deriv_sup_y.value},
                      {"provenance", cirque::to_string(bs.deriv_sup_y.provenance)}};
  j["roundoff_floor"] = cirque::roundoff_bound(1.0, bs.breadth.value, cfg.mu);
  if (out == "structured") {
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      std::cout << key;
      for (const auto& [k2, v2] : value.items()) std::cout << "  " << k2 << "=" << v2.dump();
      std::cout << "\n";
    } else {
      std::cout << key << "  " << value.dump() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bivariate cubature with relative and absolute error control"};
  app.require_subcommand(1);

  ProblemFlags pf;
  ControlFlags cf;
  std::string out = "text";
  const auto out_check = CLI::IsMember({"text", "structured"});

  auto* integrate = app.add_subcommand("integrate", "evaluate an integral");
  add_problem_flags(*integrate, pf);
  add_sampling_flags(*integrate, cf);
  integrate->add_option("--eps", cf.eps, "tolerance on |I[g] - Qc[g]| (default 1e-6)")
      ->check(CLI::PositiveNumber);
  auto* trel = integrate->add_option("--target-rel", cf.target_rel,
                                     "refine until the relative estimate meets this")
                   ->check(CLI::PositiveNumber);
  auto* tabs = integrate->add_option("--target-abs", cf.target_abs,
                                     "choose eps so that M*eps meets this")
                   ->check(CLI::PositiveNumber);
  trel->excludes(tabs);
  integrate->add_option("--max-refine", cf.max_refine, "maximum refinement passes")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  integrate->add_option("--threads", cf.threads, "worker threads (0 = hardware)");
  integrate->add_flag("--compensated", cf.compensated, "compensated summation");
  integrate->add_option("--out", out, "text or structured")->check(out_check);

  std::string rule_name = "simpson";
  auto* describe = app.add_subcommand("describe-rule", "print a rule's nodes and weights");
  describe->add_option("--rule", rule_name)->capture_default_str();
  describe->add_option("--out", out, "text or structured")->check(out_check);

  auto* check = app.add_subcommand("check-bounds", "estimate M, D and derivative suprema");
  add_problem_flags(*check, pf);
  add_sampling_flags(*check, cf);
  check->add_option("--out", out, "text or structured")->check(out_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*integrate) return run_integrate(pf, cf, out);
    if (*describe) return run_describe_rule(rule_name, out);
    return run_check_bounds(pf, cf, out);
  } catch (const cirque::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const cirque::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
