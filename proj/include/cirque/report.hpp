#ifndef CIRQUE_REPORT_HPP
#define CIRQUE_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"

#include "cirque/controller.hpp"

namespace cirque {

/// Six-significant-digit display form, e.g. "1.92660e+03".
inline std::string display6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

namespace detail {

// JSON has no infinity; the relative estimate is infinite when Qc[g] = 0.
inline nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return display6(v);
}

inline nlohmann::ordered_json bound_json(const BoundValue& b) {
  return {{"value", b.value}, {"provenance", to_string(b.provenance)}};
}

}  // namespace detail

/// Structured form of a report. Field names and order are stable; every
/// number is written at full precision and repeated as a 6-digit string
/// under "display".
inline nlohmann::ordered_json to_json(const CubatureReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["value"] = detail::number(r.value);
  j["mode"] = to_string(r.mode);
  j["abs_bound"] = detail::number(r.abs_bound);
  j["rel_estimate"] = detail::number(r.rel_estimate);
  j["qc_g"] = detail::number(r.qc_g);
  j["big_M"] = detail::number(r.big_M);
  j["big_M_provenance"] = to_string(r.big_M_provenance);
  j["eps"] = r.eps;
  j["mu"] = r.mu;
  j["roundoff_bound"] = r.roundoff_bound;
  j["converged"] = r.converged;

  j["transform"] = {{"m1", r.m1}, {"m2", r.m2}, {"l1", r.l1}, {"u1", r.u1}};
  j["rule"] = {{"name", r.rule},
               {"order", r.order},
               {"error_constant", r.error_constant}};
  j["plan"] = {{"N1", r.plan.N1},
               {"outer_nodes", r.plan.outer_nodes},
               {"nodes_evaluated", r.plan.total_nodes},
               {"h", r.plan.h},
               {"h_star", r.plan.h_star},
               {"max_k_star", r.plan.max_k_star}};
  j["bounds"] = {{"D", detail::bound_json(r.bounds.breadth)},
                 {"deriv_sup_x", detail::bound_json(r.bounds.deriv_sup_x)},
                 {"deriv_sup_y", detail::bound_json(r.bounds.deriv_sup_y)}};
  if (r.target) {
    j["target"] = {{"kind", to_string(r.target->kind)},
                   {"value", r.target->value}};
  } else {
    j["target"] = nullptr;
  }
  ordered_json history = ordered_json::array();
  for (const RefinementStep& s : r.history) {
    history.push_back({{"eps", s.eps},
                       {"eta", s.eta},
                       {"qc_g", s.qc_g},
                       {"rel_estimate", detail::number(s.rel_estimate)},
                       {"abs_bound", s.abs_bound},
                       {"N1", s.N1},
                       {"nodes", s.nodes}});
  }
  j["refinement_history"] = std::move(history);
  j["warnings"] = r.warnings;
  j["display"] = {{"value", display6(r.value)},
                  {"abs_bound", display6(r.abs_bound)},
                  {"rel_estimate", display6(r.rel_estimate)},
                  {"qc_g", display6(r.qc_g)},
                  {"big_M", display6(r.big_M)},
                  {"h", display6(r.plan.h)},
                  {"h_star", display6(r.plan.h_star)},
                  {"max_k_star", display6(r.plan.max_k_star)}};
  return j;
}

/// Human-readable form of a report.
inline void write_text(std::ostream& os, const CubatureReport& r) {
  char full[64];
  auto fp = [&full](double v) {
    std::snprintf(full, sizeof full, "%.17g", v);
    return std::string(full);
  };
  auto line = [&](const char* name, double v) {
    os << "  " << name;
    for (std::size_t i = std::char_traits<char>::length(name); i < 16; ++i) os << ' ';
    os << display6(v) << "   (" << fp(v) << ")\n";
  };
  os << "result\n";
  line("value", r.value);
  os << "  mode            " << to_string(r.mode) << "\n";
  line("abs_bound", r.abs_bound);
  line("rel_estimate", r.rel_estimate);
  line("qc_g", r.qc_g);
  line("big_M", r.big_M);
  os << "  converged       " << (r.converged ? "yes" : "no") << "\n";
  os << "tolerance\n";
  line("eps", r.eps);
  line("mu", r.mu);
  line("roundoff_bound", r.roundoff_bound);
  if (r.target) {
    os << "  target          " << to_string(r.target->kind) << " "
       << display6(r.target->value) << "\n";
  }
  os << "transform\n";
  line("m1", r.m1);
  line("m2", r.m2);
  line("l1", r.l1);
  line("u1", r.u1);
  os << "rule\n  " << r.rule << " (order " << r.order << ", A = " << fp(r.error_constant)
     << ")\n";
  os << "plan\n";
  os << "  N1              " << r.plan.N1 << "\n";
  os << "  outer_nodes     " << r.plan.outer_nodes << "\n";
  os << "  nodes_evaluated " << r.plan.total_nodes << "\n";
  line("h", r.plan.h);
  line("h_star", r.plan.h_star);
  line("max_k_star", r.plan.max_k_star);
  os << "bounds\n";
  os << "  M               " << display6(r.big_M) << " [" << to_string(r.big_M_provenance)
     << "]\n";
  os << "  D               " << display6(r.bounds.breadth.value) << " ["
     << to_string(r.bounds.breadth.provenance) << "]\n";
  os << "  deriv_sup_x     " << display6(r.bounds.deriv_sup_x.value) << " ["
     << to_string(r.bounds.deriv_sup_x.provenance) << "]\n";
  os << "  deriv_sup_y     " << display6(r.bounds.deriv_sup_y.value) << " ["
     << to_string(r.bounds.deriv_sup_y.provenance) << "]\n";
  os << "refinement_history\n";
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    const RefinementStep& s = r.history[i];
    os << "  #" << i << "  eps " << display6(s.eps) << "  eta " << s.eta
       << "  rel_estimate " << display6(s.rel_estimate) << "  abs_bound "
       << display6(s.abs_bound) << "  N1 " << s.N1 << "  nodes " << s.nodes << "\n";
  }
  for (const std::string& w : r.warnings) os << "warning: " << w << "\n";
}

}  // namespace cirque

#endif  // CIRQUE_REPORT_HPP
