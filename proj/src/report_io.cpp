#include "nullbound/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace nullbound {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  if (x == 0.0) x = 0.0;
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", x);
  return buffer;
}

Json json_number(double x) {
  if (!std::isfinite(x)) return format_number(x);
  // Reparsing the 12-digit text gives a double whose shortest repr has at
  // most 12 digits, which is what the serializer prints.
  return std::strtod(format_number(x).c_str(), nullptr);
}

Json json_vector(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(json_number(v(i)));
  return out;
}

Json to_json(const Region& region) {
  Json out;
  out["lower"] = Json::array();
  out["upper"] = Json::array();
  for (const double a : region.lower) out["lower"].push_back(json_number(a));
  for (const double b : region.upper) out["upper"].push_back(json_number(b));
  out["resolution"] = region.resolution;
  return out;
}

Json to_json(const BundlePoint& p) {
  Json out;
  out["point"] = json_vector(p.point);
  out["v"] = json_vector(p.fiber);
  return out;
}

Json to_json(const RatioSample& s) {
  Json out = to_json(s.sample);
  out["g"] = json_number(s.causal);
  out["F"] = json_number(s.field);
  out["r"] = json_number(s.ratio());
  return out;
}

Json to_json(const NecResult& result) {
  Json out;
  out["status"] = std::string(to_string(result.status));
  out["min_value"] = json_number(result.min_value);
  out["worst"] = result.worst ? to_json(*result.worst) : Json(nullptr);
  out["base_points"] = result.base_points;
  out["null_samples"] = result.null_samples;
  if (!result.note.empty()) out["note"] = result.note;
  return out;
}

Json to_json(const CZEstimate& estimate) {
  Json out;
  if (estimate.mode == CZMode::Timelike) {
    out["normalization"] = "least C with F(v,v) >= C g(v,v) for all sampled timelike v (= -inf r over timelike v)";
  } else {
    out["normalization"] = "inf of r = F(v,v)/|g(v,v)| over sampled non-null v";
  }
  out["value"] = json_number(estimate.value);
  out["stage1"] = json_number(estimate.sampled);
  out["refined"] = json_number(estimate.refined);
  out["samples"] = estimate.samples;
  out["argmin"] = estimate.argmin ? to_json(*estimate.argmin) : Json(nullptr);
  return out;
}

Json to_json(const BoundReport& report) {
  const AnalysisOptions& o = report.options;
  Json out;
  out["command"] = "bound";
  out["metric"] = report.metric;
  out["field"] = report.field;
  out["provenance"] = std::string(to_string(report.provenance));
  out["region"] = to_json(report.region);
  // worker count is deliberately absent: it must not change the report
  out["options"] = {{"seed", o.seed},
                    {"null_negative", o.null_negative},
                    {"null_positive", o.null_positive},
                    {"uniform_directions", o.uniform_directions},
                    {"anchors_per_point", o.anchors_per_point},
                    {"samples_per_stratum", o.samples_per_stratum},
                    {"rungs", o.rungs},
                    {"eps0", json_number(o.eps0)},
                    {"refine_seeds", o.refine_seeds},
                    {"refine_iterations", o.refine_iterations},
                    {"tol_null", json_number(o.tol_null)}};
  out["nec"] = to_json(report.nec);
  out["cz_timelike"] = to_json(report.timelike);
  out["cz_theorem"] = to_json(report.theorem);
  out["sign_relation"] = {{"statement", "C^T = -C_Z"},
                          {"minus_cz_theorem", json_number(-report.theorem.value)},
                          {"minus_cz_theorem_is_timelike_constant", report.sign_bridge_consistent}};
  Json sweep = Json::array();
  for (const MarginRung& rung : report.margin_sweep) {
    sweep.push_back({{"eps_upper", json_number(rung.eps_upper)},
                     {"eps_lower", json_number(rung.eps_lower)},
                     {"inf_r", json_number(rung.inf_r)},
                     {"n_samples", rung.count}});
  }
  out["margin_sweep"] = sweep;
  out["certificate"] = {{"inf", json_number(report.certificate_inf)},
                        {"anchor", report.certificate_anchor ? to_json(*report.certificate_anchor) : Json(nullptr)},
                        {"note", "reference level for the liminf of r along flow curves leaving the cone, not a proven bound"}};
  Json verdict;
  verdict["verdict"] = std::string(to_string(report.verdict.verdict));
  verdict["slope"] = json_number(report.verdict.slope);
  verdict["final_rung"] = json_number(report.verdict.final_rung);
  verdict["window"] = report.verdict.window;
  verdict["rule"] = report.verdict.rule;
  verdict["C_Z"] = report.verdict.verdict == Verdict::Bounded ? json_number(report.theorem.value) : Json(nullptr);
  out["verdict"] = verdict;
  out["warnings"] = report.warnings;
  return out;
}

Json to_json(const NullProjection& projection) {
  Json out;
  out["point"] = json_vector(projection.input.point);
  out["input"] = json_vector(projection.input.fiber);
  out["t"] = json_number(projection.t);
  out["flow_parameter"] = json_number(projection.flow_parameter());
  out["anchor"] = json_vector(projection.anchor.fiber);
  out["residual"] = json_number(projection.residual);
  return out;
}

std::string render(const Json& json) { return json.dump(2) + "\n"; }

void write_sweep_csv(std::ostream& out, const std::vector<MarginRung>& sweep) {
  out << "epsilon,inf_r,n_samples\n";
  for (const MarginRung& rung : sweep) {
    out << format_number(rung.eps_upper) << ',' << format_number(rung.inf_r) << ',' << rung.count << '\n';
  }
}

void write_flow_csv(std::ostream& out, const std::vector<FlowRow>& rows, bool oracle) {
  const int n = rows.empty() ? 0 : static_cast<int>(rows.front().v.size());
  out << 't';
  for (int i = 0; i < n; ++i) out << ",v" << i;
  out << ",g";
  if (oracle) {
    for (int i = 0; i < n; ++i) out << ",rk_v" << i;
    out << ",deviation";
  }
  out << '\n';
  for (const FlowRow& row : rows) {
    out << format_number(row.t);
    for (int i = 0; i < n; ++i) out << ',' << format_number(row.v(i));
    out << ',' << format_number(row.causal);
    if (oracle) {
      for (int i = 0; i < n; ++i) out << ',' << format_number(row.rk(i));
      out << ',' << format_number(row.deviation);
    }
    out << '\n';
  }
}

}  // namespace nullbound
