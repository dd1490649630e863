#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "nullbound/nec_analysis.hpp"

namespace nullbound {

using Json = nlohmann::ordered_json;

/// %.12g text; "inf", "-inf", "nan" for non-finite values; -0 prints as 0.
std::string format_number(double x);
/// A JSON value printing with at most 12 significant digits (strings for
/// non-finite values).
Json json_number(double x);
Json json_vector(const Eigen::VectorXd& v);

Json to_json(const Region& region);
Json to_json(const BundlePoint& p);
Json to_json(const RatioSample& s);
Json to_json(const NecResult& result);
Json to_json(const CZEstimate& estimate);
Json to_json(const BoundReport& report);
Json to_json(const NullProjection& projection);

/// Pretty-printed with two-space indent and a trailing newline.
std::string render(const Json& json);

struct FlowRow {
  double t = 0.0;
  Eigen::VectorXd v;
  double causal = 0.0;
  Eigen::VectorXd rk;  // empty without the oracle
  double deviation = 0.0;
};

// epsilon,inf_r,n_samples
void write_sweep_csv(std::ostream& out, const std::vector<MarginRung>& sweep);
// t,v0..v{n-1},g[,rk_v0..rk_v{n-1},deviation]
void write_flow_csv(std::ostream& out, const std::vector<FlowRow>& rows, bool oracle);

}  // namespace nullbound
