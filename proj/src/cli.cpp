#include "nullbound/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nullbound/catalog.hpp"
#include "nullbound/report_io.hpp"

namespace nullbound {

namespace {

struct Settings {
  std::string metric;
  std::string field = "ricci";
  std::string field_file;
  std::string region;
  std::string resolution;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  AnalysisOptions analysis;
  std::string output;
  std::string csv;
  std::string format = "json";
  bool verbose = false;

  std::string point;
  std::string direction;
  std::string t_range = "0,1";
  int rows = 11;
  bool oracle = false;
  int steps = 1000;
  double horizon = 40.0;

  std::string catalog_name;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0') {
      throw Error(ErrorCode::InvalidArgument, "cannot read '" + item + "' in " + what);
    }
    values.push_back(x);
  }
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, what + " is empty");
  return values;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct LoadedMetric {
  MetricSpec spec;
  const CatalogEntry* entry = nullptr;
};

LoadedMetric load_metric(const std::string& source) {
  if (source.empty()) throw Error(ErrorCode::InvalidArgument, "--metric is required");
  for (const CatalogEntry& entry : catalog_list()) {
    if (entry.name == source) return {entry.spec, &entry};
  }
  if (!std::filesystem::exists(source)) {
    throw Error(ErrorCode::UnknownEntry, "'" + source + "' is neither a catalog entry nor a file");
  }
  return {parse_metric(read_file(source)), nullptr};
}

SymmetricField load_field(const Settings& s, const LoadedMetric& metric) {
  if (s.field == "file" || !s.field_file.empty()) {
    if (s.field_file.empty()) throw Error(ErrorCode::InvalidArgument, "--field file needs --field-file PATH");
    const MetricSpec components = parse_metric(read_file(s.field_file));
    if (components.dimension() != metric.spec.dimension()) {
      throw Error(ErrorCode::InvalidArgument, "field file dimension does not match the metric");
    }
    return expression_field(components, components.name().empty() ? "file" : components.name());
  }
  return builtin_field(metric.spec, s.field);
}

// "a,b x c,d x ..." with optional spaces
Region parse_region(const std::string& text) {
  Region region;
  std::string compact;
  for (const char c : text) {
    if (c != ' ') compact += c;
  }
  std::size_t start = 0;
  while (start <= compact.size()) {
    std::size_t end = compact.find('x', start);
    if (end == std::string::npos) end = compact.size();
    const std::vector<double> pair = parse_list(compact.substr(start, end - start), "region axis");
    if (pair.size() != 2) throw Error(ErrorCode::InvalidArgument, "region axes are written a,b");
    region.lower.push_back(pair[0]);
    region.upper.push_back(pair[1]);
    start = end + 1;
  }
  return region;
}

Region resolve_region(const Settings& s, const LoadedMetric& metric) {
  Region region;
  if (!s.region.empty()) {
    region = parse_region(s.region);
    if (metric.entry && metric.entry->default_region.dimension() == region.dimension()) {
      region.resolution = metric.entry->default_region.resolution;
    } else {
      region.resolution.assign(region.lower.size(), 3);
    }
  } else if (metric.entry) {
    region = metric.entry->default_region;
  } else {
    throw Error(ErrorCode::InvalidArgument, "--region is required for metrics read from a file");
  }
  if (!s.resolution.empty()) {
    const std::vector<double> r = parse_list(s.resolution, "--resolution");
    if (r.size() == 1) {
      region.resolution.assign(region.lower.size(), static_cast<int>(r[0]));
    } else {
      region.resolution.clear();
      for (const double x : r) region.resolution.push_back(static_cast<int>(x));
    }
  }
  validate_region(metric.spec, region);
  return region;
}

Point resolve_point(const Settings& s, const LoadedMetric& metric) {
  Point p;
  if (!s.point.empty()) {
    const std::vector<double> x = parse_list(s.point, "--point");
    p = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  } else if (metric.entry) {
    const Region& r = metric.entry->default_region;
    p.resize(r.dimension());
    for (int i = 0; i < r.dimension(); ++i) p(i) = 0.5 * (r.lower[i] + r.upper[i]);
  } else {
    throw Error(ErrorCode::InvalidArgument, "--point is required for metrics read from a file");
  }
  if (p.size() != metric.spec.dimension()) throw Error(ErrorCode::InvalidArgument, "--point has the wrong dimension");
  metric.spec.require_in_domain(p);
  return p;
}

Eigen::VectorXd resolve_direction(const Settings& s, int dimension) {
  if (s.direction.empty()) throw Error(ErrorCode::InvalidArgument, "--direction is required");
  const std::vector<double> x = parse_list(s.direction, "--direction");
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  if (v.size() != dimension) throw Error(ErrorCode::InvalidArgument, "--direction has the wrong dimension");
  if (!(v.norm() > 0.0) || !v.allFinite()) throw Error(ErrorCode::InvalidArgument, "--direction must be non-zero");
  return v.normalized();
}

std::uint64_t resolve_seed(const Settings& s) {
  if (s.seed) return *s.seed;
  if (const char* env = std::getenv("NULLBOUND_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (*end != '\0') throw Error(ErrorCode::InvalidArgument, "NULLBOUND_SEED must be an unsigned integer");
    return value;
  }
  return 42;
}

AnalysisOptions resolve_options(const Settings& s) {
  AnalysisOptions o = s.analysis;
  o.seed = resolve_seed(s);
  o.workers = s.workers;
  return o;
}

// Writes to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  file << text;
}

int cmd_check_nec(const Settings& s, std::ostream& out, std::ostream& err) {
  const LoadedMetric metric = load_metric(s.metric);
  const SymmetricField field = load_field(s, metric);
  const Region region = resolve_region(s, metric);
  const AnalysisOptions options = resolve_options(s);
  const NecResult result = check_nec(field, metric.spec, region, options);
  Json json;
  json["command"] = "check-nec";
  json["metric"] = metric.spec.name();
  json["field"] = field.name();
  json["region"] = to_json(region);
  json["seed"] = options.seed;
  json["tol_null"] = json_number(options.tol_null);
  json["nec"] = to_json(result);
  emit(s.output, render(json), out);
  if (s.verbose) err << "nec " << to_string(result.status) << ", min F(v,v) = " << format_number(result.min_value) << '\n';
  return result.status == NecStatus::Violated ? kExitNegative : kExitOk;
}

int cmd_bound(const Settings& s, std::ostream& out, std::ostream& err) {
  const LoadedMetric metric = load_metric(s.metric);
  const SymmetricField field = load_field(s, metric);
  const Region region = resolve_region(s, metric);
  const BoundReport report = analyze_bound(field, metric.spec, region, resolve_options(s));
  std::ostringstream sweep;
  write_sweep_csv(sweep, report.margin_sweep);
  if (s.format == "csv") {
    emit(s.output, sweep.str(), out);
  } else {
    emit(s.output, render(to_json(report)), out);
  }
  if (!s.csv.empty()) emit(s.csv, sweep.str(), out);
  if (s.verbose) {
    err << "verdict " << to_string(report.verdict.verdict) << ", C_Z = " << format_number(report.theorem.value)
        << ", C^T = " << format_number(report.timelike.value) << '\n';
  }
  return report.verdict.verdict == Verdict::Diverging ? kExitNegative : kExitOk;
}

int cmd_flow(const Settings& s, std::ostream& out, std::ostream& err) {
  const LoadedMetric metric = load_metric(s.metric);
  const Point p = resolve_point(s, metric);
  const Eigen::VectorXd v0 = resolve_direction(s, metric.spec.dimension());
  const std::vector<double> range = parse_list(s.t_range, "--t-range");
  if (range.size() != 2 || range[1] < range[0]) throw Error(ErrorCode::InvalidArgument, "--t-range is a,b with a <= b");
  if (s.rows < 1) throw Error(ErrorCode::InvalidArgument, "--rows must be positive");
  const Eigen::MatrixXd g = evaluate_metric(metric.spec, p);
  const SpectralFrame frame = spectral_frame(g);

  // A degenerate range has exactly one row.
  const int rows = range[0] == range[1] ? 1 : s.rows;
  std::vector<FlowRow> trace;
  double worst = 0.0;
  for (int i = 0; i < rows; ++i) {
    const double t = rows == 1 ? range[0] : (i == rows - 1 ? range[1] : range[0] + i * (range[1] - range[0]) / (rows - 1));
    const FlowResult flowed = flow_closed_form(frame, g, BundlePoint{p, v0}, t);
    FlowRow row{t, flowed.end.fiber, flowed.causal, {}, 0.0};
    if (s.oracle) {
      row.rk = t == 0.0 ? v0 : flow_rk_oracle(g, v0, t, s.steps);
      row.deviation = (row.rk - row.v).cwiseAbs().maxCoeff();
      worst = std::max(worst, row.deviation);
    }
    trace.push_back(std::move(row));
  }
  std::ostringstream csv;
  write_flow_csv(csv, trace, s.oracle);
  emit(s.output, csv.str(), out);
  if (s.oracle) err << "max deviation " << format_number(worst) << '\n';
  return kExitOk;
}

int cmd_project(const Settings& s, std::ostream& out, std::ostream&) {
  const LoadedMetric metric = load_metric(s.metric);
  const Point p = resolve_point(s, metric);
  const Eigen::VectorXd v = resolve_direction(s, metric.spec.dimension());
  const NullProjection projection =
      project_to_null(evaluate_metric(metric.spec, p), BundlePoint{p, v}, ProjectionOptions{s.horizon});
  Json json;
  json["command"] = "project";
  json["metric"] = metric.spec.name();
  json.update(to_json(projection));
  emit(s.output, render(json), out);
  return kExitOk;
}

int cmd_catalog_list(std::ostream& out) {
  for (const CatalogEntry& e : catalog_list()) {
    out << e.name << "\tdim=" << e.spec.dimension() << "\tsignature=(" << e.negative << "," << e.positive << ")\t"
        << to_string(e.regularity) << "\tfields=";
    for (std::size_t i = 0; i < e.fields.size(); ++i) out << (i ? "," : "") << e.fields[i];
    out << '\t' << e.summary << '\n';
  }
  return kExitOk;
}

int cmd_catalog_export(const Settings& s, std::ostream& out) {
  const CatalogEntry& entry = catalog_get(s.catalog_name);
  emit(s.output, entry.document, out);
  return kExitOk;
}

void add_common(CLI::App* app, Settings& s) {
  app->add_option("--metric,-m", s.metric, "catalog entry name or metric document path")->required();
  app->add_option("--seed", s.seed, "random seed (default: $NULLBOUND_SEED, else 42)");
  app->add_option("--workers", s.workers, "worker threads (default: hardware concurrency)");
  app->add_option("--output,-o", s.output, "output file (default: stdout)");
  app->add_flag("--verbose,-v", s.verbose, "diagnostics on stderr");
}

void add_analysis(CLI::App* app, Settings& s) {
  AnalysisOptions& o = s.analysis;
  app->add_option("--field,-f", s.field, "ricci | bakry-emery | minus_g | neg_diag | zero | file");
  app->add_option("--field-file", s.field_file, "field components in the metric document format");
  app->add_option("--region,-r", s.region, "coordinate box a,bxc,dx... (default: catalog region)");
  app->add_option("--resolution", s.resolution, "grid points per axis, one value or a comma list");
  app->add_option("--tol-null", o.tol_null, "NEC tolerance on F(v,v)");
  app->add_option("--null-negative", o.null_negative, "null sampler directions in the negative eigenspace");
  app->add_option("--null-positive", o.null_positive, "null sampler directions in the positive eigenspace");
  app->add_option("--directions", o.uniform_directions, "uniform sphere directions per base point");
  app->add_option("--anchors", o.anchors_per_point, "null anchors flowed off the cone per base point");
  app->add_option("--per-stratum", o.samples_per_stratum, "flowed samples per anchor, stratum and side");
  app->add_option("--rungs", o.rungs, "margin ladder rungs");
  app->add_option("--eps0", o.eps0, "top of the margin ladder");
  app->add_option("--refine-seeds", o.refine_seeds, "simplex refinement seeds");
  app->add_option("--refine-iterations", o.refine_iterations, "simplex iterations per seed");
  app->add_option("--slope-window", o.slope_window, "rungs used in the slope fit");
  app->add_option("--slope-threshold", o.slope_threshold, "divergence slope threshold per rung");
  app->add_option("--certificate-gap", o.certificate_gap, "divergence gap below the certificate");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Null cone sampling, NEC checks and near-null ratio bounds", "nullbound"};
  app.require_subcommand(1);
  Settings s;

  CLI::App* check = app.add_subcommand("check-nec", "check F(v,v) >= 0 on sampled null vectors");
  add_common(check, s);
  add_analysis(check, s);

  CLI::App* bound = app.add_subcommand("bound", "estimate C_Z, margin sweep, certificates and verdict");
  add_common(bound, s);
  add_analysis(bound, s);
  bound->add_option("--csv", s.csv, "also write the margin sweep CSV here");
  bound->add_option("--format", s.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* flow = app.add_subcommand("flow", "trace the cone flow from a start vector");
  add_common(flow, s);
  flow->add_option("--point,-p", s.point, "base point x0,x1,...");
  flow->add_option("--direction,-d", s.direction, "start vector (normalised)");
  flow->add_option("--t-range", s.t_range, "a,b");
  flow->add_option("--rows", s.rows, "rows in [a, b]");
  flow->add_flag("--oracle", s.oracle, "add RK4 columns and deviation");
  flow->add_option("--steps", s.steps, "RK4 steps per row");

  CLI::App* project = app.add_subcommand("project", "move a non-null vector onto the null cone along the flow");
  add_common(project, s);
  project->add_option("--point,-p", s.point, "base point x0,x1,...");
  project->add_option("--direction,-d", s.direction, "input vector (normalised)");
  project->add_option("--horizon", s.horizon, "search |s| <= horizon");

  CLI::App* catalog = app.add_subcommand("catalog", "built-in metrics");
  catalog->require_subcommand(1);
  CLI::App* list = catalog->add_subcommand("list", "list catalog entries");
  CLI::App* exporter = catalog->add_subcommand("export", "write the DSL document of an entry");
  exporter->add_option("name", s.catalog_name, "entry name")->required();
  exporter->add_option("--output,-o", s.output, "output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (check->parsed()) return cmd_check_nec(s, out, err);
    if (bound->parsed()) return cmd_bound(s, out, err);
    if (flow->parsed()) return cmd_flow(s, out, err);
    if (project->parsed()) return cmd_project(s, out, err);
    if (list->parsed()) return cmd_catalog_list(out);
    if (exporter->parsed()) return cmd_catalog_export(s, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::NotInFlowImage ? kExitNegative : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace nullbound
