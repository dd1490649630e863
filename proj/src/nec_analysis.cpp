#include "nullbound/nec_analysis.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "nullbound/nelder_mead.hpp"

namespace nullbound {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeds depend on the base point itself, so a point gets the same samples
// whichever region, grid position or worker it comes from.
std::uint64_t point_seed(const Point& p, std::uint64_t seed) {
  std::uint64_t h = splitmix(seed);
  for (int i = 0; i < p.size(); ++i) h = splitmix(h ^ std::bit_cast<std::uint64_t>(p(i) == 0.0 ? 0.0 : p(i)));
  return h;
}

std::uint64_t null_seed(std::uint64_t point) { return splitmix(point ^ 0x6e756c6cULL); }
std::uint64_t stage1_seed(std::uint64_t point) { return splitmix(point ^ 0x73746731ULL); }

template <typename Fn>
void run_parallel(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_field_dimension(const SymmetricField& field, const MetricSpec& spec) {
  if (field.dimension() != spec.dimension()) {
    throw Error(ErrorCode::InvalidArgument, "field '" + field.name() + "' has dimension " +
                                                std::to_string(field.dimension()) + ", metric has " +
                                                std::to_string(spec.dimension()));
  }
}

// Index k with ladder(k+1) <= m <= ladder(k), or -1 outside the ladder.
int rung_of(double margin, const AnalysisOptions& options) {
  if (!(margin <= options.eps0) || margin < options.margin_floor()) return -1;
  int k = static_cast<int>(std::floor(std::log2(options.eps0 / margin)));
  k = std::clamp(k, 0, options.rungs - 1);
  while (k > 0 && margin > options.ladder(k)) --k;
  while (k + 1 < options.rungs && margin < options.ladder(k + 1)) ++k;
  return k;
}

std::vector<MarginRung> empty_sweep(const AnalysisOptions& options) {
  std::vector<MarginRung> sweep(static_cast<std::size_t>(options.rungs));
  for (int k = 0; k < options.rungs; ++k) {
    sweep[k].eps_upper = options.ladder(k);
    sweep[k].eps_lower = options.ladder(k + 1);
    sweep[k].inf_r = kInf;
  }
  return sweep;
}

void absorb(MarginRung& into, const MarginRung& from) {
  into.count += from.count;
  if (from.count > 0 && (into.argmin == std::nullopt || from.inf_r < into.inf_r)) {
    into.inf_r = from.inf_r;
    into.argmin = from.argmin;
  }
}

struct PointWork {
  Point point;
  MatrixXd g;
  MatrixXd f;
  bool mixed = false;

  double nec_min = kInf;
  VectorXd nec_worst;
  std::size_t null_count = 0;
  double certificate_min = kInf;
  VectorXd certificate_anchor;

  std::vector<MarginRung> rungs;
  std::vector<RatioSample> best_all;
  std::vector<RatioSample> best_timelike;
  std::size_t all_count = 0;
  std::size_t timelike_count = 0;
  std::size_t ladder_count = 0;
};

class PointSampler {
 public:
  PointSampler(const SymmetricField& field, const MetricSpec& spec, const AnalysisOptions& options)
      : field_(field), spec_(spec), options_(options) {}

  PointWork nulls_only(const Point& p) const {
    PointWork work = prepare(p);
    if (work.mixed) sample_nulls(work, spectral_frame(work.g));
    return work;
  }

  PointWork full(const Point& p) const {
    PointWork work = prepare(p);
    work.rungs = empty_sweep(options_);
    std::vector<RatioSample> all;
    std::vector<RatioSample> timelike;
    std::mt19937_64 rng(stage1_seed(point_seed(p, options_.seed)));

    auto record = [&](const VectorXd& v) {
      RatioSample s;
      s.causal = v.dot(work.g * v);
      s.field = v.dot(work.f * v);
      if (s.causal == 0.0 || !std::isfinite(s.causal) || !std::isfinite(s.field)) return;
      s.sample = BundlePoint{p, v};
      const double margin = s.margin();
      const int k = rung_of(margin, options_);
      if (k >= 0) {
        MarginRung& rung = work.rungs[static_cast<std::size_t>(k)];
        ++rung.count;
        ++work.ladder_count;
        if (s.ratio() < rung.inf_r) {
          rung.inf_r = s.ratio();
          rung.argmin = s;
        }
      }
      if (margin < options_.margin_floor()) return;
      ++work.all_count;
      all.push_back(s);
      if (s.causal < 0.0) {
        ++work.timelike_count;
        timelike.push_back(s);
      }
    };

    // Rejection side: uniform directions on the sphere, binned by margin.
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = spec_.dimension();
    for (int i = 0; i < options_.uniform_directions; ++i) {
      VectorXd v(n);
      for (int j = 0; j < n; ++j) v(j) = normal(rng);
      if (v.norm() < 1e-8) continue;
      record(v.normalized());
    }

    if (work.mixed) {
      const SpectralFrame frame = spectral_frame(work.g);
      const NullSampleSet nulls = sample_nulls(work, frame);
      // Flow side: push null anchors off the cone to a prescribed margin.
      const std::size_t available = nulls.vectors.size();
      const std::size_t anchors = std::min<std::size_t>(available, static_cast<std::size_t>(options_.anchors_per_point));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (std::size_t a = 0; a < anchors; ++a) {
        const VectorXd& v0 = nulls.vectors[a * available / anchors];
        const FiberFlow flow(frame, v0);
        const double rate = 4.0 * (work.g * v0).squaredNorm();
        for (int k = 0; k < options_.rungs; ++k) {
          const double log_hi = std::log(options_.ladder(k));
          const double log_lo = std::log(options_.ladder(k + 1));
          for (const double side : {1.0, -1.0}) {
            for (int j = 0; j < options_.samples_per_stratum; ++j) {
              const double target = std::exp(log_lo + unit(rng) * (log_hi - log_lo));
              if (const auto t = time_to_margin(flow, frame, side, target, rate)) record(flow.at(*t));
            }
          }
        }
      }
    }

    keep_best(all, work.best_all);
    keep_best(timelike, work.best_timelike);
    return work;
  }

 private:
  PointWork prepare(const Point& p) const {
    PointWork work;
    work.point = p;
    work.g = evaluate_metric(spec_, p);
    const SpectralFrame frame = spectral_frame(work.g);
    work.mixed = frame.mixed_signature();
    work.f = field_(p);
    return work;
  }

  NullSampleSet sample_nulls(PointWork& work, const SpectralFrame& frame) const {
    NullSampleSet nulls = sample_null_cone(frame, options_.null_negative, options_.null_positive,
                                           null_seed(point_seed(work.point, options_.seed)));
    nulls.point = work.point;
    for (const VectorXd& v : nulls.vectors) {
      ++work.null_count;
      const double value = v.dot(work.f * v);
      if (value < work.nec_min) {
        work.nec_min = value;
        work.nec_worst = v;
      }
      const double certificate = near_null_certificate(work.f, work.g, v);
      if (certificate < work.certificate_min) {
        work.certificate_min = certificate;
        work.certificate_anchor = v;
      }
    }
    return nulls;
  }

  // Flow time t with g(u(t), u(t)) = side·target, or nothing if the margin is
  // out of reach of this fiber within the flow's range guard.
  static std::optional<double> time_to_margin(const FiberFlow& flow, const SpectralFrame& frame, double side,
                                              double target, double rate) {
    const double limit = kMaxFlowExponent / (2.0 * frame.max_abs_eigenvalue());
    auto signed_causal = [&](double t) { return side * flow.causal(side * t); };
    double hi = rate > 0.0 ? target / rate : 1e-3;
    while (signed_causal(hi) < target) {
      hi *= 2.0;
      if (hi > limit) return std::nullopt;
    }
    double lo = 0.0;
    double mid = hi;
    for (int iter = 0; iter < 200; ++iter) {
      mid = 0.5 * (lo + hi);
      const double c = signed_causal(mid);
      if (std::abs(c - target) <= 1e-6 * target) break;
      if (c < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return side * mid;
  }

  void keep_best(std::vector<RatioSample>& candidates, std::vector<RatioSample>& out) const {
    const std::size_t keep = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(options_.refine_seeds));
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      [](const RatioSample& a, const RatioSample& b) { return a.ratio() < b.ratio(); });
    candidates.resize(keep);
    out = std::move(candidates);
  }

  const SymmetricField& field_;
  const MetricSpec& spec_;
  const AnalysisOptions& options_;
};

std::vector<PointWork> sample_region(const SymmetricField& field, const MetricSpec& spec, const Region& region,
                                     const AnalysisOptions& options, bool nulls_only) {
  require_field_dimension(field, spec);
  validate_region(spec, region);
  if (options.rungs < 1 || !(options.eps0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "margin ladder needs rungs >= 1 and eps0 > 0");
  const std::vector<Point> points = grid_points(region);
  std::vector<PointWork> work(points.size());
  const PointSampler sampler(field, spec, options);
  run_parallel(points.size(), options.workers, [&](std::size_t i) {
    work[i] = nulls_only ? sampler.nulls_only(points[i]) : sampler.full(points[i]);
  });
  return work;
}

NecResult reduce_nec(const std::vector<PointWork>& work, const AnalysisOptions& options) {
  NecResult result;
  result.base_points = work.size();
  result.min_value = kInf;
  for (const PointWork& w : work) {
    if (!w.mixed) {
      std::ostringstream os;
      os << "definite signature at p = (" << w.point.transpose() << "): there are no null vectors, so the NEC holds vacuously";
      result.status = NecStatus::Vacuous;
      result.note = os.str();
      result.worst.reset();
      result.null_samples = 0;
      result.min_value = 0.0;
      return result;
    }
    result.null_samples += w.null_count;
    if (w.nec_min < result.min_value) {
      result.min_value = w.nec_min;
      result.worst = BundlePoint{w.point, w.nec_worst};
    }
  }
  result.status = result.min_value >= -options.tol_null ? NecStatus::Holds : NecStatus::Violated;
  return result;
}

// Tangent-plane chart of the unit sphere at v.
MatrixXd tangent_basis(const VectorXd& v) {
  const Eigen::HouseholderQR<MatrixXd> qr{MatrixXd(v)};
  const MatrixXd q = qr.householderQ();
  return q.rightCols(v.size() - 1);
}

RatioSample refine(const RatioSample& seed, const MatrixXd& g, const MatrixXd& f, bool timelike_only,
                   const AnalysisOptions& options) {
  const VectorXd v = seed.sample.fiber.normalized();
  const MatrixXd basis = tangent_basis(v);
  const double floor = options.margin_floor();
  auto chart = [&](const VectorXd& x) -> VectorXd { return (v + basis * x).normalized(); };
  auto objective = [&](const VectorXd& x) {
    const VectorXd w = chart(x);
    const double c = w.dot(g * w);
    if (!(std::abs(c) >= floor) || (timelike_only && c >= 0.0)) return kInf;
    return w.dot(f * w) / std::abs(c);
  };
  const SimplexResult best = nelder_mead(objective, VectorXd::Zero(v.size() - 1), 0.05, options.refine_iterations);
  RatioSample out = seed;
  if (best.value < seed.ratio()) {
    const VectorXd w = chart(best.x);
    out.sample.fiber = w;
    out.causal = w.dot(g * w);
    out.field = w.dot(f * w);
  }
  return out;
}

CZEstimate reduce_cz(const std::vector<PointWork>& work, CZMode mode, const AnalysisOptions& options) {
  const bool timelike = mode == CZMode::Timelike;
  struct Candidate {
    RatioSample sample;
    std::size_t point;
  };
  std::vector<Candidate> seeds;
  CZEstimate estimate;
  estimate.mode = mode;
  for (std::size_t i = 0; i < work.size(); ++i) {
    estimate.samples += timelike ? work[i].timelike_count : work[i].all_count;
    for (const RatioSample& s : timelike ? work[i].best_timelike : work[i].best_all) seeds.push_back({s, i});
  }
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const Candidate& a, const Candidate& b) { return a.sample.ratio() < b.sample.ratio(); });
  if (seeds.empty()) {
    estimate.value = estimate.sampled = estimate.refined = std::numeric_limits<double>::quiet_NaN();
    return estimate;
  }
  const RatioSample& stage1 = seeds.front().sample;
  RatioSample best = stage1;
  double refined = kInf;
  const std::size_t count = std::min<std::size_t>(seeds.size(), static_cast<std::size_t>(options.refine_seeds));
  for (std::size_t i = 0; i < count; ++i) {
    const PointWork& w = work[seeds[i].point];
    const RatioSample r = refine(seeds[i].sample, w.g, w.f, timelike, options);
    refined = std::min(refined, r.ratio());
    if (r.ratio() < best.ratio()) best = r;
  }
  const double sign = timelike ? -1.0 : 1.0;
  estimate.sampled = sign * stage1.ratio();
  estimate.refined = sign * refined;
  estimate.value = sign * best.ratio();
  estimate.argmin = best;
  return estimate;
}

std::vector<MarginRung> reduce_sweep(const std::vector<PointWork>& work, const AnalysisOptions& options) {
  std::vector<MarginRung> sweep = empty_sweep(options);
  for (const PointWork& w : work) {
    for (std::size_t k = 0; k < sweep.size(); ++k) absorb(sweep[k], w.rungs[k]);
  }
  return sweep;
}

}  // namespace

double AnalysisOptions::ladder(int k) const { return std::ldexp(eps0, -k); }

double RatioSample::ratio() const { return field / std::abs(causal); }
double RatioSample::quotient() const { return field / causal; }
double RatioSample::margin() const { return std::abs(causal); }

void validate_region(const MetricSpec& spec, const Region& region) {
  const int n = spec.dimension();
  if (region.dimension() != n || static_cast<int>(region.upper.size()) != n ||
      static_cast<int>(region.resolution.size()) != n) {
    throw Error(ErrorCode::InvalidArgument, "region must have one interval and one resolution per coordinate (" +
                                                std::to_string(n) + ")");
  }
  for (int i = 0; i < n; ++i) {
    const double a = region.lower[static_cast<std::size_t>(i)];
    const double b = region.upper[static_cast<std::size_t>(i)];
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
      throw Error(ErrorCode::InvalidArgument, "region axis " + std::to_string(i) + " needs finite a < b");
    }
    if (region.resolution[static_cast<std::size_t>(i)] < 1) {
      throw Error(ErrorCode::InvalidArgument, "region resolution must be at least 1");
    }
    const Interval& d = spec.domain()[static_cast<std::size_t>(i)];
    if (!d.contains(a) || !d.contains(b)) {
      std::ostringstream os;
      os << "region axis " << i << " [" << a << ", " << b << "] is not inside the open domain (" << d.lower << ", "
         << d.upper << ")";
      throw Error(ErrorCode::OutsideDomain, os.str());
    }
  }
}

std::vector<Point> grid_points(const Region& region) {
  const int n = region.dimension();
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = region.lower[static_cast<std::size_t>(i)];
    const double b = region.upper[static_cast<std::size_t>(i)];
    const int r = region.resolution[static_cast<std::size_t>(i)];
    auto& axis = axes[static_cast<std::size_t>(i)];
    if (r == 1) {
      axis.push_back(0.5 * (a + b));
    } else {
      for (int j = 0; j < r; ++j) axis.push_back(j == r - 1 ? b : a + j * (b - a) / (r - 1));
    }
  }
  std::vector<Point> points;
  std::vector<std::size_t> index(static_cast<std::size_t>(n), 0);
  while (true) {
    Point p(n);
    for (int i = 0; i < n; ++i) p(i) = axes[static_cast<std::size_t>(i)][index[static_cast<std::size_t>(i)]];
    points.push_back(p);
    int axis = n - 1;
    while (axis >= 0 && ++index[static_cast<std::size_t>(axis)] == axes[static_cast<std::size_t>(axis)].size()) {
      index[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return points;
}

RatioSample ratio_sample(const SymmetricField& field, const MetricSpec& spec, const Point& p, const VectorXd& v) {
  require_field_dimension(field, spec);
  if (v.size() != spec.dimension() || !v.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "direction must be a finite vector of the metric dimension");
  }
  spec.require_in_domain(p);
  RatioSample s;
  s.sample = BundlePoint{p, v};
  s.causal = v.dot(evaluate_metric(spec, p) * v);
  s.field = field.quadratic(p, v);
  if (s.causal == 0.0) throw Error(ErrorCode::Domain, "ratio undefined on null vectors");
  return s;
}

std::string_view to_string(NecStatus status) {
  switch (status) {
    case NecStatus::Holds: return "holds";
    case NecStatus::Violated: return "violated";
    case NecStatus::Vacuous: return "vacuous";
  }
  return "unknown";
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::Bounded ? "bounded" : "diverging";
}

NecResult check_nec(const SymmetricField& field, const MetricSpec& spec, const Region& region,
                    const AnalysisOptions& options) {
  return reduce_nec(sample_region(field, spec, region, options, true), options);
}

double near_null_certificate(const MatrixXd& f, const MatrixXd& g, const VectorXd& v0) {
  if (std::abs(v0.dot(g * v0)) > 1e-10) throw Error(ErrorCode::NotNull, "certificate anchor must be null (|g(v0,v0)| <= 1e-10)");
  const VectorXd gv = g * v0;
  return -std::abs(v0.dot(f * gv)) / gv.squaredNorm();
}

double near_null_certificate(const SymmetricField& field, const MetricSpec& spec, const Point& p, const VectorXd& v0) {
  require_field_dimension(field, spec);
  spec.require_in_domain(p);
  if (std::abs(v0.norm() - 1.0) > 1e-10) throw Error(ErrorCode::InvalidArgument, "certificate anchor must be a unit vector");
  return near_null_certificate(field(p), evaluate_metric(spec, p), v0);
}

VerdictResult decide_verdict(const std::vector<MarginRung>& sweep, double certificate_inf,
                             const AnalysisOptions& options) {
  VerdictResult result;
  for (int k = static_cast<int>(sweep.size()) - 1; k >= 0 && static_cast<int>(result.window.size()) < options.slope_window; --k) {
    if (!sweep[static_cast<std::size_t>(k)].empty()) result.window.insert(result.window.begin(), k);
  }
  if (options.slope_window < 2 || static_cast<int>(result.window.size()) < options.slope_window) {
    throw Error(ErrorCode::InsufficientData, "margin sweep has fewer than " + std::to_string(options.slope_window) +
                                                 " non-empty rungs");
  }
  double mean_k = 0.0;
  double mean_r = 0.0;
  for (const int k : result.window) {
    mean_k += k;
    mean_r += sweep[static_cast<std::size_t>(k)].inf_r;
  }
  mean_k /= static_cast<double>(result.window.size());
  mean_r /= static_cast<double>(result.window.size());
  double num = 0.0;
  double den = 0.0;
  for (const int k : result.window) {
    num += (k - mean_k) * (sweep[static_cast<std::size_t>(k)].inf_r - mean_r);
    den += (k - mean_k) * (k - mean_k);
  }
  result.slope = num / den;
  result.final_rung = sweep[static_cast<std::size_t>(result.window.back())].inf_r;
  const bool drops = result.final_rung < certificate_inf - options.certificate_gap;
  const bool steep = result.slope < options.slope_threshold;
  result.verdict = drops && steep ? Verdict::Diverging : Verdict::Bounded;
  std::ostringstream os;
  os << "diverging iff final rung inf r < certificate_inf - " << options.certificate_gap
     << " and least-squares slope of inf r per rung < " << options.slope_threshold << " over the last "
     << options.slope_window << " non-empty rungs; heuristic, not a proof";
  result.rule = os.str();
  return result;
}

CZEstimate estimate_CZ(const SymmetricField& field, const MetricSpec& spec, const Region& region, CZMode mode,
                       const AnalysisOptions& options) {
  return reduce_cz(sample_region(field, spec, region, options, false), mode, options);
}

std::vector<MarginRung> margin_sweep(const SymmetricField& field, const MetricSpec& spec, const Region& region,
                                     const AnalysisOptions& options) {
  return reduce_sweep(sample_region(field, spec, region, options, false), options);
}

BoundReport analyze_bound(const SymmetricField& field, const MetricSpec& spec, const Region& region,
                          const AnalysisOptions& options) {
  const std::vector<PointWork> work = sample_region(field, spec, region, options, false);
  BoundReport report;
  report.metric = spec.name();
  report.field = field.name();
  report.provenance = field.provenance();
  report.region = region;
  report.options = options;
  report.nec = reduce_nec(work, options);
  report.timelike = reduce_cz(work, CZMode::Timelike, options);
  report.theorem = reduce_cz(work, CZMode::AllNonNull, options);
  report.margin_sweep = reduce_sweep(work, options);

  report.certificate_inf = kInf;
  for (const PointWork& w : work) {
    if (w.certificate_min < report.certificate_inf) {
      report.certificate_inf = w.certificate_min;
      report.certificate_anchor = BundlePoint{w.point, w.certificate_anchor};
    }
  }
  for (const MarginRung& rung : report.margin_sweep) {
    if (rung.empty()) {
      std::ostringstream os;
      os << "EmptyStratum: no samples with margin in [" << rung.eps_lower << ", " << rung.eps_upper << "]";
      report.warnings.push_back(os.str());
    }
  }

  const bool any_null = std::any_of(work.begin(), work.end(), [](const PointWork& w) { return w.mixed; });
  if (!any_null) {
    report.certificate_inf = std::numeric_limits<double>::quiet_NaN();
    report.verdict.verdict = Verdict::Bounded;
    report.verdict.final_rung = std::numeric_limits<double>::quiet_NaN();
    report.verdict.rule = "no null vectors in the region: F/|g| is continuous on the compact unit sphere bundle";
  } else {
    report.verdict = decide_verdict(report.margin_sweep, report.certificate_inf, options);
  }
  if (std::isfinite(report.theorem.value) && std::isfinite(report.timelike.value)) {
    report.sign_bridge_consistent = -report.theorem.value >= report.timelike.value - 1e-12 * (1.0 + std::abs(report.timelike.value));
  }
  return report;
}

}  // namespace nullbound
