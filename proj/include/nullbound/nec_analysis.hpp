#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nullbound/cone_flow.hpp"

namespace nullbound {

/// Axis-aligned box Π[a_i, b_i] whose closure must sit inside the open
/// metric domain. resolution[i] grid points per axis; 1 means the midpoint.
struct Region {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> resolution;

  int dimension() const { return static_cast<int>(lower.size()); }
};

/// Throws InvalidArgument / OutsideDomain when the box is malformed or
/// touches the boundary of the domain.
void validate_region(const MetricSpec& spec, const Region& region);
std::vector<Point> grid_points(const Region& region);

struct AnalysisOptions {
  // null cone sampling (per base point)
  int null_negative = 16;
  int null_positive = 64;
  // stage 1
  int uniform_directions = 512;
  int anchors_per_point = 16;
  int samples_per_stratum = 2;  // per anchor, per causal side
  int rungs = 12;
  double eps0 = 1.0;
  // stage 2
  int refine_seeds = 20;
  int refine_iterations = 200;
  // decisions
  double tol_null = 1e-9;
  int slope_window = 6;
  double slope_threshold = -0.5;
  double certificate_gap = 1.0;

  unsigned workers = 0;  // 0: hardware concurrency
  std::uint64_t seed = 42;

  double ladder(int k) const;  // eps0 * 2^-k
  double margin_floor() const { return ladder(rungs); }
};

struct RatioSample {
  BundlePoint sample;
  double causal = 0.0;  // g_p(v,v)
  double field = 0.0;   // F_p(v,v)

  double ratio() const;     // F / |g|
  double quotient() const;  // F / g
  double margin() const;    // |g|
};

/// Throws Domain if g_p(v,v) = 0 or anything is non-finite. v need not be
/// normalised.
RatioSample ratio_sample(const SymmetricField& field, const MetricSpec& spec, const Point& p,
                         const Eigen::VectorXd& v);

enum class NecStatus { Holds, Violated, Vacuous };
std::string_view to_string(NecStatus status);

struct NecResult {
  NecStatus status = NecStatus::Holds;
  double min_value = 0.0;  // min F_p(v,v) over sampled null v
  std::optional<BundlePoint> worst;
  std::size_t base_points = 0;
  std::size_t null_samples = 0;
  std::string note;
};

NecResult check_nec(const SymmetricField& field, const MetricSpec& spec, const Region& region,
                    const AnalysisOptions& options = {});

/// B = −|F_p(v0, g_p v0)| / ⟨g_p v0, g_p v0⟩ for a unit null v0.
double near_null_certificate(const SymmetricField& field, const MetricSpec& spec, const Point& p,
                             const Eigen::VectorXd& v0);
double near_null_certificate(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g, const Eigen::VectorXd& v0);

struct MarginRung {
  double eps_upper = 0.0;
  double eps_lower = 0.0;
  double inf_r = 0.0;  // +inf when empty
  std::size_t count = 0;
  std::optional<RatioSample> argmin;

  bool empty() const { return count == 0; }
};

enum class CZMode { Timelike, AllNonNull };

struct CZEstimate {
  CZMode mode = CZMode::AllNonNull;
  // AllNonNull: inf of r = F/|g|.  Timelike: −inf of r over timelike v, the
  // least C with F ≥ C·g on timelike v.
  double value = 0.0;
  double sampled = 0.0;  // stage 1 only
  double refined = 0.0;  // stage 2 only
  std::optional<RatioSample> argmin;
  std::size_t samples = 0;
};

enum class Verdict { Bounded, Diverging };
std::string_view to_string(Verdict verdict);

struct VerdictResult {
  Verdict verdict = Verdict::Bounded;
  double slope = 0.0;       // least-squares d(inf r)/d(rung) over the window
  double final_rung = 0.0;  // inf r of the last non-empty rung
  std::vector<int> window;  // rung indices used in the fit
  std::string rule;
};

/// Needs at least `slope_window` non-empty rungs, else InsufficientData.
VerdictResult decide_verdict(const std::vector<MarginRung>& sweep, double certificate_inf,
                             const AnalysisOptions& options);

struct BoundReport {
  std::string metric;
  std::string field;
  FieldProvenance provenance = FieldProvenance::Ricci;
  Region region;
  AnalysisOptions options;

  NecResult nec;
  CZEstimate timelike;
  CZEstimate theorem;
  std::vector<MarginRung> margin_sweep;
  double certificate_inf = 0.0;
  std::optional<BundlePoint> certificate_anchor;
  VerdictResult verdict;
  // −C_Z is a valid timelike constant iff −C_Z ≥ C^T.
  bool sign_bridge_consistent = true;
  std::vector<std::string> warnings;
};

CZEstimate estimate_CZ(const SymmetricField& field, const MetricSpec& spec, const Region& region, CZMode mode,
                       const AnalysisOptions& options = {});
std::vector<MarginRung> margin_sweep(const SymmetricField& field, const MetricSpec& spec, const Region& region,
                                     const AnalysisOptions& options = {});
/// Full pipeline over one shared sampling pass.
BoundReport analyze_bound(const SymmetricField& field, const MetricSpec& spec, const Region& region,
                          const AnalysisOptions& options = {});

}  // namespace nullbound
