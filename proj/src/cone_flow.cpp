#include "nullbound/cone_flow.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace nullbound {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void require_unit(const VectorXd& v, const char* what) {
  if (!(std::abs(v.norm() - 1.0) <= kUnitTolerance)) {
    std::ostringstream os;
    os << what << " must be a unit vector (norm " << v.norm() << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

void require_flow_range(const SpectralFrame& frame, double t) {
  if (!std::isfinite(t) || std::abs(2.0 * t) * frame.max_abs_eigenvalue() > kMaxFlowExponent) {
    std::ostringstream os;
    os << "flow parameter t = " << t << " exceeds |2 t lambda| <= " << kMaxFlowExponent;
    throw Error(ErrorCode::ParameterOutOfRange, os.str());
  }
}

// Uniform direction on the unit sphere of R^dim.
VectorXd gaussian_direction(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd d(dim);
  do {
    for (int i = 0; i < dim; ++i) d(i) = normal(rng);
  } while (d.norm() < 1e-8);
  return d.normalized();
}

std::vector<VectorXd> subsphere_directions(int dim, int count, std::mt19937_64& rng) {
  std::vector<VectorXd> out;
  if (dim == 1) {
    out.push_back(VectorXd::Constant(1, 1.0));
    out.push_back(VectorXd::Constant(1, -1.0));
    return out;
  }
  for (int i = 0; i < count; ++i) out.push_back(gaussian_direction(dim, rng));
  return out;
}

}  // namespace

FiberFlow::FiberFlow(const SpectralFrame& frame, const VectorXd& start)
    : eigenvalues_(frame.eigenvalues),
      eigenvectors_(frame.eigenvectors),
      coefficients_(frame.eigenvectors.transpose() * start) {}

VectorXd FiberFlow::normalized_coefficients(double s) const {
  const int n = static_cast<int>(coefficients_.size());
  // Work with logarithms so that e^{2sλ} never overflows.
  VectorXd exponent(n);
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double w = std::abs(coefficients_(i));
    exponent(i) = w > 0.0 ? 2.0 * s * eigenvalues_(i) + std::log(w) : -std::numeric_limits<double>::infinity();
    shift = std::max(shift, exponent(i));
  }
  VectorXd q(n);
  for (int i = 0; i < n; ++i) {
    q(i) = std::isinf(exponent(i)) ? 0.0 : std::copysign(std::exp(exponent(i) - shift), coefficients_(i));
  }
  return q / q.norm();
}

VectorXd FiberFlow::at(double s) const { return eigenvectors_ * normalized_coefficients(s); }

double FiberFlow::causal(double s) const {
  const VectorXd q = normalized_coefficients(s);
  return q.dot(eigenvalues_.cwiseProduct(q));
}

double FiberFlow::causal_rate(double s) const {
  const VectorXd q = normalized_coefficients(s);
  const double h = q.dot(eigenvalues_.cwiseProduct(q));
  const double gu2 = q.dot(eigenvalues_.cwiseAbs2().cwiseProduct(q));
  return 4.0 * (gu2 - h * h);
}

FlowResult flow_closed_form(const SpectralFrame& frame, const MatrixXd& g, const BundlePoint& start, double t) {
  require_unit(start.fiber, "flow start vector");
  require_flow_range(frame, t);
  FlowResult result;
  result.t = t;
  result.start = start;
  result.end.point = start.point;
  if (t == 0.0) {
    result.end.fiber = start.fiber;
  } else {
    const VectorXd exponents = 2.0 * t * frame.eigenvalues;
    const double shift = exponents.maxCoeff();
    const VectorXd scale = (exponents.array() - shift).exp().matrix();
    const VectorXd w = frame.eigenvectors * scale.cwiseProduct(frame.eigenvectors.transpose() * start.fiber);
    result.end.fiber = w / w.norm();
  }
  result.causal = result.end.fiber.dot(g * result.end.fiber);
  return result;
}

FlowResult flow_closed_form(const MatrixXd& g, const BundlePoint& start, double t) {
  return flow_closed_form(spectral_frame(g), g, start, t);
}

VectorXd flow_rk_oracle(const MatrixXd& g, const VectorXd& v0, double t, int steps) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "RK oracle needs at least one step");
  require_unit(v0, "flow start vector");
  require_flow_range(spectral_frame(g), t);
  const double h = t / steps;
  VectorXd v = v0;
  for (int i = 0; i < steps; ++i) {
    const VectorXd k1 = ode_rhs(g, v);
    const VectorXd k2 = ode_rhs(g, VectorXd(v + 0.5 * h * k1));
    const VectorXd k3 = ode_rhs(g, VectorXd(v + 0.5 * h * k2));
    const VectorXd k4 = ode_rhs(g, VectorXd(v + h * k3));
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return v;
}

NullProjection project_to_null(const SpectralFrame& frame, const MatrixXd& g, const BundlePoint& input,
                               const ProjectionOptions& options) {
  if (!frame.mixed_signature()) {
    throw Error(ErrorCode::RiemannianSignature, "metric has definite signature: there are no null vectors");
  }
  require_unit(input.fiber, "projection input");
  const double h0 = input.fiber.dot(g * input.fiber);
  if (std::abs(h0) <= 1e-12 * frame.max_abs_eigenvalue()) {
    throw Error(ErrorCode::NotNull, "input vector is already null (g(v,v) = 0); branch on nullity before projecting");
  }

  const FiberFlow flow(frame, input.fiber);
  const auto sign_of = [](double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); };
  const int s0 = sign_of(h0);
  // g(u(s), u(s)) is nondecreasing in s, so the cone lies ahead for timelike
  // inputs and behind for spacelike ones.
  const double direction = s0 < 0 ? 1.0 : -1.0;

  double inner = 0.0;
  double outer = std::numeric_limits<double>::quiet_NaN();
  for (double step = 1.0 / 16.0;; step *= 2.0) {
    const double reach = std::min(step, options.horizon);
    if (sign_of(flow.causal(direction * reach)) != s0) {
      outer = direction * reach;
      break;
    }
    inner = direction * reach;
    if (reach >= options.horizon) break;
  }
  if (std::isnan(outer)) {
    std::ostringstream os;
    os << "no sign change of g along the flow within |s| <= " << options.horizon << ": v lies outside the flow image";
    throw Error(ErrorCode::NotInFlowImage, os.str());
  }

  // Bisection down to 1e-14 in s (or floating-point resolution).
  double lo = inner;
  double hi = outer;
  for (int iter = 0; iter < 400 && std::abs(hi - lo) > 1e-14; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (sign_of(flow.causal(mid)) == s0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double s = std::abs(flow.causal(lo)) < std::abs(flow.causal(hi)) ? lo : hi;

  // One Newton polish step, kept only if it improves the residual.
  const double rate = flow.causal_rate(s);
  if (rate > 0.0) {
    const double polished = s - flow.causal(s) / rate;
    if (std::abs(flow.causal(polished)) < std::abs(flow.causal(s))) s = polished;
  }

  NullProjection projection;
  projection.input = input;
  projection.t = s;
  projection.anchor.point = input.point;
  projection.anchor.fiber = flow.at(s);
  projection.residual = std::abs(projection.anchor.fiber.dot(g * projection.anchor.fiber));
  return projection;
}

NullProjection project_to_null(const MatrixXd& g, const BundlePoint& input, const ProjectionOptions& options) {
  return project_to_null(spectral_frame(g), g, input, options);
}

RoundTripResidual roundtrip_check(const MatrixXd& g, const VectorXd& v0, double t) {
  if (std::abs(t) > 5.0) throw Error(ErrorCode::ParameterOutOfRange, "round trip requires |t| <= 5");
  const SpectralFrame frame = spectral_frame(g);
  require_unit(v0, "round-trip anchor");
  if (std::abs(v0.dot(g * v0)) > 1e-10) throw Error(ErrorCode::NotNull, "round-trip anchor must be null");
  const FlowResult flowed = flow_closed_form(frame, g, BundlePoint{Point(), v0}, t);
  const NullProjection projection = project_to_null(frame, g, flowed.end);
  RoundTripResidual r;
  r.t_error = std::abs(projection.flow_parameter() - t);
  r.anchor_error = (projection.anchor.fiber - v0).cwiseAbs().maxCoeff();
  return r;
}

VectorXd null_direction(const SpectralFrame& frame, const VectorXd& negative_coefficients,
                        const VectorXd& positive_coefficients) {
  const int k = frame.negative;
  const int n = frame.dimension();
  if (!frame.mixed_signature()) throw Error(ErrorCode::RiemannianSignature, "no null cone for definite signature");
  if (negative_coefficients.size() != k || positive_coefficients.size() != n - k) {
    throw Error(ErrorCode::InvalidArgument, "coefficient blocks must match the signature");
  }
  const VectorXd a = negative_coefficients.normalized();
  const VectorXd b = positive_coefficients.normalized();
  const double A = a.dot(frame.eigenvalues.head(k).cwiseAbs().cwiseProduct(a));
  const double B = b.dot(frame.eigenvalues.tail(n - k).cwiseProduct(b));
  VectorXd mixed(n);
  mixed.head(k) = std::sqrt(B / (A + B)) * a;
  mixed.tail(n - k) = std::sqrt(A / (A + B)) * b;
  return frame.eigenvectors * mixed;
}

NullSampleSet sample_null_cone(const SpectralFrame& frame, int count_negative, int count_positive,
                               std::uint64_t seed) {
  if (!frame.mixed_signature()) throw Error(ErrorCode::RiemannianSignature, "no null cone for definite signature");
  if (count_negative < 1 || count_positive < 1) throw Error(ErrorCode::InvalidArgument, "sample counts must be positive");
  std::mt19937_64 rng(seed);
  const std::vector<VectorXd> negative = subsphere_directions(frame.negative, count_negative, rng);
  const std::vector<VectorXd> positive = subsphere_directions(frame.positive, count_positive, rng);
  NullSampleSet set;
  set.negative_directions = static_cast<int>(negative.size());
  set.positive_directions = static_cast<int>(positive.size());
  set.vectors.reserve(negative.size() * positive.size());
  for (const VectorXd& a : negative) {
    for (const VectorXd& b : positive) set.vectors.push_back(null_direction(frame, a, b));
  }
  return set;
}

}  // namespace nullbound
