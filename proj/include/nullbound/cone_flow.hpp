#pragma once

#include <cstdint>
#include <vector>

#include "nullbound/curvature.hpp"

namespace nullbound {

/// Tolerance on |‖v‖ − 1| for fiber vectors that must lie on the unit sphere.
inline constexpr double kUnitTolerance = 1e-12;
/// Largest admissible |2 t λ| in the closed-form flow.
inline constexpr double kMaxFlowExponent = 300.0;

/// (p, v) in TM restricted to a chart; on S when ‖v‖ = 1.
struct BundlePoint {
  Point point;
  Eigen::VectorXd fiber;
};

struct FlowResult {
  double t = 0.0;
  BundlePoint start;
  BundlePoint end;
  double causal = 0.0;  // g_p(end, end)
};

/// Result of moving a non-null (p, v) along the cone flow onto S₀.
///
/// `t` is the signed flow time that carries v onto the null cone, so that
/// anchor = Φ(t, v) up to normalisation; equivalently v = Φ(flow_parameter(),
/// anchor), i.e. flow_parameter() is the time coordinate of Φ⁻¹(p, v).
struct NullProjection {
  BundlePoint input;
  double t = 0.0;
  BundlePoint anchor;
  double residual = 0.0;  // |g_p(anchor, anchor)|

  double flow_parameter() const { return -t; }
};

struct NullSampleSet {
  Point point;
  std::vector<Eigen::VectorXd> vectors;
  int negative_directions = 0;  // directions drawn in the negative eigenspace
  int positive_directions = 0;  // directions drawn in the positive eigenspace
};

struct RoundTripResidual {
  double t_error = 0.0;
  double anchor_error = 0.0;  // sup-norm distance between recovered and true anchor
};

/// Vertical field X = 2(g v − g(v,v) v): the fiber gradient of g(v,v)
/// projected onto the tangent space of the unit sphere.
template <typename DerivedG, typename DerivedV>
auto vector_field_x(const Eigen::MatrixBase<DerivedG>& g, const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedV::Scalar;
  const Vector<Scalar> gv = g * v;
  const Scalar causal = v.dot(gv);
  return Vector<Scalar>(Scalar(2) * (gv - causal * v));
}

/// Right-hand side of the fiberwise ODE v' = 2 g v − 2 g(v,v) v.
template <typename DerivedG, typename DerivedV>
auto ode_rhs(const Eigen::MatrixBase<DerivedG>& g, const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedV::Scalar;
  const Vector<Scalar> gv = g * v;
  return Vector<Scalar>(Scalar(2) * gv - Scalar(2) * v.dot(gv) * v);
}

/// g_p(v, X_(p,v)), evaluated as a bilinear form. Equals
/// 2⟨g v, g v⟩ − 2 g(v,v)², which is 2⟨g v, g v⟩ > 0 on null v.
template <typename DerivedG, typename DerivedV>
typename DerivedV::Scalar nontangency_value(const Eigen::MatrixBase<DerivedG>& g,
                                            const Eigen::MatrixBase<DerivedV>& v) {
  return v.dot(g * vector_field_x(g, v));
}

/// Φ(t, (p, v0)) = (p, e^{2tG} v0 / ‖e^{2tG} v0‖) with the exponential taken
/// through the spectral frame. Throws ParameterOutOfRange if |2tλ| > 300.
FlowResult flow_closed_form(const SpectralFrame& frame, const Eigen::MatrixXd& g, const BundlePoint& start, double t);
FlowResult flow_closed_form(const Eigen::MatrixXd& g, const BundlePoint& start, double t);

/// Classical RK4 integration of ode_rhs from 0 to t, without renormalising.
Eigen::VectorXd flow_rk_oracle(const Eigen::MatrixXd& g, const Eigen::VectorXd& v0, double t, int steps);

struct ProjectionOptions {
  double horizon = 40.0;  // search s ∈ [−horizon, horizon]
};

/// Inverts the flow on its image. Throws RiemannianSignature when g_p has no
/// null cone, NotNull when v is already null, and NotInFlowImage when no sign
/// change of g along the flow exists within the horizon.
NullProjection project_to_null(const Eigen::MatrixXd& g, const BundlePoint& input, const ProjectionOptions& options = {});
NullProjection project_to_null(const SpectralFrame& frame, const Eigen::MatrixXd& g, const BundlePoint& input,
                               const ProjectionOptions& options = {});

/// Flows a null v0 by t, projects back, and reports recovery errors.
RoundTripResidual roundtrip_check(const Eigen::MatrixXd& g, const Eigen::VectorXd& v0, double t);

/// Unit null vector Q(s·a' ⊕ c·b') built from eigen-coefficients a' (negative
/// block, length k) and b' (positive block, length n − k).
Eigen::VectorXd null_direction(const SpectralFrame& frame, const Eigen::VectorXd& negative_coefficients,
                               const Eigen::VectorXd& positive_coefficients);

/// Seeded product sampling of the null cone: directions uniform on the unit
/// spheres of both eigenspaces, combined pairwise. A one-dimensional
/// eigenspace contributes exactly its two unit vectors ±e.
NullSampleSet sample_null_cone(const SpectralFrame& frame, int count_negative, int count_positive, std::uint64_t seed);

/// The flow restricted to one fiber and one start vector, evaluated in the
/// eigenbasis so that g along the curve costs O(n).
class FiberFlow {
 public:
  FiberFlow(const SpectralFrame& frame, const Eigen::VectorXd& start);

  /// Unit vector e^{2sG} v / ‖·‖ in chart coordinates (no range guard).
  Eigen::VectorXd at(double s) const;
  /// g(u(s), u(s)).
  double causal(double s) const;
  /// d/ds g(u(s), u(s)) = 4(‖G u‖² − g(u,u)²) ≥ 0.
  double causal_rate(double s) const;

 private:
  Eigen::VectorXd normalized_coefficients(double s) const;

  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd coefficients_;
};

}  // namespace nullbound
