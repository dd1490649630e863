#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nullbound/metric.hpp"

namespace nullbound {

inline constexpr double kDefaultDegeneracyThreshold = 1e-10;

/// Levi-Civita connection coefficients at one point; (*this)[i](j, k) = Γ^i_jk.
struct Christoffel {
  std::vector<Eigen::MatrixXd> upper;

  const Eigen::MatrixXd& operator[](int i) const { return upper[static_cast<std::size_t>(i)]; }
  double operator()(int i, int j, int k) const { return upper[static_cast<std::size_t>(i)](j, k); }
  int dimension() const { return static_cast<int>(upper.size()); }
};

/// Eigen-decomposition of a symmetric g_p with ascending eigenvalues.
///
/// Each eigenvector is sign-fixed so that its first non-negligible component
/// is positive, which makes the frame a deterministic function of g_p. The
/// true eigenvalues are stored; nothing assumes they are ±1.
struct SpectralFrame {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // columns
  int negative = 0;
  int positive = 0;

  int dimension() const { return static_cast<int>(eigenvalues.size()); }
  bool mixed_signature() const { return negative > 0 && positive > 0; }
  double max_abs_eigenvalue() const { return eigenvalues.cwiseAbs().maxCoeff(); }
  Eigen::MatrixXd reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }
};

/// Throws Error(DegenerateMetric) when min|λ| <= threshold · max|λ|.
SpectralFrame spectral_frame(const Eigen::MatrixXd& g, double relative_threshold = kDefaultDegeneracyThreshold);

Christoffel christoffel(const JetEvaluation& jet);

/// Ricci tensor from the exact jet: ∂Γ is assembled from ∂²g and the
/// derivative of the inverse metric, never by differencing.
Eigen::MatrixXd ricci(const JetEvaluation& jet);
Eigen::MatrixXd ricci(const MetricSpec& spec, const Point& p);

/// Covariant Hessian ∂_j∂_k V − Γ^l_jk ∂_l V of the weight.
Eigen::MatrixXd weight_hessian(const JetEvaluation& jet);

/// Ric + Hess(V) + (N − n)^{-1} DV⊗DV. The last term is dropped when N is
/// absent (N = inf) or N = n (where V is constant).
Eigen::MatrixXd bakry_emery(const MetricSpec& spec, const JetEvaluation& jet);
Eigen::MatrixXd bakry_emery(const MetricSpec& spec, const Point& p);

enum class FieldProvenance { Ricci, BakryEmery, UserExpression, ConstantMatrix, MetricMultiple };

std::string_view to_string(FieldProvenance provenance);

/// A symmetric (0,2)-tensor field p ↦ F_p, independent of any metric.
class SymmetricField {
 public:
  using Evaluator = std::function<Eigen::MatrixXd(const Point&)>;

  SymmetricField(std::string name, int dimension, FieldProvenance provenance, Evaluator evaluator);

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  FieldProvenance provenance() const { return provenance_; }

  Eigen::MatrixXd operator()(const Point& p) const;
  double quadratic(const Point& p, const Eigen::VectorXd& v) const;

 private:
  std::string name_;
  int dimension_;
  FieldProvenance provenance_;
  Evaluator evaluator_;
};

SymmetricField ricci_field(const MetricSpec& spec);
/// Throws Error(MissingWeight) if the spec has no weight V.
SymmetricField bakry_emery_field(const MetricSpec& spec);
/// F_p = factor · g_p (factor −1 gives the field −g).
SymmetricField metric_multiple_field(const MetricSpec& spec, double factor, std::string name);
SymmetricField constant_field(Eigen::MatrixXd matrix, std::string name);
/// Components read from a document with the metric grammar.
SymmetricField expression_field(const MetricSpec& components, std::string name);

}  // namespace nullbound
