#include "nullbound/curvature.hpp"

#include <cmath>
#include <sstream>

namespace nullbound {

namespace {

using Eigen::MatrixXd;

// Γ_{l,jk} = ½(∂_j g_lk + ∂_k g_lj − ∂_l g_jk)
std::vector<MatrixXd> lowered_christoffel(const JetEvaluation& jet) {
  const int n = jet.dimension();
  std::vector<MatrixXd> lowered(n, MatrixXd::Zero(n, n));
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        lowered[l](j, k) = 0.5 * (jet.first[j](l, k) + jet.first[k](l, j) - jet.first[l](j, k));
      }
    }
  }
  return lowered;
}

MatrixXd checked_inverse(const MatrixXd& g) {
  spectral_frame(g);  // throws on degeneracy
  return g.inverse();
}

Christoffel raise(const MatrixXd& inverse, const std::vector<MatrixXd>& lowered) {
  const int n = static_cast<int>(inverse.rows());
  Christoffel gamma;
  gamma.upper.assign(n, MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) gamma.upper[i] += inverse(i, l) * lowered[l];
  }
  return gamma;
}

}  // namespace

SpectralFrame spectral_frame(const MatrixXd& g, double relative_threshold) {
  if (g.rows() != g.cols() || g.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "spectral_frame needs a non-empty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(g);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DegenerateMetric, "eigen-decomposition did not converge");
  }
  SpectralFrame frame;
  frame.eigenvalues = solver.eigenvalues();
  frame.eigenvectors = solver.eigenvectors();

  const double scale = frame.eigenvalues.cwiseAbs().maxCoeff();
  const double smallest = frame.eigenvalues.cwiseAbs().minCoeff();
  if (!(scale > 0.0) || !(smallest > relative_threshold * scale)) {
    std::ostringstream os;
    os << "degenerate metric: eigenvalues (" << frame.eigenvalues.transpose() << ")";
    throw Error(ErrorCode::DegenerateMetric, os.str());
  }

  const int n = frame.dimension();
  for (int c = 0; c < n; ++c) {
    auto column = frame.eigenvectors.col(c);
    for (int r = 0; r < n; ++r) {
      if (std::abs(column(r)) > 1e-12) {
        if (column(r) < 0.0) column = -column;
        break;
      }
    }
    if (frame.eigenvalues(c) < 0.0) {
      ++frame.negative;
    } else {
      ++frame.positive;
    }
  }
  return frame;
}

Christoffel christoffel(const JetEvaluation& jet) {
  return raise(checked_inverse(jet.value), lowered_christoffel(jet));
}

MatrixXd ricci(const JetEvaluation& jet) {
  const int n = jet.dimension();
  const MatrixXd inverse = checked_inverse(jet.value);
  const std::vector<MatrixXd> lowered = lowered_christoffel(jet);
  const Christoffel gamma = raise(inverse, lowered);

  // d_gamma[m][i](j,k) = ∂_m Γ^i_jk, using ∂_m g^{-1} = −g^{-1} (∂_m g) g^{-1}.
  std::vector<std::vector<MatrixXd>> d_gamma(n, std::vector<MatrixXd>(n, MatrixXd::Zero(n, n)));
  for (int m = 0; m < n; ++m) {
    const MatrixXd d_inverse = -inverse * jet.first[m] * inverse;
    std::vector<MatrixXd> d_lowered(n, MatrixXd::Zero(n, n));
    for (int l = 0; l < n; ++l) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          d_lowered[l](j, k) =
              0.5 * (jet.second[m][j](l, k) + jet.second[m][k](l, j) - jet.second[m][l](j, k));
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < n; ++l) {
        d_gamma[m][i] += d_inverse(i, l) * lowered[l] + inverse(i, l) * d_lowered[l];
      }
    }
  }

  MatrixXd ric = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        sum += d_gamma[i][i](j, k) - d_gamma[j][i](i, k);
        for (int l = 0; l < n; ++l) {
          sum += gamma(i, i, l) * gamma(l, j, k) - gamma(i, j, l) * gamma(l, i, k);
        }
      }
      ric(j, k) = sum;
    }
  }
  return ric;
}

MatrixXd ricci(const MetricSpec& spec, const Point& p) { return ricci(evaluate_jet(spec, p)); }

MatrixXd weight_hessian(const JetEvaluation& jet) {
  if (!jet.has_weight) throw Error(ErrorCode::MissingWeight, "jet carries no weight V");
  const Christoffel gamma = christoffel(jet);
  MatrixXd hess = jet.weight_hessian;
  for (int l = 0; l < jet.dimension(); ++l) hess -= jet.weight_gradient(l) * gamma[l];
  return hess;
}

MatrixXd bakry_emery(const MetricSpec& spec, const JetEvaluation& jet) {
  if (!spec.weight() || !jet.has_weight) {
    throw Error(ErrorCode::MissingWeight, "metric '" + spec.name() + "' declares no weight V");
  }
  const int n = spec.dimension();
  const auto& n_eff = spec.effective_dimension();
  if (n_eff && *n_eff == n && !spec.weight()->is_constant()) {
    throw Error(ErrorCode::InvalidDocument, "N = n requires a constant weight V");
  }
  MatrixXd result = ricci(jet) + weight_hessian(jet);
  if (n_eff && std::isfinite(*n_eff) && *n_eff > n) {
    result += (jet.weight_gradient * jet.weight_gradient.transpose()) / (*n_eff - n);
  }
  return result;
}

MatrixXd bakry_emery(const MetricSpec& spec, const Point& p) {
  return bakry_emery(spec, evaluate_jet(spec, p));
}

std::string_view to_string(FieldProvenance provenance) {
  switch (provenance) {
    case FieldProvenance::Ricci: return "ricci";
    case FieldProvenance::BakryEmery: return "bakry_emery";
    case FieldProvenance::UserExpression: return "user_expression";
    case FieldProvenance::ConstantMatrix: return "constant_matrix";
    case FieldProvenance::MetricMultiple: return "metric_multiple";
  }
  return "unknown";
}

SymmetricField::SymmetricField(std::string name, int dimension, FieldProvenance provenance,
                               Evaluator evaluator)
    : name_(std::move(name)),
      dimension_(dimension),
      provenance_(provenance),
      evaluator_(std::move(evaluator)) {}

MatrixXd SymmetricField::operator()(const Point& p) const {
  MatrixXd f = evaluator_(p);
  if (f.rows() != dimension_ || f.cols() != dimension_ || !f.allFinite()) {
    throw Error(ErrorCode::Domain, "field '" + name_ + "' produced an invalid matrix");
  }
  return f;
}

double SymmetricField::quadratic(const Point& p, const Eigen::VectorXd& v) const {
  return v.dot((*this)(p) * v);
}

SymmetricField ricci_field(const MetricSpec& spec) {
  return SymmetricField("ricci", spec.dimension(), FieldProvenance::Ricci,
                        [spec](const Point& p) { return ricci(spec, p); });
}

SymmetricField bakry_emery_field(const MetricSpec& spec) {
  if (!spec.weight()) throw Error(ErrorCode::MissingWeight, "metric '" + spec.name() + "' declares no weight V");
  return SymmetricField("bakry_emery", spec.dimension(), FieldProvenance::BakryEmery,
                        [spec](const Point& p) { return bakry_emery(spec, p); });
}

SymmetricField metric_multiple_field(const MetricSpec& spec, double factor, std::string name) {
  return SymmetricField(std::move(name), spec.dimension(), FieldProvenance::MetricMultiple,
                        [spec, factor](const Point& p) -> MatrixXd { return factor * evaluate_metric(spec, p); });
}

SymmetricField constant_field(MatrixXd matrix, std::string name) {
  if (matrix.rows() != matrix.cols()) throw Error(ErrorCode::InvalidArgument, "constant field must be square");
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "constant field must be symmetric");
  }
  const int n = static_cast<int>(matrix.rows());
  return SymmetricField(std::move(name), n, FieldProvenance::ConstantMatrix,
                        [matrix = std::move(matrix)](const Point&) { return matrix; });
}

SymmetricField expression_field(const MetricSpec& components, std::string name) {
  return SymmetricField(std::move(name), components.dimension(), FieldProvenance::UserExpression,
                        [components](const Point& p) { return evaluate_metric(components, p); });
}

}  // namespace nullbound
