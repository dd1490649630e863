#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nullbound/expression.hpp"
#include "nullbound/types.hpp"

namespace nullbound {

/// Open coordinate interval (lower, upper); either end may be infinite.
struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lower && x < upper; }
};

/// Expression-valued symmetric metric on one coordinate chart, with an
/// optional weight V and effective dimension N.
///
/// Only the upper triangle i <= j is stored, so symmetry holds by
/// construction.
class MetricSpec {
 public:
  MetricSpec(std::string name, int dimension, std::vector<Expression> upper_triangle,
             std::vector<Interval> domain, std::optional<Expression> weight = std::nullopt,
             std::optional<double> effective_dimension = std::nullopt);

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  const Expression& component(int i, int j) const;
  const std::vector<Interval>& domain() const { return domain_; }
  const std::optional<Expression>& weight() const { return weight_; }
  /// N; absent means the DV⊗DV term is dropped (N = inf).
  const std::optional<double>& effective_dimension() const { return effective_dimension_; }

  bool in_domain(const Point& p) const;
  /// Throws Error(OutsideDomain) unless p lies in the open domain.
  void require_in_domain(const Point& p) const;

 private:
  std::string name_;
  int dimension_;
  std::vector<Expression> upper_;
  std::vector<Interval> domain_;
  std::optional<Expression> weight_;
  std::optional<double> effective_dimension_;
};

/// g, its first and second partial derivatives, and the weight jet, all at
/// one point. first[i](j,k) = ∂_i g_jk, second[i][j](k,l) = ∂_i∂_j g_kl.
struct JetEvaluation {
  Point point;
  Eigen::MatrixXd value;
  std::vector<Eigen::MatrixXd> first;
  std::vector<std::vector<Eigen::MatrixXd>> second;

  bool has_weight = false;
  double weight = 0.0;
  Eigen::VectorXd weight_gradient;
  Eigen::MatrixXd weight_hessian;

  int dimension() const { return static_cast<int>(value.rows()); }
};

/// Parses a metric document:
///
///     # comment
///     [metric]
///     name = "schwarzschild"
///     dim = 4
///     g00 = "-(1 - 2/x1)"
///     domain1 = (2, inf)
///     V = "x1^2"
///     N = 4
///
/// `[section]` header lines are accepted and ignored.
MetricSpec parse_metric(std::string_view source);

/// Serialises to the document format accepted by parse_metric.
std::string to_document(const MetricSpec& spec);

/// Component values g_p only.
Eigen::MatrixXd evaluate_metric(const MetricSpec& spec, const Point& p);

/// g, ∂g, ∂²g (and the V jet) by second-order forward-mode differentiation.
JetEvaluation evaluate_jet(const MetricSpec& spec, const Point& p);

}  // namespace nullbound
