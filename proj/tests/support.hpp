#pragma once

#include <cmath>
#include <random>

#include "nullbound/catalog.hpp"

namespace testing {

using nullbound::Point;

// Random point inside a finite, comfortably interior box of the domain.
inline Point random_point(const nullbound::MetricSpec& spec, std::mt19937_64& rng) {
  Point p(spec.dimension());
  for (int i = 0; i < spec.dimension(); ++i) {
    const nullbound::Interval& d = spec.domain()[static_cast<std::size_t>(i)];
    double lo = std::isfinite(d.lower) ? d.lower : -1.0;
    double hi = std::isfinite(d.upper) ? d.upper : lo + 2.0;
    if (std::isfinite(d.lower) && !std::isfinite(d.upper)) {
      lo = d.lower + 0.5;  // keep away from horizons
      hi = d.lower + 18.0;
    }
    const double pad = 0.05 * (hi - lo);
    p(i) = std::uniform_real_distribution<double>(lo + pad, hi - pad)(rng);
  }
  return p;
}

// Uniform point in a catalog entry's default analysis region.
inline Point region_point(const nullbound::CatalogEntry& entry, std::mt19937_64& rng) {
  const nullbound::Region& r = entry.default_region;
  Point p(r.dimension());
  for (int i = 0; i < r.dimension(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    p(i) = std::uniform_real_distribution<double>(r.lower[k], r.upper[k])(rng);
  }
  return p;
}

inline Eigen::VectorXd random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v.normalized();
}

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> unit(-scale, scale);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = unit(rng);
  }
  return 0.5 * (a + a.transpose());
}

// Symmetric matrix with Lorentzian signature and eigenvalues bounded away from 0.
inline Eigen::MatrixXd random_lorentzian(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.3, 3.0);
  Eigen::VectorXd lambda(n);
  lambda(0) = -mag(rng);
  for (int i = 1; i < n; ++i) lambda(i) = mag(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr{random_symmetric(n, rng) + Eigen::MatrixXd::Identity(n, n) * 0.1};
  const Eigen::MatrixXd q = qr.householderQ();
  return q * lambda.asDiagonal() * q.transpose();
}

inline double sup_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing
