#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace nullbound;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

const double kR = std::sqrt(0.5);

Eigen::MatrixXd eta(int n) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
  g(0, 0) = -1.0;
  return g;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Syntax;
}

// (metric, point, null start) drawn across the catalog
struct NullCase {
  Eigen::MatrixXd g;
  VectorXd v0;
};

NullCase random_null_case(std::mt19937_64& rng) {
  const auto& entries = catalog_list();
  const CatalogEntry& entry = entries[rng() % entries.size()];
  // the default regions keep |2tλ| inside the flow's range guard for |t| <= 1
  const Point p = testing::region_point(entry, rng);
  NullCase c;
  c.g = evaluate_metric(entry.spec, p);
  const NullSampleSet set = sample_null_cone(spectral_frame(c.g), 4, 4, rng());
  c.v0 = set.vectors[rng() % set.vectors.size()];
  return c;
}

}  // namespace

TEST_CASE("vector field X and the ode right-hand side") {
  const Eigen::MatrixXd g = eta(2);
  CHECK((vector_field_x(g, Vector2d(kR, kR)) - Vector2d(-2 * kR, 2 * kR)).norm() < 1e-15);
  CHECK(vector_field_x(g, Vector2d(1, 0)).isZero(0.0));
  Eigen::Matrix2d swap;
  swap << 0, 1, 1, 0;
  CHECK(vector_field_x(swap, Vector2d(1, 0)) == Vector2d(0, 2));
  CHECK(ode_rhs(g, Vector2d(0, 1)).isZero(0.0));

  std::mt19937_64 rng(41);
  for (int k = 0; k < 1000; ++k) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const Eigen::MatrixXd m = testing::random_symmetric(n, rng);
    const VectorXd v = testing::random_unit(n, rng);
    CHECK(std::abs(vector_field_x(m, v).dot(v)) < 1e-12);
    CHECK(vector_field_x(m, v) == ode_rhs(m, v));
  }
}

TEST_CASE("non-tangency value") {
  CHECK(nontangency_value(eta(2), Vector2d(kR, kR)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(nontangency_value(eta(2), Vector2d(1, 0))) < 1e-15);
  const Eigen::Matrix2d g = Vector2d(-2, 1).asDiagonal();
  const Vector2d v(1 / std::sqrt(3.0), std::sqrt(2.0 / 3.0));
  CHECK(std::abs(v.dot(g * v)) < 1e-15);
  CHECK(nontangency_value(g, v) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("closed-form flow") {
  const BundlePoint start{Point::Zero(2), Vector2d(kR, kR)};
  const FlowResult zero = flow_closed_form(eta(2), start, 0.0);
  CHECK(zero.end.fiber == start.fiber);

  const FlowResult quarter = flow_closed_form(eta(2), start, 0.25);
  const Vector2d expected = Vector2d(std::exp(-0.5), std::exp(0.5)) / std::sqrt(std::exp(-1.0) + std::exp(1.0));
  CHECK((quarter.end.fiber - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(quarter.causal == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
  CHECK(quarter.end.point == start.point);

  const Eigen::Matrix2d g = Vector2d(-2, 1).asDiagonal();
  const Vector2d v0(1 / std::sqrt(3.0), std::sqrt(2.0 / 3.0));
  const FlowResult r = flow_closed_form(g, BundlePoint{Point::Zero(2), v0}, 0.1);
  const Vector2d raw(std::exp(-0.4) / std::sqrt(3.0), std::exp(0.2) * std::sqrt(2.0 / 3.0));
  CHECK((r.end.fiber - raw.normalized()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((flow_rk_oracle(g, v0, 0.1, 1000) - r.end.fiber).cwiseAbs().maxCoeff() < 1e-8);

  CHECK(code_of([&] { flow_closed_form(g, BundlePoint{Point::Zero(2), v0}, 100.0); }) == ErrorCode::ParameterOutOfRange);
  CHECK(code_of([&] { flow_closed_form(g, BundlePoint{Point::Zero(2), Vector2d(1, 1)}, 0.1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("rk oracle") {
  const Eigen::MatrixXd g = eta(2);
  const Vector2d v0(kR, kR);
  CHECK(flow_rk_oracle(g, v0, 0.0, 1) == v0);
  CHECK((flow_rk_oracle(g, v0, 0.25, 1000) - flow_closed_form(g, BundlePoint{Point::Zero(2), v0}, 0.25).end.fiber)
            .cwiseAbs()
            .maxCoeff() < 1e-9);

  // fourth order: halving the step cuts the error about 16x
  const Eigen::Matrix2d h = Vector2d(-2, 1).asDiagonal();
  const Vector2d w0(1 / std::sqrt(3.0), std::sqrt(2.0 / 3.0));
  const VectorXd exact = flow_closed_form(h, BundlePoint{Point::Zero(2), w0}, 1.0).end.fiber;
  const double e100 = (flow_rk_oracle(h, w0, 1.0, 100) - exact).cwiseAbs().maxCoeff();
  const double e200 = (flow_rk_oracle(h, w0, 1.0, 200) - exact).cwiseAbs().maxCoeff();
  CHECK(e100 / e200 == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("flow agrees with the rk oracle across the catalog") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> t(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const NullCase c = random_null_case(rng);
    const double tk = t(rng);
    const FlowResult r = flow_closed_form(c.g, BundlePoint{Point(), c.v0}, tk);
    CHECK(std::abs(r.end.fiber.norm() - 1.0) < 1e-12);
    const VectorXd rk = flow_rk_oracle(c.g, c.v0, tk, 10000);
    CHECK((rk - r.end.fiber).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(rk.norm() - 1.0) < 1e-8);
  }
}

TEST_CASE("projection onto the null cone") {
  const double theta = M_PI / 3;
  const NullProjection p = project_to_null(eta(2), BundlePoint{Point::Zero(2), Vector2d(std::cos(theta), std::sin(theta))});
  CHECK(p.t == doctest::Approx(-std::log(3.0) / 8).epsilon(1e-12));
  CHECK(p.residual < 1e-10);
  CHECK((p.anchor.fiber - Vector2d(kR, kR)).cwiseAbs().maxCoeff() < 1e-12);
  // flowing the anchor by the Φ⁻¹ parameter gives the input back
  const FlowResult back = flow_closed_form(eta(2), p.anchor, p.flow_parameter());
  CHECK((back.end.fiber - p.input.fiber).cwiseAbs().maxCoeff() < 1e-8);

  CHECK(code_of([] { project_to_null(eta(2), BundlePoint{Point::Zero(2), Vector2d(1, 0)}); }) == ErrorCode::NotInFlowImage);
  CHECK(code_of([] { project_to_null(eta(2), BundlePoint{Point::Zero(2), Vector2d(kR, kR)}); }) == ErrorCode::NotNull);
  CHECK(code_of([] {
          project_to_null(Eigen::Matrix2d::Identity(), BundlePoint{Point::Zero(2), Vector2d(1, 0)});
        }) == ErrorCode::RiemannianSignature);
}

TEST_CASE("round trips") {
  CHECK(roundtrip_check(eta(2), Vector2d(kR, kR), 0.3).t_error < 1e-10);
  CHECK(roundtrip_check(eta(2), Vector2d(kR, kR), 0.3).anchor_error < 1e-10);
  const Eigen::Matrix2d g = Vector2d(-2, 1).asDiagonal();
  const RoundTripResidual r = roundtrip_check(g, Vector2d(1 / std::sqrt(3.0), std::sqrt(2.0 / 3.0)), -0.7);
  CHECK(r.t_error < 1e-8);
  CHECK(r.anchor_error < 1e-8);
  for (const double t : {-1.0, -0.1, -0.01, 0.01, 0.1, 1.0}) {
    const RoundTripResidual s = roundtrip_check(eta(4), (VectorXd(4) << kR, 0.5, 0.5, 0).finished(), t);
    CHECK(s.t_error < 1e-8);
    CHECK(s.anchor_error < 1e-8);
  }
  CHECK(code_of([] { roundtrip_check(eta(2), Vector2d(kR, kR), 6.0); }) == ErrorCode::ParameterOutOfRange);
  CHECK(code_of([] { roundtrip_check(eta(2), Vector2d(1, 0), 0.5); }) == ErrorCode::NotNull);
}

TEST_CASE("null cone sampler") {
  const SpectralFrame flat2 = spectral_frame(eta(2));
  const NullSampleSet four = sample_null_cone(flat2, 5, 5, 1);
  CHECK(four.vectors.size() == 4);
  for (const VectorXd& v : four.vectors) {
    CHECK(std::abs(std::abs(v(0)) - kR) < 1e-15);
    CHECK(std::abs(std::abs(v(1)) - kR) < 1e-15);
  }

  const SpectralFrame flat4 = spectral_frame(eta(4));
  const VectorXd e0 = VectorXd::Unit(1, 0);
  CHECK((null_direction(flat4, e0, VectorXd::Unit(3, 0)) - (VectorXd(4) << kR, kR, 0, 0).finished()).norm() < 1e-15);

  const SpectralFrame skew = spectral_frame(Eigen::Vector3d(-2, 1, 1).asDiagonal());
  const VectorXd v = null_direction(skew, e0, VectorXd::Unit(2, 0));
  CHECK((v - Eigen::Vector3d(1 / std::sqrt(3.0), std::sqrt(2.0 / 3.0), 0)).norm() < 1e-15);

  std::mt19937_64 rng(47);
  for (int k = 0; k < 200; ++k) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const Eigen::MatrixXd g = testing::random_lorentzian(n, rng);
    const SpectralFrame frame = spectral_frame(g);
    const NullSampleSet set = sample_null_cone(frame, 3, 6, rng());
    for (const VectorXd& u : set.vectors) {
      CHECK(std::abs(u.norm() - 1.0) < 1e-12);
      CHECK(std::abs(u.dot(g * u)) < 1e-12);
      CHECK(nontangency_value(g, u) > 0.0);
      CHECK(nontangency_value(g, u) == doctest::Approx(2 * (g * u).squaredNorm()).epsilon(1e-12));
    }
  }
  // reproducible for a given seed
  const NullSampleSet a = sample_null_cone(flat4, 3, 8, 99), b = sample_null_cone(flat4, 3, 8, 99);
  for (std::size_t i = 0; i < a.vectors.size(); ++i) CHECK(a.vectors[i] == b.vectors[i]);
  CHECK(code_of([] { sample_null_cone(spectral_frame(Eigen::Matrix2d::Identity()), 1, 1, 0); }) ==
        ErrorCode::RiemannianSignature);
}

TEST_CASE("causal rate at the cone is 4<gv, gv>") {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 100; ++k) {
    const NullCase c = random_null_case(rng);
    const BundlePoint start{Point(), c.v0};
    // step on the natural time scale 1/max|λ|
    const double h = 1e-5 / spectral_frame(c.g).max_abs_eigenvalue();
    const double fd = (flow_closed_form(c.g, start, h).causal - flow_closed_form(c.g, start, -h).causal) / (2 * h);
    const double exact = 4.0 * (c.g * c.v0).squaredNorm();
    CHECK(fd == doctest::Approx(exact).epsilon(1e-6));
    CHECK(FiberFlow(spectral_frame(c.g), c.v0).causal_rate(0.0) == doctest::Approx(exact).epsilon(1e-10));
  }
}
