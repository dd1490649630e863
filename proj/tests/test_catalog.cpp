#include <doctest.h>

#include "support.hpp"

using namespace nullbound;

TEST_CASE("catalog contents") {
  const auto& entries = catalog_list();
  CHECK(entries.size() >= 7);
  for (const char* name : {"minkowski2", "minkowski4", "schwarzschild", "desitter_flat", "flrw_dust", "c2_bump",
                           "weighted_minkowski"}) {
    CHECK(catalog_get(name).name == name);
  }
  CHECK(catalog_get("minkowski2").negative == 1);
  CHECK(catalog_get("minkowski2").positive == 1);
  CHECK(catalog_get("c2_bump").regularity == Regularity::C2);
  CHECK(std::string(to_string(catalog_get("schwarzschild").regularity)) == "Cinf");
  CHECK_THROWS_AS(catalog_get("kerr"), Error);
  CHECK_THROWS_AS(catalog_get("minkowski2").field("bakry_emery"), Error);
  CHECK(catalog_get("weighted_minkowski").field("bakry-emery").provenance() == FieldProvenance::BakryEmery);
  CHECK(catalog_get("schwarzschild").expectation("ricci")->nec == NecStatus::Holds);
}

TEST_CASE("entries are stored as documents") {
  for (const CatalogEntry& entry : catalog_list()) {
    CAPTURE(entry.name);
    const MetricSpec spec = parse_metric(entry.document);
    std::mt19937_64 rng(71);
    for (int k = 0; k < 10; ++k) {
      const Point p = testing::random_point(spec, rng);
      CHECK(evaluate_metric(spec, p) == evaluate_metric(entry.spec, p));
    }
    // every listed field builds and every field has an expectation
    for (const std::string& f : entry.fields) {
      CHECK_NOTHROW(entry.field(f));
      CHECK(entry.expectation(f) != nullptr);
    }
  }
}

TEST_CASE("signatures hold on a grid over the default region") {
  for (const CatalogEntry& entry : catalog_list()) {
    CAPTURE(entry.name);
    Region fine = entry.default_region;
    for (int& r : fine.resolution) r = 5;
    for (const Point& p : grid_points(fine)) {
      const SpectralFrame frame = spectral_frame(evaluate_metric(entry.spec, p));
      CHECK(frame.negative == entry.negative);
      CHECK(frame.positive == entry.positive);
    }
  }
}

TEST_CASE("c2_bump has a jump in the third derivative of g00 at x1 = 0") {
  const MetricSpec& spec = catalog_get("c2_bump").spec;
  const double h = 1e-4;
  auto d2 = [&](double x1) { return evaluate_jet(spec, Eigen::Vector4d(0.2, x1, 0.1, -0.3)).second[1][1](0, 0); };
  auto jump_at = [&](double x1) {
    const double right = (d2(x1 + 2 * h) - d2(x1 + h)) / h;
    const double left = (d2(x1 - h) - d2(x1 - 2 * h)) / h;
    return std::abs(right - left);
  };
  CHECK(jump_at(0.0) == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(jump_at(0.5) < 1e-6);
  CHECK(jump_at(-0.3) < 1e-6);
  // second derivatives are continuous across the seam
  CHECK(std::abs(d2(h) - d2(-h)) < 1e-3);
}

TEST_CASE("flrw dust null contractions are nonnegative") {
  const CatalogEntry& flrw = catalog_get("flrw_dust");
  std::mt19937_64 rng(73);
  for (int k = 0; k < 200; ++k) {
    const Point p = testing::random_point(flrw.spec, rng);
    const NullSampleSet set = sample_null_cone(spectral_frame(evaluate_metric(flrw.spec, p)), 2, 8, rng());
    const Eigen::MatrixXd ric = ricci(flrw.spec, p);
    for (const Eigen::VectorXd& v : set.vectors) CHECK(v.dot(ric * v) > 0.0);
  }
}

TEST_CASE("expected properties hold under the analysis") {
  for (const CatalogEntry& entry : catalog_list()) {
    for (const FieldExpectation& e : entry.expectations) {
      CAPTURE(entry.name);
      CAPTURE(e.field);
      const SymmetricField field = entry.field(e.field);
      const BoundReport report = analyze_bound(field, entry.spec, entry.default_region);
      CHECK(report.nec.status == e.nec);
      CHECK(check_nec(field, entry.spec, entry.default_region).status == e.nec);
      CHECK(report.verdict.verdict == e.verdict);
      if (e.cz_timelike) CHECK(std::abs(report.timelike.value - *e.cz_timelike) <= 1e-6);
      if (e.cz_theorem) CHECK(std::abs(report.theorem.value - *e.cz_theorem) <= 1e-6);
      if (e.nec == NecStatus::Holds) {
        CHECK(report.verdict.final_rung >= report.certificate_inf - 0.1);
        CHECK(report.sign_bridge_consistent);
      }
      // a finite bound forces F >= 0 on the cone
      if (report.verdict.verdict == Verdict::Bounded) CHECK(report.nec.min_value >= -1e-6);
    }
  }
}
