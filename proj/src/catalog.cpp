#include "nullbound/catalog.hpp"

#include <algorithm>

namespace nullbound {

namespace {

constexpr std::string_view kMinkowski2 = R"doc(# flat 1+1
name = "minkowski2"
dim = 2
g00 = "-1"
g11 = "1"
)doc";

constexpr std::string_view kMinkowski4 = R"doc(# flat 3+1
name = "minkowski4"
dim = 4
g00 = "-1"
g11 = "1"
g22 = "1"
g33 = "1"
)doc";

// M = 1, exterior region, coordinates (t, r, theta, phi)
constexpr std::string_view kSchwarzschild = R"doc(name = "schwarzschild"
dim = 4
g00 = "-(1 - 2/x1)"
g11 = "1/(1 - 2/x1)"
g22 = "x1^2"
g33 = "x1^2 * sin(x2)^2"

[domain]
domain1 = (2, inf)
domain2 = (0, 3.141592653589793)
)doc";

// Ric = 3g
constexpr std::string_view kDeSitterFlat = R"doc(name = "desitter_flat"
dim = 4
g00 = "-1"
g11 = "exp(2*x0)"
g22 = "exp(2*x0)"
g33 = "exp(2*x0)"
)doc";

// a(t) = t^(2/3): R00 = (2/3) t^-2, Rii = (2/3) t^(-2/3)
constexpr std::string_view kFlrwDust = R"doc(name = "flrw_dust"
dim = 4
g00 = "-1"
g11 = "x0^(4/3)"
g22 = "x0^(4/3)"
g33 = "x0^(4/3)"

[domain]
domain0 = (0.5, 10)
)doc";

// C^2 but not C^3 across x1 = 0
constexpr std::string_view kC2Bump = R"doc(name = "c2_bump"
dim = 4
g00 = "-(1 + 0.1*abs(x1)^3)"
g11 = "1"
g22 = "1"
g33 = "1"

[domain]
domain1 = (-1, 1)
)doc";

constexpr std::string_view kWeightedMinkowski = R"doc(name = "weighted_minkowski"
dim = 2
g00 = "-1"
g11 = "1"

[weight]
V = "x1^2"
N = 4
)doc";

Region box(std::vector<double> lower, std::vector<double> upper, std::vector<int> resolution) {
  return Region{std::move(lower), std::move(upper), std::move(resolution)};
}

FieldExpectation expect(std::string field, NecStatus nec, Verdict verdict, std::optional<double> timelike = {},
                        std::optional<double> theorem = {}) {
  return FieldExpectation{std::move(field), nec, verdict, timelike, theorem};
}

CatalogEntry make_entry(std::string summary, std::string_view document, int negative, int positive,
                        Regularity regularity, Region region, std::vector<FieldExpectation> expectations) {
  MetricSpec spec = parse_metric(document);
  std::vector<std::string> fields{"ricci", "minus_g", "neg_diag", "zero"};
  if (spec.weight()) fields.insert(fields.begin() + 1, "bakry_emery");
  std::string name = spec.name();
  return CatalogEntry{std::move(name),     std::move(summary), std::string(document), std::move(spec),
                      negative,            positive,           regularity,            std::move(region),
                      std::move(fields),   std::move(expectations)};
}

std::vector<CatalogEntry> build_catalog() {
  constexpr auto holds = NecStatus::Holds;
  constexpr auto violated = NecStatus::Violated;
  constexpr auto bounded = Verdict::Bounded;
  constexpr auto diverging = Verdict::Diverging;
  std::vector<CatalogEntry> entries;

  const auto flat = [&](std::vector<FieldExpectation> extra = {}) {
    std::vector<FieldExpectation> e{expect("ricci", holds, bounded, 0.0, 0.0), expect("minus_g", holds, bounded, -1.0, -1.0),
                                    expect("neg_diag", violated, diverging), expect("zero", holds, bounded, 0.0, 0.0)};
    e.insert(e.end(), extra.begin(), extra.end());
    return e;
  };

  entries.push_back(make_entry("Minkowski space, n = 2", kMinkowski2, 1, 1, Regularity::Smooth,
                               box({-1, -1}, {1, 1}, {5, 2}), flat()));
  entries.push_back(make_entry("Minkowski space, n = 4", kMinkowski4, 1, 3, Regularity::Smooth,
                               box({-1, -1, -1, -1}, {1, 1, 1, 1}, {3, 3, 3, 3}), flat()));
  entries.push_back(make_entry("Schwarzschild exterior, M = 1 (vacuum)", kSchwarzschild, 1, 3, Regularity::Smooth,
                               box({0, 2.5, 1, 0}, {1, 6, 2, 1}, {3, 3, 3, 3}),
                               {expect("ricci", holds, bounded, 0.0, 0.0), expect("minus_g", holds, bounded, -1.0, -1.0),
                                expect("neg_diag", violated, diverging), expect("zero", holds, bounded, 0.0, 0.0)}));
  entries.push_back(make_entry("de Sitter, flat slicing, Ric = 3g", kDeSitterFlat, 1, 3, Regularity::Smooth,
                               box({-1, -1, -1, -1}, {1, 1, 1, 1}, {3, 3, 3, 3}),
                               {expect("ricci", holds, bounded, 3.0, -3.0), expect("minus_g", holds, bounded, -1.0, -1.0),
                                expect("neg_diag", violated, diverging), expect("zero", holds, bounded, 0.0, 0.0)}));
  // Over t in [1, 2]: F/|g| >= (2/3) t^-2 with equality on the frame axes.
  entries.push_back(make_entry("FLRW dust, a(t) = t^(2/3)", kFlrwDust, 1, 3, Regularity::Smooth,
                               box({1, -1, -1, -1}, {2, 1, 1, 1}, {3, 3, 3, 3}),
                               {expect("ricci", holds, bounded, -1.0 / 6.0, 1.0 / 6.0),
                                expect("minus_g", holds, bounded, -1.0, -1.0), expect("neg_diag", violated, diverging),
                                expect("zero", holds, bounded, 0.0, 0.0)}));
  entries.push_back(make_entry("Minkowski with a C^2 bump 0.1|x1|^3 in g00", kC2Bump, 1, 3, Regularity::C2,
                               box({-1, -0.9, -1, -1}, {1, 0.9, 1, 1}, {3, 3, 3, 3}),
                               {expect("ricci", holds, bounded), expect("minus_g", holds, bounded, -1.0, -1.0),
                                expect("neg_diag", violated, diverging), expect("zero", holds, bounded, 0.0, 0.0)}));
  // Bakry-Emery tensor diag(0, 2 + x1^2 * 4/(N - n)); inf of F/|g| is 0 at v = (1, 0).
  entries.push_back(make_entry("Minkowski n = 2 with weight V = x1^2, N = 4", kWeightedMinkowski, 1, 1,
                               Regularity::Smooth, box({-1, -1}, {1, 1}, {5, 2}),
                               flat({expect("bakry_emery", holds, bounded, 0.0, 0.0)})));
  return entries;
}

}  // namespace

std::string_view to_string(Regularity regularity) {
  switch (regularity) {
    case Regularity::C0: return "C0";
    case Regularity::C1: return "C1";
    case Regularity::C2: return "C2";
    case Regularity::Smooth: return "Cinf";
  }
  return "unknown";
}

SymmetricField CatalogEntry::field(std::string_view field_name) const {
  if (field_name == "bakry-emery") field_name = "bakry_emery";
  if (std::find(fields.begin(), fields.end(), field_name) == fields.end()) {
    throw Error(ErrorCode::UnknownEntry, "catalog entry '" + name + "' has no field '" + std::string(field_name) + "'");
  }
  return builtin_field(spec, field_name);
}

const FieldExpectation* CatalogEntry::expectation(std::string_view field_name) const {
  for (const FieldExpectation& e : expectations) {
    if (e.field == field_name) return &e;
  }
  return nullptr;
}

const std::vector<CatalogEntry>& catalog_list() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

const CatalogEntry& catalog_get(std::string_view name) {
  for (const CatalogEntry& entry : catalog_list()) {
    if (entry.name == name) return entry;
  }
  throw Error(ErrorCode::UnknownEntry, "unknown catalog entry '" + std::string(name) + "'");
}

const std::vector<std::string>& builtin_field_names() {
  static const std::vector<std::string> names{"ricci", "bakry_emery", "minus_g", "neg_diag", "zero"};
  return names;
}

SymmetricField builtin_field(const MetricSpec& spec, std::string_view name) {
  const int n = spec.dimension();
  if (name == "ricci") return ricci_field(spec);
  if (name == "bakry_emery" || name == "bakry-emery") return bakry_emery_field(spec);
  if (name == "minus_g") return metric_multiple_field(spec, -1.0, "minus_g");
  if (name == "neg_diag") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m(0, 0) = -1.0;
    return constant_field(m, "neg_diag");
  }
  if (name == "zero") return constant_field(Eigen::MatrixXd::Zero(n, n), "zero");
  throw Error(ErrorCode::UnknownEntry, "unknown field '" + std::string(name) +
                                           "' (expected ricci, bakry_emery, minus_g, neg_diag or zero)");
}

}  // namespace nullbound
