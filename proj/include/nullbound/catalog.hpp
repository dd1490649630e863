#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nullbound/nec_analysis.hpp"

namespace nullbound {

enum class Regularity { C0, C1, C2, Smooth };
std::string_view to_string(Regularity regularity);

struct FieldExpectation {
  std::string field;
  NecStatus nec = NecStatus::Holds;
  Verdict verdict = Verdict::Bounded;
  std::optional<double> cz_timelike;  // known C^T
  std::optional<double> cz_theorem;   // known C_Z
};

struct CatalogEntry {
  std::string name;
  std::string summary;
  std::string document;  // DSL source; `spec` is parsed from it
  MetricSpec spec;
  int negative = 1;  // expected signature
  int positive = 1;
  Regularity regularity = Regularity::Smooth;
  Region default_region;
  std::vector<std::string> fields;
  std::vector<FieldExpectation> expectations;

  SymmetricField field(std::string_view name) const;
  const FieldExpectation* expectation(std::string_view field_name) const;
};

const std::vector<CatalogEntry>& catalog_list();
/// Throws Error(UnknownEntry).
const CatalogEntry& catalog_get(std::string_view name);

/// ricci, bakry_emery, minus_g, neg_diag (diag(−1, 0, …)), zero.
/// Throws Error(UnknownEntry) for anything else.
SymmetricField builtin_field(const MetricSpec& spec, std::string_view name);
const std::vector<std::string>& builtin_field_names();

}  // namespace nullbound
