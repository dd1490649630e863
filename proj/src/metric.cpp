#include "nullbound/metric.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace nullbound {

namespace {

int triangle_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle.
  return i * n - i * (i - 1) / 2 + (j - i);
}

std::string format_bound(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Entry {
  std::string key;
  std::string value;
  bool quoted = false;
  int line = 0;
  int column = 0;  // 1-based column where the value starts
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void doc_error(const std::string& msg, int line, int column) {
  throw ParseError(ErrorCode::InvalidDocument, msg, line, column);
}

std::vector<Entry> split_entries(std::string_view source) {
  std::vector<Entry> entries;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= source.size()) {
    std::size_t end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    std::string_view line = source.substr(start, end - start);
    ++line_no;
    start = end + 1;

    // Strip a trailing comment, ignoring '#' inside quotes.
    bool in_quotes = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '"') in_quotes = !in_quotes;
      if (line[k] == '#' && !in_quotes) {
        line = line.substr(0, k);
        break;
      }
    }
    std::string_view body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') doc_error("unterminated section header", line_no, 1);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      doc_error("expected 'key = value'", line_no, static_cast<int>(line.size() - trim(line).size()) + 1);
    }
    Entry e;
    e.key = std::string(trim(line.substr(0, eq)));
    e.line = line_no;
    std::string_view raw = line.substr(eq + 1);
    std::size_t lead = 0;
    while (lead < raw.size() && std::isspace(static_cast<unsigned char>(raw[lead]))) ++lead;
    std::string_view value = trim(raw);
    e.column = static_cast<int>(eq + 1 + lead) + 1;
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') doc_error("unterminated string", line_no, e.column);
      e.value = std::string(value.substr(1, value.size() - 2));
      e.quoted = true;
      e.column += 1;
    } else {
      e.value = std::string(value);
    }
    if (e.key.empty()) doc_error("empty key", line_no, 1);
    entries.push_back(std::move(e));
    if (end == source.size()) break;
  }
  return entries;
}

double parse_real(const Entry& e, std::string_view text, bool allow_inf) {
  text = trim(text);
  if (allow_inf) {
    if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
  }
  double v = 0.0;
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    doc_error("invalid number '" + std::string(text) + "' for key '" + e.key + "'", e.line, e.column);
  }
  return v;
}

Expression parse_entry_expression(const Entry& e, int dim) {
  try {
    return parse_expression(e.value, dim);
  } catch (const ParseError& err) {
    // Re-anchor the position inside the document.
    std::string msg = err.what();
    const std::size_t colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError(err.code(), msg + " (key '" + e.key + "')", e.line, e.column + err.column() - 1);
  }
}

bool is_component_key(const std::string& key) {
  return key.size() == 3 && key[0] == 'g' && std::isdigit(static_cast<unsigned char>(key[1])) &&
         std::isdigit(static_cast<unsigned char>(key[2]));
}

bool is_domain_key(const std::string& key) {
  return key.size() == 7 && key.rfind("domain", 0) == 0 && std::isdigit(static_cast<unsigned char>(key[6]));
}

}  // namespace

MetricSpec::MetricSpec(std::string name, int dimension, std::vector<Expression> upper_triangle,
                       std::vector<Interval> domain, std::optional<Expression> weight,
                       std::optional<double> effective_dimension)
    : name_(std::move(name)),
      dimension_(dimension),
      upper_(std::move(upper_triangle)),
      domain_(std::move(domain)),
      weight_(std::move(weight)),
      effective_dimension_(effective_dimension) {
  if (dimension_ < 2 || dimension_ > kMaxDimension) {
    throw Error(ErrorCode::InvalidDocument,
                "dimension must be in [2, " + std::to_string(kMaxDimension) + "], got " + std::to_string(dimension_));
  }
  const std::size_t expected = static_cast<std::size_t>(dimension_ * (dimension_ + 1) / 2);
  if (upper_.size() != expected) {
    throw Error(ErrorCode::InvalidDocument, "expected " + std::to_string(expected) + " metric components");
  }
  if (domain_.empty()) domain_.assign(dimension_, Interval{});
  if (static_cast<int>(domain_.size()) != dimension_) {
    throw Error(ErrorCode::InvalidDocument, "domain must have one interval per axis");
  }
  for (const Interval& iv : domain_) {
    if (!(iv.lower < iv.upper)) throw Error(ErrorCode::InvalidDocument, "empty domain interval");
  }
  for (const Expression& e : upper_) {
    if (e.max_variable() >= dimension_) throw Error(ErrorCode::VariableOutOfRange, "component uses a variable beyond the dimension");
  }
  if (weight_ && weight_->max_variable() >= dimension_) {
    throw Error(ErrorCode::VariableOutOfRange, "weight uses a variable beyond the dimension");
  }
  if (effective_dimension_) {
    const double n_eff = *effective_dimension_;
    if (std::isnan(n_eff) || n_eff < dimension_) {
      throw Error(ErrorCode::InvalidDocument, "effective dimension N must satisfy N >= n");
    }
    if (n_eff == dimension_ && weight_ && !weight_->is_constant()) {
      throw Error(ErrorCode::InvalidDocument, "N = n requires a constant weight V");
    }
  }
}

const Expression& MetricSpec::component(int i, int j) const {
  return upper_[static_cast<std::size_t>(triangle_index(i, j, dimension_))];
}

bool MetricSpec::in_domain(const Point& p) const {
  if (p.size() != dimension_) return false;
  for (int i = 0; i < dimension_; ++i) {
    if (!domain_[i].contains(p(i))) return false;
  }
  return true;
}

void MetricSpec::require_in_domain(const Point& p) const {
  if (p.size() != dimension_) {
    throw Error(ErrorCode::InvalidArgument, "point has " + std::to_string(p.size()) + " coordinates, metric '" +
                                                name_ + "' needs " + std::to_string(dimension_));
  }
  if (!in_domain(p)) {
    std::ostringstream os;
    os << "point (" << p.transpose() << ") lies outside the domain of '" << name_ << "'";
    throw Error(ErrorCode::OutsideDomain, os.str());
  }
}

MetricSpec parse_metric(std::string_view source) {
  const std::vector<Entry> entries = split_entries(source);

  std::map<std::string, const Entry*> by_key;
  for (const Entry& e : entries) {
    if (!by_key.emplace(e.key, &e).second) doc_error("duplicate key '" + e.key + "'", e.line, 1);
  }

  const auto dim_it = by_key.find("dim");
  if (dim_it == by_key.end()) throw ParseError(ErrorCode::InvalidDocument, "missing 'dim'", 1, 1);
  const Entry& dim_entry = *dim_it->second;
  const double dim_real = parse_real(dim_entry, dim_entry.value, false);
  if (dim_real != std::floor(dim_real) || dim_real < 2 || dim_real > kMaxDimension) {
    doc_error("dim must be an integer in [2, " + std::to_string(kMaxDimension) + "]", dim_entry.line, dim_entry.column);
  }
  const int n = static_cast<int>(dim_real);

  std::string name = "unnamed";
  std::vector<std::optional<Expression>> upper(static_cast<std::size_t>(n * (n + 1) / 2));
  std::vector<std::string> upper_text(upper.size());
  std::vector<Interval> domain(n);
  std::optional<Expression> weight;
  std::optional<double> n_eff;

  for (const Entry& e : entries) {
    if (e.key == "dim") continue;
    if (e.key == "name") {
      name = e.value;
    } else if (e.key == "V") {
      weight = parse_entry_expression(e, n);
    } else if (e.key == "N") {
      n_eff = parse_real(e, e.value, true);
    } else if (is_component_key(e.key)) {
      const int i = e.key[1] - '0';
      const int j = e.key[2] - '0';
      if (i >= n || j >= n) doc_error("component '" + e.key + "' exceeds dimension " + std::to_string(n), e.line, 1);
      Expression expr = parse_entry_expression(e, n);
      const auto slot = static_cast<std::size_t>(triangle_index(i, j, n));
      std::string text = to_string(expr);
      if (upper[slot]) {
        if (upper_text[slot] != text) doc_error("asymmetric duplicate entry '" + e.key + "'", e.line, 1);
        continue;
      }
      upper[slot] = std::move(expr);
      upper_text[slot] = std::move(text);
    } else if (is_domain_key(e.key)) {
      const int axis = e.key[6] - '0';
      if (axis >= n) doc_error("'" + e.key + "' exceeds dimension " + std::to_string(n), e.line, 1);
      std::string_view v = trim(e.value);
      if (v.size() < 2 || v.front() != '(' || v.back() != ')') doc_error("domain must be '(a, b)'", e.line, e.column);
      v = v.substr(1, v.size() - 2);
      const std::size_t comma = v.find(',');
      if (comma == std::string_view::npos) doc_error("domain must be '(a, b)'", e.line, e.column);
      Interval iv{parse_real(e, v.substr(0, comma), true), parse_real(e, v.substr(comma + 1), true)};
      if (!(iv.lower < iv.upper)) doc_error("domain interval must satisfy a < b", e.line, e.column);
      domain[axis] = iv;
    } else {
      doc_error("unknown key '" + e.key + "'", e.line, 1);
    }
  }

  std::vector<Expression> components;
  components.reserve(upper.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      auto& slot = upper[static_cast<std::size_t>(triangle_index(i, j, n))];
      if (!slot) {
        if (i == j) {
          throw ParseError(ErrorCode::InvalidDocument,
                           "missing diagonal component g" + std::to_string(i) + std::to_string(j), 1, 1);
        }
        slot = Expression::constant(0.0);
      }
      components.push_back(*slot);
    }
  }
  if (n_eff && *n_eff < n) throw ParseError(ErrorCode::InvalidDocument, "N < n", by_key["N"]->line, 1);
  if (n_eff && *n_eff == n && weight && !weight->is_constant()) {
    throw ParseError(ErrorCode::InvalidDocument, "N = n requires a constant weight V", by_key["N"]->line, 1);
  }
  return MetricSpec(std::move(name), n, std::move(components), std::move(domain), std::move(weight), n_eff);
}

std::string to_document(const MetricSpec& spec) {
  std::ostringstream os;
  const int n = spec.dimension();
  os << "[metric]\n";
  os << "name = \"" << spec.name() << "\"\n";
  os << "dim = " << n << "\n";
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const Expression& e = spec.component(i, j);
      if (i != j && e.root().kind == Expression::Kind::Constant && e.root().value == 0.0) continue;
      os << "g" << i << j << " = \"" << to_string(e) << "\"\n";
    }
  }
  bool header = false;
  for (int i = 0; i < n; ++i) {
    const Interval& iv = spec.domain()[i];
    if (std::isinf(iv.lower) && std::isinf(iv.upper)) continue;
    if (!header) os << "[domain]\n";
    header = true;
    os << "domain" << i << " = (" << format_bound(iv.lower) << ", " << format_bound(iv.upper) << ")\n";
  }
  if (spec.weight() || spec.effective_dimension()) {
    os << "[weight]\n";
    if (spec.weight()) os << "V = \"" << to_string(*spec.weight()) << "\"\n";
    if (spec.effective_dimension()) os << "N = " << format_bound(*spec.effective_dimension()) << "\n";
  }
  return os.str();
}

Eigen::MatrixXd evaluate_metric(const MetricSpec& spec, const Point& p) {
  spec.require_in_domain(p);
  const int n = spec.dimension();
  const std::span<const double> x(p.data(), static_cast<std::size_t>(n));
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      g(i, j) = g(j, i) = spec.component(i, j).evaluate<double>(x);
    }
  }
  return g;
}

JetEvaluation evaluate_jet(const MetricSpec& spec, const Point& p) {
  spec.require_in_domain(p);
  const int n = spec.dimension();
  std::vector<SecondOrderDual> x;
  x.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x.push_back(SecondOrderDual::variable(p(i), i, n));
  const std::span<const SecondOrderDual> xs(x);

  JetEvaluation jet;
  jet.point = p;
  jet.value = Eigen::MatrixXd::Zero(n, n);
  jet.first.assign(n, Eigen::MatrixXd::Zero(n, n));
  jet.second.assign(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const SecondOrderDual d = spec.component(j, k).evaluate<SecondOrderDual>(xs);
      jet.value(j, k) = jet.value(k, j) = d.value;
      for (int a = 0; a < n; ++a) {
        jet.first[a](j, k) = jet.first[a](k, j) = d.gradient(a);
        for (int b = 0; b < n; ++b) {
          jet.second[a][b](j, k) = jet.second[a][b](k, j) = d.hessian(a, b);
        }
      }
    }
  }
  if (spec.weight()) {
    const SecondOrderDual v = spec.weight()->evaluate<SecondOrderDual>(xs);
    jet.has_weight = true;
    jet.weight = v.value;
    jet.weight_gradient = v.gradient;
    jet.weight_hessian = v.hessian;
  }
  return jet;
}

}  // namespace nullbound
