#include "redist/dataio.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "redist/random.hpp"

namespace redist {

namespace {

std::string describe_line(std::size_t line, const std::string& message) {
  if (line == 0) return message;
  return "line " + std::to_string(line) + ": " + message;
}

// One CSV record. Handles double-quoted fields with "" escapes; a quoted
// field may not span lines.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw DataError(line_no, "unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
  const std::string text = trim(cell);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DataError(line_no, "column '" + column + "': non-numeric value '" + text + "'");
  }
  return value;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<double> weights_of(std::span<const HouseholdRecord* const> records) {
  std::vector<double> w;
  w.reserve(records.size());
  for (const auto* r : records) w.push_back(r->weight);
  return w;
}

// ---- synthetic generator --------------------------------------------------

using Cents = std::int64_t;

Cents to_cents(double v) { return static_cast<Cents>(std::llround(v * 100.0)); }

Cents floor_div(Cents a, Cents b) {
  Cents q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Household classes by (income below threshold, need below threshold,
// need exceeds income).
enum class Cell { LowLowDeficit, LowHighDeficit, LowLowSurplus, HighHighSurplus, HighLowSurplus };

struct Draft {
  Cell cell;
  Cents income;
  Cents need;
};

bool cell_holds(const Draft& d, Cents threshold) {
  constexpr Cents margin = 100;
  const bool y_low = d.income <= threshold - margin;
  const bool y_high = d.income >= threshold + margin;
  const bool z_low = d.need <= threshold - margin && d.need >= 0;
  const bool z_high = d.need >= threshold + margin;
  const bool deficit = d.need >= d.income + margin;
  const bool surplus = d.income >= d.need + margin;
  switch (d.cell) {
    case Cell::LowLowDeficit: return y_low && z_low && deficit;
    case Cell::LowHighDeficit: return y_low && z_high && deficit;
    case Cell::LowLowSurplus: return y_low && z_low && surplus;
    case Cell::HighHighSurplus: return y_high && z_high && surplus;
    case Cell::HighLowSurplus: return y_high && z_low && surplus;
  }
  return false;
}

Draft draw_cell(Rng& rng, Cell cell, double t) {
  Draft d{cell, 0, 0};
  switch (cell) {
    case Cell::LowLowDeficit: {
      const double z = rng.uniform(0.15 * t, 0.75 * t);
      d.need = to_cents(z);
      d.income = to_cents(z - rng.uniform(0.0025 * t, 0.15 * t));
      break;
    }
    case Cell::LowHighDeficit:
      d.need = to_cents(rng.uniform(1.025 * t, 1.375 * t));
      d.income = to_cents(rng.uniform(0.5 * t, 0.975 * t));
      break;
    case Cell::LowLowSurplus: {
      const double y = rng.uniform(0.15 * t, 0.725 * t);
      d.income = to_cents(y);
      d.need = to_cents(y * rng.uniform(0.25, 0.85));
      break;
    }
    case Cell::HighHighSurplus:
      d.income = to_cents(rng.uniform(1.5 * t, 2.0 * t));
      d.need = to_cents(rng.uniform(1.025 * t, 1.45 * t));
      break;
    case Cell::HighLowSurplus:
      d.income = to_cents(rng.uniform(1.025 * t, 1.5 * t));
      d.need = to_cents(rng.uniform(0.2 * t, 0.75 * t));
      break;
  }
  return d;
}

// Spreads `delta` cents over the drafts in `cell`, income or need.
void spread(std::vector<Draft>& drafts, Cell cell, Cents delta, bool income) {
  const auto m = static_cast<Cents>(
      std::count_if(drafts.begin(), drafts.end(), [&](const Draft& d) { return d.cell == cell; }));
  const Cents base = floor_div(delta, m);
  Cents extra = delta - base * m;
  for (Draft& d : drafts) {
    if (d.cell != cell) continue;
    Cents step = base;
    if (extra > 0) {
      ++step;
      --extra;
    }
    (income ? d.income : d.need) += step;
  }
}

// Splits `total` cents over `names` in random proportions; parts sum exactly.
void split_cents(Rng& rng, Cents total, const std::vector<std::string>& names,
                 std::map<std::string, double>& out) {
  std::vector<double> w(names.size());
  double sum = 0.0;
  for (double& x : w) {
    x = rng.uniform(0.2, 1.0);
    sum += x;
  }
  Cents assigned = 0;
  for (std::size_t k = 0; k < names.size(); ++k) {
    Cents part = 0;
    if (k + 1 == names.size()) {
      part = total - assigned;
    } else {
      part = static_cast<Cents>(std::floor(static_cast<double>(total) * w[k] / sum));
      assigned += part;
    }
    out[names[k]] = static_cast<double>(part) / 100.0;
  }
}

}  // namespace

DataError::DataError(std::size_t line, const std::string& message)
    : std::runtime_error(describe_line(line, message)), line_(line), detail_(message) {}

double HouseholdRecord::total_expenditure() const {
  double s = 0.0;
  for (const auto& [name, amount] : expenditures) s += amount;
  return s;
}

NeedConfig NeedConfig::defaults() {
  return NeedConfig{{
      "food",
      "non_alcoholic_beverages",
      "clothing_and_footwear",
      "housing_utilities",
      "furniture_and_furnishings",
      "household_textiles",
      "household_appliances",
      "tableware_and_utensils",
      "health",
      "second_hand_cars",
      "transport_equipment_operation",
      "transport_services",
      "communication",
      "education",
  }};
}

void NeedConfig::validate() const {
  if (need_categories.empty()) throw ValidationError("need_categories", "must not be empty");
}

std::vector<std::string> Dataset::countries() const {
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (r.country) seen.insert(*r.country);
  }
  return {seen.begin(), seen.end()};
}

Dataset read_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(0, "empty input: missing header row");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  // Strip a UTF-8 byte order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

  const std::vector<std::string> header = [&] {
    auto cols = split_csv_line(line, line_no);
    for (auto& c : cols) c = trim(c);
    return cols;
  }();

  std::optional<std::size_t> income_col;
  std::optional<std::size_t> id_col;
  std::optional<std::size_t> weight_col;
  std::optional<std::size_t> country_col;
  std::vector<std::pair<std::size_t, std::string>> category_cols;
  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name.empty()) throw DataError(line_no, "empty column name at position " + std::to_string(c + 1));
    if (!seen.insert(name).second) throw DataError(line_no, "duplicate column '" + name + "'");
    if (name == schema.income_column) {
      income_col = c;
    } else if (schema.id_column && name == *schema.id_column) {
      id_col = c;
    } else if (schema.weight_column && name == *schema.weight_column) {
      weight_col = c;
    } else if (schema.country_column && name == *schema.country_column) {
      country_col = c;
    } else {
      category_cols.emplace_back(c, name);
    }
  }
  if (!income_col) throw DataError(line_no, "missing income column '" + schema.income_column + "'");

  Dataset ds;
  for (const auto& [c, name] : category_cols) {
    ds.categories.insert(name);
    ds.missing_cells[name] = 0;
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line, line_no);
    if (cells.size() != header.size()) {
      throw DataError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(cells.size()));
    }
    HouseholdRecord r;
    r.id = id_col ? trim(cells[*id_col]) : std::to_string(ds.records.size() + 1);
    r.net_income = parse_number(cells[*income_col], line_no, schema.income_column);
    if (country_col) {
      std::string country = trim(cells[*country_col]);
      if (!country.empty()) r.country = std::move(country);
    }
    if (weight_col && !trim(cells[*weight_col]).empty()) {
      r.weight = parse_number(cells[*weight_col], line_no, *schema.weight_column);
      if (!(r.weight > 0.0)) {
        throw DataError(line_no, "column '" + *schema.weight_column + "': weight must be positive");
      }
    }
    for (const auto& [c, name] : category_cols) {
      if (trim(cells[c]).empty()) {
        ++ds.missing_cells[name];
        r.expenditures[name] = 0.0;
        continue;
      }
      const double amount = parse_number(cells[c], line_no, name);
      if (amount < 0.0) {
        throw DataError(line_no, "column '" + name + "': negative expenditure " + trim(cells[c]));
      }
      r.expenditures[name] = amount;
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(0, "cannot open '" + path.string() + "'");
  try {
    return read_csv(in, schema);
  } catch (const DataError& e) {
    throw DataError(e.line(), path.string() + ": " + e.detail());
  }
}

void write_csv(std::ostream& out, const Dataset& ds, const CsvSchema& schema) {
  std::vector<std::string> header;
  if (schema.id_column) header.push_back(*schema.id_column);
  if (schema.country_column) header.push_back(*schema.country_column);
  header.push_back(schema.income_column);
  if (schema.weight_column) header.push_back(*schema.weight_column);
  header.insert(header.end(), ds.categories.begin(), ds.categories.end());
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << quote_if_needed(header[c]);
  out << '\n';
  for (const auto& r : ds.records) {
    bool first = true;
    auto cell = [&](const std::string& s) {
      out << (first ? "" : ",") << s;
      first = false;
    };
    if (schema.id_column) cell(quote_if_needed(r.id));
    if (schema.country_column) cell(quote_if_needed(r.country.value_or("")));
    cell(format_number(r.net_income));
    if (schema.weight_column) cell(format_number(r.weight));
    for (const auto& name : ds.categories) {
      const auto it = r.expenditures.find(name);
      cell(format_number(it == r.expenditures.end() ? 0.0 : it->second));
    }
    out << '\n';
  }
}

double need_of(const HouseholdRecord& record, const NeedConfig& cfg) {
  double z = 0.0;
  for (const auto& [name, amount] : record.expenditures) {
    if (cfg.need_categories.count(name)) z += amount;
  }
  return z;
}

std::vector<const HouseholdRecord*> select_records(const Dataset& ds,
                                                   const std::optional<std::string>& country) {
  std::vector<const HouseholdRecord*> out;
  for (const auto& r : ds.records) {
    if (!country || r.country == country) out.push_back(&r);
  }
  return out;
}

Problem build_problem(const Dataset& ds, const NeedConfig& cfg,
                      const std::optional<std::string>& country) {
  cfg.validate();
  const auto records = select_records(ds, country);
  if (records.empty()) {
    throw ValidationError("country", country ? "no households for country '" + *country + "'"
                                             : "dataset has no households");
  }
  std::vector<double> y;
  std::vector<double> z;
  y.reserve(records.size());
  z.reserve(records.size());
  for (const auto* r : records) {
    y.push_back(r->net_income);
    z.push_back(need_of(*r, cfg));
  }
  return Problem(std::move(y), std::move(z));
}

SummaryStats summary_stats(const Dataset& ds, const NeedConfig& cfg, const StatsOptions& opts) {
  cfg.validate();
  const auto records = select_records(ds, opts.country);
  if (records.empty()) throw ValidationError("dataset", "no households selected");

  struct Accumulator {
    double weighted = 0.0;
    double unweighted = 0.0;
    void add(double value, double weight) {
      weighted += weight * value;
      unweighted += value;
    }
    WeightedValue mean(double total_weight, double count) const {
      return {weighted / total_weight, unweighted / count};
    }
  };
  Accumulator income, need, net, income_below, need_below, deficit;
  double total_weight = 0.0;
  for (const auto* r : records) {
    const double w = r->weight;
    const double y = r->net_income;
    const double z = need_of(*r, cfg);
    total_weight += w;
    income.add(y, w);
    need.add(z, w);
    net.add(y - z, w);
    income_below.add(y < opts.income_threshold ? 1.0 : 0.0, w);
    need_below.add(z < opts.need_threshold ? 1.0 : 0.0, w);
    deficit.add(z > y ? 1.0 : 0.0, w);
  }
  const double count = static_cast<double>(records.size());
  SummaryStats s;
  s.households = records.size();
  s.total_weight = total_weight;
  s.mean_income = income.mean(total_weight, count);
  s.mean_need = need.mean(total_weight, count);
  s.mean_net_income = net.mean(total_weight, count);
  s.share_income_below_threshold = income_below.mean(total_weight, count);
  s.share_need_below_threshold = need_below.mean(total_weight, count);
  s.share_need_exceeds_income = deficit.mean(total_weight, count);
  return s;
}

double Histogram::total() const {
  double s = 0.0;
  for (const auto& [k, count] : bins) s += count;
  return s;
}

Histogram Histogram::shifted(double offset) const {
  Histogram h = *this;
  h.origin += offset;
  return h;
}

Histogram make_histogram(std::span<const double> values, std::span<const double> weights,
                         double bin_width, double origin) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw ValidationError("bin_width", "must be positive and finite");
  }
  if (values.size() != weights.size()) {
    throw ValidationError("weights", "expected one weight per value");
  }
  Histogram h;
  h.bin_width = bin_width;
  h.origin = origin;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto k = static_cast<long long>(std::floor((values[i] - origin) / bin_width));
    h.bins[k] += weights[i];
  }
  return h;
}

Histogram allocation_histogram(const Dataset& ds, const NeedConfig& cfg, const RuleSpec& rule,
                               double bin_width, double origin,
                               const std::optional<std::string>& country) {
  if (!(bin_width > 0.0)) throw ValidationError("bin_width", "must be positive and finite");
  const Problem p = build_problem(ds, cfg, country);
  const Allocation a = allocate(p, rule);
  const auto weights = weights_of(select_records(ds, country));
  return make_histogram(a.amounts, weights, bin_width, origin);
}

Histogram need_histogram(const Dataset& ds, const NeedConfig& cfg, double bin_width,
                         double origin, const std::optional<std::string>& country) {
  const Problem p = build_problem(ds, cfg, country);
  const auto weights = weights_of(select_records(ds, country));
  return make_histogram(p.needs(), weights, bin_width, origin);
}

LambdaFit fit_lambda(std::span<const double> observed, const Problem& p, double tolerance) {
  const std::size_t n = p.size();
  if (observed.size() != n) {
    throw ValidationError("observed", "expected " + std::to_string(n) + " entries, got " +
                                          std::to_string(observed.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(observed[i])) {
      throw ValidationError("observed[" + std::to_string(i) + "]", "must be finite");
    }
  }
  const Allocation lf = allocate_laissez_faire(p);
  const Allocation fr = allocate_full_redistribution(p);
  const Allocation na = allocate_need_adjusted(p);

  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 2);
  Eigen::VectorXd target(static_cast<Eigen::Index>(n));
  double observed_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    design(r, 0) = lf[i] - na[i];
    design(r, 1) = fr[i] - na[i];
    target(r) = observed[i] - na[i];
    observed_total += observed[i];
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(tolerance);
  cod.compute(design);
  const Eigen::VectorXd coef = cod.solve(target);

  LambdaFit fit;
  fit.lambda = LambdaParams{coef(0), coef(1)};
  fit.rank = static_cast<std::size_t>(cod.rank());
  fit.rank_deficient = fit.rank < 2;
  const Allocation fitted = allocate_lambda(p, fit.lambda);
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) sq += (fitted[i] - observed[i]) * (fitted[i] - observed[i]);
  fit.residual = std::sqrt(sq);
  fit.imbalance = observed_total - p.total_income();
  return fit;
}

std::vector<std::string> synthetic_other_categories() {
  return {"alcohol_and_tobacco", "recreation_and_culture", "restaurants_and_hotels",
          "miscellaneous"};
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  const SyntheticTargets& t = cfg.targets;
  const std::size_t n = t.households;
  if (n == 0) throw ValidationError("households", "must be positive");
  if (!(t.threshold > 0.0)) throw ValidationError("threshold", "must be positive");
  auto count_of = [&](double share, const char* field) {
    if (!(share >= 0.0 && share <= 1.0)) throw ValidationError(field, "must lie in [0, 1]");
    return static_cast<std::size_t>(std::llround(share * static_cast<double>(n)));
  };
  const std::size_t deficits = count_of(t.share_need_exceeds_income, "share_need_exceeds_income");
  const std::size_t low_income = count_of(t.share_income_below, "share_income_below");
  const std::size_t low_need = count_of(t.share_need_below, "share_need_below");
  const std::size_t high_need = n - low_need;
  const std::size_t high_income = n - low_income;

  // Deficit households all have incomes below the threshold; a quarter of
  // them (bounded by the high-need count) also have needs above it.
  const std::size_t low_high_deficit = std::min(high_need, deficits) / 4;
  const std::size_t low_low_deficit = deficits - low_high_deficit;
  const std::size_t high_high = high_need - low_high_deficit;
  if (low_income <= deficits || high_income <= high_high) {
    throw ValidationError("targets", "threshold shares are inconsistent with the deficit share");
  }
  const std::size_t low_low_surplus = low_income - deficits;
  const std::size_t high_low = high_income - high_high;

  std::vector<Cell> cells;
  cells.reserve(n);
  cells.insert(cells.end(), low_low_deficit, Cell::LowLowDeficit);
  cells.insert(cells.end(), low_high_deficit, Cell::LowHighDeficit);
  cells.insert(cells.end(), low_low_surplus, Cell::LowLowSurplus);
  cells.insert(cells.end(), high_high, Cell::HighHighSurplus);
  cells.insert(cells.end(), high_low, Cell::HighLowSurplus);

  const Cents threshold = to_cents(t.threshold);
  const Cents income_sum = to_cents(t.mean_income) * static_cast<Cents>(n);
  const Cents need_sum = to_cents(t.mean_need) * static_cast<Cents>(n);

  Rng rng(cfg.seed);
  std::vector<Draft> drafts;
  constexpr int kAttempts = 64;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    drafts.clear();
    Cents y_total = 0;
    Cents z_total = 0;
    for (Cell c : cells) {
      drafts.push_back(draw_cell(rng, c, t.threshold));
      y_total += drafts.back().income;
      z_total += drafts.back().need;
    }
    // Plant the means by adjusting the two largest unconstrained groups.
    spread(drafts, Cell::LowLowSurplus, income_sum - y_total, true);
    spread(drafts, Cell::HighLowSurplus, need_sum - z_total, false);
    if (std::all_of(drafts.begin(), drafts.end(),
                    [&](const Draft& d) { return cell_holds(d, threshold); })) {
      break;
    }
    if (attempt + 1 == kAttempts) {
      throw ValidationError("targets", "could not plant the requested means within the "
                                       "threshold classes");
    }
  }

  // Interleave the classes.
  for (std::size_t i = drafts.size(); i > 1; --i) std::swap(drafts[i - 1], drafts[rng.index(i)]);

  const NeedConfig needs = NeedConfig::defaults();
  const std::vector<std::string> need_names(needs.need_categories.begin(),
                                            needs.need_categories.end());
  const std::vector<std::string> other_names = synthetic_other_categories();

  Dataset ds;
  ds.categories.insert(need_names.begin(), need_names.end());
  ds.categories.insert(other_names.begin(), other_names.end());
  for (const auto& c : ds.categories) ds.missing_cells[c] = 0;

  const int width = static_cast<int>(std::to_string(n).size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const Draft& d = drafts[i];
    HouseholdRecord r;
    std::ostringstream id;
    id << 'h';
    id.width(width);
    id.fill('0');
    id << (i + 1);
    r.id = id.str();
    if (!cfg.countries.empty()) r.country = cfg.countries[rng.index(cfg.countries.size())];
    r.net_income = static_cast<double>(d.income) / 100.0;
    r.weight = cfg.random_weights ? static_cast<double>(rng.integer(1, 3)) : 1.0;
    split_cents(rng, d.need, need_names, r.expenditures);
    const double spare = static_cast<double>(std::max<Cents>(d.income, 0));
    split_cents(rng, static_cast<Cents>(std::floor(spare * rng.uniform(0.0, 0.25))), other_names,
                r.expenditures);
    ds.records.push_back(std::move(r));
  }
  return ds;
}

}  // namespace redist
