#pragma once

// Household survey ingestion and desk-scale analysis: need construction from
// expenditure categories, summary statistics, allocation histograms, and
// least-squares recovery of lambda from observed post-redistribution incomes.
//
// Survey weights enter statistics and histograms only. Rules are always
// evaluated on the unweighted agent vectors.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "redist/core.hpp"

namespace redist {

/// Malformed input data; `line()` is 1-based (the header is line 1), 0 when
/// the error is not tied to a line.
class DataError : public std::runtime_error {
 public:
  DataError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  /// The message without the line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

struct HouseholdRecord {
  std::string id;
  std::optional<std::string> country;
  double net_income = 0.0;
  std::map<std::string, double> expenditures;
  double weight = 1.0;

  double total_expenditure() const;
};

struct NeedConfig {
  std::set<std::string> need_categories;

  /// food, non-alcoholic beverages, clothing and footwear, housing utilities,
  /// furnishings, household textiles and appliances, tableware, health,
  /// second-hand cars, operation of transport equipment, transport services,
  /// communication and education.
  static NeedConfig defaults();

  /// Throws ValidationError when empty.
  void validate() const;
};

struct Dataset {
  std::vector<HouseholdRecord> records;
  std::set<std::string> categories;
  /// Empty expenditure cells read as zero, counted per column.
  std::map<std::string, std::size_t> missing_cells;

  /// Distinct country tags in sorted order.
  std::vector<std::string> countries() const;
};

struct CsvSchema {
  std::string income_column = "net_income";
  std::optional<std::string> id_column = "id";
  std::optional<std::string> weight_column = "weight";
  std::optional<std::string> country_column = "country";
};

/// Comma-separated, first row header, '.' decimal point. Columns other than
/// id/income/weight/country are expenditure categories. Throws DataError.
Dataset read_csv(std::istream& in, const CsvSchema& schema = {});
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes the dataset in the layout read_csv expects, with shortest
/// round-trip number formatting.
void write_csv(std::ostream& out, const Dataset& ds, const CsvSchema& schema = {});

/// Sum of the record's expenditures over the configured need categories.
double need_of(const HouseholdRecord& record, const NeedConfig& cfg);

/// Records matching the country filter, in file order.
std::vector<const HouseholdRecord*> select_records(const Dataset& ds,
                                                   const std::optional<std::string>& country);

/// y_i = net income, z_i = need. Throws ValidationError if the selection is
/// empty.
Problem build_problem(const Dataset& ds, const NeedConfig& cfg,
                      const std::optional<std::string>& country = std::nullopt);

struct StatsOptions {
  double income_threshold = 40000.0;
  double need_threshold = 40000.0;
  std::optional<std::string> country;
};

struct WeightedValue {
  double weighted = 0.0;
  double unweighted = 0.0;
};

struct SummaryStats {
  std::size_t households = 0;
  double total_weight = 0.0;
  WeightedValue mean_income;
  WeightedValue mean_need;
  WeightedValue mean_net_income;
  WeightedValue share_income_below_threshold;
  WeightedValue share_need_below_threshold;
  WeightedValue share_need_exceeds_income;
};

/// Throws ValidationError if the selection is empty.
SummaryStats summary_stats(const Dataset& ds, const NeedConfig& cfg, const StatsOptions& opts = {});

/// Bin k covers [origin + k w, origin + (k + 1) w).
struct Histogram {
  double bin_width = 1.0;
  double origin = 0.0;
  std::map<long long, double> bins;

  double bin_left(long long k) const { return origin + static_cast<double>(k) * bin_width; }
  double bin_right(long long k) const { return bin_left(k + 1); }
  double total() const;
  /// Same counts with the origin moved by `offset`.
  Histogram shifted(double offset) const;
};

/// Weighted histogram. Throws ValidationError for bin_width <= 0 or a length
/// mismatch.
Histogram make_histogram(std::span<const double> values, std::span<const double> weights,
                         double bin_width, double origin = 0.0);

/// Applies `rule` to the selected households as one problem and bins the
/// resulting amounts with record weights as counts.
Histogram allocation_histogram(const Dataset& ds, const NeedConfig& cfg, const RuleSpec& rule,
                               double bin_width, double origin = 0.0,
                               const std::optional<std::string>& country = std::nullopt);

/// Weighted histogram of the selected households' needs.
Histogram need_histogram(const Dataset& ds, const NeedConfig& cfg, double bin_width,
                         double origin = 0.0,
                         const std::optional<std::string>& country = std::nullopt);

struct LambdaFit {
  LambdaParams lambda;
  /// Euclidean norm of R^lambda(p) - observed.
  double residual = 0.0;
  /// sum(observed) - Y.
  double imbalance = 0.0;
  std::size_t rank = 2;
  bool rank_deficient = false;
};

/// Least squares fit of observed ~ R^A + l1 (R^L - R^A) + l2 (R^F - R^A).
/// Rank-deficient designs return the minimum-norm solution with the flag
/// set.
LambdaFit fit_lambda(std::span<const double> observed, const Problem& p,
                     double tolerance = kDefaultTolerance);

/// Planted population moments for the synthetic survey generator. Shares are
/// turned into household counts by rounding share * households.
struct SyntheticTargets {
  std::size_t households = 10000;
  double mean_income = 25053.8;
  double mean_need = 13830.5;
  double threshold = 40000.0;
  double share_income_below = 0.798;
  double share_need_below = 0.962;
  double share_need_exceeds_income = 0.107;
};

struct SyntheticConfig {
  SyntheticTargets targets;
  std::vector<std::string> countries;
  std::uint64_t seed = 1;
  /// Draw survey weights from {1, 2, 3} instead of all ones. Weighted moments
  /// are then not planted.
  bool random_weights = false;
};

/// Non-need expenditure categories emitted by the generator.
std::vector<std::string> synthetic_other_categories();

/// Builds a dataset whose unweighted means (to the cent) and threshold
/// shares equal the targets exactly. Every amount is a whole number of cents
/// and lies at least one unit away from each threshold and from its
/// need/income comparison. Throws ValidationError if the targets are
/// inconsistent or cannot be planted.
Dataset generate_synthetic(const SyntheticConfig& cfg);

}  // namespace redist
