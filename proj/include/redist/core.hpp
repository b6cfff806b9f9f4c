#pragma once

// Redistribution problems with needs: domain types and the closed-form
// allocation and tax rules (laissez faire, full redistribution,
// need-adjusted full redistribution, and their linear combinations).

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace redist {

/// Default relative tolerance for budget balance and numeric comparisons.
inline constexpr double kDefaultTolerance = 1e-9;

/// Raised when an input violates a documented precondition. `field()` names
/// the offending input so front ends can report it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised when a rule's output does not sum to the aggregate income.
class BudgetViolation : public std::runtime_error {
 public:
  BudgetViolation(double expected, double actual);

  double expected() const noexcept { return expected_; }
  double actual() const noexcept { return actual_; }

 private:
  double expected_;
  double actual_;
};

/// tau_budget: tolerance * max(1, |total|).
double budget_tolerance(double total, double tolerance = kDefaultTolerance);

/// tau_num: tolerance * max(1, |a|, |b|).
double numeric_tolerance(double a, double b, double tolerance = kDefaultTolerance);

/// True when |a - b| <= numeric_tolerance(a, b, tolerance).
bool nearly_equal(double a, double b, double tolerance = kDefaultTolerance);

/// An income vector (any sign) and a need vector (nonnegative) over n >= 1 agents.
class Problem {
 public:
  /// Throws ValidationError on size mismatch, n == 0, non-finite values or
  /// negative needs.
  Problem(std::vector<double> incomes, std::vector<double> needs);

  /// Zero-need problem.
  static Problem without_needs(std::vector<double> incomes);

  std::span<const double> incomes() const noexcept { return incomes_; }
  std::span<const double> needs() const noexcept { return needs_; }
  std::size_t size() const noexcept { return incomes_.size(); }

  double income(std::size_t i) const { return incomes_.at(i); }
  double need(std::size_t i) const { return needs_.at(i); }
  double net_income(std::size_t i) const { return incomes_.at(i) - needs_.at(i); }

  double total_income() const noexcept { return total_income_; }
  double total_need() const noexcept { return total_need_; }
  double mean_income() const noexcept;
  double mean_need() const noexcept;
  double mean_net_income() const noexcept;

  /// Componentwise y >= z.
  bool income_dominates_needs() const noexcept;

  friend bool operator==(const Problem&, const Problem&) = default;

 private:
  std::vector<double> incomes_;
  std::vector<double> needs_;
  double total_income_ = 0.0;
  double total_need_ = 0.0;
};

/// Componentwise sum of two problems with the same agent set.
Problem operator+(const Problem& a, const Problem& b);

struct Allocation {
  std::vector<double> amounts;

  std::size_t size() const noexcept { return amounts.size(); }
  double operator[](std::size_t i) const { return amounts[i]; }
  double total() const noexcept;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Coefficients on laissez faire and full redistribution; the need-adjusted
/// rule gets the remaining weight 1 - lambda1 - lambda2.
struct LambdaParams {
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  double lambda3() const noexcept { return 1.0 - lambda1 - lambda2; }

  /// Throws ValidationError if either coefficient is NaN or infinite.
  void validate() const;

  friend bool operator==(const LambdaParams&, const LambdaParams&) = default;
};

/// The three pairwise convex compromises between focal rules. In each family
/// delta weights the first-named rule:
///   LfFr: delta * L + (1 - delta) * F
///   LfNa: delta * L + (1 - delta) * A
///   FrNa: delta * F + (1 - delta) * A
enum class Family { LfFr, LfNa, FrNa };

enum class FocalRule { LaissezFaire, FullRedistribution, NeedAdjusted };

struct DeltaRule {
  Family family = Family::LfFr;
  double delta = 0.0;

  /// Throws ValidationError unless 0 <= delta <= 1.
  void validate() const;

  friend bool operator==(const DeltaRule&, const DeltaRule&) = default;
};

using RuleSpec = std::variant<FocalRule, LambdaParams, DeltaRule>;

struct TaxVector {
  std::vector<double> taxes;

  std::size_t size() const noexcept { return taxes.size(); }
  double operator[](std::size_t i) const { return taxes[i]; }
  double total() const noexcept;
};

/// A black-box allocation rule.
using RuleFn = std::function<Allocation(const Problem&)>;

std::string_view to_string(Family family) noexcept;
std::string_view to_string(FocalRule rule) noexcept;
std::string to_string(const RuleSpec& rule);

/// Accepts LF_FR / LF_NA / FR_NA (case-insensitive, '-' or '_').
Family parse_family(std::string_view text);
/// Accepts L / F / A.
FocalRule parse_focal_rule(std::string_view text);

Allocation allocate_laissez_faire(const Problem& p);
Allocation allocate_full_redistribution(const Problem& p);
Allocation allocate_need_adjusted(const Problem& p);
Allocation allocate_focal(const Problem& p, FocalRule rule);
Allocation allocate_lambda(const Problem& p, const LambdaParams& lambda);
Allocation allocate_delta(const Problem& p, const DeltaRule& rule);
Allocation allocate(const Problem& p, const RuleSpec& rule);

LambdaParams delta_to_lambda(const DeltaRule& rule);
LambdaParams focal_to_lambda(FocalRule rule) noexcept;
LambdaParams to_lambda(const RuleSpec& rule);

/// Wraps a rule specification as a black-box rule function.
RuleFn make_rule(const RuleSpec& rule);

/// Linear tax system: T_i = (1 - l1)(y_i - Y/n) - (1 - l1 - l2)(z_i - Z/n).
TaxVector tax_lambda(const Problem& p, const LambdaParams& lambda);

/// T_i = y_i - R_i(y, z). Throws BudgetViolation if the rule's output misses
/// the aggregate income by more than tau_budget, ValidationError on a length
/// mismatch.
TaxVector tax_of_rule(const Problem& p, const RuleFn& rule,
                      double tolerance = kDefaultTolerance);

/// Per-agent parts of the linear tax system.
struct TaxDecomposition {
  double marginal_rate = 0.0;      // 1 - lambda1
  double need_subsidy_rate = 0.0;  // 1 - lambda1 - lambda2
  double deduction = 0.0;          // Y / n
  double mean_need = 0.0;          // Z / n
  std::vector<double> income_taxes;   // marginal_rate * (y_i - Y/n)
  std::vector<double> need_subsidies; // need_subsidy_rate * (z_i - Z/n)

  /// income_taxes[i] - need_subsidies[i].
  TaxVector reconstruct() const;
};

TaxDecomposition decompose_tax(const Problem& p, const LambdaParams& lambda);

/// Throws BudgetViolation unless |sum(a) - Y| <= tau_budget.
void require_budget_balance(const Problem& p, const Allocation& a,
                            double tolerance = kDefaultTolerance);

}  // namespace redist
