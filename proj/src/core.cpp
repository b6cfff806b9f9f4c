#include "redist/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace redist {

namespace {

std::string describe_budget(double expected, double actual) {
  std::ostringstream os;
  os.precision(17);
  os << "allocation sums to " << actual << " but aggregate income is " << expected;
  return os.str();
}

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::string normalize_token(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

BudgetViolation::BudgetViolation(double expected, double actual)
    : std::runtime_error(describe_budget(expected, actual)), expected_(expected), actual_(actual) {}

double budget_tolerance(double total, double tolerance) {
  return tolerance * std::max(1.0, std::abs(total));
}

double numeric_tolerance(double a, double b, double tolerance) {
  return tolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

bool nearly_equal(double a, double b, double tolerance) {
  return std::abs(a - b) <= numeric_tolerance(a, b, tolerance);
}

Problem::Problem(std::vector<double> incomes, std::vector<double> needs)
    : incomes_(std::move(incomes)), needs_(std::move(needs)) {
  if (incomes_.empty()) throw ValidationError("incomes", "a problem needs at least one agent");
  if (incomes_.size() != needs_.size()) {
    throw ValidationError("needs", "expected " + std::to_string(incomes_.size()) +
                                       " entries, got " + std::to_string(needs_.size()));
  }
  for (std::size_t i = 0; i < incomes_.size(); ++i) {
    if (!std::isfinite(incomes_[i])) {
      throw ValidationError("incomes[" + std::to_string(i) + "]", "must be finite");
    }
    if (!std::isfinite(needs_[i])) {
      throw ValidationError("needs[" + std::to_string(i) + "]", "must be finite");
    }
    if (needs_[i] < 0.0) {
      throw ValidationError("needs[" + std::to_string(i) + "]", "must be nonnegative");
    }
  }
  total_income_ = sum(incomes_);
  total_need_ = sum(needs_);
}

Problem Problem::without_needs(std::vector<double> incomes) {
  std::vector<double> zeros(incomes.size(), 0.0);
  return Problem(std::move(incomes), std::move(zeros));
}

double Problem::mean_income() const noexcept {
  return total_income_ / static_cast<double>(size());
}

double Problem::mean_need() const noexcept {
  return total_need_ / static_cast<double>(size());
}

double Problem::mean_net_income() const noexcept {
  return (total_income_ - total_need_) / static_cast<double>(size());
}

bool Problem::income_dominates_needs() const noexcept {
  for (std::size_t i = 0; i < size(); ++i) {
    if (incomes_[i] < needs_[i]) return false;
  }
  return true;
}

Problem operator+(const Problem& a, const Problem& b) {
  if (a.size() != b.size()) {
    throw ValidationError("problem", "cannot add problems over " + std::to_string(a.size()) +
                                         " and " + std::to_string(b.size()) + " agents");
  }
  std::vector<double> y(a.size());
  std::vector<double> z(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    y[i] = a.income(i) + b.income(i);
    z[i] = a.need(i) + b.need(i);
  }
  return Problem(std::move(y), std::move(z));
}

double Allocation::total() const noexcept { return sum(amounts); }

double TaxVector::total() const noexcept { return sum(taxes); }

void LambdaParams::validate() const {
  if (!std::isfinite(lambda1)) throw ValidationError("lambda1", "must be finite");
  if (!std::isfinite(lambda2)) throw ValidationError("lambda2", "must be finite");
}

void DeltaRule::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    std::ostringstream os;
    os << "must lie in [0, 1], got " << delta;
    throw ValidationError("delta", os.str());
  }
}

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::LfFr: return "LF_FR";
    case Family::LfNa: return "LF_NA";
    case Family::FrNa: return "FR_NA";
  }
  return "?";
}

std::string_view to_string(FocalRule rule) noexcept {
  switch (rule) {
    case FocalRule::LaissezFaire: return "L";
    case FocalRule::FullRedistribution: return "F";
    case FocalRule::NeedAdjusted: return "A";
  }
  return "?";
}

std::string to_string(const RuleSpec& rule) {
  struct Visitor {
    std::string operator()(FocalRule r) const { return std::string(to_string(r)); }
    std::string operator()(const LambdaParams& l) const {
      std::ostringstream os;
      os << "lambda(" << l.lambda1 << "," << l.lambda2 << ")";
      return os.str();
    }
    std::string operator()(const DeltaRule& d) const {
      std::ostringstream os;
      os << to_string(d.family) << "(" << d.delta << ")";
      return os.str();
    }
  };
  return std::visit(Visitor{}, rule);
}

Family parse_family(std::string_view text) {
  const std::string t = normalize_token(text);
  if (t == "LF_FR") return Family::LfFr;
  if (t == "LF_NA") return Family::LfNa;
  if (t == "FR_NA") return Family::FrNa;
  throw ValidationError("family", "unknown family '" + std::string(text) +
                                      "' (expected LF_FR, LF_NA or FR_NA)");
}

FocalRule parse_focal_rule(std::string_view text) {
  const std::string t = normalize_token(text);
  if (t == "L") return FocalRule::LaissezFaire;
  if (t == "F") return FocalRule::FullRedistribution;
  if (t == "A") return FocalRule::NeedAdjusted;
  throw ValidationError("rule", "unknown rule '" + std::string(text) + "' (expected L, F or A)");
}

Allocation allocate_laissez_faire(const Problem& p) {
  const auto y = p.incomes();
  return Allocation{std::vector<double>(y.begin(), y.end())};
}

Allocation allocate_full_redistribution(const Problem& p) {
  return Allocation{std::vector<double>(p.size(), p.mean_income())};
}

Allocation allocate_need_adjusted(const Problem& p) {
  const double residual = p.mean_net_income();
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p.need(i) + residual;
  return Allocation{std::move(out)};
}

Allocation allocate_focal(const Problem& p, FocalRule rule) {
  switch (rule) {
    case FocalRule::LaissezFaire: return allocate_laissez_faire(p);
    case FocalRule::FullRedistribution: return allocate_full_redistribution(p);
    case FocalRule::NeedAdjusted: return allocate_need_adjusted(p);
  }
  throw ValidationError("rule", "unknown focal rule");
}

Allocation allocate_lambda(const Problem& p, const LambdaParams& lambda) {
  lambda.validate();
  const double l1 = lambda.lambda1;
  const double l2 = lambda.lambda2;
  const double l3 = lambda.lambda3();
  const double mean = p.mean_income();
  const double residual = p.mean_net_income();
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = l1 * p.income(i) + l2 * mean + l3 * (p.need(i) + residual);
  }
  return Allocation{std::move(out)};
}

Allocation allocate_delta(const Problem& p, const DeltaRule& rule) {
  rule.validate();
  const double d = rule.delta;
  const double mean = p.mean_income();
  const double residual = p.mean_net_income();
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double lf = p.income(i);
    const double fr = mean;
    const double na = p.need(i) + residual;
    switch (rule.family) {
      case Family::LfFr: out[i] = d * lf + (1.0 - d) * fr; break;
      case Family::LfNa: out[i] = d * lf + (1.0 - d) * na; break;
      case Family::FrNa: out[i] = d * fr + (1.0 - d) * na; break;
    }
  }
  return Allocation{std::move(out)};
}

Allocation allocate(const Problem& p, const RuleSpec& rule) {
  struct Visitor {
    const Problem& p;
    Allocation operator()(FocalRule r) const { return allocate_focal(p, r); }
    Allocation operator()(const LambdaParams& l) const { return allocate_lambda(p, l); }
    Allocation operator()(const DeltaRule& d) const { return allocate_delta(p, d); }
  };
  return std::visit(Visitor{p}, rule);
}

LambdaParams delta_to_lambda(const DeltaRule& rule) {
  rule.validate();
  switch (rule.family) {
    case Family::LfFr: return {rule.delta, 1.0 - rule.delta};
    case Family::LfNa: return {rule.delta, 0.0};
    case Family::FrNa: return {0.0, rule.delta};
  }
  throw ValidationError("family", "unknown family");
}

LambdaParams focal_to_lambda(FocalRule rule) noexcept {
  switch (rule) {
    case FocalRule::LaissezFaire: return {1.0, 0.0};
    case FocalRule::FullRedistribution: return {0.0, 1.0};
    case FocalRule::NeedAdjusted: return {0.0, 0.0};
  }
  return {};
}

LambdaParams to_lambda(const RuleSpec& rule) {
  struct Visitor {
    LambdaParams operator()(FocalRule r) const { return focal_to_lambda(r); }
    LambdaParams operator()(const LambdaParams& l) const {
      l.validate();
      return l;
    }
    LambdaParams operator()(const DeltaRule& d) const { return delta_to_lambda(d); }
  };
  return std::visit(Visitor{}, rule);
}

RuleFn make_rule(const RuleSpec& rule) {
  return [rule](const Problem& p) { return allocate(p, rule); };
}

TaxVector tax_lambda(const Problem& p, const LambdaParams& lambda) {
  lambda.validate();
  const double income_rate = 1.0 - lambda.lambda1;
  const double need_rate = lambda.lambda3();
  const double mean_y = p.mean_income();
  const double mean_z = p.mean_need();
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = income_rate * (p.income(i) - mean_y) - need_rate * (p.need(i) - mean_z);
  }
  return TaxVector{std::move(out)};
}

void require_budget_balance(const Problem& p, const Allocation& a, double tolerance) {
  if (a.size() != p.size()) {
    throw ValidationError("allocation", "expected " + std::to_string(p.size()) +
                                            " entries, got " + std::to_string(a.size()));
  }
  const double total = a.total();
  if (!(std::abs(total - p.total_income()) <= budget_tolerance(p.total_income(), tolerance))) {
    throw BudgetViolation(p.total_income(), total);
  }
}

TaxVector tax_of_rule(const Problem& p, const RuleFn& rule, double tolerance) {
  const Allocation a = rule(p);
  require_budget_balance(p, a, tolerance);
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p.income(i) - a[i];
  return TaxVector{std::move(out)};
}

TaxVector TaxDecomposition::reconstruct() const {
  std::vector<double> out(income_taxes.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = income_taxes[i] - need_subsidies[i];
  return TaxVector{std::move(out)};
}

TaxDecomposition decompose_tax(const Problem& p, const LambdaParams& lambda) {
  lambda.validate();
  TaxDecomposition d;
  d.marginal_rate = 1.0 - lambda.lambda1;
  d.need_subsidy_rate = lambda.lambda3();
  d.deduction = p.mean_income();
  d.mean_need = p.mean_need();
  d.income_taxes.resize(p.size());
  d.need_subsidies.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    d.income_taxes[i] = d.marginal_rate * (p.income(i) - d.deduction);
    d.need_subsidies[i] = d.need_subsidy_rate * (p.need(i) - d.mean_need);
  }
  return d;
}

}  // namespace redist
