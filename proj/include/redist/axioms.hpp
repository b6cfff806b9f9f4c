#pragma once

// Black-box axiom checkers for allocation rules, seeded violation search, and
// probe-based recovery of a linear rule's (lambda1, lambda2) coordinates.
//
// Checkers only ever falsify or confirm on concrete instances. A verdict that
// passes says nothing about problems that were not examined.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redist/core.hpp"

namespace redist {

enum class Axiom {
  EqualTreatment,
  Continuity,
  Additivity,
  ZeroLowerBound,
  NeedsLowerBound,
  NetAverageLowerBound,
  OrderPreservation,
  NeedMonotonicity,
  StrongNeedMonotonicity,
};

/// Canonical snake_case names: equal_treatment, continuity, additivity,
/// zero_lb, needs_lb, net_average_lb, order_preservation, need_monotonicity,
/// strong_need_monotonicity.
std::string_view to_string(Axiom axiom) noexcept;
Axiom parse_axiom(std::string_view name);
std::span<const Axiom> all_axioms() noexcept;

/// Concrete evidence of a violation.
struct Witness {
  std::vector<Problem> problems;
  std::vector<std::size_t> agents;
  /// The compared quantities, in the order named by `description`.
  std::vector<double> observed;
  std::string description;
};

struct AxiomVerdict {
  Axiom axiom = Axiom::EqualTreatment;
  bool passed = true;
  /// False when the axiom's premise does not hold for the input; such a
  /// verdict passes vacuously and carries no witness.
  bool premise_met = true;
  /// Present iff !passed.
  std::optional<Witness> witness;
  double tolerance_used = kDefaultTolerance;

  bool vacuous() const noexcept { return passed && !premise_met; }
};

/// Which need profile defines "poorer agents" in strong need monotonicity.
enum class NetIncomeReference {
  RaisedNeeds,    // y_j - z_j <= y_i - z_i at the problem with the larger need
  OriginalNeeds,  // ... at the problem before the need increase
};

struct CheckOptions {
  double tolerance = kDefaultTolerance;
  NetIncomeReference net_income_reference = NetIncomeReference::RaisedNeeds;
};

AxiomVerdict check_equal_treatment(const RuleFn& rule, const Problem& p,
                                   const CheckOptions& opts = {});

/// Throws ValidationError if the problems have different agent counts.
AxiomVerdict check_additivity(const RuleFn& rule, const Problem& p, const Problem& q,
                              const CheckOptions& opts = {});

struct ContinuitySettings {
  std::size_t num_samples = 64;
  double epsilon = 1e-3;
  /// Allowed sup-norm change per unit of sup-norm perturbation.
  double lipschitz = 1.0;
  std::uint64_t seed = 0;
};

/// Exact sup-norm Lipschitz bound used for a known lambda-rule:
/// max(1, |l1| + |l2| + |1 - l1 - l2|) * n.
double continuity_constant(const LambdaParams& lambda, std::size_t n);

/// Samples perturbations (u, v) with |u|_inf, |v|_inf <= 1 and requires
/// |R(y + eps u, z + eps v) - R(y, z)|_inf <= K eps. Perturbed needs are
/// clamped at zero. Throws ValidationError unless epsilon > 0 and
/// num_samples > 0.
AxiomVerdict check_continuity_sampled(const RuleFn& rule, const Problem& p,
                                      const ContinuitySettings& settings,
                                      const CheckOptions& opts = {});

AxiomVerdict check_zero_lb(const RuleFn& rule, const Problem& p, const CheckOptions& opts = {});
AxiomVerdict check_needs_lb(const RuleFn& rule, const Problem& p, const CheckOptions& opts = {});
AxiomVerdict check_net_average_lb(const RuleFn& rule, const Problem& p,
                                  const CheckOptions& opts = {});

AxiomVerdict check_order_preservation_uniform_needs(const RuleFn& rule, const Problem& p,
                                                    const CheckOptions& opts = {});

/// Raises agent `agent`'s need by `dz` > 0 and compares.
AxiomVerdict check_need_monotonicity(const RuleFn& rule, const Problem& p, std::size_t agent,
                                     double dz, const CheckOptions& opts = {});
AxiomVerdict check_strong_need_monotonicity(const RuleFn& rule, const Problem& p,
                                            std::size_t agent, double dz,
                                            const CheckOptions& opts = {});

struct SearchOptions {
  std::uint64_t seed = 1;
  std::size_t iterations = 2000;
  std::size_t min_agents = 2;
  std::size_t max_agents = 6;
  /// Required for Axiom::Continuity.
  std::optional<ContinuitySettings> continuity;
  CheckOptions check;
};

/// Randomized, seeded search for a violation. Problems are drawn from a mixed
/// discrete/continuous generator and shaped so the axiom's premise holds
/// (dominating incomes for lower bounds, uniform needs for order
/// preservation, duplicated agents for equal treatment). Returns the first
/// failing verdict, or nullopt if none was found. Identical options give
/// identical results.
std::optional<AxiomVerdict> search_violation(Axiom axiom, const RuleFn& rule,
                                             const SearchOptions& opts = {});

/// Probes `rule` on the unit problems (e_1, 0) and (e_1, e_1) over n agents:
///   alpha = R_1(e_1, 0), beta = R_1(e_1, e_1)
///   lambda1 = (n alpha - 1)/(n - 1), lambda2 = n (1 - beta)/(n - 1).
/// Assumes the rule is additive and treats equals equally; neither is checked.
/// Throws ValidationError for n < 2.
LambdaParams identify_lambda(const RuleFn& rule, std::size_t n);

}  // namespace redist
