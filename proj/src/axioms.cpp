#include "redist/axioms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "redist/random.hpp"

namespace redist {

namespace {

constexpr std::array<Axiom, 9> kAllAxioms = {
    Axiom::EqualTreatment,       Axiom::Continuity,        Axiom::Additivity,
    Axiom::ZeroLowerBound,       Axiom::NeedsLowerBound,   Axiom::NetAverageLowerBound,
    Axiom::OrderPreservation,    Axiom::NeedMonotonicity,  Axiom::StrongNeedMonotonicity,
};

AxiomVerdict pass(Axiom axiom, const CheckOptions& opts) {
  AxiomVerdict v;
  v.axiom = axiom;
  v.tolerance_used = opts.tolerance;
  return v;
}

AxiomVerdict vacuous(Axiom axiom, const CheckOptions& opts) {
  AxiomVerdict v = pass(axiom, opts);
  v.premise_met = false;
  return v;
}

AxiomVerdict fail(Axiom axiom, const CheckOptions& opts, Witness witness) {
  AxiomVerdict v = pass(axiom, opts);
  v.passed = false;
  v.witness = std::move(witness);
  return v;
}

Allocation evaluate(const RuleFn& rule, const Problem& p) {
  Allocation a = rule(p);
  if (a.size() != p.size()) {
    throw ValidationError("rule", "returned " + std::to_string(a.size()) +
                                      " amounts for a problem with " + std::to_string(p.size()) +
                                      " agents");
  }
  return a;
}

// value >= bound within the relative slack.
bool at_least(double value, double bound, double tolerance) {
  return value >= bound - numeric_tolerance(value, bound, tolerance);
}

void require_agent(const Problem& p, std::size_t agent) {
  if (agent >= p.size()) {
    throw ValidationError("agent", "index " + std::to_string(agent) + " out of range for " +
                                       std::to_string(p.size()) + " agents");
  }
}

void require_positive_step(double dz) {
  if (!(dz > 0.0) || !std::isfinite(dz)) throw ValidationError("dz", "must be positive and finite");
}

Problem raise_need(const Problem& p, std::size_t agent, double dz) {
  const auto y = p.incomes();
  const auto z = p.needs();
  std::vector<double> raised(z.begin(), z.end());
  raised[agent] += dz;
  return Problem(std::vector<double>(y.begin(), y.end()), std::move(raised));
}

enum class LowerBound { Zero, Needs, NetAverage };

AxiomVerdict check_lower_bound(Axiom axiom, LowerBound kind, const RuleFn& rule,
                               const Problem& p, const CheckOptions& opts) {
  if (!p.income_dominates_needs()) return vacuous(axiom, opts);
  const Allocation a = evaluate(rule, p);
  const double net_average = p.mean_net_income();
  for (std::size_t i = 0; i < p.size(); ++i) {
    double bound = 0.0;
    const char* what = "R_i >= 0";
    switch (kind) {
      case LowerBound::Zero: break;
      case LowerBound::Needs:
        bound = p.need(i);
        what = "R_i >= z_i";
        break;
      case LowerBound::NetAverage:
        bound = net_average;
        what = "R_i >= (Y - Z)/n";
        break;
    }
    if (!at_least(a[i], bound, opts.tolerance)) {
      return fail(axiom, opts,
                  Witness{{p}, {i}, {a[i], bound}, std::string(what) + " violated: (R_i, bound)"});
    }
  }
  return pass(axiom, opts);
}

// Mixed discrete/continuous draws so that ties and exact equalities occur.
struct ProblemDraw {
  Rng& rng;
  bool discrete;

  double income() {
    return discrete ? static_cast<double>(rng.integer(-5, 10)) : rng.uniform(-100.0, 100.0);
  }
  double need() {
    return discrete ? static_cast<double>(rng.integer(0, 5)) : rng.uniform(0.0, 100.0);
  }
  double surplus() {
    return discrete ? static_cast<double>(rng.integer(0, 6)) : rng.uniform(0.0, 100.0);
  }
};

enum class Shape { Free, Dominating, UniformNeeds, WithTwins };

Problem draw_problem(Rng& rng, std::size_t n, Shape shape) {
  ProblemDraw draw{rng, rng.chance(0.5)};
  std::vector<double> y(n);
  std::vector<double> z(n);
  const double common_need = draw.need();
  for (std::size_t i = 0; i < n; ++i) {
    switch (shape) {
      case Shape::Free:
      case Shape::WithTwins:
        y[i] = draw.income();
        z[i] = draw.need();
        break;
      case Shape::Dominating:
        z[i] = draw.need();
        y[i] = z[i] + draw.surplus();
        break;
      case Shape::UniformNeeds:
        y[i] = draw.income();
        z[i] = common_need;
        break;
    }
  }
  if (shape == Shape::WithTwins && n >= 2) {
    const std::size_t src = rng.index(n);
    std::size_t dst = rng.index(n - 1);
    if (dst >= src) ++dst;
    y[dst] = y[src];
    z[dst] = z[src];
  }
  return Problem(std::move(y), std::move(z));
}

}  // namespace

std::string_view to_string(Axiom axiom) noexcept {
  switch (axiom) {
    case Axiom::EqualTreatment: return "equal_treatment";
    case Axiom::Continuity: return "continuity";
    case Axiom::Additivity: return "additivity";
    case Axiom::ZeroLowerBound: return "zero_lb";
    case Axiom::NeedsLowerBound: return "needs_lb";
    case Axiom::NetAverageLowerBound: return "net_average_lb";
    case Axiom::OrderPreservation: return "order_preservation";
    case Axiom::NeedMonotonicity: return "need_monotonicity";
    case Axiom::StrongNeedMonotonicity: return "strong_need_monotonicity";
  }
  return "?";
}

Axiom parse_axiom(std::string_view name) {
  for (Axiom a : kAllAxioms) {
    if (to_string(a) == name) return a;
  }
  throw ValidationError("axioms", "unknown axiom '" + std::string(name) + "'");
}

std::span<const Axiom> all_axioms() noexcept { return kAllAxioms; }

AxiomVerdict check_equal_treatment(const RuleFn& rule, const Problem& p,
                                   const CheckOptions& opts) {
  const Allocation a = evaluate(rule, p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p.income(i) != p.income(j) || p.need(i) != p.need(j)) continue;
      if (!nearly_equal(a[i], a[j], opts.tolerance)) {
        return fail(Axiom::EqualTreatment, opts,
                    Witness{{p}, {i, j}, {a[i], a[j]}, "equal agents receive (R_i, R_j)"});
      }
    }
  }
  return pass(Axiom::EqualTreatment, opts);
}

AxiomVerdict check_additivity(const RuleFn& rule, const Problem& p, const Problem& q,
                              const CheckOptions& opts) {
  const Problem sum = p + q;
  const Allocation joint = evaluate(rule, sum);
  const Allocation a = evaluate(rule, p);
  const Allocation b = evaluate(rule, q);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double split = a[i] + b[i];
    const double scale = std::max({1.0, std::abs(joint[i]), std::abs(a[i]), std::abs(b[i])});
    if (std::abs(joint[i] - split) > opts.tolerance * scale) {
      return fail(Axiom::Additivity, opts,
                  Witness{{p, q}, {i}, {joint[i], split},
                          "R_i(p + q) differs from R_i(p) + R_i(q): (joint, split)"});
    }
  }
  return pass(Axiom::Additivity, opts);
}

double continuity_constant(const LambdaParams& lambda, std::size_t n) {
  const double weight =
      std::abs(lambda.lambda1) + std::abs(lambda.lambda2) + std::abs(lambda.lambda3());
  return std::max(1.0, weight) * static_cast<double>(n);
}

AxiomVerdict check_continuity_sampled(const RuleFn& rule, const Problem& p,
                                      const ContinuitySettings& settings,
                                      const CheckOptions& opts) {
  if (!(settings.epsilon > 0.0) || !std::isfinite(settings.epsilon)) {
    throw ValidationError("epsilon", "must be positive and finite");
  }
  if (settings.num_samples == 0) throw ValidationError("num_samples", "must be positive");
  if (!(settings.lipschitz >= 0.0)) throw ValidationError("lipschitz", "must be nonnegative");

  const Allocation base = evaluate(rule, p);
  Rng rng(settings.seed);
  const std::size_t n = p.size();
  for (std::size_t s = 0; s < settings.num_samples; ++s) {
    // Alternate between cube vertices and interior directions.
    const bool vertex = (s % 2 == 0);
    std::vector<double> y(n);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = vertex ? (rng.chance(0.5) ? 1.0 : -1.0) : rng.uniform(-1.0, 1.0);
      const double v = vertex ? (rng.chance(0.5) ? 1.0 : -1.0) : rng.uniform(-1.0, 1.0);
      y[i] = p.income(i) + settings.epsilon * u;
      z[i] = std::max(0.0, p.need(i) + settings.epsilon * v);
    }
    const Problem moved(std::move(y), std::move(z));
    const Allocation shifted = evaluate(rule, moved);
    const double bound = settings.lipschitz * settings.epsilon;
    for (std::size_t i = 0; i < n; ++i) {
      const double change = std::abs(shifted[i] - base[i]);
      if (change > bound + numeric_tolerance(shifted[i], base[i], opts.tolerance)) {
        return fail(Axiom::Continuity, opts,
                    Witness{{p, moved}, {i}, {base[i], shifted[i], change, bound},
                            "sup-norm change exceeds K*epsilon: (before, after, change, bound)"});
      }
    }
  }
  return pass(Axiom::Continuity, opts);
}

AxiomVerdict check_zero_lb(const RuleFn& rule, const Problem& p, const CheckOptions& opts) {
  return check_lower_bound(Axiom::ZeroLowerBound, LowerBound::Zero, rule, p, opts);
}

AxiomVerdict check_needs_lb(const RuleFn& rule, const Problem& p, const CheckOptions& opts) {
  return check_lower_bound(Axiom::NeedsLowerBound, LowerBound::Needs, rule, p, opts);
}

AxiomVerdict check_net_average_lb(const RuleFn& rule, const Problem& p,
                                  const CheckOptions& opts) {
  return check_lower_bound(Axiom::NetAverageLowerBound, LowerBound::NetAverage, rule, p, opts);
}

AxiomVerdict check_order_preservation_uniform_needs(const RuleFn& rule, const Problem& p,
                                                    const CheckOptions& opts) {
  const auto z = p.needs();
  if (!std::all_of(z.begin(), z.end(), [&](double v) { return v == z.front(); })) {
    return vacuous(Axiom::OrderPreservation, opts);
  }
  const Allocation a = evaluate(rule, p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (i == j || p.income(i) < p.income(j)) continue;
      if (!at_least(a[i], a[j], opts.tolerance)) {
        return fail(Axiom::OrderPreservation, opts,
                    Witness{{p}, {i, j}, {a[i], a[j]},
                            "y_i >= y_j but R_i < R_j: (R_i, R_j)"});
      }
    }
  }
  return pass(Axiom::OrderPreservation, opts);
}

AxiomVerdict check_need_monotonicity(const RuleFn& rule, const Problem& p, std::size_t agent,
                                     double dz, const CheckOptions& opts) {
  require_agent(p, agent);
  require_positive_step(dz);
  const Problem raised = raise_need(p, agent, dz);
  const Allocation before = evaluate(rule, p);
  const Allocation after = evaluate(rule, raised);
  if (!at_least(after[agent], before[agent], opts.tolerance)) {
    return fail(Axiom::NeedMonotonicity, opts,
                Witness{{p, raised}, {agent}, {before[agent], after[agent]},
                        "agent's allocation fell after a need increase: (before, after)"});
  }
  return pass(Axiom::NeedMonotonicity, opts);
}

AxiomVerdict check_strong_need_monotonicity(const RuleFn& rule, const Problem& p,
                                            std::size_t agent, double dz,
                                            const CheckOptions& opts) {
  require_agent(p, agent);
  require_positive_step(dz);
  const Problem raised = raise_need(p, agent, dz);
  const Allocation before = evaluate(rule, p);
  const Allocation after = evaluate(rule, raised);
  if (!at_least(after[agent], before[agent], opts.tolerance)) {
    return fail(Axiom::StrongNeedMonotonicity, opts,
                Witness{{p, raised}, {agent}, {before[agent], after[agent]},
                        "agent's allocation fell after a need increase: (before, after)"});
  }
  const Problem& reference =
      opts.net_income_reference == NetIncomeReference::RaisedNeeds ? raised : p;
  const double own_net = reference.net_income(agent);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j == agent || reference.net_income(j) > own_net) continue;
    if (!at_least(after[j], before[j], opts.tolerance)) {
      return fail(Axiom::StrongNeedMonotonicity, opts,
                  Witness{{p, raised}, {agent, j}, {before[j], after[j]},
                          "agent j with no larger net income lost after agent i's need rose: "
                          "(R_j before, R_j after)"});
    }
  }
  return pass(Axiom::StrongNeedMonotonicity, opts);
}

std::optional<AxiomVerdict> search_violation(Axiom axiom, const RuleFn& rule,
                                             const SearchOptions& opts) {
  if (opts.min_agents == 0 || opts.max_agents < opts.min_agents) {
    throw ValidationError("agents", "need 1 <= min_agents <= max_agents");
  }
  if (axiom == Axiom::Continuity && !opts.continuity) {
    throw ValidationError("continuity", "a Lipschitz constant is required to search for "
                                        "continuity violations");
  }
  Rng rng(opts.seed);
  const auto span = static_cast<std::int64_t>(opts.max_agents - opts.min_agents);
  for (std::size_t it = 0; it < opts.iterations; ++it) {
    const std::size_t n = opts.min_agents + static_cast<std::size_t>(rng.integer(0, span));
    AxiomVerdict v;
    switch (axiom) {
      case Axiom::EqualTreatment:
        v = check_equal_treatment(rule, draw_problem(rng, n, Shape::WithTwins), opts.check);
        break;
      case Axiom::Continuity: {
        ContinuitySettings settings = *opts.continuity;
        settings.seed = rng.next();
        v = check_continuity_sampled(rule, draw_problem(rng, n, Shape::Free), settings,
                                     opts.check);
        break;
      }
      case Axiom::Additivity: {
        const Problem p = draw_problem(rng, n, Shape::Free);
        const Problem q = draw_problem(rng, n, Shape::Free);
        v = check_additivity(rule, p, q, opts.check);
        break;
      }
      case Axiom::ZeroLowerBound:
        v = check_zero_lb(rule, draw_problem(rng, n, Shape::Dominating), opts.check);
        break;
      case Axiom::NeedsLowerBound:
        v = check_needs_lb(rule, draw_problem(rng, n, Shape::Dominating), opts.check);
        break;
      case Axiom::NetAverageLowerBound:
        v = check_net_average_lb(rule, draw_problem(rng, n, Shape::Dominating), opts.check);
        break;
      case Axiom::OrderPreservation:
        v = check_order_preservation_uniform_needs(
            rule, draw_problem(rng, n, Shape::UniformNeeds), opts.check);
        break;
      case Axiom::NeedMonotonicity:
      case Axiom::StrongNeedMonotonicity: {
        const Problem p = draw_problem(rng, n, Shape::Free);
        const std::size_t agent = rng.index(n);
        const double dz = rng.chance(0.5) ? 1.0 : rng.uniform(0.1, 10.0);
        v = axiom == Axiom::NeedMonotonicity
                ? check_need_monotonicity(rule, p, agent, dz, opts.check)
                : check_strong_need_monotonicity(rule, p, agent, dz, opts.check);
        break;
      }
    }
    if (!v.passed) return v;
  }
  return std::nullopt;
}

LambdaParams identify_lambda(const RuleFn& rule, std::size_t n) {
  if (n < 2) throw ValidationError("n", "identification needs at least two agents");
  std::vector<double> unit(n, 0.0);
  unit[0] = 1.0;
  const Problem income_only(unit, std::vector<double>(n, 0.0));
  const Problem income_and_need(unit, unit);
  const double alpha = evaluate(rule, income_only)[0];
  const double beta = evaluate(rule, income_and_need)[0];
  const double nd = static_cast<double>(n);
  return LambdaParams{(nd * alpha - 1.0) / (nd - 1.0), nd * (1.0 - beta) / (nd - 1.0)};
}

}  // namespace redist
