#include <doctest.h>

#include <array>

#include "redist/axioms.hpp"
#include "redist/json.hpp"
#include "support.hpp"

using namespace redist;
using redist::testing::close;
using redist::testing::Gen;

namespace {

const RuleFn kLaissezFaire = make_rule(FocalRule::LaissezFaire);
const RuleFn kFull = make_rule(FocalRule::FullRedistribution);
const RuleFn kNeedAdjusted = make_rule(FocalRule::NeedAdjusted);

SearchOptions search(std::uint64_t seed) {
  SearchOptions o;
  o.seed = seed;
  o.iterations = 3000;
  return o;
}

}  // namespace

TEST_CASE("axiom names round trip") {
  CHECK(all_axioms().size() == 9);
  for (Axiom a : all_axioms()) CHECK(parse_axiom(to_string(a)) == a);
  CHECK_THROWS_AS(parse_axiom("fairness"), ValidationError);
}

TEST_CASE("equal treatment of equals") {
  Gen gen(1);
  for (int k = 0; k < 50; ++k) CHECK(check_equal_treatment(kFull, gen.problem(4)).passed);

  const RuleFn lopsided = [](const Problem&) { return Allocation{{0, 2}}; };
  const AxiomVerdict bad = check_equal_treatment(lopsided, Problem({1, 1}, {0, 0}));
  CHECK_FALSE(bad.passed);
  REQUIRE(bad.witness);
  CHECK(bad.witness->agents == std::vector<std::size_t>{0, 1});

  // R^A on y = (3, 3, 5), z = (2, 2, 0): (Y - Z)/3 = 7/3, twins get 13/3.
  const Problem twins({3, 3, 5}, {2, 2, 0});
  CHECK(check_equal_treatment(kNeedAdjusted, twins).passed);
  const Allocation a = kNeedAdjusted(twins);
  CHECK(close(a[0], 13.0 / 3, 1e-12));
  CHECK(a[0] == a[1]);
}

TEST_CASE("additivity") {
  Gen gen(2);
  for (int k = 0; k < 100; ++k) {
    const RuleFn rule = make_rule(gen.lambda());
    CHECK(check_additivity(rule, gen.problem(3), gen.problem(3)).passed);
  }

  // Switching between R^A and R^L on whether any need is present.
  const RuleFn switching = [](const Problem& p) {
    return p.total_need() > 0 ? allocate_need_adjusted(p) : allocate_laissez_faire(p);
  };
  const Problem p({1, 3}, {0, 0});
  const Problem q({2, 2}, {1, 0});
  const AxiomVerdict v = check_additivity(switching, p, q);
  CHECK_FALSE(v.passed);
  REQUIRE(v.witness);
  // Joint problem y = (3, 5), z = (1, 0): R^A = (4.5, 3.5); split (1, 3) + (2.5, 1.5).
  CHECK(v.witness->observed == std::vector<double>{4.5, 3.5});

  // Falling back to R^F instead is indistinguishable from R^A: both agree
  // whenever Z = 0.
  const RuleFn fallback_full = [](const Problem& p) {
    return p.total_need() > 0 ? allocate_need_adjusted(p) : allocate_full_redistribution(p);
  };
  CHECK(check_additivity(fallback_full, p, q).passed);

  // Zero partner: passes iff R(0, 0) = 0.
  const Problem zero({0, 0}, {0, 0});
  CHECK(check_additivity(kNeedAdjusted, p, zero).passed);
  const RuleFn offset = [](const Problem& p) {
    Allocation a = allocate_laissez_faire(p);
    a.amounts[0] += 1;
    a.amounts[1] -= 1;
    return a;
  };
  CHECK_FALSE(check_additivity(offset, p, zero).passed);

  CHECK_THROWS_AS(check_additivity(kFull, p, Problem({1, 2, 3}, {0, 0, 0})), ValidationError);
}

TEST_CASE("sampled continuity") {
  const Problem p({-1, 1}, {0, 0});
  ContinuitySettings s;
  s.epsilon = 1e-3;
  s.lipschitz = 1.0;
  CHECK(check_continuity_sampled(kLaissezFaire, p, s).passed);

  // Jump at Y = 0: R^L gives (-1, 1), any Y < 0 switches to about (0, 0).
  const RuleFn jump = [](const Problem& q) {
    return q.total_income() >= 0 ? allocate_laissez_faire(q) : allocate_full_redistribution(q);
  };
  s.lipschitz = 2.0;
  const AxiomVerdict v = check_continuity_sampled(jump, p, s);
  CHECK_FALSE(v.passed);
  REQUIRE(v.witness);
  CHECK(v.witness->observed[2] >= 1.0 - 2 * s.epsilon);

  s.epsilon = 0.0;
  CHECK_THROWS_AS(check_continuity_sampled(kLaissezFaire, p, s), ValidationError);

  Gen gen(3);
  for (int k = 0; k < 50; ++k) {
    const LambdaParams l = gen.lambda();
    const Problem q = gen.problem(static_cast<std::size_t>(gen.integer(1, 6)));
    ContinuitySettings c;
    c.lipschitz = continuity_constant(l, q.size());
    c.seed = static_cast<std::uint64_t>(k);
    CHECK(check_continuity_sampled(make_rule(l), q, c).passed);
  }
}

TEST_CASE("lower bounds are gated on dominating incomes") {
  Gen gen(4);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> y(4), z(4);
    for (std::size_t i = 0; i < 4; ++i) {
      z[i] = gen.uniform(0, 50);
      y[i] = z[i] + gen.uniform(0, 50);
    }
    const Problem p(y, z);
    CHECK(check_needs_lb(kNeedAdjusted, p).passed);
    CHECK(check_needs_lb(kNeedAdjusted, p).premise_met);
  }

  const AxiomVerdict gated = check_needs_lb(kLaissezFaire, Problem({5, 1}, {0, 3}));
  CHECK(gated.passed);
  CHECK(gated.vacuous());
  CHECK_FALSE(gated.witness);

  const RuleFn laissez = make_rule(DeltaRule{Family::LfNa, 1.0});
  CHECK(check_zero_lb(laissez, Problem({0, 4}, {0, 0})).passed);
  CHECK(check_zero_lb(laissez, Problem({0, 4}, {0, 0})).premise_met);
  // y = (-1, 4) with zero needs: -1 < 0 breaks the premise.
  CHECK(check_zero_lb(laissez, Problem({-1, 4}, {0, 0})).vacuous());

  const AxiomVerdict low = check_net_average_lb(kLaissezFaire, Problem({10, 0}, {0, 0}));
  CHECK_FALSE(low.passed);
  REQUIRE(low.witness);
  CHECK(low.witness->agents == std::vector<std::size_t>{1});
  CHECK(low.witness->observed == std::vector<double>{0, 5});
}

TEST_CASE("order preservation for uniform needs") {
  Gen gen(5);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> y(5);
    for (double& v : y) v = gen.uniform(-10, 10);
    CHECK(check_order_preservation_uniform_needs(kFull, Problem(y, std::vector<double>(5, 2.0)))
              .passed);
  }
  const RuleFn reverse = [](const Problem& p) {
    return Allocation{{p.income(1), p.income(0)}};
  };
  CHECK_FALSE(check_order_preservation_uniform_needs(reverse, Problem({1, 2}, {0, 0})).passed);

  // 0.5 (1, 4) + 0.5 (2.5, 2.5) = (1.75, 3.25).
  const RuleFn half = make_rule(DeltaRule{Family::LfNa, 0.5});
  const Problem p({1, 4}, {2, 2});
  CHECK(half(p).amounts == std::vector<double>{1.75, 3.25});
  CHECK(check_order_preservation_uniform_needs(half, p).passed);

  CHECK(check_order_preservation_uniform_needs(reverse, Problem({1, 2}, {0, 1})).vacuous());
}

TEST_CASE("need monotonicity") {
  Gen gen(6);
  for (int k = 0; k < 50; ++k) {
    const Problem p = gen.problem(4);
    const auto i = static_cast<std::size_t>(gen.integer(0, 3));
    for (const RuleFn& r : {kFull, kLaissezFaire}) {
      CHECK(check_need_monotonicity(r, p, i, 1.0).passed);
      CHECK(check_strong_need_monotonicity(r, p, i, 1.0).passed);
    }
    CHECK(check_need_monotonicity(kNeedAdjusted, p, i, 2.5).passed);
  }

  // y = (5, 1), z = 0; raise agent 0's need by 1. Agent 1 (net 1 <= 4) goes
  // from 3 to 2.5, a change of -dz/n.
  const Problem p({5, 1}, {0, 0});
  const AxiomVerdict v = check_strong_need_monotonicity(kNeedAdjusted, p, 0, 1.0);
  CHECK_FALSE(v.passed);
  REQUIRE(v.witness);
  CHECK(v.witness->agents == std::vector<std::size_t>{0, 1});
  CHECK(v.witness->observed == std::vector<double>{3.0, 2.5});

  CHECK_THROWS_AS(check_need_monotonicity(kFull, p, 0, 0.0), ValidationError);
  CHECK_THROWS_AS(check_need_monotonicity(kFull, p, 2, 1.0), ValidationError);
}

TEST_CASE("strong need monotonicity net-income reference switch") {
  // Agent 0's net income is 5 before and 4 after the raise; agent 1's is 4.5.
  const Problem p({5, 4.5}, {0, 0});
  CheckOptions raised;
  CheckOptions original;
  original.net_income_reference = NetIncomeReference::OriginalNeeds;
  CHECK(check_strong_need_monotonicity(kNeedAdjusted, p, 0, 1.0, raised).passed);
  CHECK_FALSE(check_strong_need_monotonicity(kNeedAdjusted, p, 0, 1.0, original).passed);

  // The readings agree on the zero-lower-bound compromise family.
  Gen gen(7);
  for (int k = 0; k < 100; ++k) {
    const RuleFn r = make_rule(DeltaRule{Family::LfFr, gen.uniform(0, 1)});
    const Problem q = gen.problem(3);
    const auto i = static_cast<std::size_t>(gen.integer(0, 2));
    CHECK(check_strong_need_monotonicity(r, q, i, 1.0, raised).passed ==
          check_strong_need_monotonicity(r, q, i, 1.0, original).passed);
  }
}

TEST_CASE("identify_lambda on focal rules") {
  CHECK(identify_lambda(kLaissezFaire, 3) == LambdaParams{1, 0});
  const LambdaParams f = identify_lambda(kFull, 3);
  CHECK(close(f.lambda1, 0));
  CHECK(close(f.lambda2, 1));
  const LambdaParams a = identify_lambda(kNeedAdjusted, 3);
  CHECK(close(a.lambda1, 0));
  CHECK(close(a.lambda2, 0));
  CHECK_THROWS_AS(identify_lambda(kFull, 1), ValidationError);
}

TEST_CASE("identify_lambda round trip") {
  for (std::size_t n : {2u, 3u, 5u}) {
    for (double l1 = -2.0; l1 <= 2.0; l1 += 0.5) {
      for (double l2 = -2.0; l2 <= 2.0; l2 += 0.5) {
        const LambdaParams got = identify_lambda(make_rule(LambdaParams{l1, l2}), n);
        CHECK(close(got.lambda1, l1));
        CHECK(close(got.lambda2, l2));
      }
    }
  }
}

TEST_CASE("violation search is seeded and finds focal-rule failures") {
  const auto a = search_violation(Axiom::StrongNeedMonotonicity, kNeedAdjusted, search(11));
  const auto b = search_violation(Axiom::StrongNeedMonotonicity, kNeedAdjusted, search(11));
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->witness->problems == b->witness->problems);
  CHECK(a->witness->observed == b->witness->observed);

  CHECK(search_violation(Axiom::NeedsLowerBound, kFull, search(12)));
  CHECK(search_violation(Axiom::NetAverageLowerBound, kLaissezFaire, search(13)));
  CHECK_FALSE(search_violation(Axiom::NeedsLowerBound, kLaissezFaire, search(14)));
  CHECK_FALSE(search_violation(Axiom::EqualTreatment, kNeedAdjusted, search(15)));
  CHECK_FALSE(search_violation(Axiom::OrderPreservation, kFull, search(16)));

  SearchOptions c = search(17);
  CHECK_THROWS_AS(search_violation(Axiom::Continuity, kFull, c), ValidationError);
  c.continuity = ContinuitySettings{};
  c.continuity->lipschitz = 1.0;
  c.max_agents = 2;
  CHECK_FALSE(search_violation(Axiom::Continuity, kLaissezFaire, c));
}

TEST_CASE("compromises just outside [0, 1] break their lower bound") {
  // LF_FR at delta = 1.1 is lambda = (1.1, -0.1).
  CHECK(search_violation(Axiom::ZeroLowerBound, make_rule(LambdaParams{1.1, -0.1}), search(21)));
  CHECK_FALSE(search_violation(Axiom::ZeroLowerBound, make_rule(LambdaParams{1.0, 0.0}), search(21)));
  // LF_NA at delta = 1.1 and -0.1.
  CHECK(search_violation(Axiom::NeedsLowerBound, make_rule(LambdaParams{1.1, 0.0}), search(22)));
  // Below zero the binding axiom is order preservation: -0.1 y_i + 1.1 z_i + ...
  // stays above z_i unless n > 11.
  CHECK(search_violation(Axiom::OrderPreservation, make_rule(LambdaParams{-0.1, 0.0}), search(23)));
  CHECK(search_violation(Axiom::OrderPreservation, make_rule(LambdaParams{-0.1, 1.1}), search(25)));
  // FR_NA at delta = -0.1: low-need agents fall below (Y - Z)/n.
  CHECK(search_violation(Axiom::NetAverageLowerBound, make_rule(LambdaParams{0.0, -0.1}),
                         search(24)));
}

TEST_CASE("verdict JSON shape") {
  const AxiomVerdict pass = check_equal_treatment(kFull, Problem({1, 1}, {0, 0}));
  const nlohmann::json j = pass;
  CHECK(j["axiom"] == "equal_treatment");
  CHECK(j["passed"] == true);
  CHECK(j["witness"].is_null());

  const AxiomVerdict fail = check_net_average_lb(kLaissezFaire, Problem({10, 0}, {0, 0}));
  const nlohmann::json k = fail;
  CHECK(k["passed"] == false);
  CHECK(k["witness"]["agents"] == nlohmann::json::array({1}));
  CHECK(k["witness"]["problems"][0]["incomes"] == nlohmann::json::array({10.0, 0.0}));
}
