#include "redist/voting.hpp"

#include <cmath>

#include "redist/random.hpp"

namespace redist {

namespace {

template <typename Value>
PartitionCounts partition_around(const Problem& p, double threshold, Value value) {
  PartitionCounts c;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = value(i);
    if (v < threshold) {
      ++c.below;
    } else if (v > threshold) {
      ++c.above;
    } else {
      ++c.at;
    }
  }
  return c;
}

bool strict_majority(std::size_t count, std::size_t n) { return 2 * count > n; }

}  // namespace

PartitionCounts partition_by_income(const Problem& p) {
  return partition_around(p, p.mean_income(), [&](std::size_t i) { return p.income(i); });
}

PartitionCounts partition_by_net_income(const Problem& p) {
  return partition_around(p, p.mean_net_income(), [&](std::size_t i) { return p.net_income(i); });
}

PartitionCounts partition_by_need(const Problem& p) {
  return partition_around(p, p.mean_need(), [&](std::size_t i) { return p.need(i); });
}

PartitionCounts partition_for_family(const Problem& p, Family family) {
  switch (family) {
    case Family::LfFr: return partition_by_income(p);
    case Family::LfNa: return partition_by_net_income(p);
    case Family::FrNa: return partition_by_need(p);
  }
  throw ValidationError("family", "unknown family");
}

std::optional<FocalRule> MajorityOutcome::winning_rule() const {
  if (!winner) return std::nullopt;
  const bool first = winner->delta == 1.0;
  switch (family) {
    case Family::LfFr: return first ? FocalRule::LaissezFaire : FocalRule::FullRedistribution;
    case Family::LfNa: return first ? FocalRule::LaissezFaire : FocalRule::NeedAdjusted;
    case Family::FrNa: return first ? FocalRule::FullRedistribution : FocalRule::NeedAdjusted;
  }
  return std::nullopt;
}

MajorityOutcome majority_winner(const Problem& p, Family family) {
  MajorityOutcome out;
  out.family = family;
  out.partition = partition_for_family(p, family);
  const std::size_t n = p.size();
  // Which corner the below-mean majority wants: in LF_FR and LF_NA the
  // redistributive rule sits at delta = 0; in FR_NA full redistribution
  // (delta = 1) is what low-need agents prefer.
  const double below_corner = family == Family::FrNa ? 1.0 : 0.0;
  if (strict_majority(out.partition.below, n)) {
    out.kind = MajorityOutcome::Kind::UniqueCorner;
    out.winner = DeltaRule{family, below_corner};
  } else if (strict_majority(out.partition.above, n)) {
    out.kind = MajorityOutcome::Kind::UniqueCorner;
    out.winner = DeltaRule{family, 1.0 - below_corner};
  } else {
    out.kind = MajorityOutcome::Kind::AllTie;
  }
  return out;
}

PreferenceCounts compare_allocations(const Allocation& a, const Allocation& b, double tolerance) {
  if (a.size() != b.size()) throw ValidationError("allocation", "length mismatch");
  PreferenceCounts c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (nearly_equal(a[i], b[i], tolerance)) {
      ++c.indifferent;
    } else if (a[i] > b[i]) {
      ++c.first_better;
    } else {
      ++c.second_better;
    }
  }
  return c;
}

PreferenceCounts majority_prefers(const Problem& p, const RuleSpec& a, const RuleSpec& b,
                                  double tolerance) {
  return compare_allocations(allocate(p, a), allocate(p, b), tolerance);
}

bool beats(const Allocation& challenger, const Allocation& incumbent, double tolerance) {
  const PreferenceCounts c = compare_allocations(challenger, incumbent, tolerance);
  return strict_majority(c.first_better, challenger.size());
}

std::vector<double> delta_grid(std::size_t grid_size) {
  if (grid_size < 2) throw ValidationError("grid_size", "must be at least 2");
  std::vector<double> grid(grid_size);
  const double last = static_cast<double>(grid_size - 1);
  for (std::size_t k = 0; k < grid_size; ++k) grid[k] = static_cast<double>(k) / last;
  return grid;
}

std::vector<double> brute_force_winners(const Problem& p, Family family, std::size_t grid_size,
                                        double tolerance) {
  const std::vector<double> grid = delta_grid(grid_size);
  std::vector<Allocation> allocations;
  allocations.reserve(grid.size());
  for (double d : grid) allocations.push_back(allocate_delta(p, DeltaRule{family, d}));

  std::vector<double> winners;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    bool beaten = false;
    for (std::size_t j = 0; j < grid.size() && !beaten; ++j) {
      if (j != k) beaten = beats(allocations[j], allocations[k], tolerance);
    }
    if (!beaten) winners.push_back(grid[k]);
  }
  return winners;
}

bool oracle_agrees(const MajorityOutcome& outcome, std::span<const double> oracle_winners,
                   std::size_t grid_size) {
  if (outcome.kind == MajorityOutcome::Kind::AllTie) return oracle_winners.size() == grid_size;
  return oracle_winners.size() == 1 && outcome.winner &&
         oracle_winners.front() == outcome.winner->delta;
}

std::optional<LambdaParams> find_majority_improvement(const Problem& p,
                                                      const LambdaParams& incumbent,
                                                      std::span<const LambdaParams> candidates,
                                                      double tolerance) {
  if (candidates.empty()) throw ValidationError("candidates", "must not be empty");
  const Allocation current = allocate_lambda(p, incumbent);
  for (const LambdaParams& c : candidates) {
    if (beats(allocate_lambda(p, c), current, tolerance)) return c;
  }
  return std::nullopt;
}

std::optional<MajorityCycle> find_majority_cycle(const CycleSearchOptions& opts) {
  if (opts.agents < 3) throw ValidationError("agents", "cycles need at least three agents");
  Rng rng(opts.seed);
  const double b = opts.lambda_bound;
  for (std::size_t draw = 0; draw < opts.draws; ++draw) {
    std::vector<double> y(opts.agents);
    std::vector<double> z(opts.agents);
    for (std::size_t i = 0; i < opts.agents; ++i) {
      y[i] = rng.uniform(-100.0, 100.0);
      z[i] = rng.uniform(0.0, 100.0);
    }
    const Problem p(std::move(y), std::move(z));
    for (std::size_t t = 0; t < opts.triples_per_draw; ++t) {
      std::array<LambdaParams, 3> rules;
      std::array<Allocation, 3> alloc;
      for (std::size_t k = 0; k < 3; ++k) {
        rules[k] = LambdaParams{rng.uniform(-b, b), rng.uniform(-b, b)};
        alloc[k] = allocate_lambda(p, rules[k]);
      }
      const auto tol = opts.tolerance;
      if (beats(alloc[1], alloc[0], tol) && beats(alloc[2], alloc[1], tol) &&
          beats(alloc[0], alloc[2], tol)) {
        return MajorityCycle{p, rules};
      }
      if (beats(alloc[2], alloc[0], tol) && beats(alloc[1], alloc[2], tol) &&
          beats(alloc[0], alloc[1], tol)) {
        return MajorityCycle{p, {rules[0], rules[2], rules[1]}};
      }
    }
  }
  return std::nullopt;
}

}  // namespace redist
