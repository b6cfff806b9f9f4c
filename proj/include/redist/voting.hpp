#pragma once

// Simple-majority voting over allocation rules: closed-form winners for the
// three one-parameter compromise families, a grid oracle, and a seeded search
// for majority cycles in the two-parameter linear family.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "redist/core.hpp"

namespace redist {

/// Agents strictly below, strictly above, and exactly at a mean.
struct PartitionCounts {
  std::size_t below = 0;
  std::size_t above = 0;
  std::size_t at = 0;

  std::size_t total() const noexcept { return below + above + at; }
  friend bool operator==(const PartitionCounts&, const PartitionCounts&) = default;
};

/// Threshold Y/n on incomes.
PartitionCounts partition_by_income(const Problem& p);
/// Threshold (Y - Z)/n on net incomes y_i - z_i.
PartitionCounts partition_by_net_income(const Problem& p);
/// Threshold Z/n on needs.
PartitionCounts partition_by_need(const Problem& p);
/// The partition that decides the given family's vote.
PartitionCounts partition_for_family(const Problem& p, Family family);

struct MajorityOutcome {
  enum class Kind { UniqueCorner, AllTie };

  Kind kind = Kind::AllTie;
  Family family = Family::LfFr;
  /// Set iff kind == UniqueCorner; delta is 0 or 1.
  std::optional<DeltaRule> winner;
  PartitionCounts partition;

  /// The focal rule at the winning corner.
  std::optional<FocalRule> winning_rule() const;
};

/// Closed-form majority winner within a compromise family:
///   LF_FR, income partition:     below-majority -> F, above-majority -> L
///   LF_NA, net-income partition: below-majority -> A, above-majority -> L
///   FR_NA, need partition:       below-majority -> F, above-majority -> A
/// otherwise every member of the family is a majority winner.
MajorityOutcome majority_winner(const Problem& p, Family family);

struct PreferenceCounts {
  std::size_t first_better = 0;
  std::size_t second_better = 0;
  std::size_t indifferent = 0;

  friend bool operator==(const PreferenceCounts&, const PreferenceCounts&) = default;
};

/// Per-agent comparison of two allocations; differences within tau_num count
/// as indifference.
PreferenceCounts compare_allocations(const Allocation& a, const Allocation& b,
                                     double tolerance = kDefaultTolerance);
PreferenceCounts majority_prefers(const Problem& p, const RuleSpec& a, const RuleSpec& b,
                                  double tolerance = kDefaultTolerance);

/// True when a strict majority of agents strictly prefers `challenger`.
bool beats(const Allocation& challenger, const Allocation& incumbent,
           double tolerance = kDefaultTolerance);

inline constexpr std::size_t kDefaultGridSize = 101;

/// Even grid delta_k = k / (grid_size - 1).
std::vector<double> delta_grid(std::size_t grid_size);

/// Grid points of the family not beaten by any other grid point. Throws
/// ValidationError for grid_size < 2.
std::vector<double> brute_force_winners(const Problem& p, Family family,
                                        std::size_t grid_size = kDefaultGridSize,
                                        double tolerance = kDefaultTolerance);

/// UniqueCorner agrees iff the oracle set is exactly that corner; AllTie
/// agrees iff no grid point is beaten.
bool oracle_agrees(const MajorityOutcome& outcome, std::span<const double> oracle_winners,
                   std::size_t grid_size);

/// First candidate beating `incumbent`, if any.
std::optional<LambdaParams> find_majority_improvement(const Problem& p,
                                                      const LambdaParams& incumbent,
                                                      std::span<const LambdaParams> candidates,
                                                      double tolerance = kDefaultTolerance);

/// rules[1] beats rules[0], rules[2] beats rules[1], rules[0] beats rules[2].
struct MajorityCycle {
  Problem problem;
  std::array<LambdaParams, 3> rules;
};

struct CycleSearchOptions {
  std::uint64_t seed = 1;
  std::size_t draws = 10000;
  std::size_t triples_per_draw = 20;
  std::size_t agents = 3;
  /// Coefficients are drawn from [-lambda_bound, lambda_bound]^2.
  double lambda_bound = 2.0;
  double tolerance = kDefaultTolerance;
};

/// Seeded search over random problems with distinct agents and random triples
/// of lambda-rules. Reports the first cycle found; makes no completeness claim.
std::optional<MajorityCycle> find_majority_cycle(const CycleSearchOptions& opts = {});

}  // namespace redist
