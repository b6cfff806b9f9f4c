#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "redist/core.hpp"

namespace redist {

/// Ascending copy of a vector and its partial sums S^k = x_(1) + ... + x_(k).
struct LorenzProfile {
  std::vector<double> sorted;
  std::vector<double> partial_sums;

  std::size_t size() const noexcept { return sorted.size(); }
  double total() const { return partial_sums.back(); }
};

/// Throws ValidationError on an empty vector.
LorenzProfile partial_sums(std::span<const double> x);

enum class Dominance { Dominates, DominatedBy, Equal, Incomparable };

std::string_view to_string(Dominance d) noexcept;

struct DominanceVerdict {
  Dominance kind = Dominance::Equal;
  /// 1-based order k of the first partial sum where the first vector falls
  /// short of the second (Incomparable, DominatedBy).
  std::optional<std::size_t> failing_index;

  /// Weak dominance: Dominates or Equal.
  bool weakly_dominates() const noexcept {
    return kind == Dominance::Dominates || kind == Dominance::Equal;
  }
};

/// Lorenz comparison of x against other. Partial sums closer than tau_num are
/// treated as equal. Throws ValidationError when lengths differ or totals
/// differ by more than tau_budget.
DominanceVerdict lorenz_compare(std::span<const double> x, std::span<const double> other,
                                double tolerance = kDefaultTolerance);

struct PairVerdict {
  double delta_low = 0.0;
  double delta_high = 0.0;
  /// Allocation at delta_low compared against allocation at delta_high.
  DominanceVerdict verdict;
};

struct FamilyRanking {
  Family family = Family::LfFr;
  std::vector<PairVerdict> pairs;
  /// Set for LF_FR (smaller delta weakly dominates) and FR_NA (larger delta
  /// weakly dominates); unset for LF_NA, which carries no guarantee.
  std::optional<bool> consistent;
};

/// Compares the family's allocations at each adjacent pair of `deltas`.
/// Throws ValidationError unless deltas are ascending within [0, 1].
FamilyRanking rank_family(const Problem& p, Family family, std::span<const double> deltas,
                          double tolerance = kDefaultTolerance);

/// Lorenz curve points (k/n, S^k/S^n) including the origin. Throws
/// ValidationError when the total is zero.
std::vector<std::pair<double, double>> lorenz_curve(const LorenzProfile& profile);

}  // namespace redist
