#include "redist/lorenz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace redist {

LorenzProfile partial_sums(std::span<const double> x) {
  if (x.empty()) throw ValidationError("x", "partial sums need a nonempty vector");
  LorenzProfile profile;
  profile.sorted.assign(x.begin(), x.end());
  std::sort(profile.sorted.begin(), profile.sorted.end());
  profile.partial_sums.resize(x.size());
  double running = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    running += profile.sorted[k];
    profile.partial_sums[k] = running;
  }
  return profile;
}

std::string_view to_string(Dominance d) noexcept {
  switch (d) {
    case Dominance::Dominates: return "dominates";
    case Dominance::DominatedBy: return "dominated_by";
    case Dominance::Equal: return "equal";
    case Dominance::Incomparable: return "incomparable";
  }
  return "?";
}

DominanceVerdict lorenz_compare(std::span<const double> x, std::span<const double> other,
                                double tolerance) {
  if (x.size() != other.size()) {
    throw ValidationError("x", "Lorenz comparison needs vectors of equal length");
  }
  const LorenzProfile a = partial_sums(x);
  const LorenzProfile b = partial_sums(other);
  if (std::abs(a.total() - b.total()) > budget_tolerance(std::max(std::abs(a.total()),
                                                                  std::abs(b.total())),
                                                         tolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "totals differ (" << a.total() << " vs " << b.total() << ")";
    throw ValidationError("x", os.str());
  }

  bool above = false;
  std::optional<std::size_t> first_below;
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    const double sa = a.partial_sums[k];
    const double sb = b.partial_sums[k];
    const double tol = numeric_tolerance(sa, sb, tolerance);
    if (sa - sb > tol) {
      above = true;
    } else if (sb - sa > tol && !first_below) {
      first_below = k + 1;
    }
  }

  DominanceVerdict v;
  if (above && first_below) {
    v.kind = Dominance::Incomparable;
    v.failing_index = first_below;
  } else if (above) {
    v.kind = Dominance::Dominates;
  } else if (first_below) {
    v.kind = Dominance::DominatedBy;
    v.failing_index = first_below;
  } else {
    v.kind = Dominance::Equal;
  }
  return v;
}

FamilyRanking rank_family(const Problem& p, Family family, std::span<const double> deltas,
                          double tolerance) {
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    DeltaRule{family, deltas[k]}.validate();
    if (k > 0 && deltas[k] < deltas[k - 1]) {
      throw ValidationError("deltas", "must be sorted ascending");
    }
  }
  FamilyRanking ranking;
  ranking.family = family;
  if (family != Family::LfNa) ranking.consistent = true;

  for (std::size_t k = 0; k + 1 < deltas.size(); ++k) {
    const Allocation low = allocate_delta(p, DeltaRule{family, deltas[k]});
    const Allocation high = allocate_delta(p, DeltaRule{family, deltas[k + 1]});
    PairVerdict pv{deltas[k], deltas[k + 1], lorenz_compare(low.amounts, high.amounts, tolerance)};
    if (family == Family::LfFr && !pv.verdict.weakly_dominates()) ranking.consistent = false;
    if (family == Family::FrNa && pv.verdict.kind != Dominance::DominatedBy &&
        pv.verdict.kind != Dominance::Equal) {
      ranking.consistent = false;
    }
    ranking.pairs.push_back(pv);
  }
  return ranking;
}

std::vector<std::pair<double, double>> lorenz_curve(const LorenzProfile& profile) {
  const double total = profile.total();
  if (total == 0.0) throw ValidationError("x", "Lorenz curve is undefined for a zero total");
  const double n = static_cast<double>(profile.size());
  std::vector<std::pair<double, double>> points;
  points.reserve(profile.size() + 1);
  points.emplace_back(0.0, 0.0);
  for (std::size_t k = 0; k < profile.size(); ++k) {
    points.emplace_back(static_cast<double>(k + 1) / n, profile.partial_sums[k] / total);
  }
  return points;
}

}  // namespace redist
