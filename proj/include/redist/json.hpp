#pragma once

// JSON encodings for the library's external interfaces. Problems read as
// {"incomes": [...], "needs": [...]}; allocations and tax vectors write as
// plain arrays of doubles; verdicts as
// {"axiom": name, "passed": bool, "premise_met": bool, "witness": {...} | null}.

#include <json.hpp>

#include "redist/axioms.hpp"
#include "redist/core.hpp"
#include "redist/dataio.hpp"
#include "redist/lorenz.hpp"
#include "redist/voting.hpp"

namespace redist {

/// Throws ValidationError naming the offending field.
Problem problem_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const Problem& p);
void to_json(nlohmann::json& j, const Allocation& a);
void to_json(nlohmann::json& j, const TaxVector& t);
void to_json(nlohmann::json& j, const LambdaParams& l);
void to_json(nlohmann::json& j, const DeltaRule& d);
void to_json(nlohmann::json& j, const Witness& w);
void to_json(nlohmann::json& j, const AxiomVerdict& v);
void to_json(nlohmann::json& j, const PartitionCounts& c);
void to_json(nlohmann::json& j, const MajorityOutcome& o);
void to_json(nlohmann::json& j, const PreferenceCounts& c);
void to_json(nlohmann::json& j, const DominanceVerdict& v);
void to_json(nlohmann::json& j, const LorenzProfile& p);
void to_json(nlohmann::json& j, const FamilyRanking& r);
void to_json(nlohmann::json& j, const WeightedValue& v);
void to_json(nlohmann::json& j, const SummaryStats& s);
void to_json(nlohmann::json& j, const Histogram& h);
void to_json(nlohmann::json& j, const LambdaFit& f);

}  // namespace redist
