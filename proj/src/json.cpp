#include "redist/json.hpp"

namespace redist {

using nlohmann::json;

namespace {

std::vector<double> number_array(const json& j, const char* field) {
  if (!j.contains(field)) throw ValidationError(field, "missing");
  const json& arr = j.at(field);
  if (!arr.is_array()) throw ValidationError(field, "must be an array of numbers");
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw ValidationError(std::string(field) + "[" + std::to_string(i) + "]",
                            "must be a number");
    }
    out.push_back(arr[i].get<double>());
  }
  return out;
}

}  // namespace

Problem problem_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("problem", "must be a JSON object");
  return Problem(number_array(j, "incomes"), number_array(j, "needs"));
}

void to_json(json& j, const Problem& p) {
  j = json{{"incomes", std::vector<double>(p.incomes().begin(), p.incomes().end())},
           {"needs", std::vector<double>(p.needs().begin(), p.needs().end())}};
}

void to_json(json& j, const Allocation& a) { j = a.amounts; }

void to_json(json& j, const TaxVector& t) { j = t.taxes; }

void to_json(json& j, const LambdaParams& l) {
  j = json{{"lambda1", l.lambda1}, {"lambda2", l.lambda2}};
}

void to_json(json& j, const DeltaRule& d) {
  j = json{{"family", to_string(d.family)}, {"delta", d.delta}};
}

void to_json(json& j, const Witness& w) {
  j = json{{"problems", w.problems},
           {"agents", w.agents},
           {"observed", w.observed},
           {"description", w.description}};
}

void to_json(json& j, const AxiomVerdict& v) {
  j = json{{"axiom", to_string(v.axiom)},
           {"passed", v.passed},
           {"premise_met", v.premise_met},
           {"tolerance", v.tolerance_used}};
  if (v.witness) {
    j["witness"] = *v.witness;
  } else {
    j["witness"] = nullptr;
  }
}

void to_json(json& j, const PartitionCounts& c) {
  j = json{{"below", c.below}, {"above", c.above}, {"at", c.at}};
}

void to_json(json& j, const MajorityOutcome& o) {
  j = json{{"family", to_string(o.family)}, {"partition", o.partition}};
  if (o.kind == MajorityOutcome::Kind::UniqueCorner) {
    j["kind"] = "unique_corner";
    j["winner"] = *o.winner;
    j["winning_rule"] = to_string(*o.winning_rule());
  } else {
    j["kind"] = "all_tie";
    j["winner"] = json{{"family", to_string(o.family)}, {"interval", {0.0, 1.0}}};
  }
}

void to_json(json& j, const PreferenceCounts& c) {
  j = json{{"first_better", c.first_better},
           {"second_better", c.second_better},
           {"indifferent", c.indifferent}};
}

void to_json(json& j, const DominanceVerdict& v) {
  j = json{{"verdict", to_string(v.kind)}};
  j["failing_index"] = v.failing_index ? json(*v.failing_index) : json(nullptr);
}

void to_json(json& j, const LorenzProfile& p) {
  j = json{{"sorted", p.sorted}, {"partial_sums", p.partial_sums}};
}

void to_json(json& j, const FamilyRanking& r) {
  json pairs = json::array();
  for (const auto& pv : r.pairs) {
    json e = pv.verdict;
    e["delta_low"] = pv.delta_low;
    e["delta_high"] = pv.delta_high;
    pairs.push_back(std::move(e));
  }
  j = json{{"family", to_string(r.family)}, {"pairs", std::move(pairs)}};
  j["consistent"] = r.consistent ? json(*r.consistent) : json(nullptr);
}

void to_json(json& j, const WeightedValue& v) {
  j = json{{"weighted", v.weighted}, {"unweighted", v.unweighted}};
}

void to_json(json& j, const SummaryStats& s) {
  j = json{{"households", s.households},
           {"total_weight", s.total_weight},
           {"mean_income", s.mean_income},
           {"mean_need", s.mean_need},
           {"mean_net_income", s.mean_net_income},
           {"share_income_below_threshold", s.share_income_below_threshold},
           {"share_need_below_threshold", s.share_need_below_threshold},
           {"share_need_exceeds_income", s.share_need_exceeds_income}};
}

void to_json(json& j, const Histogram& h) {
  json bins = json::array();
  for (const auto& [k, count] : h.bins) {
    bins.push_back(json{{"bin_left", h.bin_left(k)},
                        {"bin_right", h.bin_right(k)},
                        {"weighted_count", count}});
  }
  j = json{{"bin_width", h.bin_width}, {"origin", h.origin}, {"bins", std::move(bins)}};
}

void to_json(json& j, const LambdaFit& f) {
  j = json{{"lambda", f.lambda},
           {"residual", f.residual},
           {"imbalance", f.imbalance},
           {"rank", f.rank},
           {"rank_deficient", f.rank_deficient}};
}

}  // namespace redist
