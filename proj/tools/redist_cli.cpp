// redist: command-line front end for the redistribution library.
//
// Exit codes: 0 success, 1 an axiom or dominance expectation failed,
// 2 invalid input, 3 internal invariant breach.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "redist/axioms.hpp"
#include "redist/core.hpp"
#include "redist/dataio.hpp"
#include "redist/json.hpp"
#include "redist/lorenz.hpp"
#include "redist/random.hpp"
#include "redist/voting.hpp"

namespace {

using nlohmann::json;
using namespace redist;

constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitBreach = 3;

struct Globals {
  std::uint64_t seed = 1;
  double tolerance = kDefaultTolerance;
  std::string output = "json";
  bool quiet = false;

  bool csv() const { return output == "csv"; }
};

struct RuleFlags {
  std::string rule;
  std::string lambda;
  std::string delta;
};

std::string fmt(double x) {
  if (x == 0.0) x = 0.0;
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, const std::string& field) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ValidationError(field, "not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  const auto parts = split(text, ',');
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out.push_back(parse_number(parts[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

RuleSpec parse_rule_flags(const RuleFlags& f) {
  const int given = !f.rule.empty() + !f.lambda.empty() + !f.delta.empty();
  if (given != 1) throw ValidationError("rule", "give exactly one of --rule, --lambda, --delta");
  if (!f.rule.empty()) return parse_focal_rule(f.rule);
  if (!f.lambda.empty()) {
    const auto v = parse_list(f.lambda, "lambda");
    if (v.size() != 2) throw ValidationError("lambda", "expected two values l1,l2");
    return LambdaParams{v[0], v[1]};
  }
  const auto parts = split(f.delta, ',');
  if (parts.size() != 2) throw ValidationError("delta", "expected FAMILY,delta");
  DeltaRule d{parse_family(parts[0]), parse_number(parts[1], "delta")};
  d.validate();
  return d;
}

// Token grammar for lists of rules: L | F | A | FAMILY:delta | lambda:l1:l2.
RuleSpec parse_rule_token(const std::string& token) {
  const auto parts = split(token, ':');
  if (parts.size() == 1) return parse_focal_rule(parts[0]);
  if (parts.size() == 3 && (parts[0] == "lambda" || parts[0] == "LAMBDA")) {
    return LambdaParams{parse_number(parts[1], "lambda"), parse_number(parts[2], "lambda")};
  }
  if (parts.size() == 2) {
    DeltaRule d{parse_family(parts[0]), parse_number(parts[1], "delta")};
    d.validate();
    return d;
  }
  throw ValidationError("rules", "cannot parse rule '" + token + "'");
}

void add_rule_flags(CLI::App* cmd, RuleFlags& f) {
  auto* r = cmd->add_option("--rule", f.rule, "Focal rule: L, F or A");
  auto* l = cmd->add_option("--lambda", f.lambda, "Linear rule coefficients l1,l2");
  auto* d = cmd->add_option("--delta", f.delta, "Compromise rule FAMILY,delta");
  r->excludes(l)->excludes(d);
  l->excludes(d);
}

Problem read_problem(const std::string& path) {
  json j;
  try {
    if (path == "-") {
      j = json::parse(std::cin);
    } else {
      std::ifstream in(path);
      if (!in) throw ValidationError("problem", "cannot open '" + path + "'");
      j = json::parse(in);
    }
  } catch (const json::parse_error& e) {
    throw ValidationError("problem", e.what());
  }
  return problem_from_json(j);
}

void emit(const Globals& g, const json& j) {
  if (!g.quiet) std::cout << j.dump() << '\n';
}

void emit_text(const Globals& g, const std::string& text) {
  if (!g.quiet) std::cout << text;
}

// allocate -----------------------------------------------------------------

struct AllocateArgs {
  std::string problem;
  RuleFlags rule;
};

int cmd_allocate(const Globals& g, const AllocateArgs& a) {
  const Problem p = read_problem(a.problem);
  const Allocation alloc = allocate(p, parse_rule_flags(a.rule));
  if (g.csv()) {
    std::ostringstream out;
    out << "agent,income,need,amount\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
      out << i << ',' << fmt(p.income(i)) << ',' << fmt(p.need(i)) << ',' << fmt(alloc[i]) << '\n';
    }
    emit_text(g, out.str());
  } else {
    emit(g, alloc);
  }
  return 0;
}

// tax ----------------------------------------------------------------------

int cmd_tax(const Globals& g, const AllocateArgs& a) {
  const Problem p = read_problem(a.problem);
  const RuleSpec spec = parse_rule_flags(a.rule);
  const LambdaParams lambda = to_lambda(spec);
  const TaxVector taxes = tax_of_rule(p, make_rule(spec), g.tolerance);
  const TaxDecomposition d = decompose_tax(p, lambda);
  if (g.csv()) {
    std::ostringstream out;
    out << "agent,tax,income_tax,need_subsidy\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
      out << i << ',' << fmt(taxes[i]) << ',' << fmt(d.income_taxes[i]) << ','
          << fmt(d.need_subsidies[i]) << '\n';
    }
    emit_text(g, out.str());
  } else {
    emit(g, json{{"taxes", taxes},
                 {"marginal_rate", d.marginal_rate},
                 {"need_subsidy_rate", d.need_subsidy_rate},
                 {"deduction", d.deduction},
                 {"mean_need", d.mean_need},
                 {"income_taxes", d.income_taxes},
                 {"need_subsidies", d.need_subsidies}});
  }
  return 0;
}

// check --------------------------------------------------------------------

struct CheckArgs {
  std::string problem;
  std::string second;
  RuleFlags rule;
  std::vector<std::string> axioms;
  std::size_t agent = 0;
  double dz = 1.0;
  std::size_t samples = 64;
  double epsilon = 1e-3;
  std::optional<double> lipschitz;
  std::size_t search = 0;
  std::string reference = "raised";
};

Problem seeded_partner(const Problem& p, std::uint64_t seed) {
  Rng rng(seed);
  double scale = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    scale = std::max({scale, std::abs(p.income(i)), p.need(i)});
  }
  std::vector<double> y(p.size()), z(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    y[i] = rng.uniform(-scale, scale);
    z[i] = rng.uniform(0.0, scale);
  }
  return Problem(std::move(y), std::move(z));
}

int cmd_check(const Globals& g, const CheckArgs& a) {
  const Problem p = read_problem(a.problem);
  const RuleSpec spec = parse_rule_flags(a.rule);
  const RuleFn rule = make_rule(spec);

  std::vector<Axiom> axioms;
  if (a.axioms.empty()) {
    const auto all = all_axioms();
    axioms.assign(all.begin(), all.end());
  } else {
    for (const auto& name : a.axioms) axioms.push_back(parse_axiom(name));
  }

  CheckOptions opts;
  opts.tolerance = g.tolerance;
  if (a.reference == "raised") {
    opts.net_income_reference = NetIncomeReference::RaisedNeeds;
  } else if (a.reference == "original") {
    opts.net_income_reference = NetIncomeReference::OriginalNeeds;
  } else {
    throw ValidationError("net-income-reference", "expected 'raised' or 'original'");
  }

  ContinuitySettings cont;
  cont.num_samples = a.samples;
  cont.epsilon = a.epsilon;
  cont.seed = g.seed;
  cont.lipschitz = a.lipschitz ? *a.lipschitz : continuity_constant(to_lambda(spec), p.size());

  const Problem partner = a.second.empty() ? seeded_partner(p, g.seed) : read_problem(a.second);

  json rows = json::array();
  std::ostringstream csv;
  csv << "axiom,passed,premise_met,source,description\n";
  bool all_passed = true;
  for (Axiom ax : axioms) {
    AxiomVerdict v;
    switch (ax) {
      case Axiom::EqualTreatment: v = check_equal_treatment(rule, p, opts); break;
      case Axiom::Continuity: v = check_continuity_sampled(rule, p, cont, opts); break;
      case Axiom::Additivity: v = check_additivity(rule, p, partner, opts); break;
      case Axiom::ZeroLowerBound: v = check_zero_lb(rule, p, opts); break;
      case Axiom::NeedsLowerBound: v = check_needs_lb(rule, p, opts); break;
      case Axiom::NetAverageLowerBound: v = check_net_average_lb(rule, p, opts); break;
      case Axiom::OrderPreservation:
        v = check_order_preservation_uniform_needs(rule, p, opts);
        break;
      case Axiom::NeedMonotonicity:
        v = check_need_monotonicity(rule, p, a.agent, a.dz, opts);
        break;
      case Axiom::StrongNeedMonotonicity:
        v = check_strong_need_monotonicity(rule, p, a.agent, a.dz, opts);
        break;
    }
    std::string source = "problem";
    if (v.passed && a.search > 0) {
      SearchOptions so;
      so.seed = g.seed;
      so.iterations = a.search;
      so.continuity = cont;
      if (!a.lipschitz) so.continuity->lipschitz = continuity_constant(to_lambda(spec), so.max_agents);
      so.check = opts;
      if (auto found = search_violation(ax, rule, so)) {
        v = *found;
        source = "search";
      }
    }
    all_passed = all_passed && v.passed;
    json row = v;
    row["source"] = source;
    rows.push_back(std::move(row));
    csv << to_string(ax) << ',' << (v.passed ? "true" : "false") << ','
        << (v.premise_met ? "true" : "false") << ',' << source << ",\""
        << (v.witness ? v.witness->description : std::string()) << "\"\n";
  }
  if (g.csv()) {
    emit_text(g, csv.str());
  } else {
    emit(g, json{{"rule", to_string(spec)}, {"passed", all_passed}, {"verdicts", rows}});
  }
  return all_passed ? 0 : kExitFailed;
}

// vote ---------------------------------------------------------------------

struct VoteArgs {
  std::string problem;
  std::string family;
  std::size_t oracle = 0;
};

int cmd_vote(const Globals& g, const VoteArgs& a) {
  const Problem p = read_problem(a.problem);
  const Family family = parse_family(a.family);
  const MajorityOutcome outcome = majority_winner(p, family);
  json report{{"family", to_string(family)}, {"outcome", outcome}};
  std::optional<bool> agrees;
  if (a.oracle > 0) {
    const auto winners = brute_force_winners(p, family, a.oracle, g.tolerance);
    agrees = oracle_agrees(outcome, winners, a.oracle);
    report["oracle"] = json{{"grid_size", a.oracle},
                            {"winner_count", winners.size()},
                            {"winners", winners},
                            {"agrees", *agrees}};
  }
  if (g.csv()) {
    std::ostringstream out;
    out << "family,kind,below,above,at,winner_delta,winning_rule,oracle_agrees\n";
    out << to_string(family) << ','
        << (outcome.kind == MajorityOutcome::Kind::UniqueCorner ? "unique_corner" : "all_tie")
        << ',' << outcome.partition.below << ',' << outcome.partition.above << ','
        << outcome.partition.at << ',' << (outcome.winner ? fmt(outcome.winner->delta) : "")
        << ',' << (outcome.winning_rule() ? to_string(*outcome.winning_rule()) : "") << ','
        << (agrees ? (*agrees ? "true" : "false") : "") << '\n';
    emit_text(g, out.str());
  } else {
    emit(g, report);
  }
  if (agrees && !*agrees) {
    std::cerr << "redist: closed-form winner disagrees with the grid oracle\n";
    return kExitBreach;
  }
  return 0;
}

// cycle --------------------------------------------------------------------

struct CycleArgs {
  std::size_t draws = 10000;
  std::size_t agents = 3;
  double bound = 2.0;
};

int cmd_cycle(const Globals& g, const CycleArgs& a) {
  CycleSearchOptions opts;
  opts.seed = g.seed;
  opts.draws = a.draws;
  opts.agents = a.agents;
  opts.lambda_bound = a.bound;
  opts.tolerance = g.tolerance;
  const auto cycle = find_majority_cycle(opts);
  if (!cycle) {
    emit(g, json{{"found", false}});
    return kExitFailed;
  }
  json rules = json::array();
  for (const auto& r : cycle->rules) {
    rules.push_back(json{{"lambda", r}, {"allocation", allocate_lambda(cycle->problem, r)}});
  }
  emit(g, json{{"found", true}, {"problem", cycle->problem}, {"rules", rules}});
  return 0;
}

// lorenz -------------------------------------------------------------------

struct LorenzArgs {
  std::string problem;
  std::string family;
  std::string deltas = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  bool curve = false;
};

int cmd_lorenz(const Globals& g, const LorenzArgs& a) {
  const Problem p = read_problem(a.problem);
  const Family family = parse_family(a.family);
  const std::vector<double> deltas = parse_list(a.deltas, "deltas");
  const FamilyRanking ranking = rank_family(p, family, deltas, g.tolerance);

  if (a.curve) {
    std::ostringstream out;
    out << "delta,k_over_n,share\n";
    for (double d : deltas) {
      const Allocation alloc = allocate_delta(p, {family, d});
      for (const auto& [x, s] : lorenz_curve(partial_sums(alloc.amounts))) {
        out << fmt(d) << ',' << fmt(x) << ',' << fmt(s) << '\n';
      }
    }
    emit_text(g, out.str());
  } else if (g.csv()) {
    std::ostringstream out;
    out << "delta_low,delta_high,verdict,failing_index\n";
    for (const auto& pv : ranking.pairs) {
      out << fmt(pv.delta_low) << ',' << fmt(pv.delta_high) << ',' << to_string(pv.verdict.kind)
          << ',' << (pv.verdict.failing_index ? std::to_string(*pv.verdict.failing_index) : "")
          << '\n';
    }
    emit_text(g, out.str());
  } else {
    json profiles = json::array();
    for (double d : deltas) {
      const Allocation alloc = allocate_delta(p, {family, d});
      profiles.push_back(json{{"delta", d},
                              {"allocation", alloc},
                              {"partial_sums", partial_sums(alloc.amounts).partial_sums}});
    }
    json report = ranking;
    report["profiles"] = std::move(profiles);
    emit(g, report);
  }
  return ranking.consistent.value_or(true) ? 0 : kExitFailed;
}

// analyze ------------------------------------------------------------------

struct AnalyzeArgs {
  std::string data;
  std::string need_categories;
  std::string need_config;
  std::string rules = "L,F,A";
  bool by_country = false;
  double bin_width = 1000.0;
  double origin = 0.0;
  double threshold = 40000.0;
  std::string histogram_dir;
};

NeedConfig load_need_config(const AnalyzeArgs& a) {
  if (!a.need_categories.empty() && !a.need_config.empty()) {
    throw ValidationError("need-config", "give at most one of --need-categories, --need-config");
  }
  NeedConfig cfg;
  if (!a.need_categories.empty()) {
    for (const auto& c : split(a.need_categories, ',')) cfg.need_categories.insert(c);
  } else if (!a.need_config.empty()) {
    std::ifstream in(a.need_config);
    if (!in) throw ValidationError("need-config", "cannot open '" + a.need_config + "'");
    try {
      const json j = json::parse(in);
      for (const auto& c : j.at("need_categories")) cfg.need_categories.insert(c.get<std::string>());
    } catch (const json::exception& e) {
      throw ValidationError("need-config", e.what());
    }
  } else {
    cfg = NeedConfig::defaults();
  }
  cfg.validate();
  return cfg;
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h) {
  std::ofstream out(path);
  if (!out) throw ValidationError("histogram-dir", "cannot write '" + path.string() + "'");
  out << "bin_left,bin_right,weighted_count\n";
  for (const auto& [k, count] : h.bins) {
    out << fmt(h.bin_left(k)) << ',' << fmt(h.bin_right(k)) << ',' << fmt(count) << '\n';
  }
}

std::string file_safe(std::string s) {
  for (char& c : s) {
    if (c == '(' || c == ')' || c == ',' || c == ' ') c = '_';
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

int cmd_analyze(const Globals& g, const AnalyzeArgs& a) {
  const Dataset ds = load_csv(a.data);
  const NeedConfig cfg = load_need_config(a);
  std::vector<RuleSpec> rules;
  for (const auto& token : split(a.rules, ',')) rules.push_back(parse_rule_token(token));
  if (!(a.bin_width > 0.0)) throw ValidationError("bin-width", "must be positive");

  std::vector<std::optional<std::string>> scopes{std::nullopt};
  if (a.by_country) {
    for (const auto& c : ds.countries()) scopes.emplace_back(c);
  }
  if (!a.histogram_dir.empty()) std::filesystem::create_directories(a.histogram_dir);

  json out_scopes = json::array();
  std::ostringstream csv;
  csv << "scope,statistic,weighted,unweighted\n";
  for (const auto& scope : scopes) {
    const std::string name = scope.value_or("all");
    StatsOptions so;
    so.income_threshold = a.threshold;
    so.need_threshold = a.threshold;
    so.country = scope;
    const SummaryStats s = summary_stats(ds, cfg, so);
    const Problem p = build_problem(ds, cfg, scope);
    const double shift = p.mean_net_income();

    json hist{{"need", need_histogram(ds, cfg, a.bin_width, a.origin, scope)}};
    for (const auto& r : rules) {
      hist[to_string(r)] = allocation_histogram(ds, cfg, r, a.bin_width, a.origin, scope);
    }
    if (!a.histogram_dir.empty()) {
      const std::filesystem::path dir(a.histogram_dir);
      write_histogram_csv(dir / (name + "_need.csv"),
                          need_histogram(ds, cfg, a.bin_width, a.origin, scope));
      for (const auto& r : rules) {
        write_histogram_csv(dir / (name + "_" + file_safe(to_string(r)) + ".csv"),
                            allocation_histogram(ds, cfg, r, a.bin_width, a.origin, scope));
      }
    }
    out_scopes.push_back(json{{"scope", name},
                              {"stats", s},
                              {"need_adjusted_shift", shift},
                              {"histograms", std::move(hist)}});

    auto row = [&](const char* stat, const WeightedValue& v) {
      csv << name << ',' << stat << ',' << fmt(v.weighted) << ',' << fmt(v.unweighted) << '\n';
    };
    row("mean_income", s.mean_income);
    row("mean_need", s.mean_need);
    row("mean_net_income", s.mean_net_income);
    row("share_income_below_threshold", s.share_income_below_threshold);
    row("share_need_below_threshold", s.share_need_below_threshold);
    row("share_need_exceeds_income", s.share_need_exceeds_income);
  }

  std::size_t missing = 0;
  for (const auto& [_, count] : ds.missing_cells) missing += count;
  if (missing > 0 && !g.quiet) {
    std::cerr << "redist: " << missing << " empty expenditure cells read as zero\n";
  }
  if (g.csv()) {
    emit_text(g, csv.str());
  } else {
    emit(g, json{{"threshold", a.threshold},
                 {"need_categories", cfg.need_categories},
                 {"missing_cells", ds.missing_cells},
                 {"scopes", std::move(out_scopes)}});
  }
  return 0;
}

// fit ----------------------------------------------------------------------

struct FitArgs {
  std::string problem;
  std::string observed;
};

int cmd_fit(const Globals& g, const FitArgs& a) {
  const Problem p = read_problem(a.problem);
  std::vector<double> observed;
  try {
    std::ifstream in(a.observed);
    if (!in) throw ValidationError("observed", "cannot open '" + a.observed + "'");
    observed = json::parse(in).get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError("observed", e.what());
  }
  const LambdaFit fit = fit_lambda(observed, p, g.tolerance);
  if (g.csv()) {
    emit_text(g, "lambda1,lambda2,residual,imbalance,rank\n" + fmt(fit.lambda.lambda1) + ',' +
                     fmt(fit.lambda.lambda2) + ',' + fmt(fit.residual) + ',' +
                     fmt(fit.imbalance) + ',' + std::to_string(fit.rank) + '\n');
  } else {
    emit(g, fit);
  }
  return 0;
}

// synth --------------------------------------------------------------------

struct SynthArgs {
  SyntheticTargets targets;
  std::string countries;
  bool random_weights = false;
  std::string out;
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
  SyntheticConfig cfg;
  cfg.targets = a.targets;
  cfg.seed = g.seed;
  cfg.random_weights = a.random_weights;
  if (!a.countries.empty()) cfg.countries = split(a.countries, ',');
  const Dataset ds = generate_synthetic(cfg);
  if (a.out.empty() || a.out == "-") {
    if (!g.quiet) write_csv(std::cout, ds);
  } else {
    std::ofstream out(a.out);
    if (!out) throw ValidationError("out", "cannot write '" + a.out + "'");
    write_csv(out, ds);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Allocation rules for redistribution problems with needs"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for sampled checks and generators");
  app.add_option("--tolerance", g.tolerance, "Relative tolerance for all comparisons")
      ->check(CLI::PositiveNumber);
  app.add_option("--output", g.output, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet", g.quiet, "Suppress the report; exit code only");

  AllocateArgs alloc_args;
  auto* alloc = app.add_subcommand("allocate", "Apply a rule to a problem");
  alloc->add_option("-p,--problem", alloc_args.problem, "Problem JSON ('-' for stdin)")->required();
  add_rule_flags(alloc, alloc_args.rule);

  AllocateArgs tax_args;
  auto* tax = app.add_subcommand("tax", "Tax vector of a linear rule and its decomposition");
  tax->add_option("-p,--problem", tax_args.problem, "Problem JSON ('-' for stdin)")->required();
  add_rule_flags(tax, tax_args.rule);

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "Check axioms for a rule on a problem");
  check->add_option("-p,--problem", check_args.problem, "Problem JSON")->required();
  check->add_option("-q,--second", check_args.second,
                    "Second problem for additivity (default: seeded random partner)");
  add_rule_flags(check, check_args.rule);
  check->add_option("--axioms", check_args.axioms, "Axiom names (default: all)")->delimiter(',');
  check->add_option("--agent", check_args.agent, "Agent whose need is raised");
  check->add_option("--dz", check_args.dz, "Need increase")->check(CLI::PositiveNumber);
  check->add_option("--samples", check_args.samples, "Continuity perturbation samples");
  check->add_option("--epsilon", check_args.epsilon, "Continuity perturbation size");
  check->add_option("--lipschitz", check_args.lipschitz,
                    "Continuity constant (default: exact bound for the rule)");
  check->add_option("--search", check_args.search,
                    "Also search this many random problems for a violation");
  check->add_option("--net-income-reference", check_args.reference,
                    "Net incomes for strong need monotonicity: raised or original");

  VoteArgs vote_args;
  auto* vote = app.add_subcommand("vote", "Majority winner within a compromise family");
  vote->add_option("-p,--problem", vote_args.problem, "Problem JSON")->required();
  vote->add_option("--family", vote_args.family, "LF_FR, LF_NA or FR_NA")->required();
  vote->add_option("--oracle", vote_args.oracle, "Cross-check on a grid of N deltas");

  CycleArgs cycle_args;
  auto* cycle = app.add_subcommand("cycle", "Search for a majority cycle among linear rules");
  cycle->add_option("--draws", cycle_args.draws, "Random problems to try");
  cycle->add_option("--agents", cycle_args.agents, "Agents per problem");
  cycle->add_option("--bound", cycle_args.bound, "Coefficients drawn from [-bound, bound]");

  LorenzArgs lorenz_args;
  auto* lorenz = app.add_subcommand("lorenz", "Lorenz ranking along a compromise family");
  lorenz->add_option("-p,--problem", lorenz_args.problem, "Problem JSON")->required();
  lorenz->add_option("--family", lorenz_args.family, "LF_FR, LF_NA or FR_NA")->required();
  lorenz->add_option("--deltas", lorenz_args.deltas, "Ascending deltas in [0, 1]");
  lorenz->add_flag("--curve", lorenz_args.curve, "Emit Lorenz curve points as CSV");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Statistics and histograms for a household survey");
  analyze->add_option("--data", analyze_args.data, "Household CSV")->required();
  analyze->add_option("--need-categories", analyze_args.need_categories,
                      "Comma-separated need categories");
  analyze->add_option("--need-config", analyze_args.need_config,
                      "JSON file with a need_categories array");
  analyze->add_option("--rules", analyze_args.rules,
                      "Rules to bin: L, F, A, FAMILY:delta, lambda:l1:l2");
  analyze->add_flag("--by-country", analyze_args.by_country, "Also report each country");
  analyze->add_option("--bin-width", analyze_args.bin_width, "Histogram bin width");
  analyze->add_option("--origin", analyze_args.origin, "Histogram bin origin");
  analyze->add_option("--threshold", analyze_args.threshold, "Income and need threshold");
  analyze->add_option("--histogram-dir", analyze_args.histogram_dir,
                      "Write one histogram CSV per scope and rule here");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Least-squares lambda for observed allocations");
  fit->add_option("-p,--problem", fit_args.problem, "Problem JSON")->required();
  fit->add_option("--observed", fit_args.observed, "JSON array of observed amounts")->required();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write a synthetic household survey CSV");
  auto& t = synth_args.targets;
  synth->add_option("--households", t.households, "Number of households");
  synth->add_option("--mean-income", t.mean_income, "Planted mean income");
  synth->add_option("--mean-need", t.mean_need, "Planted mean need");
  synth->add_option("--threshold", t.threshold, "Threshold for the planted shares");
  synth->add_option("--share-income-below", t.share_income_below, "Share with income below");
  synth->add_option("--share-need-below", t.share_need_below, "Share with need below");
  synth->add_option("--share-deficit", t.share_need_exceeds_income, "Share with need > income");
  synth->add_option("--countries", synth_args.countries, "Comma-separated country tags");
  synth->add_flag("--random-weights", synth_args.random_weights, "Draw weights from {1, 2, 3}");
  synth->add_option("-o,--out", synth_args.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*alloc) return cmd_allocate(g, alloc_args);
    if (*tax) return cmd_tax(g, tax_args);
    if (*check) return cmd_check(g, check_args);
    if (*vote) return cmd_vote(g, vote_args);
    if (*cycle) return cmd_cycle(g, cycle_args);
    if (*lorenz) return cmd_lorenz(g, lorenz_args);
    if (*analyze) return cmd_analyze(g, analyze_args);
    if (*fit) return cmd_fit(g, fit_args);
    if (*synth) return cmd_synth(g, synth_args);
  } catch (const ValidationError& e) {
    std::cerr << "redist: invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const DataError& e) {
    std::cerr << "redist: invalid data: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const BudgetViolation& e) {
    std::cerr << "redist: invariant breach: " << e.what() << '\n';
    return kExitBreach;
  } catch (const std::exception& e) {
    std::cerr << "redist: internal error: " << e.what() << '\n';
    return kExitBreach;
  }
  return kExitInvalid;
}
