#include <doctest.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "redist/dataio.hpp"
#include "support.hpp"

using namespace redist;
using redist::testing::close;
using redist::testing::Gen;

namespace {

const std::string kFixtures = REDIST_FIXTURE_DIR;

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

NeedConfig config(std::initializer_list<std::string> names) {
  NeedConfig cfg;
  cfg.need_categories.insert(names.begin(), names.end());
  return cfg;
}

const std::string kIntegerSurvey =
    "id,net_income,weight,need\n"
    "a,10,1,0\n"
    "b,20,2,2\n"
    "c,30,1,4\n"
    "d,40,3,6\n";

}  // namespace

TEST_CASE("reading the three-household fixture") {
  const Dataset ds = load_csv(kFixtures + "/three_households.csv");
  REQUIRE(ds.records.size() == 3);
  CHECK(ds.categories == std::set<std::string>{"food", "housing_utilities", "alcohol_and_tobacco"});
  CHECK(ds.missing_cells.at("housing_utilities") == 1);
  CHECK(ds.missing_cells.at("food") == 0);
  CHECK(ds.records[1].id == "b");
  CHECK(ds.records[1].net_income == 35000.5);
  CHECK(ds.records[1].weight == 2.0);
  CHECK(ds.records[2].country == "DE");
  CHECK(ds.records[2].net_income == -1200.0);
  CHECK(ds.countries() == std::vector<std::string>{"BE", "DE"});

  const NeedConfig cfg = config({"food", "housing_utilities"});
  const Problem p = build_problem(ds, cfg);
  CHECK(p.needs()[0] == 9000.0);
  CHECK(p.needs()[1] == 4000.0);
  CHECK(p.needs()[2] == 9500.0);
  CHECK(build_problem(ds, cfg, "DE").size() == 1);
  CHECK_THROWS_AS(build_problem(ds, cfg, "FR"), ValidationError);

  // Every category counted as need.
  const NeedConfig all = config({"food", "housing_utilities", "alcohol_and_tobacco"});
  CHECK(build_problem(ds, all).needs()[0] == 9500.0);
  CHECK(need_of(ds.records[0], config({"restaurants_and_hotels"})) == 0.0);
}

TEST_CASE("malformed input names the line") {
  try {
    load_csv(kFixtures + "/negative_expenditure.csv");
    FAIL("negative expenditure accepted");
  } catch (const DataError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("food") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("id,food\na,1\n"), DataError);
  CHECK_THROWS_AS(parse("id,net_income\na,abc\n"), DataError);
  CHECK_THROWS_AS(parse("id,net_income\na,1,2\n"), DataError);
  CHECK_THROWS_AS(parse("id,net_income,weight\na,1,0\n"), DataError);
  CHECK_THROWS_AS(parse("id,net_income\na,inf\n"), DataError);
  CHECK_THROWS_AS(parse(""), DataError);
  CHECK_THROWS_AS(load_csv(kFixtures + "/no_such_file.csv"), DataError);
  try {
    parse("id,net_income\na,1\nb,x\n");
  } catch (const DataError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("quoting, BOM and custom schema") {
  const Dataset ds = parse("\xEF\xBB\xBFid,net_income,food\n\"x, y\",\"12.5\",3\n");
  REQUIRE(ds.records.size() == 1);
  CHECK(ds.records[0].id == "x, y");
  CHECK(ds.records[0].net_income == 12.5);
  CHECK(ds.records[0].weight == 1.0);

  CsvSchema schema;
  schema.income_column = "disposable";
  schema.weight_column.reset();
  std::istringstream in("id,disposable,weight\na,5,7\n");
  const Dataset custom = read_csv(in, schema);
  CHECK(custom.records[0].net_income == 5.0);
  CHECK(custom.categories.count("weight") == 1);
}

TEST_CASE("1000-household fixture against the generator's reference") {
  const Dataset ds = load_csv(kFixtures + "/households_1000.csv");
  std::ifstream f(kFixtures + "/households_1000_expected.json");
  const auto expected = nlohmann::json::parse(f);
  NeedConfig cfg;
  for (const auto& c : expected["need_categories"]) cfg.need_categories.insert(c.get<std::string>());

  const Problem p = build_problem(ds, cfg);
  REQUIRE(p.size() == 1000);
  const auto& need = expected["expected_need"];
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(close(p.need(i), need[i].get<double>(), 1e-12));

  const SummaryStats s = summary_stats(ds, cfg);
  CHECK(s.households == 1000);
  CHECK(close(s.mean_income.unweighted, expected["mean_income"].get<double>(), 1e-12));
  CHECK(close(s.mean_need.unweighted, expected["mean_need"].get<double>(), 1e-12));
  CHECK(close(s.mean_income.weighted, expected["weighted_mean_income"].get<double>(), 1e-12));
  CHECK(s.share_need_exceeds_income.unweighted ==
        expected["share_need_exceeds_income"].get<double>());
  CHECK(ds.countries() == std::vector<std::string>{"BE", "DE", "ES"});
}

TEST_CASE("weighted and unweighted statistics") {
  const Dataset ds = parse("id,net_income,weight,food\na,10,3,1\nb,30,1,50\n");
  StatsOptions opts;
  opts.income_threshold = 20;
  opts.need_threshold = 20;
  const SummaryStats s = summary_stats(ds, config({"food"}), opts);
  CHECK(s.mean_income.weighted == 15.0);
  CHECK(s.mean_income.unweighted == 20.0);
  CHECK(s.total_weight == 4.0);
  CHECK(s.share_income_below_threshold.weighted == 0.75);
  CHECK(s.share_income_below_threshold.unweighted == 0.5);
  CHECK(s.share_need_exceeds_income.weighted == 0.25);
  CHECK(s.mean_net_income.unweighted == -5.5);
  opts.country = "XX";
  CHECK_THROWS_AS(summary_stats(ds, config({"food"}), opts), ValidationError);
}

TEST_CASE("histograms") {
  const std::array<double, 4> values{0.5, 1.5, 1.7, -0.2};
  const std::array<double, 4> weights{1, 2, 3, 4};
  const Histogram h = make_histogram(values, weights, 1.0);
  CHECK(h.bins == std::map<long long, double>{{-1, 4}, {0, 1}, {1, 5}});
  CHECK(h.bin_left(-1) == -1.0);
  CHECK(h.total() == 10.0);
  CHECK(h.shifted(2.5).bin_left(0) == 2.5);
  CHECK_THROWS_AS(make_histogram(values, weights, 0.0), ValidationError);
  CHECK_THROWS_AS(make_histogram(values, std::span<const double>(weights).first(2), 1.0),
                  ValidationError);

  const Dataset ds = parse(kIntegerSurvey);
  const NeedConfig cfg = config({"need"});
  const Histogram f = allocation_histogram(ds, cfg, FocalRule::FullRedistribution, 2.0, 0.5);
  CHECK(f.bins.size() == 1);
  CHECK(f.total() == 7.0);

  std::vector<double> y, w;
  for (const auto& r : ds.records) {
    y.push_back(r.net_income);
    w.push_back(r.weight);
  }
  CHECK(allocation_histogram(ds, cfg, FocalRule::LaissezFaire, 2.0, 0.5).bins ==
        make_histogram(y, w, 2.0, 0.5).bins);

  // Y = 100, Z = 12, shift (Y - Z)/n = 22, a multiple of the bin width.
  const Histogram a = allocation_histogram(ds, cfg, FocalRule::NeedAdjusted, 2.0, 22.5);
  const Histogram z = need_histogram(ds, cfg, 2.0, 0.5);
  CHECK(a.bins == z.bins);
  CHECK(a.bin_left(0) == z.shifted(22.0).bin_left(0));
}

TEST_CASE("fitting lambda") {
  const Problem p({2, 2, 10, -3}, {1, 4, 0, 2});
  const LambdaFit fit = fit_lambda(allocate_lambda(p, {0.3, 0.4}).amounts, p);
  CHECK(close(fit.lambda.lambda1, 0.3, 1e-12));
  CHECK(close(fit.lambda.lambda2, 0.4, 1e-12));
  CHECK(fit.residual <= 1e-12);
  CHECK(fit.rank == 2);
  CHECK_FALSE(fit.rank_deficient);

  const LambdaFit lf = fit_lambda(p.incomes(), p);
  CHECK(close(lf.lambda.lambda1, 1.0, 1e-12));
  CHECK(close(lf.lambda.lambda2, 0.0, 1e-12));

  // Uniform needs: R^F = R^A, so lambda2 is not identified.
  const Problem uniform({1, 5, 9}, {2, 2, 2});
  const LambdaFit deficient = fit_lambda(allocate_lambda(uniform, {0.5, 0.2}).amounts, uniform);
  CHECK(deficient.rank_deficient);
  CHECK(deficient.rank == 1);
  CHECK(close(deficient.lambda.lambda1, 0.5, 1e-12));
  CHECK(deficient.residual <= 1e-9);

  const std::array<double, 4> off{3, 3, 3, 3};
  CHECK(close(fit_lambda(off, p).imbalance, 1.0));
  CHECK_THROWS_AS(fit_lambda(off, uniform), ValidationError);
}

TEST_CASE("synthetic survey plants its targets") {
  SyntheticConfig cfg;
  cfg.countries = {"BE", "DE"};
  const Dataset ds = generate_synthetic(cfg);
  REQUIRE(ds.records.size() == 10000);
  const NeedConfig needs = NeedConfig::defaults();
  const SummaryStats s = summary_stats(ds, needs);
  CHECK(close(s.mean_income.unweighted, 25053.8, 1e-12));
  CHECK(close(s.mean_need.unweighted, 13830.5, 1e-12));
  CHECK(s.share_income_below_threshold.unweighted == doctest::Approx(0.798).epsilon(1e-12));
  CHECK(s.share_need_below_threshold.unweighted == doctest::Approx(0.962).epsilon(1e-12));
  CHECK(s.share_need_exceeds_income.unweighted == doctest::Approx(0.107).epsilon(1e-12));
  CHECK(s.mean_income.weighted == s.mean_income.unweighted);
  CHECK(ds.countries() == std::vector<std::string>{"BE", "DE"});

  for (const auto& r : ds.records) {
    const double z = need_of(r, needs);
    CHECK(std::abs(z - r.net_income) >= 1.0 - 1e-6);
    CHECK(std::abs(r.net_income - 40000.0) >= 1.0 - 1e-6);
    CHECK(std::abs(z - 40000.0) >= 1.0 - 1e-6);
    CHECK(std::abs(std::round(r.net_income * 100) - r.net_income * 100) < 1e-6);
  }

  // Same seed, same data.
  const Dataset again = generate_synthetic(cfg);
  CHECK(again.records[17].id == ds.records[17].id);
  CHECK(again.records[17].net_income == ds.records[17].net_income);

  SyntheticConfig bad;
  bad.targets.share_need_exceeds_income = 0.9;
  CHECK_THROWS_AS(generate_synthetic(bad), ValidationError);
}

TEST_CASE("fit round trip on synthetic households") {
  SyntheticConfig cfg;
  cfg.targets.households = 500;
  const Problem p = build_problem(generate_synthetic(cfg), NeedConfig::defaults());
  Gen gen(12);
  for (int k = 0; k < 200; ++k) {
    const LambdaParams l = gen.lambda();
    const LambdaFit fit = fit_lambda(allocate_lambda(p, l).amounts, p);
    CHECK(std::abs(fit.lambda.lambda1 - l.lambda1) <= 1e-8);
    CHECK(std::abs(fit.lambda.lambda2 - l.lambda2) <= 1e-8);
  }
}

TEST_CASE("csv round trip") {
  SyntheticConfig cfg;
  cfg.targets.households = 200;
  cfg.countries = {"ES"};
  cfg.random_weights = true;
  const Dataset ds = generate_synthetic(cfg);
  std::stringstream buf;
  write_csv(buf, ds);
  const Dataset back = read_csv(buf);
  REQUIRE(back.records.size() == ds.records.size());
  CHECK(back.categories == ds.categories);
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    CHECK(back.records[i].id == ds.records[i].id);
    CHECK(back.records[i].country == ds.records[i].country);
    CHECK(back.records[i].net_income == ds.records[i].net_income);
    CHECK(back.records[i].weight == ds.records[i].weight);
    CHECK(back.records[i].expenditures == ds.records[i].expenditures);
  }
}
