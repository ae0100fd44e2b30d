#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace riscf;

namespace {

SweepSpec tiny_spec() {
  SweepSpec s;
  s.kind = SweepKind::kPower;
  s.values = {10.0, 20.0};
  s.methods = {MethodId::kPdWithRis, MethodId::kMrtNoRis, MethodId::kZfNoRis};
  s.num_seeds = 2;
  s.base_config.ris_elements = 20;
  s.base_config.max_iterations = 5;
  return s;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream os;
  write_csv(r, os);
  return os.str();
}

}  // namespace

TEST(Sweep, SingleCellGivesOneRow) {
  SweepSpec s;
  s.values = {20.0};
  s.methods = {MethodId::kMrtNoRis};
  s.num_seeds = 1;
  const SweepResult r = sweep(s);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(r.rows[0].ok());
}

TEST(Sweep, RowCountAndOrder) {
  const SweepSpec s = tiny_spec();
  const SweepResult r = sweep(s);
  ASSERT_EQ(r.rows.size(), 2u * 3u * 2u);
  std::size_t i = 0;
  for (double v : s.values)
    for (MethodId m : s.methods)
      for (int k = 0; k < s.num_seeds; ++k, ++i) {
        EXPECT_EQ(r.rows[i].value, v);
        EXPECT_EQ(r.rows[i].method, to_string(m));
        EXPECT_EQ(r.rows[i].seed, cell_seed(s.base_config, k));
      }
  EXPECT_EQ(r.aggregates.size(), 2u * 3u * 2u);
}

TEST(Sweep, RowsReproduceStandaloneRunsOnPairedChannels) {
  const SweepSpec s = tiny_spec();
  const SweepResult r = sweep(s);
  for (const auto& row : r.rows) {
    const ScenarioConfig cfg = apply_sweep_value(s.base_config, s.kind, row.value);
    const ChannelSet ch = generate_channels(cfg, row.seed);
    const auto [state, rep] = run_baseline(*parse_method(row.method), cfg, ch, solve_options(cfg), row.seed);
    EXPECT_EQ(rep.final_sum_rate, row.sum_rate);
    EXPECT_EQ(rep.iterations_used, row.iterations);
    EXPECT_EQ(rep.ledger.total_paper_symbols(), row.paper_symbols);
  }
}

TEST(Sweep, IdenticalBytesForAnyWorkerCount) {
  SweepSpec s = tiny_spec();
  const std::string one = csv_of(sweep(s));
  s.workers = 3;
  EXPECT_EQ(csv_of(sweep(s)), one);
  s.workers = 8;
  EXPECT_EQ(csv_of(sweep(s)), one);
}

TEST(Sweep, FailedCellsAreRecorded) {
  SweepSpec s = tiny_spec();
  s.base_config.antennas_per_ap = 2;  // fewer antennas than users: ZF impossible
  const SweepResult r = sweep(s);
  std::size_t zf_failures = 0;
  for (const auto& row : r.rows) {
    if (row.method == "zf_no_ris") {
      EXPECT_FALSE(row.ok());
      EXPECT_FALSE(row.error.empty());
      ++zf_failures;
    } else {
      EXPECT_TRUE(row.ok());
    }
  }
  EXPECT_EQ(zf_failures, 4u);
  EXPECT_EQ(r.failures(), 4u);
}

TEST(Sweep, ValueApplication) {
  const ScenarioConfig base;
  EXPECT_EQ(apply_sweep_value(base, SweepKind::kPower, 7.5).p_max_dbm, 7.5);
  const auto loc = apply_sweep_value(base, SweepKind::kUserLocation, 40.0).user_circle_center;
  EXPECT_EQ(loc.x, 40.0);
  EXPECT_EQ(loc.y, 0.0);
  EXPECT_EQ(apply_sweep_value(base, SweepKind::kRisElements, 60.0).ris_elements, 60);
}

TEST(Sweep, InvalidSpecsRejected) {
  SweepSpec s = tiny_spec();
  s.values.clear();
  EXPECT_THROW(sweep(s), ConfigError);
  s = tiny_spec();
  s.methods.clear();
  EXPECT_THROW(sweep(s), ConfigError);
  s = tiny_spec();
  s.kind = SweepKind::kRisElements;
  s.values = {20.5};
  EXPECT_THROW(sweep(s), ConfigError);
}

TEST(Aggregates, MatchRecomputationFromRows) {
  const SweepResult r = sweep(tiny_spec());
  for (const auto& a : r.aggregates) {
    std::vector<double> xs;
    for (const auto& row : r.rows)
      if (row.value == a.value && row.method == a.method && row.ok()) xs.push_back(row.sum_rate);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / (xs.size() - 1.0) / static_cast<double>(xs.size()));
    if (a.stat == "mean")
      EXPECT_NEAR(a.sum_rate, mean, 1e-12);
    else
      EXPECT_NEAR(a.sum_rate, se, 1e-12);
  }
}

TEST(Csv, SevenColumnsAndRoundTrip) {
  const SweepResult r = sweep(tiny_spec());
  const std::string text = csv_of(r);
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);)
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6) << line;
  std::istringstream in(text);
  const SweepResult back = parse_csv(in);
  ASSERT_EQ(back.rows.size(), r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].value, r.rows[i].value);
    EXPECT_EQ(back.rows[i].method, r.rows[i].method);
    EXPECT_EQ(back.rows[i].seed, r.rows[i].seed);
    EXPECT_EQ(back.rows[i].sum_rate, r.rows[i].sum_rate);
    EXPECT_EQ(back.rows[i].iterations, r.rows[i].iterations);
    EXPECT_EQ(back.rows[i].paper_symbols, r.rows[i].paper_symbols);
    EXPECT_EQ(back.rows[i].actual_symbols, r.rows[i].actual_symbols);
  }
  ASSERT_EQ(back.aggregates.size(), r.aggregates.size());
  for (std::size_t i = 0; i < r.aggregates.size(); ++i) {
    EXPECT_EQ(back.aggregates[i].stat, r.aggregates[i].stat);
    EXPECT_EQ(back.aggregates[i].sum_rate, r.aggregates[i].sum_rate);
    EXPECT_EQ(back.aggregates[i].paper_symbols, r.aggregates[i].paper_symbols);
  }
  EXPECT_EQ(csv_of(back), text);
}

TEST(Csv, AggregateOnlyEmission) {
  SweepResult r;
  r.aggregates.push_back({20.0, "pd_with_ris", "mean", 14.5, 20.0, 6000.0, 20000.0});
  r.aggregates.push_back({20.0, "pd_with_ris", "stderr", 0.1, 1.0, 100.0, 100.0});
  const std::string text = csv_of(r);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
}

TEST(Csv, NineSignificantDigits) {
  SweepResult r;
  SweepRow row;
  row.value = 20.0;
  row.method = "pd_with_ris";
  row.sum_rate = 14.123456789123;
  r.rows.push_back(row);
  const std::string text = csv_of(r);
  EXPECT_NE(text.find("14.123456789"), std::string::npos);
}

TEST(Csv, BadHeaderRejected) {
  std::istringstream in("a,b,c\n");
  EXPECT_THROW(parse_csv(in), ConfigError);
}

TEST(ConfigJson, RoundTripAndDefaults) {
  ScenarioConfig c;
  c.p_max_dbm = 13.0;
  c.user_circle_center = {40.0, 2.0};
  c.seed = 77;
  c.theta_init = ThetaInit::kRandomPhases;
  const ScenarioConfig back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(to_json(config_from_json(Json::object())), to_json(ScenarioConfig{}));
  EXPECT_EQ(to_json(load_config("default")), to_json(ScenarioConfig{}));
}

TEST(ConfigJson, UserCountWithoutWeightsGetsUnitWeights) {
  const ScenarioConfig c = config_from_json(Json{{"num_users", 2}});
  EXPECT_EQ(c.rate_weights, (std::vector<double>{1.0, 1.0}));
}

TEST(ConfigJson, ErrorsAreReported) {
  EXPECT_THROW(config_from_json(Json{{"num_userz", 2}}), ConfigError);
  EXPECT_THROW(config_from_json(Json{{"p_max_dbm", "loud"}}), ConfigError);
  EXPECT_THROW(config_from_json(Json{{"ris_position", {1.0}}}), ConfigError);
  EXPECT_THROW(config_from_json(Json{{"num_aps", 2}}), ConfigError);  // 5 positions remain
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(SweepSpecJson, ParsesAndFillsDefaults) {
  const SweepSpec s = sweep_spec_from_json(Json{{"kind", "user_location"}, {"num_seeds", 3}});
  EXPECT_EQ(s.kind, SweepKind::kUserLocation);
  EXPECT_EQ(s.values, default_sweep_values(SweepKind::kUserLocation));
  EXPECT_EQ(s.methods.size(), kAllMethods.size());
  EXPECT_EQ(s.num_seeds, 3);
  const SweepSpec t = sweep_spec_from_json(
      Json{{"kind", "ris_elements"}, {"methods", {"pd_with_ris"}}, {"base_config", {{"num_users", 2}}}});
  EXPECT_EQ(t.values, (std::vector<double>{20, 40, 60, 80, 100}));
  EXPECT_EQ(t.base_config.num_users, 2);
  EXPECT_THROW(sweep_spec_from_json(Json{{"kind", "temperature"}}), ConfigError);
  EXPECT_THROW(sweep_spec_from_json(Json{{"kind", "power"}, {"methods", {"magic"}}}), ConfigError);
  EXPECT_THROW(sweep_spec_from_json(Json{{"kind", "power"}, {"seeds", 3}}), ConfigError);
}

TEST(SweepDefaults, Grids) {
  EXPECT_EQ(default_sweep_values(SweepKind::kPower), (std::vector<double>{0, 5, 10, 15, 20, 25, 30}));
  EXPECT_EQ(default_sweep_values(SweepKind::kUserLocation),
            (std::vector<double>{0, 20, 40, 60, 80, 100, 120}));
  EXPECT_EQ(SweepSpec{}.num_seeds, 50);
}
