#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace riscf;

TEST(MethodId, NamesRoundTrip) {
  for (MethodId m : kAllMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_FALSE(parse_method("pd_with_magic").has_value());
}

TEST(Mrt, FullPowerPerAp) {
  const ChannelSet ch = generate_channels(ScenarioConfig{}, 1);
  for (const auto& f : mrt_beamformers(ch, 100.0)) EXPECT_NEAR(f.squaredNorm(), 100.0, 1e-12);
}

TEST(Mrt, SingleUserIsMatchedFilter) {
  ScenarioConfig c;
  c.num_users = 1;
  c.rate_weights = {1.0};
  const ChannelSet ch = generate_channels(c, 2);
  const PerApMatrices f = mrt_beamformers(ch, 100.0);
  for (Index b = 0; b < ch.num_aps(); ++b) {
    const CVector h = ch.direct[b].col(0);
    EXPECT_LE((f[b].col(0) - std::sqrt(100.0) * h / h.norm()).norm(), 1e-12);
  }
}

TEST(Mrt, SingleApSingleUserReachesCauchySchwarzBound) {
  ScenarioConfig c = single_user_config();
  const ChannelSet ch = without_ris(generate_channels(c, 3));
  BeamState s = make_state(1, c.antennas_per_ap, 1, c.ris_elements);
  s.active = mrt_beamformers(ch, p_max_mw(c));
  const double bound = p_max_mw(c) * ch.direct[0].squaredNorm() / ch.noise(0);
  EXPECT_NEAR(sinr(0, s, ch) / bound, 1.0, 1e-12);
}

TEST(Mrt, ZeroChannelRejected) {
  ChannelSet ch = generate_channels(ScenarioConfig{}, 4);
  ch.direct[1].col(2).setZero();
  EXPECT_THROW(mrt_beamformers(ch, 100.0), DegenerateChannelError);
}

TEST(Zf, NullsIntraApInterference) {
  const ChannelSet ch = generate_channels(ScenarioConfig{}, 5);
  const PerApMatrices f = zf_beamformers(ch, 100.0);
  for (Index b = 0; b < ch.num_aps(); ++b) {
    EXPECT_NEAR(f[b].squaredNorm(), 100.0, 1e-10);
    for (Index k = 0; k < 4; ++k) {
      EXPECT_NEAR(f[b].col(k).squaredNorm(), 25.0, 1e-10);
      for (Index j = 0; j < 4; ++j)
        if (j != k) {
          EXPECT_LE(std::abs(ch.direct[b].col(k).dot(f[b].col(j))) /
                        (ch.direct[b].col(k).norm() * f[b].col(j).norm()),
                    1e-10);
        }
    }
  }
}

TEST(Zf, SingleUserCoincidesWithMrt) {
  ScenarioConfig c;
  c.num_users = 1;
  c.rate_weights = {1.0};
  const ChannelSet ch = generate_channels(c, 6);
  const PerApMatrices zf = zf_beamformers(ch, 100.0), mrt = mrt_beamformers(ch, 100.0);
  for (Index b = 0; b < ch.num_aps(); ++b) EXPECT_LE((zf[b] - mrt[b]).norm(), 1e-10);
}

TEST(Zf, RankDeficiencyRejected) {
  ChannelSet ch = generate_channels(ScenarioConfig{}, 7);
  ch.direct[0].col(3) = ch.direct[0].col(1) * Complex(0.0, 2.0);
  EXPECT_THROW(zf_beamformers(ch, 100.0), DegenerateChannelError);
  ScenarioConfig c;
  c.antennas_per_ap = 2;
  EXPECT_THROW(zf_beamformers(generate_channels(c, 7), 100.0), DegenerateChannelError);
}

TEST(RunBaseline, OneShotMethodsHaveNoIterationsOrMessages) {
  const ScenarioConfig c;
  const ChannelSet ch = generate_channels(c, 8);
  for (MethodId m : {MethodId::kZfNoRis, MethodId::kMrtNoRis}) {
    const auto [s, r] = run_baseline(m, c, ch, solve_options(c));
    EXPECT_EQ(r.iterations_used, 0);
    EXPECT_TRUE(r.trace.empty());
    EXPECT_TRUE(r.ledger.messages().empty());
    EXPECT_GT(r.final_sum_rate, 0.0);
    EXPECT_EQ(r.method, to_string(m));
  }
}

TEST(RunBaseline, NoRisResultDoesNotDependOnM) {
  ScenarioConfig a, b;
  a.ris_elements = 20;
  b.ris_elements = 100;
  const auto [sa, ra] = run_baseline(MethodId::kPdNoRis, a, generate_channels(a, 9), solve_options(a));
  const auto [sb, rb] = run_baseline(MethodId::kPdNoRis, b, generate_channels(b, 9), solve_options(b));
  EXPECT_EQ(ra.final_sum_rate, rb.final_sum_rate);
  EXPECT_EQ(ra.iterations_used, rb.iterations_used);
  for (Index i = 0; i < a.num_aps; ++i) EXPECT_EQ(sa.active[i], sb.active[i]);
}

TEST(RunBaseline, RandomRisKeepsItsPhases) {
  const ScenarioConfig c;
  const ChannelSet ch = generate_channels(c, 10);
  const auto [s, r] = run_baseline(MethodId::kPdRandomRis, c, ch, solve_options(c), 10);
  EXPECT_EQ(s.theta, random_ris_phases(10, 100));
  for (Index m = 0; m < 100; ++m) EXPECT_NEAR(std::abs(s.theta(m)), 1.0, 1e-15);
  EXPECT_LE(r.max_surrogate_decrease, 1e-8);
  EXPECT_EQ(r.ledger.total_paper_symbols(), signaling_formula(5, 8, 4, 100, r.iterations_used));
}

TEST(RunBaseline, EveryMethodIsPowerFeasible) {
  const ScenarioConfig c;
  const ChannelSet ch = generate_channels(c, 11);
  for (MethodId m : kAllMethods) {
    const auto [s, r] = run_baseline(m, c, ch, solve_options(c));
    for (const auto& f : s.active) EXPECT_LE(f.squaredNorm(), p_max_mw(c) * (1 + 1e-9)) << to_string(m);
    EXPECT_TRUE(std::isfinite(r.final_sum_rate));
  }
}

TEST(Centralized, MonotoneCoherentSurrogate) {
  const ScenarioConfig c;
  for (std::uint64_t seed : {12u, 13u}) {
    const ChannelSet ch = generate_channels(c, seed);
    const auto [s, r] = run_centralized(c, ch, solve_options(c));
    EXPECT_LE(r.max_surrogate_decrease, 1e-8);
    double prev = r.initial_surrogate;
    for (const auto& it : r.trace) {
      EXPECT_GE(it.surrogate, prev - 1e-8);
      prev = it.surrogate;
      // Coherent surrogate at the receiver optimum is ln2 * R_sum.
      EXPECT_NEAR(it.surrogate, std::log(2.0) * it.sum_rate, 1e-8);
    }
    EXPECT_EQ(r.method, "centralized_with_ris");
  }
}
