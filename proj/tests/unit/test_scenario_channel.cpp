#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace riscf;

TEST(Units, DbmToLinear) {
  EXPECT_DOUBLE_EQ(dbm_to_linear(0.0), 1.0);
  EXPECT_DOUBLE_EQ(dbm_to_linear(20.0), 100.0);
  EXPECT_NEAR(dbm_to_linear(-70.0), 1e-7, 1e-22);
}

TEST(PathLoss, ReferenceDistanceGivesC0) {
  for (double kappa : {2.2, 2.6, 3.6}) EXPECT_DOUBLE_EQ(pathloss_db(1.0, kappa, -32.0, 1.0), -32.0);
  EXPECT_EQ(pathloss_db(2.5, 3.0, -17.0, 2.5), -17.0);
}

TEST(PathLoss, TenMetresAtExponent22) {
  EXPECT_NEAR(pathloss_db(10.0, 2.2, -32.0, 1.0), -54.0, 1e-12);
}

TEST(PathLoss, StrictlyDecreasingInDistance) {
  double prev = pathloss_db(0.1, 2.2, -32.0, 1.0);
  for (double d = 0.2; d < 500.0; d *= 1.3) {
    const double cur = pathloss_db(d, 2.2, -32.0, 1.0);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(PathLoss, NonPositiveDistanceIsDegenerate) {
  EXPECT_THROW(pathloss_db(0.0, 2.2, -32.0, 1.0), DegenerateGeometryError);
  EXPECT_THROW(pathloss_db(-1.0, 2.2, -32.0, 1.0), DegenerateGeometryError);
}

TEST(GenerateChannels, SameSeedIsBitIdentical) {
  const ScenarioConfig c;
  EXPECT_TRUE(generate_channels(c, 7) == generate_channels(c, 7));
  EXPECT_FALSE(generate_channels(c, 7) == generate_channels(c, 8));
}

TEST(GenerateChannels, DefaultShapes) {
  const ChannelSet ch = generate_channels(ScenarioConfig{}, 1);
  ASSERT_EQ(ch.direct.size(), 5u);
  for (const auto& h : ch.direct) {
    EXPECT_EQ(h.rows(), 8);
    EXPECT_EQ(h.cols(), 4);
  }
  ASSERT_EQ(ch.ap_ris.size(), 5u);
  for (const auto& g : ch.ap_ris) {
    EXPECT_EQ(g.rows(), 100);
    EXPECT_EQ(g.cols(), 8);
  }
  ASSERT_EQ(ch.ris_user.size(), 4u);
  for (const auto& v : ch.ris_user) EXPECT_EQ(v.size(), 100);
  EXPECT_EQ(ch.user_positions.size(), 4u);
  EXPECT_EQ(ch.noise.size(), 4);
}

TEST(GenerateChannels, CascadeIsRowScaledApRisMatrix) {
  const ChannelSet ch = generate_channels(ScenarioConfig{}, 3);
  for (Index b = 0; b < ch.num_aps(); ++b)
    for (Index k = 0; k < ch.num_users(); ++k) {
      const CMatrix& q = ch.cascade[b][k];
      for (Index m = 0; m < ch.ris_elements(); ++m)
        for (Index n = 0; n < ch.antennas(); ++n)
          ASSERT_EQ(q(m, n), std::conj(ch.ris_user[k](m)) * ch.ap_ris[b](m, n));
    }
}

TEST(GenerateChannels, EntryVarianceMatchesPathLoss) {
  // Fixed geometry: zero-radius user disk, so every draw has the same distance.
  ScenarioConfig c;
  c.num_aps = 1;
  c.ap_positions = {{0.0, -50.0}};
  c.num_users = 1;
  c.rate_weights = {1.0};
  c.user_circle_radius = 0.0;
  c.antennas_per_ap = 100;
  c.ris_elements = 10;
  const Position user = c.user_circle_center;
  const double g_direct = link_gain(c, distance(c.ap_positions[0], user), c.exponent_ap_user);
  const double g_apris = link_gain(c, distance(c.ap_positions[0], c.ris_position), c.exponent_ap_ris);
  const double g_risuser = link_gain(c, distance(c.ris_position, user), c.exponent_ris_user);
  double s_direct = 0.0, s_apris = 0.0, s_risuser = 0.0;
  int n_direct = 0, n_apris = 0, n_risuser = 0;
  for (std::uint64_t seed = 0; n_direct < 100000; ++seed) {
    const ChannelSet ch = generate_channels(c, seed);
    s_direct += ch.direct[0].squaredNorm();
    n_direct += static_cast<int>(ch.direct[0].size());
    s_apris += ch.ap_ris[0].squaredNorm();
    n_apris += static_cast<int>(ch.ap_ris[0].size());
    s_risuser += ch.ris_user[0].squaredNorm();
    n_risuser += static_cast<int>(ch.ris_user[0].size());
  }
  EXPECT_NEAR(s_direct / n_direct / g_direct, 1.0, 0.03);
  EXPECT_NEAR(s_apris / n_apris / g_apris, 1.0, 0.03);
  // 10 entries per draw -> 10^4 samples, still well inside 3%.
  EXPECT_NEAR(s_risuser / n_risuser / g_risuser, 1.0, 0.03);
}

TEST(GenerateChannels, UsersAreAreaUniformInDisk) {
  ScenarioConfig c;
  c.num_users = 2000;
  c.rate_weights.assign(2000, 1.0);
  c.antennas_per_ap = 1;
  c.ris_elements = 1;
  const auto pos = draw_user_positions(c, 11);
  int inner = 0;
  for (const auto& p : pos) {
    const double r = distance(p, c.user_circle_center);
    EXPECT_LE(r, c.user_circle_radius + 1e-12);
    inner += r <= c.user_circle_radius / std::sqrt(2.0) ? 1 : 0;
  }
  // Half the area lies inside R/sqrt(2); binomial sd is about 0.011.
  EXPECT_NEAR(inner / 2000.0, 0.5, 0.05);
}

TEST(GenerateChannels, CoincidentNodesAreDegenerate) {
  ScenarioConfig c;
  c.ap_positions[2] = c.ris_position;
  EXPECT_THROW(generate_channels(c, 1), DegenerateGeometryError);
}

TEST(GenerateChannels, InvalidConfigRejected) {
  ScenarioConfig c;
  c.rate_weights = {1.0, 1.0};
  EXPECT_THROW(generate_channels(c, 1), ConfigError);
  ScenarioConfig d;
  d.exponent_ap_ris = 0.0;
  EXPECT_THROW(generate_channels(d, 1), ConfigError);
}

TEST(EffectiveChannel, ZeroThetaGivesDirect) {
  const ChannelSet ch = generate_channels(ScenarioConfig{}, 2);
  const CVector zero = CVector::Zero(ch.ris_elements());
  EXPECT_EQ(effective_channel(ch.direct[1].col(2), ch.cascade[1][2], zero), CVector(ch.direct[1].col(2)));
}

TEST(EffectiveChannel, ScalarCase) {
  for (double phi : {0.0, 0.3, 1.7, -2.9}) {
    const CVector h = CVector::Zero(1);
    const CMatrix q = CMatrix::Ones(1, 1);
    const CVector theta = CVector::Constant(1, std::polar(1.0, phi));
    const CVector heff = effective_channel(h, q, theta);
    // The row form h~^H is the conjugate.
    EXPECT_NEAR(std::abs(std::conj(heff(0)) - std::polar(1.0, -phi)), 0.0, 1e-15);
  }
}

TEST(EffectiveChannel, MatchesLoopOracle) {
  const ChannelSet ch = generate_channels(ScenarioConfig{}, 5);
  auto eng = make_engine(5, Stream::kTest);
  double dev = 0.0;
  for (int t = 0; t < 100; ++t) {
    const CVector theta = circular_gaussian(eng, ch.ris_elements(), 1, 1.0).col(0);
    for (Index b = 0; b < ch.num_aps(); ++b)
      for (Index k = 0; k < ch.num_users(); ++k) {
        const CVector heff = effective_channel(ch.direct[b].col(k), ch.cascade[b][k], theta);
        for (Index n = 0; n < ch.antennas(); ++n) {
          CVector e = CVector::Zero(ch.antennas());
          e(n) = 1.0;
          dev = std::max(dev, std::abs(heff.dot(e) - oracle::gain(ch, b, k, theta, e)));
        }
      }
  }
  EXPECT_LE(dev, 1e-12);
}

TEST(EffectiveChannel, DimensionMismatchThrows) {
  EXPECT_THROW(effective_channel(CVector::Zero(3), CMatrix::Zero(4, 2), CVector::Zero(4)), DimensionError);
  EXPECT_THROW(effective_channel(CVector::Zero(2), CMatrix::Zero(4, 2), CVector::Zero(3)), DimensionError);
}

TEST(EffectiveChannel, WithoutRisIsDirectForAnyTheta) {
  const ChannelSet ch = without_ris(generate_channels(ScenarioConfig{}, 9));
  auto eng = make_engine(9, Stream::kTest);
  const CVector theta = random_phases(eng, ch.ris_elements());
  const PerApMatrices heff = effective_channels(ch, theta);
  for (Index b = 0; b < ch.num_aps(); ++b) EXPECT_EQ(heff[b], ch.direct[b]);
}

TEST(Rng, SubstreamsDependOnEveryCoordinate) {
  const auto base = substream_seed(1, Stream::kDirect, 2, 3);
  EXPECT_NE(base, substream_seed(2, Stream::kDirect, 2, 3));
  EXPECT_NE(base, substream_seed(1, Stream::kApRis, 2, 3));
  EXPECT_NE(base, substream_seed(1, Stream::kDirect, 3, 3));
  EXPECT_NE(base, substream_seed(1, Stream::kDirect, 2, 2));
  EXPECT_NE(substream_seed(1, Stream::kDirect, 1, 0), substream_seed(1, Stream::kDirect, 0, 1));
}
