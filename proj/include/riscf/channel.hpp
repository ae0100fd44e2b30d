#pragma once

#include <riscf/error.hpp>
#include <riscf/linalg.hpp>
#include <riscf/rng.hpp>
#include <riscf/scenario.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace riscf {

/// One realization of every channel in the network.
///
/// `direct[b]` is N_t x K with column k equal to h_{b,k}. `cascade[b][k]` is the
/// M x N_t matrix diag(conj(v_k)) G_b, so that the RIS term of the effective
/// channel row is theta^H * cascade[b][k].
struct ChannelSet {
  PerApMatrices direct;
  std::vector<CMatrix> ap_ris;
  std::vector<CVector> ris_user;
  std::vector<std::vector<CMatrix>> cascade;
  std::vector<Position> user_positions;
  RVector noise;  // sigma_k^2 in mW

  Index num_aps() const { return static_cast<Index>(direct.size()); }
  Index antennas() const { return direct.empty() ? 0 : direct.front().rows(); }
  Index num_users() const { return direct.empty() ? 0 : direct.front().cols(); }
  Index ris_elements() const { return ap_ris.empty() ? 0 : ap_ris.front().rows(); }

  friend bool operator==(const ChannelSet& a, const ChannelSet& b) {
    auto same = [](const auto& x, const auto& y) {
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i].rows() != y[i].rows() || x[i].cols() != y[i].cols() || x[i] != y[i]) return false;
      return true;
    };
    if (!same(a.direct, b.direct) || !same(a.ap_ris, b.ap_ris) || !same(a.ris_user, b.ris_user))
      return false;
    if (a.cascade.size() != b.cascade.size()) return false;
    for (std::size_t i = 0; i < a.cascade.size(); ++i)
      if (!same(a.cascade[i], b.cascade[i])) return false;
    return a.user_positions == b.user_positions && a.noise.size() == b.noise.size() &&
           a.noise == b.noise;
  }
};

/// diag(conj(v)) * G, i.e. row m of G scaled by conj(v_m).
inline CMatrix cascade_matrix(const CMatrix& ap_ris, const CVector& ris_user) {
  require_dims(ap_ris.rows() == ris_user.size(), "cascade_matrix: RIS dimension mismatch");
  return ris_user.conjugate().asDiagonal() * ap_ris;
}

/// Effective channel h~ (stored unconjugated): h~^H = h^H + theta^H q.
inline CVector effective_channel(const CVector& h, const CMatrix& q, const CVector& theta) {
  require_dims(q.cols() == h.size(), "effective_channel: q has " + std::to_string(q.cols()) +
                                         " columns, h has " + std::to_string(h.size()));
  require_dims(q.rows() == theta.size(), "effective_channel: q has " + std::to_string(q.rows()) +
                                             " rows, theta has " + std::to_string(theta.size()));
  return h + q.adjoint() * theta;
}

/// All effective channels for a given theta, one N_t x K matrix per AP.
inline PerApMatrices effective_channels(const ChannelSet& ch, const CVector& theta) {
  require_dims(theta.size() == ch.ris_elements(), "effective_channels: theta length mismatch");
  PerApMatrices out(ch.direct.size());
  for (std::size_t b = 0; b < ch.direct.size(); ++b) {
    out[b] = ch.direct[b];
    for (Index k = 0; k < ch.num_users(); ++k)
      out[b].col(k).noalias() += ch.cascade[b][k].adjoint() * theta;
  }
  return out;
}

/// Uniform over the disk (area measure): radius R*sqrt(U).
inline std::vector<Position> draw_user_positions(const ScenarioConfig& c, std::uint64_t seed) {
  auto eng = make_engine(seed, Stream::kUserPositions);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Position> out;
  out.reserve(c.num_users);
  for (int k = 0; k < c.num_users; ++k) {
    const double r = c.user_circle_radius * std::sqrt(u(eng));
    const double a = 2.0 * M_PI * u(eng);
    out.push_back({c.user_circle_center.x + r * std::cos(a), c.user_circle_center.y + r * std::sin(a)});
  }
  return out;
}

/// Linear power gain 10^(L/10) of a link of length d.
inline double link_gain(const ScenarioConfig& c, double d, double exponent) {
  return db_to_linear(pathloss_db(d, exponent, c.pathloss_ref_db, c.ref_distance));
}

/// Rayleigh realization of every link; each link draws from its own substream.
inline ChannelSet generate_channels(const ScenarioConfig& c, std::uint64_t seed) {
  validate(c);
  const Index nb = c.num_aps, nt = c.antennas_per_ap, nk = c.num_users, m = c.ris_elements;
  ChannelSet ch;
  ch.user_positions = draw_user_positions(c, seed);
  ch.noise = RVector::Constant(nk, noise_mw(c));

  ch.direct.resize(nb);
  ch.ap_ris.resize(nb);
  ch.cascade.assign(nb, std::vector<CMatrix>(nk));
  ch.ris_user.resize(nk);

  for (Index k = 0; k < nk; ++k) {
    const double g = link_gain(c, distance(c.ris_position, ch.user_positions[k]), c.exponent_ris_user);
    auto eng = make_engine(seed, Stream::kRisUser, k);
    ch.ris_user[k] = circular_gaussian(eng, m, 1, g).col(0);
  }
  for (Index b = 0; b < nb; ++b) {
    const Position& ap = c.ap_positions[b];
    {
      const double g = link_gain(c, distance(ap, c.ris_position), c.exponent_ap_ris);
      auto eng = make_engine(seed, Stream::kApRis, b);
      ch.ap_ris[b] = circular_gaussian(eng, m, nt, g);
    }
    ch.direct[b].resize(nt, nk);
    for (Index k = 0; k < nk; ++k) {
      const double g = link_gain(c, distance(ap, ch.user_positions[k]), c.exponent_ap_user);
      auto eng = make_engine(seed, Stream::kDirect, b, k);
      ch.direct[b].col(k) = circular_gaussian(eng, nt, 1, g).col(0);
      ch.cascade[b][k] = cascade_matrix(ch.ap_ris[b], ch.ris_user[k]);
    }
  }
  return ch;
}

/// Same realization with the RIS removed (h~ = h for every theta).
inline ChannelSet without_ris(ChannelSet ch) {
  for (auto& g : ch.ap_ris) g.setZero();
  for (auto& v : ch.ris_user) v.setZero();
  for (auto& row : ch.cascade)
    for (auto& q : row) q.setZero();
  return ch;
}

}  // namespace riscf
