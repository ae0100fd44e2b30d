#pragma once

#include <riscf/channel.hpp>
#include <riscf/error.hpp>
#include <riscf/linalg.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace riscf {

/// Which MSE the weighted sum-MSE machinery is built on.
///
/// kPerAp sums |h~_{b,k}^H f_{b,j}|^2 / coupling(b,k) per AP (no cross-AP
/// products in the quadratic part, coherent linear part). With unit coupling
/// this is the printed per-AP form; with coupling on the per-user simplex it is
/// a Jensen upper bound of the exact MSE that stays separable across APs.
/// kCoherent is the exact MSE of the received signal.
enum class MseModel { kPerAp, kCoherent };

/// Optimization variables of the alternating scheme.
struct BeamState {
  PerApMatrices active;  // N_t x K per AP, column k = f_{b,k}
  CVector theta;         // RIS vector, theta_m = conj(phi_m)
  CVector u;             // receive scalars
  RVector omega;         // MSE weights
  RMatrix coupling;      // B x K; ones gives the printed per-AP form

  Index num_aps() const { return static_cast<Index>(active.size()); }
  Index num_users() const { return active.empty() ? 0 : active.front().cols(); }

  friend bool operator==(const BeamState& a, const BeamState& b) {
    if (a.active.size() != b.active.size()) return false;
    for (std::size_t i = 0; i < a.active.size(); ++i)
      if (a.active[i] != b.active[i]) return false;
    return a.theta == b.theta && a.u == b.u && a.omega == b.omega && a.coupling == b.coupling;
  }
};

struct RateReport {
  RVector per_user_sinr;
  RVector per_user_rate;      // bits/s/Hz, unweighted
  double weighted_sum_rate;   // bits/s/Hz
  double surrogate;           // nats
};

/// Zero-initialized state with unit coupling and unit weights.
inline BeamState make_state(Index num_aps, Index antennas, Index num_users, Index ris_elements) {
  BeamState s;
  s.active.assign(num_aps, CMatrix::Zero(antennas, num_users));
  s.theta = CVector::Ones(ris_elements);
  s.u = CVector::Zero(num_users);
  s.omega = RVector::Ones(num_users);
  s.coupling = RMatrix::Ones(num_aps, num_users);
  return s;
}

inline void check_state(const BeamState& s, const ChannelSet& ch) {
  require_dims(s.num_aps() == ch.num_aps(), "state/channel AP count mismatch");
  for (const auto& f : s.active)
    require_dims(f.rows() == ch.antennas() && f.cols() == ch.num_users(),
                 "beamformer block has wrong shape");
  require_dims(s.theta.size() == ch.ris_elements(), "theta length mismatch");
  require_dims(s.u.size() == ch.num_users() && s.omega.size() == ch.num_users(),
               "u/omega length mismatch");
  require_dims(s.coupling.rows() == ch.num_aps() && s.coupling.cols() == ch.num_users(),
               "coupling shape mismatch");
}

/// a_b(k, j) = h~_{b,k}^H f_{b,j}, one K x K matrix per AP.
inline std::vector<CMatrix> link_gains(const BeamState& s, const PerApMatrices& heff) {
  std::vector<CMatrix> out(s.active.size());
  for (std::size_t b = 0; b < s.active.size(); ++b) out[b].noalias() = heff[b].adjoint() * s.active[b];
  return out;
}

inline std::vector<CMatrix> link_gains(const BeamState& s, const ChannelSet& ch) {
  check_state(s, ch);
  return link_gains(s, effective_channels(ch, s.theta));
}

/// K x K coherent amplitudes sum_b a_b(k, j).
inline CMatrix coherent_gains(const std::vector<CMatrix>& a) {
  CMatrix sum = CMatrix::Zero(a.front().rows(), a.front().cols());
  for (const auto& m : a) sum += m;
  return sum;
}

/// Signal amplitude S_k = sum_b a_b(k,k) and quadratic part of the MSE
/// denominator (without noise) for every user.
struct MseTerms {
  CVector signal;
  RVector quadratic;
};

inline MseTerms mse_terms(const std::vector<CMatrix>& a, const RMatrix& coupling, MseModel model) {
  const Index nk = a.front().rows();
  MseTerms t{CVector::Zero(nk), RVector::Zero(nk)};
  const CMatrix coh = coherent_gains(a);
  for (Index k = 0; k < nk; ++k) t.signal(k) = coh(k, k);
  if (model == MseModel::kCoherent) {
    for (Index k = 0; k < nk; ++k) t.quadratic(k) = coh.row(k).squaredNorm();
  } else {
    for (std::size_t b = 0; b < a.size(); ++b)
      for (Index k = 0; k < nk; ++k)
        if (coupling(b, k) > 0.0) t.quadratic(k) += a[b].row(k).squaredNorm() / coupling(b, k);
  }
  return t;
}

inline MseTerms mse_terms(const BeamState& s, const ChannelSet& ch, MseModel model) {
  return mse_terms(link_gains(s, ch), s.coupling, model);
}

/// Coherent SINR of every user (the rate actually achieved).
inline RVector sinr_all(const BeamState& s, const ChannelSet& ch) {
  const CMatrix coh = coherent_gains(link_gains(s, ch));
  const Index nk = coh.rows();
  RVector out(nk);
  for (Index k = 0; k < nk; ++k) {
    const double sig = abs2(coh(k, k));
    const double interf = coh.row(k).squaredNorm() - sig;
    out(k) = sig / (std::max(interf, 0.0) + ch.noise(k));
  }
  return out;
}

inline double sinr(Index k, const BeamState& s, const ChannelSet& ch) {
  require_dims(k >= 0 && k < ch.num_users(), "sinr: user index out of range");
  return sinr_all(s, ch)(k);
}

inline double weighted_sum_rate(const BeamState& s, const ChannelSet& ch, const RVector& weights) {
  require_dims(weights.size() == ch.num_users(), "weighted_sum_rate: weight length mismatch");
  const RVector g = sinr_all(s, ch);
  double r = 0.0;
  for (Index k = 0; k < g.size(); ++k) r += weights(k) * std::log2(1.0 + g(k));
  return r;
}

/// mse_k = |u_k|^2 (quadratic_k + sigma_k^2) - 2 Re{u_k^* S_k} + 1.
inline RVector mse_all(const BeamState& s, const ChannelSet& ch, MseModel model) {
  const MseTerms t = mse_terms(s, ch, model);
  RVector out(t.signal.size());
  for (Index k = 0; k < out.size(); ++k)
    out(k) = abs2(s.u(k)) * (t.quadratic(k) + ch.noise(k)) -
             2.0 * std::real(std::conj(s.u(k)) * t.signal(k)) + 1.0;
  return out;
}

inline double mse(Index k, const BeamState& s, const ChannelSet& ch,
                  MseModel model = MseModel::kPerAp) {
  require_dims(k >= 0 && k < ch.num_users(), "mse: user index out of range");
  return mse_all(s, ch, model)(k);
}

/// Stationary u_k = S_k / (quadratic_k + sigma_k^2).
inline CVector update_u(const BeamState& s, const ChannelSet& ch,
                        MseModel model = MseModel::kPerAp) {
  const MseTerms t = mse_terms(s, ch, model);
  CVector u(t.signal.size());
  for (Index k = 0; k < u.size(); ++k) u(k) = t.signal(k) / (t.quadratic(k) + ch.noise(k));
  return u;
}

/// Closed-form minimum 1 - |S_k|^2 / (quadratic_k + sigma_k^2) over u_k.
inline RVector optimal_mse(const BeamState& s, const ChannelSet& ch,
                           MseModel model = MseModel::kPerAp) {
  const MseTerms t = mse_terms(s, ch, model);
  RVector out(t.signal.size());
  for (Index k = 0; k < out.size(); ++k)
    out(k) = 1.0 - abs2(t.signal(k)) / (t.quadratic(k) + ch.noise(k));
  return out;
}

/// omega_k = 1 / mse_k at the current u. Call after update_u.
inline RVector update_omega(const BeamState& s, const ChannelSet& ch,
                            MseModel model = MseModel::kPerAp) {
  const RVector m = mse_all(s, ch, model);
  RVector w(m.size());
  for (Index k = 0; k < m.size(); ++k) {
    if (!(m(k) > 0.0) || !std::isfinite(m(k)))
      throw InvariantViolation("update_omega: mse_" + std::to_string(k) + " = " +
                               std::to_string(m(k)) + " is not positive");
    w(k) = 1.0 / m(k);
  }
  return w;
}

/// Row norms r_{b,k} = ||a_b(k,:)|| of one AP, floored at
/// 1e-9 sqrt(power_ref) ||h~_{b,k}||. Uses only AP-local data so the AP and the
/// CPU derive identical coupling weights.
inline RVector coupling_norms(const CMatrix& heff_b, const CMatrix& f_b, double power_ref) {
  const CMatrix a = heff_b.adjoint() * f_b;
  RVector r(a.rows());
  for (Index k = 0; k < a.rows(); ++k)
    r(k) = std::max(a.row(k).norm(), 1e-9 * std::sqrt(power_ref) * heff_b.col(k).norm());
  return r;
}

/// Normalizes B x K row norms into per-user simplex weights. A user with all
/// norms zero (no AP reaches it) gets a uniform split.
inline RMatrix coupling_from_norms(const RMatrix& r) {
  RMatrix alpha(r.rows(), r.cols());
  for (Index k = 0; k < r.cols(); ++k) {
    const double total = r.col(k).sum();
    if (total > 0.0)
      alpha.col(k) = r.col(k) / total;
    else
      alpha.col(k).setConstant(1.0 / static_cast<double>(r.rows()));
  }
  return alpha;
}

/// Closed-form minimizer over the per-user simplex of
/// sum_b (sum_j |a_b(k,j)|^2) / coupling(b,k): weights proportional to r_{b,k}.
inline RMatrix update_coupling(const BeamState& s, const ChannelSet& ch, double power_ref) {
  check_state(s, ch);
  const PerApMatrices heff = effective_channels(ch, s.theta);
  RMatrix r(ch.num_aps(), ch.num_users());
  for (Index b = 0; b < ch.num_aps(); ++b)
    r.row(b) = coupling_norms(heff[b], s.active[b], power_ref).transpose();
  return coupling_from_norms(r);
}

/// sum_k eta_k omega_k mse_k.
inline double weighted_mse_sum(const BeamState& s, const ChannelSet& ch, const RVector& weights,
                               MseModel model = MseModel::kPerAp) {
  const RVector m = mse_all(s, ch, model);
  return (weights.array() * s.omega.array() * m.array()).sum();
}

/// R_o = sum_k eta_k (ln omega_k - omega_k mse_k + 1), in nats.
inline double surrogate_objective(const BeamState& s, const ChannelSet& ch, const RVector& weights,
                                  MseModel model = MseModel::kPerAp) {
  require_dims(weights.size() == ch.num_users(), "surrogate_objective: weight length mismatch");
  const RVector m = mse_all(s, ch, model);
  double r = 0.0;
  for (Index k = 0; k < m.size(); ++k) {
    if (!(s.omega(k) > 0.0))
      throw DomainError("surrogate_objective: omega_" + std::to_string(k) + " must be positive");
    r += weights(k) * (std::log(s.omega(k)) - s.omega(k) * m(k) + 1.0);
  }
  return r;
}

inline RateReport rate_report(const BeamState& s, const ChannelSet& ch, const RVector& weights,
                              MseModel model = MseModel::kPerAp) {
  RateReport rep;
  rep.per_user_sinr = sinr_all(s, ch);
  rep.per_user_rate = (1.0 + rep.per_user_sinr.array()).log() / std::numbers::ln2;
  rep.weighted_sum_rate = (weights.array() * rep.per_user_rate.array()).sum();
  rep.surrogate = surrogate_objective(s, ch, weights, model);
  return rep;
}

/// sum_k ||f_{b,k}||^2 for every AP.
inline RVector per_ap_power(const BeamState& s) {
  RVector p(s.active.size());
  for (std::size_t b = 0; b < s.active.size(); ++b) p(b) = s.active[b].squaredNorm();
  return p;
}

/// max_m max(|theta_m| - 1, 0).
inline double theta_excess(const CVector& theta) {
  if (theta.size() == 0) return 0.0;
  return std::max(theta.cwiseAbs().maxCoeff() - 1.0, 0.0);
}

/// Sets u, then omega, from their closed forms.
inline void refresh_receivers(BeamState& s, const ChannelSet& ch, MseModel model) {
  s.u = update_u(s, ch, model);
  s.omega = update_omega(s, ch, model);
}

}  // namespace riscf
