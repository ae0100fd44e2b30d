#pragma once

#include <riscf/active_bf.hpp>
#include <riscf/channel.hpp>
#include <riscf/error.hpp>
#include <riscf/orchestrator.hpp>
#include <riscf/passive_bf.hpp>
#include <riscf/scenario.hpp>
#include <riscf/wmmse.hpp>

#include <Eigen/SVD>

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace riscf {

enum class MethodId {
  kPdWithRis,
  kCentralizedWithRis,
  kPdRandomRis,
  kPdNoRis,
  kZfNoRis,
  kMrtNoRis,
};

inline constexpr std::array<MethodId, 6> kAllMethods{
    MethodId::kCentralizedWithRis, MethodId::kPdWithRis, MethodId::kPdRandomRis,
    MethodId::kPdNoRis,            MethodId::kZfNoRis,   MethodId::kMrtNoRis};

inline std::string to_string(MethodId m) {
  switch (m) {
    case MethodId::kPdWithRis: return "pd_with_ris";
    case MethodId::kCentralizedWithRis: return "centralized_with_ris";
    case MethodId::kPdRandomRis: return "pd_random_ris";
    case MethodId::kPdNoRis: return "pd_no_ris";
    case MethodId::kZfNoRis: return "zf_no_ris";
    case MethodId::kMrtNoRis: return "mrt_no_ris";
  }
  return "unknown";
}

inline std::optional<MethodId> parse_method(std::string_view name) {
  for (MethodId m : kAllMethods)
    if (to_string(m) == name) return m;
  return std::nullopt;
}

/// f_{b,k} = sqrt(p_max/K) h_{b,k}/||h_{b,k}|| on the direct channels.
inline PerApMatrices mrt_beamformers(const ChannelSet& ch, double p_max) {
  PerApMatrices out(ch.num_aps());
  for (Index b = 0; b < ch.num_aps(); ++b) {
    for (Index k = 0; k < ch.num_users(); ++k)
      if (ch.direct[b].col(k).norm() == 0.0)
        throw DegenerateChannelError("mrt_beamformers: zero channel at AP " + std::to_string(b) +
                                     ", user " + std::to_string(k));
    out[b] = mrt_block(ch.direct[b], p_max);
  }
  return out;
}

/// Local zero forcing per AP: columns of H_b (H_b^H H_b)^-1, each scaled to
/// power p_max/K.
inline PerApMatrices zf_beamformers(const ChannelSet& ch, double p_max) {
  const Index nt = ch.antennas(), nk = ch.num_users();
  if (nk > nt)
    throw DegenerateChannelError("zf_beamformers: need N_t >= K (N_t=" + std::to_string(nt) +
                                 ", K=" + std::to_string(nk) + ")");
  PerApMatrices out(ch.num_aps());
  const double amp = std::sqrt(p_max / static_cast<double>(nk));
  for (Index b = 0; b < ch.num_aps(); ++b) {
    const CMatrix& h = ch.direct[b];
    Eigen::JacobiSVD<CMatrix> svd(h);
    const RVector sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(sv.size() - 1) > 1e-10 * sv(0)))
      throw DegenerateChannelError("zf_beamformers: local channel of AP " + std::to_string(b) +
                                   " is rank deficient");
    CMatrix f = h * (h.adjoint() * h).inverse();
    for (Index k = 0; k < nk; ++k) f.col(k) *= amp / f.col(k).norm();
    out[b] = std::move(f);
  }
  return out;
}

/// Alternating optimization on the exact coherent weighted sum-MSE: coherent
/// Gauss-Seidel active update, coherent u/omega, coherent passive quadratic.
/// Upper-bound reference.
inline std::pair<BeamState, SolveReport> run_centralized(const ScenarioConfig& config,
                                                         const ChannelSet& ch,
                                                         const SolveOptions& opts) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  const RVector weights = Eigen::Map<const RVector>(config.rate_weights.data(), config.num_users);
  const double p_max = p_max_mw(config);
  const Index nb = ch.num_aps(), nk = ch.num_users(), m = ch.ris_elements();
  const MseModel model = MseModel::kCoherent;

  SolveReport rep;
  rep.method = to_string(MethodId::kCentralizedWithRis);
  SurrogateMonitor monitor(opts.monotone_tol, opts.strict_monotone);
  for (Index b = 0; b < nb; ++b) {
    const std::int64_t direct = ch.direct[b].size();
    rep.ledger.record({NodeId::ap(static_cast<int>(b)), NodeId::cpu(), MessageKind::kCsiDirect,
                       direct, direct, 0});
    rep.ledger.record({NodeId::ap(static_cast<int>(b)), NodeId::cpu(), MessageKind::kCsiCascade,
                       static_cast<std::int64_t>(nk) * m * ch.antennas(), direct, 0});
  }

  BeamState state = make_state(nb, ch.antennas(), nk, m);
  state.theta = initial_theta(config, m, config.seed);
  {
    const PerApMatrices heff = effective_channels(ch, state.theta);
    for (Index b = 0; b < nb; ++b) state.active[b] = mrt_block(heff[b], p_max);
  }
  refresh_receivers(state, ch, model);
  rep.initial_sum_rate = weighted_sum_rate(state, ch, weights);
  rep.initial_surrogate = surrogate_objective(state, ch, weights, model);
  monitor.start(rep.initial_surrogate);
  double prev_rate = rep.initial_sum_rate;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    IterationRecord rec;
    rec.index = it;
    state.active = centralized_active_update(state, ch, weights, p_max, opts.centralized_passes,
                                             opts.active_tol)
                       .beams;
    monitor.step(surrogate_objective(state, ch, weights, model), rec.block_surrogates, "active");
    auto receivers = [&] {
      state.u = update_u(state, ch, model);
      monitor.step(surrogate_objective(state, ch, weights, model), rec.block_surrogates, "u");
      state.omega = update_omega(state, ch, model);
      monitor.step(surrogate_objective(state, ch, weights, model), rec.block_surrogates, "omega");
    };
    receivers();
    const PassiveQuadratic pq = assemble_passive_quadratic(state, ch, weights, model);
    state.theta = solve_passive(pq, state.theta, opts.passive).theta;
    monitor.step(surrogate_objective(state, ch, weights, model), rec.block_surrogates, "theta");
    receivers();

    rec.sum_rate = weighted_sum_rate(state, ch, weights);
    rec.surrogate = rec.block_surrogates.back();
    rec.ap_power = per_ap_power(state);
    rec.theta_excess = theta_excess(state.theta);
    check_finite_record(rec);
    rep.trace.push_back(std::move(rec));
    rep.iterations_used = it;
    const double rate = rep.trace.back().sum_rate;
    if (std::abs(rate - prev_rate) < opts.eps) {
      rep.converged = true;
      break;
    }
    prev_rate = rate;
  }
  for (Index b = 0; b < nb; ++b) {
    const std::int64_t n = state.active[b].size();
    rep.ledger.record({NodeId::cpu(), NodeId::ap(static_cast<int>(b)),
                       MessageKind::kActiveBeamformer, n, n, rep.iterations_used});
  }
  if (opts.finalize_unit_modulus) {
    for (Index i = 0; i < m; ++i) {
      const double r = std::abs(state.theta(i));
      state.theta(i) = r > 0.0 ? state.theta(i) / r : Complex(1.0, 0.0);
    }
  }
  rep.final_sum_rate = weighted_sum_rate(state, ch, weights);
  rep.max_surrogate_decrease = monitor.max_drop();
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(state), std::move(rep)};
}

/// One-shot local construction evaluated with the coherent SINR.
inline std::pair<BeamState, SolveReport> one_shot(MethodId method, const ScenarioConfig& config,
                                                  const ChannelSet& ch) {
  const RVector weights = Eigen::Map<const RVector>(config.rate_weights.data(), config.num_users);
  const double p_max = p_max_mw(config);
  BeamState state = make_state(ch.num_aps(), ch.antennas(), ch.num_users(), ch.ris_elements());
  state.active = method == MethodId::kZfNoRis ? zf_beamformers(ch, p_max) : mrt_beamformers(ch, p_max);
  const ChannelSet bare = without_ris(ch);
  SolveReport rep;
  rep.method = to_string(method);
  rep.initial_sum_rate = rep.final_sum_rate = weighted_sum_rate(state, bare, weights);
  rep.converged = true;
  return {std::move(state), std::move(rep)};
}

/// Random unit-modulus RIS vector tied to the channel seed, so every method
/// evaluated on one realization sees the same phases.
inline CVector random_ris_phases(std::uint64_t channel_seed, Index m) {
  auto eng = make_engine(channel_seed, Stream::kRandomTheta, 0);
  return random_phases(eng, m);
}

inline std::pair<BeamState, SolveReport> run_baseline(MethodId method, const ScenarioConfig& config,
                                                      const ChannelSet& ch, const SolveOptions& opts,
                                                      std::optional<std::uint64_t> channel_seed = {}) {
  const std::uint64_t seed = channel_seed.value_or(config.seed);
  switch (method) {
    case MethodId::kPdWithRis:
      return run_partially_distributed(config, ch, opts, {to_string(method), true, std::nullopt});
    case MethodId::kCentralizedWithRis:
      return run_centralized(config, ch, opts);
    case MethodId::kPdRandomRis:
      return run_partially_distributed(config, ch, opts,
                                       {to_string(method), false, random_ris_phases(seed, ch.ris_elements())});
    case MethodId::kPdNoRis:
      return run_partially_distributed(config, without_ris(ch), opts,
                                       {to_string(method), false, CVector::Ones(ch.ris_elements())});
    case MethodId::kZfNoRis:
    case MethodId::kMrtNoRis:
      return one_shot(method, config, ch);
  }
  throw DomainError("run_baseline: unknown method");
}

}  // namespace riscf
