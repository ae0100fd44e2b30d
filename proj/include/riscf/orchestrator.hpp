#pragma once

#include <riscf/active_bf.hpp>
#include <riscf/channel.hpp>
#include <riscf/error.hpp>
#include <riscf/linalg.hpp>
#include <riscf/parallel.hpp>
#include <riscf/passive_bf.hpp>
#include <riscf/rng.hpp>
#include <riscf/scenario.hpp>
#include <riscf/signaling.hpp>
#include <riscf/wmmse.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace riscf {

struct SolveOptions {
  double eps = 1e-3;
  int max_iterations = 100;
  bool finalize_unit_modulus = false;
  PassiveSolveOptions passive;
  double active_tol = 1e-12;
  int ap_workers = 1;  // threads for the AP phase
  double monotone_tol = 1e-8;
  bool strict_monotone = true;  // throw InvariantViolation on a surrogate decrease
  int centralized_passes = 3;
};

inline SolveOptions solve_options(const ScenarioConfig& c) {
  SolveOptions o;
  o.eps = c.convergence_eps;
  o.max_iterations = c.max_iterations;
  return o;
}

struct IterationRecord {
  int index = 0;
  double sum_rate = 0.0;   // bits/s/Hz, coherent SINR
  double surrogate = 0.0;  // nats, after the last block of the iteration
  RVector ap_power;
  double theta_excess = 0.0;
  std::int64_t paper_symbols = 0;
  std::int64_t actual_symbols = 0;
  std::vector<double> block_surrogates;  // R_o after every block update
};

struct SolveReport {
  std::string method;
  double initial_sum_rate = 0.0;
  double initial_surrogate = 0.0;
  std::vector<IterationRecord> trace;
  int iterations_used = 0;
  SignalingLedger ledger;
  bool converged = false;
  double final_sum_rate = 0.0;
  double wall_time = 0.0;  // seconds; excluded from equality
  double max_surrogate_decrease = 0.0;

  bool same_result(const SolveReport& o) const {
    if (method != o.method || iterations_used != o.iterations_used || converged != o.converged ||
        initial_sum_rate != o.initial_sum_rate || initial_surrogate != o.initial_surrogate ||
        final_sum_rate != o.final_sum_rate || !(ledger == o.ledger) ||
        trace.size() != o.trace.size())
      return false;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const auto& a = trace[i];
      const auto& b = o.trace[i];
      if (a.index != b.index || a.sum_rate != b.sum_rate || a.surrogate != b.surrogate ||
          a.ap_power != b.ap_power || a.theta_excess != b.theta_excess ||
          a.paper_symbols != b.paper_symbols || a.actual_symbols != b.actual_symbols ||
          a.block_surrogates != b.block_surrogates)
        return false;
    }
    return true;
  }
};

/// Full-power MRT on the effective channels with an equal split across users.
/// Zero channels get zero beams.
inline CMatrix mrt_block(const CMatrix& heff_b, double p_max) {
  CMatrix f = CMatrix::Zero(heff_b.rows(), heff_b.cols());
  const double amp = std::sqrt(p_max / static_cast<double>(heff_b.cols()));
  for (Index k = 0; k < heff_b.cols(); ++k) {
    const double n = heff_b.col(k).norm();
    if (n > 0.0) f.col(k) = amp * heff_b.col(k) / n;
  }
  return f;
}

/// Payload the CPU sends to every AP each iteration: M + 2K complex symbols.
/// u and omega are pre-scaled by the per-user coupling normalizer s_k so that
/// each AP can recover its own coupling weight from local quantities.
struct Broadcast {
  CVector u_scaled;
  RVector omega_scaled;
  CVector theta;
};

/// Broadcast for the current CPU state: s_k = sum_b r_{b,k} folded into u
/// and omega. A user no AP reaches gets s_k = 1.
inline Broadcast make_broadcast(const BeamState& state, const ChannelSet& ch, double p_max) {
  const Index nb = ch.num_aps(), nk = ch.num_users();
  const PerApMatrices heff = effective_channels(ch, state.theta);
  RMatrix r(nb, nk);
  for (Index b = 0; b < nb; ++b) r.row(b) = coupling_norms(heff[b], state.active[b], p_max).transpose();
  Broadcast msg;
  msg.u_scaled.resize(nk);
  msg.omega_scaled.resize(nk);
  for (Index k = 0; k < nk; ++k) {
    double s = r.col(k).sum();
    if (!(s > 0.0)) s = 1.0;
    msg.u_scaled(k) = state.u(k) * s;
    msg.omega_scaled(k) = state.omega(k) / s;
  }
  msg.theta = state.theta;
  return msg;
}

/// One AP: holds its local CSI and last beamformer and answers broadcasts.
class AccessPoint {
 public:
  AccessPoint(int index, CMatrix direct, std::vector<CMatrix> cascade, RVector weights,
              double p_max, double tol)
      : index_(index),
        direct_(std::move(direct)),
        cascade_(std::move(cascade)),
        weights_(std::move(weights)),
        p_max_(p_max),
        tol_(tol) {}

  int index() const { return index_; }

  CMatrix effective(const CVector& theta) const {
    CMatrix h = direct_;
    for (Index k = 0; k < h.cols(); ++k) h.col(k) += cascade_[k].adjoint() * theta;
    return h;
  }

  void start(const CVector& theta) { last_ = mrt_block(effective(theta), p_max_); }

  std::int64_t direct_symbols() const { return direct_.size(); }
  std::int64_t cascade_symbols() const {
    std::int64_t n = 0;
    for (const auto& q : cascade_) n += q.size();
    return n;
  }

  /// Local update: rebuild the quadratic from the broadcast and own coupling
  /// norms, solve it, keep and return the new beamformer.
  const CMatrix& respond(const Broadcast& msg) {
    const CMatrix heff = effective(msg.theta);
    const RVector r = coupling_norms(heff, last_, p_max_);
    const Index nk = heff.cols();
    RVector hess(nk);
    CVector lin(nk);
    for (Index k = 0; k < nk; ++k) {
      const double ew = weights_(k) * msg.omega_scaled(k);
      hess(k) = r(k) > 0.0 ? ew * abs2(msg.u_scaled(k)) / r(k) : 0.0;
      lin(k) = ew * msg.u_scaled(k);
    }
    last_ = solve_local_beamformer(local_quadratic(heff, hess, lin), p_max_, tol_).beams;
    return last_;
  }

  const CMatrix& beams() const { return last_; }

 private:
  int index_;
  CMatrix direct_;
  std::vector<CMatrix> cascade_;
  RVector weights_;
  double p_max_;
  double tol_;
  CMatrix last_;
};

inline std::vector<AccessPoint> make_access_points(const ChannelSet& ch, const RVector& weights,
                                                   double p_max, double tol) {
  std::vector<AccessPoint> aps;
  aps.reserve(ch.num_aps());
  for (Index b = 0; b < ch.num_aps(); ++b)
    aps.emplace_back(static_cast<int>(b), ch.direct[b], ch.cascade[b], weights, p_max, tol);
  return aps;
}

/// Runs fn(b) for every AP on up to `workers` threads. Each AP writes only
/// its own slot, so the result does not depend on the schedule.
template <class Fn>
void for_each_ap(Index num_aps, int workers, Fn&& fn) {
  parallel_for(static_cast<std::size_t>(num_aps), workers,
               [&](std::size_t b) { fn(static_cast<Index>(b)); });
}

/// Tracks the surrogate across block updates and enforces monotonicity.
class SurrogateMonitor {
 public:
  SurrogateMonitor(double tol, bool strict) : tol_(tol), strict_(strict) {}

  void start(double value) {
    last_ = value;
    started_ = true;
  }
  void step(double value, std::vector<double>& log, const char* block) {
    log.push_back(value);
    if (started_) {
      const double drop = last_ - value;
      max_drop_ = std::max(max_drop_, drop);
      if (strict_ && drop > tol_) {
        std::ostringstream os;
        os.precision(17);
        os << "surrogate decreased by " << drop << " after " << block << " update";
        throw InvariantViolation(os.str());
      }
    }
    last_ = value;
    started_ = true;
  }
  double max_drop() const { return max_drop_; }

 private:
  double tol_;
  bool strict_;
  double last_ = 0.0;
  bool started_ = false;
  double max_drop_ = 0.0;
};

struct RunSettings {
  std::string method = "pd_with_ris";
  bool optimize_theta = true;
  std::optional<CVector> theta_init;
};

/// Initial RIS vector: all ones unless the config asks for random phases.
inline CVector initial_theta(const ScenarioConfig& c, Index m, std::uint64_t seed) {
  if (c.theta_init == ThetaInit::kRandomPhases) {
    auto eng = make_engine(seed, Stream::kRandomTheta, 1);
    return random_phases(eng, m);
  }
  return CVector::Ones(m);
}

inline void check_finite_record(const IterationRecord& r) {
  if (!std::isfinite(r.sum_rate) || !std::isfinite(r.surrogate) || !r.ap_power.allFinite())
    throw SolverError("non-finite value in iteration " + std::to_string(r.index));
}

/// Partially distributed alternating optimization as an AP/CPU message exchange.
///
/// Setup: every AP uploads {h_{b,k}} and {q_{b,k}}. Each iteration: the CPU
/// broadcasts (u, omega, theta); all APs solve their local problem from the
/// same snapshot and return f_b; the CPU updates coupling, u, omega, theta and
/// again coupling, u, omega. Stops when |R_sum^(i) - R_sum^(i-1)| < eps or at
/// max_iterations.
inline std::pair<BeamState, SolveReport> run_partially_distributed(const ScenarioConfig& config,
                                                                   const ChannelSet& ch,
                                                                   const SolveOptions& opts,
                                                                   const RunSettings& run = {}) {
  validate(config);
  require_dims(ch.num_aps() == config.num_aps && ch.num_users() == config.num_users &&
                   ch.antennas() == config.antennas_per_ap &&
                   ch.ris_elements() == config.ris_elements,
               "run_partially_distributed: channel dimensions do not match the config");
  const auto t0 = std::chrono::steady_clock::now();
  const RVector weights = Eigen::Map<const RVector>(config.rate_weights.data(), config.num_users);
  const double p_max = p_max_mw(config);
  const Index nb = ch.num_aps(), nk = ch.num_users(), m = ch.ris_elements();
  const MseModel model = MseModel::kPerAp;

  SolveReport rep;
  rep.method = run.method;
  SurrogateMonitor monitor(opts.monotone_tol, opts.strict_monotone);

  // Setup: CSI upload.
  std::vector<AccessPoint> aps = make_access_points(ch, weights, p_max, opts.active_tol);
  for (const auto& ap : aps) {
    rep.ledger.record({NodeId::ap(ap.index()), NodeId::cpu(), MessageKind::kCsiDirect,
                       ap.direct_symbols(), ap.direct_symbols(), 0});
    rep.ledger.record({NodeId::ap(ap.index()), NodeId::cpu(), MessageKind::kCsiCascade,
                       ap.cascade_symbols(), ap.direct_symbols(), 0});
  }

  // CPU-side initial state; APs derive the same MRT start locally.
  BeamState state = make_state(nb, ch.antennas(), nk, m);
  state.theta = run.theta_init ? *run.theta_init : initial_theta(config, m, config.seed);
  require_dims(state.theta.size() == m, "run_partially_distributed: theta_init length mismatch");
  {
    const PerApMatrices heff = effective_channels(ch, state.theta);
    for (Index b = 0; b < nb; ++b) state.active[b] = mrt_block(heff[b], p_max);
  }
  for (auto& ap : aps) ap.start(state.theta);
  state.coupling = update_coupling(state, ch, p_max);
  refresh_receivers(state, ch, model);

  rep.initial_sum_rate = weighted_sum_rate(state, ch, weights);
  rep.initial_surrogate = surrogate_objective(state, ch, weights, model);
  monitor.start(rep.initial_surrogate);
  double prev_rate = rep.initial_sum_rate;

  std::vector<CMatrix> received(nb);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    IterationRecord rec;
    rec.index = it;

    // CPU -> all APs.
    const Broadcast msg = make_broadcast(state, ch, p_max);
    rep.ledger.record({NodeId::cpu(), NodeId::all_aps(), MessageKind::kBroadcast, m + 2 * nk,
                       m + 2 * nk, it});

    // AP phase: every AP reads the same snapshot.
    for_each_ap(nb, opts.ap_workers, [&](Index b) { received[b] = aps[b].respond(msg); });
    for (Index b = 0; b < nb; ++b) {
      rep.ledger.record({NodeId::ap(static_cast<int>(b)), NodeId::cpu(),
                         MessageKind::kActiveBeamformer, received[b].size(), received[b].size(), it});
      state.active[b] = received[b];
    }
    monitor.step(surrogate_objective(state, ch, weights, model), rec.block_surrogates, "active");

    // CPU phase.
    auto cpu_receivers = [&] {
      state.coupling = update_coupling(state, ch, p_max);
      monitor.step(surrogate_objective(state, ch, weights, model), rec.block_surrogates, "coupling");
      state.u = update_u(state, ch, model);
      monitor.step(surrogate_objective(state, ch, weights, model), rec.block_surrogates, "u");
      state.omega = update_omega(state, ch, model);
      monitor.step(surrogate_objective(state, ch, weights, model), rec.block_surrogates, "omega");
    };
    cpu_receivers();
    if (run.optimize_theta) {
      const PassiveQuadratic pq = assemble_passive_quadratic(state, ch, weights, model);
      state.theta = solve_passive(pq, state.theta, opts.passive).theta;
      monitor.step(surrogate_objective(state, ch, weights, model), rec.block_surrogates, "theta");
      cpu_receivers();
    }

    rec.sum_rate = weighted_sum_rate(state, ch, weights);
    rec.surrogate = rec.block_surrogates.back();
    rec.ap_power = per_ap_power(state);
    rec.theta_excess = theta_excess(state.theta);
    rec.paper_symbols = rep.ledger.paper_symbols_for_iteration(it);
    rec.actual_symbols = rep.ledger.symbols_for_iteration(it);
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

}  // namespace riscf
