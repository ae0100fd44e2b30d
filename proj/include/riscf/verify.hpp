#pragma once

#include <riscf/active_bf.hpp>
#include <riscf/baselines.hpp>
#include <riscf/channel.hpp>
#include <riscf/orchestrator.hpp>
#include <riscf/passive_bf.hpp>
#include <riscf/rng.hpp>
#include <riscf/signaling.hpp>
#include <riscf/wmmse.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace riscf {

/// Random state: feasible beams at a random power fraction, theta in the
/// unit ball, arbitrary u, positive omega, coupling on the per-user simplex.
inline BeamState random_state(const ChannelSet& ch, double p_max, std::mt19937_64& eng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  BeamState s = make_state(ch.num_aps(), ch.antennas(), ch.num_users(), ch.ris_elements());
  for (auto& f : s.active) {
    f = circular_gaussian(eng, ch.antennas(), ch.num_users(), 1.0);
    f *= std::sqrt(unif(eng) * p_max) / f.norm();
  }
  s.theta = random_phases(eng, ch.ris_elements());
  for (Index i = 0; i < s.theta.size(); ++i) s.theta(i) *= unif(eng);
  // Receive scalars on the scale of 1/|signal| so both MSE terms matter.
  const CMatrix coh = coherent_gains(link_gains(s, ch));
  const CVector g = circular_gaussian(eng, ch.num_users(), 1, 1.0);
  for (Index k = 0; k < ch.num_users(); ++k) {
    const double mag = std::abs(coh(k, k));
    s.u(k) = g(k) / (mag > 0.0 ? mag : 1.0);
    s.omega(k) = 0.2 + 2.0 * unif(eng);
  }
  for (Index k = 0; k < ch.num_users(); ++k) {
    double sum = 0.0;
    for (Index b = 0; b < ch.num_aps(); ++b) sum += (s.coupling(b, k) = unif(eng));
    s.coupling.col(k) /= sum;
  }
  return s;
}

inline double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

/// h + q^H theta by an explicit scalar loop over the raw links, independent of
/// the cascade matrices.
inline CVector effective_channel_loop(const ChannelSet& ch, Index b, Index k, const CVector& theta) {
  const Index nt = ch.antennas(), m = ch.ris_elements();
  CVector out(nt);
  for (Index n = 0; n < nt; ++n) {
    Complex acc = ch.direct[b](n, k);
    for (Index i = 0; i < m; ++i)
      acc += theta(i) * ch.ris_user[k](i) * std::conj(ch.ap_ris[b](i, n));
    out(n) = acc;
  }
  return out;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {
inline std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}
}  // namespace detail

/// Worst deviation of the cascade algebra from the loop oracle.
inline double cascade_deviation(const ChannelSet& ch, int num_theta, std::mt19937_64& eng) {
  double dev = 0.0;
  for (int t = 0; t < num_theta; ++t) {
    CVector theta = circular_gaussian(eng, ch.ris_elements(), 1, 1.0);
    for (Index b = 0; b < ch.num_aps(); ++b)
      for (Index k = 0; k < ch.num_users(); ++k)
        dev = std::max(dev, max_abs_diff(effective_channel(ch.direct[b].col(k), ch.cascade[b][k], theta),
                                         effective_channel_loop(ch, b, k, theta)));
  }
  return dev;
}

/// Worst relative gap between the stored quadratic models and direct MSE
/// evaluation, over per-AP and coherent forms of both the active and passive
/// blocks.
inline double quadratic_model_gap(const ChannelSet& ch, const RVector& weights, double p_max,
                                  int num_states, std::mt19937_64& eng) {
  double gap = 0.0;
  for (int t = 0; t < num_states; ++t) {
    BeamState s = random_state(ch, p_max, eng);
    for (MseModel model : {MseModel::kPerAp, MseModel::kCoherent}) {
      const PassiveQuadratic pq = assemble_passive_quadratic(s, ch, weights, model);
      gap = std::max(gap, rel_gap(passive_objective(pq, s.theta) + pq.constant,
                                  weighted_mse_sum(s, ch, weights, model)));
    }
    for (Index b = 0; b < ch.num_aps(); ++b) {
      BeamState only = s;
      for (Index o = 0; o < ch.num_aps(); ++o)
        if (o != b) only.active[o].setZero();
      const LocalQuadratic lq = assemble_local_quadratic(b, s, ch, weights);
      gap = std::max(gap, rel_gap(local_objective(lq, s.active[b]),
                                  weighted_mse_sum(only, ch, weights, MseModel::kPerAp)));
      const LocalQuadratic cq = coherent_block_quadratic(b, s, ch, weights);
      gap = std::max(gap, rel_gap(local_objective(cq, s.active[b]),
                                  weighted_mse_sum(s, ch, weights, MseModel::kCoherent)));
    }
  }
  return gap;
}

struct KktSummary {
  double max_power_ratio = 0.0;       // power / p_max over every solve
  double max_active_power_gap = 0.0;  // |power - p_max| / p_max where lambda > 0
  double max_residual = 0.0;          // relative stationarity residual
  int active_cases = 0;
};

inline void accumulate_kkt(KktSummary& out, const LocalSolution& sol, double p_max) {
  const double power = sol.beams.squaredNorm();
  out.max_power_ratio = std::max(out.max_power_ratio, power / p_max);
  out.max_residual = std::max(out.max_residual, sol.diagnostics.kkt_residual);
  if (sol.diagnostics.multiplier > 0.0) {
    ++out.active_cases;
    out.max_active_power_gap = std::max(out.max_active_power_gap, std::abs(power - p_max) / p_max);
  }
}

/// Local solves on random states; half of them get a tiny p_max so that the
/// unconstrained minimizer is also exercised.
inline KktSummary kkt_check(const ChannelSet& ch, const RVector& weights, double p_max,
                            int num_states, double tol, std::mt19937_64& eng) {
  KktSummary out;
  for (int t = 0; t < num_states; ++t) {
    const BeamState s = random_state(ch, p_max, eng);
    const double cap = (t % 2 == 0) ? p_max : p_max * 1e3;
    for (Index b = 0; b < ch.num_aps(); ++b) {
      accumulate_kkt(out, solve_local_beamformer(assemble_local_quadratic(b, s, ch, weights), cap, tol), cap);
      accumulate_kkt(out, solve_local_beamformer(coherent_block_quadratic(b, s, ch, weights), cap, tol), cap);
    }
  }
  return out;
}

/// max_k |omega_k mse_k - 1| after the receiver update.
inline double fixed_point_gap(BeamState s, const ChannelSet& ch, MseModel model) {
  refresh_receivers(s, ch, model);
  const RVector m = mse_all(s, ch, model);
  double gap = 0.0;
  for (Index k = 0; k < m.size(); ++k) gap = std::max(gap, std::abs(s.omega(k) * m(k) - 1.0));
  return gap;
}

/// Single-user capacity with the RIS phase chosen from a uniform grid.
inline double single_user_capacity_oracle(const ChannelSet& ch, double p_max, int grid) {
  double best = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double phi = 2.0 * M_PI * g / grid;
    CVector theta = CVector::Constant(ch.ris_elements(), std::polar(1.0, phi));
    const CVector h = effective_channel(ch.direct[0].col(0), ch.cascade[0][0], theta);
    best = std::max(best, std::log2(1.0 + p_max * h.squaredNorm() / ch.noise(0)));
  }
  return best;
}

inline ScenarioConfig single_user_config() {
  ScenarioConfig c;
  c.num_aps = 1;
  c.num_users = 1;
  c.ris_elements = 1;
  c.ap_positions = {{60.0, -50.0}};
  c.rate_weights = {1.0};
  return c;
}

/// The invariant suite behind the `verify` command. Sizes are kept small so
/// it runs in seconds.
inline std::vector<CheckResult> run_invariant_suite(std::uint64_t seed = 1) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      add(name, false, std::string("exception: ") + e.what());
    }
  };
  const ScenarioConfig cfg;
  const RVector weights = RVector::Ones(cfg.num_users);
  const double p_max = p_max_mw(cfg);
  auto eng = make_engine(seed, Stream::kTest, 7);

  guarded("channel: dBm and path-loss conversions", [&] {
    const bool ok = dbm_to_linear(20.0) == 100.0 && std::abs(dbm_to_linear(-70.0) - 1e-7) < 1e-22 &&
                    std::abs(pathloss_db(10.0, 2.2, -32.0, 1.0) + 54.0) < 1e-12 &&
                    pathloss_db(1.0, 3.6, -32.0, 1.0) == -32.0;
    add("channel: dBm and path-loss conversions", ok, "");
  });
  guarded("channel: cascade consistency", [&] {
    const ChannelSet ch = generate_channels(cfg, seed);
    const double dev = cascade_deviation(ch, 10, eng);
    add("channel: cascade consistency", dev <= 1e-12, "max dev " + detail::sci(dev));
  });
  guarded("channel: seed determinism", [&] {
    add("channel: seed determinism", generate_channels(cfg, seed) == generate_channels(cfg, seed), "");
  });
  guarded("wmmse: quadratic models match direct MSE", [&] {
    const ChannelSet ch = generate_channels(cfg, seed);
    const double gap = quadratic_model_gap(ch, weights, p_max, 10, eng);
    add("wmmse: quadratic models match direct MSE", gap <= 1e-9, "max rel gap " + detail::sci(gap));
  });
  guarded("wmmse: omega * mse = 1 after receiver update", [&] {
    const ChannelSet ch = generate_channels(cfg, seed);
    double gap = 0.0;
    for (int t = 0; t < 10; ++t) {
      const BeamState s = random_state(ch, p_max, eng);
      gap = std::max({gap, fixed_point_gap(s, ch, MseModel::kPerAp),
                      fixed_point_gap(s, ch, MseModel::kCoherent)});
    }
    add("wmmse: omega * mse = 1 after receiver update", gap <= 1e-10, "max gap " + detail::sci(gap));
  });
  guarded("wmmse: single-AP surrogate equals ln2 * rate", [&] {
    ScenarioConfig c1 = cfg;
    c1.num_aps = 1;
    c1.ap_positions = {{60.0, -50.0}};
    const ChannelSet ch = generate_channels(c1, seed);
    double gap = 0.0;
    for (int t = 0; t < 10; ++t) {
      BeamState s = random_state(ch, p_max, eng);
      s.coupling.setOnes();
      refresh_receivers(s, ch, MseModel::kPerAp);
      gap = std::max(gap, std::abs(surrogate_objective(s, ch, weights) -
                                   std::log(2.0) * weighted_sum_rate(s, ch, weights)));
    }
    add("wmmse: single-AP surrogate equals ln2 * rate", gap <= 1e-8, "max gap " + detail::sci(gap));
  });
  guarded("active: feasibility and KKT", [&] {
    const ChannelSet ch = generate_channels(cfg, seed);
    const KktSummary k = kkt_check(ch, weights, p_max, 6, 1e-12, eng);
    const bool ok = k.max_power_ratio <= 1.0 + 1e-9 && k.max_active_power_gap <= 1e-6 &&
                    k.max_residual <= 1e-8;
    add("active: feasibility and KKT", ok,
        "power ratio " + detail::sci(k.max_power_ratio) + ", active gap " +
            detail::sci(k.max_active_power_gap) + ", residual " + detail::sci(k.max_residual));
  });
  guarded("passive: solution stays in the unit ball and does not increase the objective", [&] {
    const ChannelSet ch = generate_channels(cfg, seed);
    bool ok = true;
    for (int t = 0; t < 4; ++t) {
      const BeamState s = random_state(ch, p_max, eng);
      const PassiveQuadratic q = assemble_passive_quadratic(s, ch, weights);
      const PassiveSolution sol = solve_passive(q, s.theta);
      ok = ok && theta_excess(sol.theta) <= 1e-12 &&
           passive_objective(q, sol.theta) <= passive_objective(q, s.theta) + 1e-12 * std::abs(q.constant);
    }
    add("passive: solution stays in the unit ball and does not increase the objective", ok, "");
  });
  guarded("orchestrator: monotone surrogate, ledger formula, determinism", [&] {
    const ChannelSet ch = generate_channels(cfg, seed);
    SolveOptions o1 = solve_options(cfg);
    SolveOptions o3 = o1;
    o3.ap_workers = 3;
    const auto [s1, r1] = run_partially_distributed(cfg, ch, o1);
    const auto [s3, r3] = run_partially_distributed(cfg, ch, o3);
    const std::int64_t formula = signaling_formula(cfg.num_aps, cfg.antennas_per_ap, cfg.num_users,
                                                   cfg.ris_elements, r1.iterations_used);
    const bool ok = r1.max_surrogate_decrease <= 1e-8 && r1.ledger.total_paper_symbols() == formula &&
                    s1 == s3 && r1.same_result(r3);
    add("orchestrator: monotone surrogate, ledger formula, determinism", ok,
        std::to_string(r1.iterations_used) + " iterations, ledger " +
            std::to_string(r1.ledger.total_paper_symbols()) + " vs formula " + std::to_string(formula));
  });
  guarded("orchestrator: overhead formula at the defaults", [&] {
    add("orchestrator: overhead formula at the defaults", signaling_formula(5, 8, 4, 100, 10) == 3000, "");
  });
  guarded("orchestrator: single-user run reaches the phase-aligned capacity", [&] {
    const ScenarioConfig c = single_user_config();
    const ChannelSet ch = generate_channels(c, seed);
    const auto [s, r] = run_partially_distributed(c, ch, solve_options(c));
    const double oracle = single_user_capacity_oracle(ch, p_max_mw(c), 10000);
    add("orchestrator: single-user run reaches the phase-aligned capacity",
        std::abs(r.final_sum_rate - oracle) <= 1e-3,
        "rate " + std::to_string(r.final_sum_rate) + " vs oracle " + std::to_string(oracle));
  });
  guarded("baselines: power feasibility and zero-forcing nulls", [&] {
    const ChannelSet ch = generate_channels(cfg, seed);
    const PerApMatrices zf = zf_beamformers(ch, p_max);
    const PerApMatrices mrt = mrt_beamformers(ch, p_max);
    double leak = 0.0, power = 0.0;
    for (Index b = 0; b < ch.num_aps(); ++b) {
      power = std::max({power, zf[b].squaredNorm() / p_max, mrt[b].squaredNorm() / p_max});
      for (Index k = 0; k < ch.num_users(); ++k)
        for (Index j = 0; j < ch.num_users(); ++j)
          if (j != k)
            leak = std::max(leak, std::abs(ch.direct[b].col(k).dot(zf[b].col(j))) /
                                      (ch.direct[b].col(k).norm() * zf[b].col(j).norm()));
    }
    add("baselines: power feasibility and zero-forcing nulls", leak <= 1e-10 && power <= 1.0 + 1e-9,
        "leak " + detail::sci(leak));
  });
  return out;
}

}  // namespace riscf
