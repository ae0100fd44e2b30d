#pragma once

#include <riscf/channel.hpp>
#include <riscf/error.hpp>
#include <riscf/linalg.hpp>
#include <riscf/wmmse.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace riscf {

/// Per-AP quadratic  sum_k f_k^H A f_k - 2 Re{v_k^H f_k} + c.
///
/// The full N_t K x N_t K Hessian is I_K (x) A, so only the N_t x N_t block is
/// stored. `linear` is N_t x K with column k = v_{b,k}.
struct LocalQuadratic {
  CMatrix hessian;
  CMatrix linear;
  double constant = 0.0;
};

struct ActiveSolveDiagnostics {
  double multiplier = 0.0;
  int bisection_iterations = 0;
  double power_used = 0.0;
  double kkt_residual = 0.0;
};

struct LocalSolution {
  CMatrix beams;  // N_t x K
  ActiveSolveDiagnostics diagnostics;
};

inline double local_objective(const LocalQuadratic& q, const CMatrix& f) {
  require_dims(f.rows() == q.hessian.rows() && f.cols() == q.linear.cols(),
               "local_objective: beamformer shape mismatch");
  double val = q.constant;
  for (Index k = 0; k < f.cols(); ++k) {
    val += std::real(f.col(k).dot(q.hessian * f.col(k)));
    val -= 2.0 * std::real(q.linear.col(k).dot(f.col(k)));
  }
  return val;
}

/// A = sum_k hess_coeff_k h~_k h~_k^H and v_k = lin_coeff_k h~_k from one AP's
/// effective channels. This is all an AP needs to run its local update.
inline LocalQuadratic local_quadratic(const CMatrix& heff_b, const RVector& hess_coeff,
                                      const CVector& lin_coeff) {
  require_dims(hess_coeff.size() == heff_b.cols() && lin_coeff.size() == heff_b.cols(),
               "local_quadratic: coefficient length mismatch");
  LocalQuadratic q;
  q.hessian = heff_b * hess_coeff.asDiagonal() * heff_b.adjoint();
  q.hessian = (0.5 * (q.hessian + q.hessian.adjoint())).eval();
  q.linear = heff_b * lin_coeff.asDiagonal();
  return q;
}

/// Local quadratic of AP b for the per-AP weighted sum-MSE:
/// A_b = sum_k eta_k omega_k |u_k|^2 / coupling(b,k) h~ h~^H,
/// v_{b,k} = eta_k omega_k u_k h~_{b,k}, c = sum_k eta_k omega_k (1 + |u_k|^2 sigma_k^2).
inline LocalQuadratic assemble_local_quadratic(Index b, const BeamState& s, const ChannelSet& ch,
                                               const RVector& weights) {
  check_state(s, ch);
  require_dims(b >= 0 && b < ch.num_aps(), "assemble_local_quadratic: AP index out of range");
  require_dims(weights.size() == ch.num_users(), "assemble_local_quadratic: weight length mismatch");
  const Index nk = ch.num_users();
  CMatrix heff = ch.direct[b];
  for (Index k = 0; k < nk; ++k) heff.col(k) += ch.cascade[b][k].adjoint() * s.theta;

  RVector hess(nk);
  CVector lin(nk);
  double c = 0.0;
  for (Index k = 0; k < nk; ++k) {
    const double ew = weights(k) * s.omega(k);
    const double alpha = s.coupling(b, k);
    hess(k) = alpha > 0.0 ? ew * abs2(s.u(k)) / alpha : 0.0;
    lin(k) = ew * s.u(k);
    c += ew * (1.0 + abs2(s.u(k)) * ch.noise(k));
  }
  LocalQuadratic q = local_quadratic(heff, hess, lin);
  q.constant = c;
  return q;
}

/// Minimizes the local quadratic over sum_k ||f_k||^2 <= p_max.
///
/// One Hermitian eigendecomposition A = U diag(w) U^H serves every user and
/// every bisection step: f_k(lambda) = U (diag(w) + lambda I)^-1 U^H v_k. The
/// returned point is the upper end of the final bracket, so the power never
/// exceeds p_max.
inline LocalSolution solve_local_beamformer(const LocalQuadratic& q, double p_max,
                                            double tol = 1e-8) {
  const Index n = q.hessian.rows();
  require_dims(q.hessian.cols() == n && q.linear.rows() == n,
               "solve_local_beamformer: quadratic shape mismatch");
  if (!(p_max > 0.0)) throw DomainError("solve_local_beamformer: p_max must be positive");
  if (!q.hessian.allFinite() || !q.linear.allFinite())
    throw SolverError("solve_local_beamformer: non-finite quadratic");

  const double scale = std::max(q.hessian.cwiseAbs().maxCoeff(), 1e-300);
  if ((q.hessian - q.hessian.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw DomainError("solve_local_beamformer: Hessian block is not Hermitian");

  LocalSolution out;
  out.beams = CMatrix::Zero(n, q.linear.cols());
  const double v_energy = q.linear.squaredNorm();
  if (v_energy == 0.0) return out;

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(q.hessian);
  if (eig.info() != Eigen::Success) throw SolverError("solve_local_beamformer: eigensolver failed");
  RVector w = eig.eigenvalues();
  const double w_max = std::max(w.maxCoeff(), 0.0);
  if (w.minCoeff() < -1e-10 * std::max(w_max, scale))
    throw SolverError("solve_local_beamformer: Hessian block is not PSD (min eigenvalue " +
                      std::to_string(w.minCoeff()) + ")");
  w = w.cwiseMax(0.0);
  const CMatrix& u = eig.eigenvectors();
  const CMatrix t = u.adjoint() * q.linear;
  const RVector energy = t.rowwise().squaredNorm();

  auto power = [&](double lambda) {
    double p = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d = w(i) + lambda;
      if (energy(i) > 0.0) p += energy(i) / (d * d);
    }
    return p;
  };
  auto beams_at = [&](double lambda, bool pseudo) {
    RVector inv(n);
    for (Index i = 0; i < n; ++i) {
      const double d = w(i) + lambda;
      inv(i) = (pseudo && d <= 1e-12 * w_max) || d == 0.0 ? 0.0 : 1.0 / d;
    }
    return CMatrix(u * inv.asDiagonal() * t);
  };

  // lambda = 0: exists when v lies in the range of A (pseudo-inverse otherwise).
  bool zero_ok = true;
  double p0 = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (w(i) <= 1e-12 * w_max || w_max == 0.0) {
      if (energy(i) > 1e-24 * v_energy) zero_ok = false;
    } else {
      p0 += energy(i) / (w(i) * w(i));
    }
  }
  double lambda = 0.0;
  if (zero_ok && p0 <= p_max) {
    out.beams = beams_at(0.0, true);
  } else {
    double lo = 0.0;
    double hi = std::sqrt(v_energy / p_max);
    if (!(power(hi) <= p_max * (1.0 + 1e-12)))
      throw SolverError("solve_local_beamformer: bisection bracket failure");
    int it = 0;
    while (it < 200) {
      if (power(hi) >= p_max * (1.0 - tol)) break;
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      ++it;
      if (power(mid) > p_max)
        lo = mid;
      else
        hi = mid;
    }
    lambda = hi;
    out.diagnostics.bisection_iterations = it;
    out.beams = beams_at(lambda, false);
  }
  // Rounding in the back-transform can leave the power a few ulps above p_max.
  if (const double pw = out.beams.squaredNorm(); pw > p_max) out.beams *= std::sqrt(p_max / pw) * (1.0 - 1e-15);

  out.diagnostics.multiplier = lambda;
  out.diagnostics.power_used = out.beams.squaredNorm();
  double resid = 0.0;
  for (Index k = 0; k < q.linear.cols(); ++k) {
    const CVector r = q.hessian * out.beams.col(k) + lambda * out.beams.col(k) - q.linear.col(k);
    const double vn = q.linear.col(k).norm();
    resid = std::max(resid, vn > 0.0 ? r.norm() / vn : r.norm());
  }
  out.diagnostics.kkt_residual = resid;
  return out;
}

/// Exact coherent weighted sum-MSE restricted to AP b's block with every other
/// block held fixed. Hessian block A_b = sum_k eta omega |u_k|^2 h~ h~^H and
/// v_{b,j} = eta_j omega_j u_j h~_{b,j} - sum_k eta_k omega_k |u_k|^2 o_{k,j} h~_{b,k},
/// with o_{k,j} the amplitude contributed by the other APs. The constant makes
/// the model equal to the full objective, not just up to a shift.
inline LocalQuadratic coherent_block_quadratic(Index b, const BeamState& s,
                                               const PerApMatrices& heff, const CMatrix& coherent,
                                               const RVector& weights, const RVector& noise) {
  const Index nk = s.num_users();
  const CMatrix others = coherent - heff[b].adjoint() * s.active[b];
  RVector d2(nk);
  CVector d1(nk);
  double c = 0.0;
  for (Index k = 0; k < nk; ++k) {
    const double ew = weights(k) * s.omega(k);
    d2(k) = ew * abs2(s.u(k));
    d1(k) = ew * s.u(k);
    c += ew * (abs2(s.u(k)) * (others.row(k).squaredNorm() + noise(k)) -
               2.0 * std::real(std::conj(s.u(k)) * others(k, k)) + 1.0);
  }
  LocalQuadratic q = local_quadratic(heff[b], d2, d1);
  q.linear -= heff[b] * (d2.asDiagonal() * others);
  q.constant = c;
  return q;
}

inline LocalQuadratic coherent_block_quadratic(Index b, const BeamState& s, const ChannelSet& ch,
                                               const RVector& weights) {
  check_state(s, ch);
  const PerApMatrices heff = effective_channels(ch, s.theta);
  return coherent_block_quadratic(b, s, heff, coherent_gains(link_gains(s, heff)), weights,
                                  ch.noise);
}

struct CentralizedUpdate {
  PerApMatrices beams;
  std::vector<ActiveSolveDiagnostics> diagnostics;  // last sweep, one per AP
  std::vector<double> objective_after_sweep;        // coherent weighted sum-MSE
};

/// Gauss-Seidel sweeps over AP blocks on the exact coherent weighted sum-MSE.
/// Each block step is an exact minimization, so the objective never increases.
inline CentralizedUpdate centralized_active_update(const BeamState& s, const ChannelSet& ch,
                                                   const RVector& weights, double p_max,
                                                   int inner_passes = 3, double tol = 1e-8) {
  check_state(s, ch);
  const PerApMatrices heff = effective_channels(ch, s.theta);
  BeamState work = s;
  CMatrix coherent = coherent_gains(link_gains(work, heff));
  CentralizedUpdate out;
  out.diagnostics.resize(ch.num_aps());
  for (int pass = 0; pass < inner_passes; ++pass) {
    for (Index b = 0; b < ch.num_aps(); ++b) {
      const LocalQuadratic q = coherent_block_quadratic(b, work, heff, coherent, weights, ch.noise);
      LocalSolution sol = solve_local_beamformer(q, p_max, tol);
      coherent += heff[b].adjoint() * (sol.beams - work.active[b]);
      work.active[b] = std::move(sol.beams);
      out.diagnostics[b] = sol.diagnostics;
    }
    out.objective_after_sweep.push_back(weighted_mse_sum(work, ch, weights, MseModel::kCoherent));
  }
  out.beams = std::move(work.active);
  return out;
}

}  // namespace riscf
