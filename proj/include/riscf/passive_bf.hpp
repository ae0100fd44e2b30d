#pragma once

#include <riscf/channel.hpp>
#include <riscf/error.hpp>
#include <riscf/linalg.hpp>
#include <riscf/wmmse.hpp>

#include <cmath>
#include <numbers>
#include <vector>

namespace riscf {

/// theta^H Q theta - 2 Re{p^H theta} + constant, equal to sum_k eta_k omega_k mse_k(theta).
struct PassiveQuadratic {
  CMatrix Q;
  CVector p;
  double constant = 0.0;
};

struct PassiveSolveOptions {
  double tol = -1.0;  // negative: 1e-7 * sqrt(M)
  int max_iters = 2000;
  bool unit_modulus = false;
};

struct PassiveSolveDiagnostics {
  int iterations = 0;
  double final_gradient_residual = 0.0;
  std::vector<double> objective_trace;
  double lipschitz_estimate = 0.0;
};

struct PassiveSolution {
  CVector theta;
  PassiveSolveDiagnostics diagnostics;
};

/// Objective without the constant; this is what the solver minimizes.
inline double passive_objective(const PassiveQuadratic& q, const CVector& theta) {
  return std::real(theta.dot(q.Q * theta)) - 2.0 * std::real(q.p.dot(theta));
}

/// Builds Q, p and the constant. With a_{b,k,j}(theta) = d + theta^H c,
/// d = h_{b,k}^H f_{b,j}, c = q_{b,k}^H f_{b,j} (cascade times f), every
/// |a|^2 term contributes w c c^H to Q and -w c conj(d) to p, and the linear
/// part of the MSE contributes eta omega u^* c_{b,k,k} to p.
inline PassiveQuadratic assemble_passive_quadratic(const BeamState& s, const ChannelSet& ch,
                                                   const RVector& weights,
                                                   MseModel model = MseModel::kPerAp) {
  check_state(s, ch);
  require_dims(weights.size() == ch.num_users(), "assemble_passive_quadratic: weight length mismatch");
  const Index nb = ch.num_aps(), nk = ch.num_users(), m = ch.ris_elements();
  PassiveQuadratic q;
  q.p = CVector::Zero(m);

  // Columns sqrt(w) c, so Q = X X^H in one product.
  const Index groups = model == MseModel::kPerAp ? nb : 1;
  CMatrix x(m, groups * nk * nk);
  Index col = 0;
  double constant = 0.0;
  for (Index k = 0; k < nk; ++k) {
    const double ew = weights(k) * s.omega(k);
    const double uu = abs2(s.u(k));
    Complex signal_direct = 0.0;
    CVector signal_cascade = CVector::Zero(m);
    CMatrix c_sum = CMatrix::Zero(m, nk);
    CMatrix d_sum = CMatrix::Zero(1, nk);
    for (Index b = 0; b < nb; ++b) {
      const CMatrix c = ch.cascade[b][k] * s.active[b];                       // M x K
      const CMatrix d = ch.direct[b].col(k).adjoint() * s.active[b];          // 1 x K
      signal_direct += d(0, k);
      signal_cascade += c.col(k);
      if (model == MseModel::kPerAp) {
        const double alpha = s.coupling(b, k);
        const double w = alpha > 0.0 ? ew * uu / alpha : 0.0;
        x.middleCols(col, nk) = std::sqrt(w) * c;
        col += nk;
        q.p.noalias() -= w * (c * d.adjoint());
        constant += w * d.squaredNorm();
      } else {
        c_sum += c;
        d_sum += d;
      }
    }
    if (model == MseModel::kCoherent) {
      const double w = ew * uu;
      x.middleCols(col, nk) = std::sqrt(w) * c_sum;
      col += nk;
      q.p.noalias() -= w * (c_sum * d_sum.adjoint());
      constant += w * d_sum.squaredNorm();
    }
    q.p += ew * std::conj(s.u(k)) * signal_cascade;
    constant += ew * (uu * ch.noise(k) - 2.0 * std::real(std::conj(s.u(k)) * signal_direct) + 1.0);
  }
  q.Q = x * x.adjoint();
  q.Q = (0.5 * (q.Q + q.Q.adjoint())).eval();
  q.constant = constant;
  return q;
}

/// Euclidean projection onto {|theta_m| <= 1} elementwise.
inline CVector project_ball(const CVector& theta) {
  CVector out = theta;
  for (Index i = 0; i < out.size(); ++i) {
    const double r = std::abs(out(i));
    if (r > 1.0) out(i) /= r;
  }
  return out;
}

/// Power-iteration estimate of lambda_max(Q) times 1.01.
inline double lipschitz_estimate(const CMatrix& Q) {
  const Index n = Q.rows();
  if (n == 0) return 0.0;
  CVector x(n);
  for (Index i = 0; i < n; ++i)
    x(i) = std::polar(1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i + 1)),
                      2.399963229728653 * static_cast<double>(i));
  x.normalize();
  double rho = 0.0;
  for (int it = 0; it < 50; ++it) {
    CVector y = Q * x;
    const double next = std::real(x.dot(y));
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    x = y / ny;
    const bool stalled = it > 0 && std::abs(next - rho) <= 1e-6 * std::abs(next);
    rho = next;
    if (stalled) break;
  }
  // Rayleigh quotient of the final iterate.
  rho = std::max(rho, std::real(x.dot(Q * x)));
  return 1.01 * std::max(rho, 0.0);
}

/// Accelerated projected gradient on the relaxed set |theta_m| <= 1, with
/// momentum restart on objective increase. The gradient 2(Q theta - p) has
/// Lipschitz constant 2 lambda_max(Q); the step is 1/(2 L_hat) and L_hat is
/// doubled if a plain step ever fails to descend.
inline PassiveSolution solve_passive(const PassiveQuadratic& q, const CVector& theta_init,
                                     const PassiveSolveOptions& opts = {}) {
  const Index m = q.Q.rows();
  require_dims(q.Q.cols() == m && q.p.size() == m && theta_init.size() == m,
               "solve_passive: dimension mismatch");
  if (!q.Q.allFinite() || !q.p.allFinite() || !theta_init.allFinite())
    throw SolverError("solve_passive: non-finite input");
  const double tol = opts.tol > 0.0 ? opts.tol : 1e-7 * std::sqrt(static_cast<double>(m));

  PassiveSolution out;
  out.diagnostics.lipschitz_estimate = lipschitz_estimate(q.Q);
  double lip = 2.0 * out.diagnostics.lipschitz_estimate;
  if (!(lip > 0.0)) {
    const double pmax = q.p.size() ? q.p.cwiseAbs().maxCoeff() : 0.0;
    lip = pmax > 0.0 ? 2.0 * pmax : 1.0;
  }

  CVector x = project_ball(theta_init);
  CVector qx = q.Q * x;
  auto objective = [&](const CVector& v, const CVector& qv) {
    return std::real(v.dot(qv)) - 2.0 * std::real(q.p.dot(v));
  };
  auto residual = [&](const CVector& v, const CVector& qv) {
    return (v - project_ball(v - (2.0 / lip) * (qv - q.p))).norm();
  };
  double fx = objective(x, qx);
  out.diagnostics.objective_trace.push_back(fx);

  CVector y = x, qy = qx;
  double t = 1.0;
  bool momentum = false;
  double res = residual(x, qx);
  int it = 0;
  int backtracks = 0;
  while (res > tol && it < opts.max_iters) {
    ++it;
    const CVector xn = project_ball(y - (2.0 / lip) * (qy - q.p));
    const CVector qxn = q.Q * xn;
    const double fn = objective(xn, qxn);
    if (!std::isfinite(fn)) throw SolverError("solve_passive: non-finite objective");
    if (fn > fx + 1e-13 * std::max(1.0, std::abs(fx))) {
      if (momentum) {
        y = x;
        qy = qx;
        t = 1.0;
        momentum = false;
      } else if (backtracks < 60) {
        lip *= 2.0;
        ++backtracks;
      } else {
        break;
      }
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / tn;
    y = xn + beta * (xn - x);
    qy = qxn + beta * (qxn - qx);
    momentum = beta > 0.0;
    x = xn;
    qx = qxn;
    fx = std::min(fn, fx);
    t = tn;
    out.diagnostics.objective_trace.push_back(fn);
    res = residual(x, qx);
  }
  out.diagnostics.iterations = it;
  out.diagnostics.final_gradient_residual = res;
  out.theta = x;
  if (opts.unit_modulus) {
    for (Index i = 0; i < m; ++i) {
      const double r = std::abs(out.theta(i));
      out.theta(i) = r > 0.0 ? out.theta(i) / r : Complex(1.0, 0.0);
    }
  }
  return out;
}

}  // namespace riscf
