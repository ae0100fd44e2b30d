#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

namespace riscf {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// One N_t x K matrix per AP; column k belongs to user k.
using PerApMatrices = std::vector<CMatrix>;

inline double abs2(Complex z) { return std::norm(z); }

inline bool all_finite(const CMatrix& m) { return m.allFinite(); }

/// Largest |entry| difference between two equally shaped matrices.
template <class A, class B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace riscf
