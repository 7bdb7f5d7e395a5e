// linalg.hpp — dense complex Hermitian linear algebra: eigendecomposition,
// spectral matrix exponential, and the one-cycle propagator U(t) = e^{-iMt}.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "resetmap/errors.hpp"

namespace resetmap {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Numerical tolerances, fixed in one place. Dimensions stay well below ~1000
// in every use case, so these bounds are comfortable for double precision.
inline constexpr double kHermitianTol = 1e-12;     // relative symmetry residual
inline constexpr double kReconstructTol = 1e-10;   // eigendecomposition residual
inline constexpr double kUnitaryTol = 1e-9;        // propagator unitarity check

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double rel_tol = kHermitianTol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(max_abs(m), 1.0);
  return max_abs(m - m.adjoint()) <= rel_tol * scale;
}

// (M + M†)/2 after the Hermiticity check, so downstream code sees exactly
// Hermitian data.
inline ComplexMatrix symmetrized(const ComplexMatrix& m) {
  if (!is_hermitian(m)) {
    throw NotHermitianError("matrix is not Hermitian within tolerance");
  }
  return 0.5 * (m + m.adjoint());
}

struct HermitianEigen {
  RealVector eigenvalues;       // ascending
  ComplexMatrix eigenvectors;   // unitary, columns are eigenvectors
};

inline HermitianEigen eig_hermitian(const ComplexMatrix& m) {
  const ComplexMatrix h = symmetrized(m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("Hermitian eigensolver failed to converge");
  }
  HermitianEigen out{solver.eigenvalues(), solver.eigenvectors()};
  const double scale = std::max(max_abs(h), 1.0);
  const ComplexMatrix recon = out.eigenvectors *
                              out.eigenvalues.asDiagonal() *
                              out.eigenvectors.adjoint();
  if (max_abs(recon - h) > kReconstructTol * scale) {
    throw ConvergenceError("eigendecomposition reconstruction residual too large");
  }
  return out;
}

// Cached spectral data for one Hermitian matrix; evaluates U(t) = e^{-iMt}
// and individual matrix elements for any t without re-diagonalizing.
// Immutable after construction, safe to share read-only across threads.
class Propagator {
 public:
  explicit Propagator(const ComplexMatrix& m) : eig_(eig_hermitian(m)) {}

  Eigen::Index dim() const { return eig_.eigenvalues.size(); }
  const HermitianEigen& eigen() const { return eig_; }

  ComplexVector phases(double t) const {
    return (Complex(0, -t) * eig_.eigenvalues.array().cast<Complex>()).exp();
  }

  ComplexMatrix at(double t) const {
    return eig_.eigenvectors * phases(t).asDiagonal() * eig_.eigenvectors.adjoint();
  }

  // U_{ab}(t) = sum_mu V_{a mu} e^{-i eps_mu t} V*_{b mu}
  Complex element(Eigen::Index a, Eigen::Index b, double t) const {
    check_index(a);
    check_index(b);
    return (eig_.eigenvectors.row(a).transpose().array() *
            eig_.eigenvectors.row(b).conjugate().transpose().array() *
            phases(t).array())
        .sum();
  }

  // Row a of U(t): needed for survival amplitudes and the b(tau) sums
  // without the O(N^3) full-matrix product.
  ComplexVector row(Eigen::Index a, double t) const {
    check_index(a);
    ComplexVector v = phases(t).cwiseProduct(eig_.eigenvectors.row(a).transpose());
    return eig_.eigenvectors.conjugate() * v;
  }

  // U_{ss}(t) = sum_mu |<mu|s>|^2 e^{-i eps_mu t}
  Complex survival_amplitude(Eigen::Index site, double t) const {
    check_index(site);
    const RealVector w = eig_.eigenvectors.row(site).cwiseAbs2().transpose();
    return (w.cast<Complex>().array() * phases(t).array()).sum();
  }

 private:
  void check_index(Eigen::Index i) const {
    if (i < 0 || i >= dim()) throw IndexError("site index out of range");
  }

  HermitianEigen eig_;
};

inline ComplexMatrix propagator(const ComplexMatrix& m, double t) {
  return Propagator(m).at(t);
}

inline Complex survival_amplitude(const ComplexMatrix& m, double t,
                                  Eigen::Index site) {
  return Propagator(m).survival_amplitude(site, t);
}

}  // namespace resetmap
