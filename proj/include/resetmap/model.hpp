// model.hpp — quadratic Hamiltonians with a system/environment partition,
// the single-level + semi-infinite tight-binding chain, and bath spectral data.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "resetmap/errors.hpp"
#include "resetmap/linalg.hpp"

namespace resetmap {

enum class Statistics { fermion, boson };

struct QuadraticHamiltonian {
  ComplexMatrix matrix;              // Hermitian single-particle matrix M
  std::vector<int> system_indices;   // ordered S
  std::vector<int> env_indices;      // ordered E
  Statistics statistics = Statistics::fermion;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

inline QuadraticHamiltonian build_general(const ComplexMatrix& m,
                                          std::vector<int> system_indices,
                                          std::vector<int> env_indices,
                                          Statistics statistics =
                                              Statistics::fermion) {
  const int n = static_cast<int>(m.rows());
  std::vector<char> seen(static_cast<size_t>(n), 0);
  auto mark = [&](const std::vector<int>& idx, const char* name) {
    for (int i : idx) {
      if (i < 0 || i >= n) {
        throw PartitionError(std::string(name) + " index out of range");
      }
      if (seen[static_cast<size_t>(i)]) {
        throw PartitionError("overlapping or repeated partition index " +
                             std::to_string(i));
      }
      seen[static_cast<size_t>(i)] = 1;
    }
  };
  mark(system_indices, "system");
  mark(env_indices, "environment");
  for (int i = 0; i < n; ++i) {
    if (!seen[static_cast<size_t>(i)]) {
      throw PartitionError("partition does not cover index " + std::to_string(i));
    }
  }
  return {symmetrized(m), std::move(system_indices), std::move(env_indices),
          statistics};
}

// Single level of energy omega0 coupled with strength t_c to the first site
// of an open tight-binding chain with hopping J (bath truncated to n_bath
// sites). Finite-chain results are only trusted for evolved times
// t <~ N_b/(2J), the ballistic revival time.
inline QuadraticHamiltonian build_single_level_chain(double omega0, double hopping,
                                                     double coupling, int n_bath,
                                                     Statistics statistics =
                                                         Statistics::fermion) {
  if (n_bath < 2) throw PartitionError("chain needs at least 2 bath sites");
  if (!(hopping > 0)) throw PartitionError("chain hopping J must be positive");
  const int n = n_bath + 1;
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(0, 0) = omega0;
  m(0, 1) = m(1, 0) = coupling;
  for (int j = 1; j < n_bath; ++j) {
    m(j, j + 1) = m(j + 1, j) = -hopping;
  }
  std::vector<int> env(static_cast<size_t>(n_bath));
  for (int j = 0; j < n_bath; ++j) env[static_cast<size_t>(j)] = j + 1;
  return {std::move(m), {0}, std::move(env), statistics};
}

// Bath eigenmode data for a single-system-level model: M_EE |k> = omega_k |k>
// and couplings g_k = M_{0k} rotated into the bath eigenbasis.
struct BathSpectrum {
  RealVector mode_energies;   // omega_k, ascending
  ComplexVector couplings;    // g_k
  double band_min = 0.0;
  double band_max = 0.0;
  ComplexMatrix env_eigenvectors;  // columns |k> in the site basis

  double coupling_weight() const { return couplings.squaredNorm(); }
};

inline ComplexMatrix env_block(const QuadraticHamiltonian& h) {
  const int ne = static_cast<int>(h.env_indices.size());
  ComplexMatrix mee(ne, ne);
  for (int i = 0; i < ne; ++i) {
    for (int j = 0; j < ne; ++j) {
      mee(i, j) = h.matrix(h.env_indices[static_cast<size_t>(i)],
                           h.env_indices[static_cast<size_t>(j)]);
    }
  }
  return mee;
}

inline BathSpectrum bath_spectrum(const QuadraticHamiltonian& h) {
  if (h.system_indices.size() != 1) {
    throw MultiLevelSystemError("bath_spectrum requires a single system level");
  }
  const int s = h.system_indices[0];
  const int ne = static_cast<int>(h.env_indices.size());
  HermitianEigen ee = eig_hermitian(env_block(h));
  ComplexVector site_couplings(ne);
  for (int i = 0; i < ne; ++i) {
    site_couplings(i) = h.matrix(s, h.env_indices[static_cast<size_t>(i)]);
  }
  // g_k = sum_x M_{0x} <x|k>
  ComplexVector g = ee.eigenvectors.transpose() * site_couplings;
  BathSpectrum spec;
  spec.band_min = ne > 0 ? ee.eigenvalues(0) : 0.0;
  spec.band_max = ne > 0 ? ee.eigenvalues(ne - 1) : 0.0;
  spec.mode_energies = std::move(ee.eigenvalues);
  spec.couplings = std::move(g);
  spec.env_eigenvectors = std::move(ee.eigenvectors);
  return spec;
}

// Gaussian-broadened J(omega) = sum_k |g_k|^2 N(omega; omega_k, sigma).
inline double spectral_density(const BathSpectrum& spec, double omega,
                               double sigma) {
  if (!(sigma > 0)) throw GridError("spectral_density broadening must be > 0");
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  double out = 0.0;
  for (Eigen::Index k = 0; k < spec.mode_energies.size(); ++k) {
    const double d = (omega - spec.mode_energies(k)) / sigma;
    out += std::norm(spec.couplings(k)) * norm * std::exp(-0.5 * d * d);
  }
  return out;
}

// Occupation profile n(omega), evaluated at mode energies at construction
// time of reset states and then frozen.
struct OccupationProfile {
  enum class Kind { empty, fermi_dirac, tabulated };

  Kind kind = Kind::empty;
  double beta = 0.0;
  double mu = 0.0;
  std::vector<double> tab_omegas;  // ascending, for linear interpolation
  std::vector<double> tab_values;

  static OccupationProfile empty() { return {}; }

  static OccupationProfile fermi_dirac(double beta, double mu) {
    OccupationProfile p;
    p.kind = Kind::fermi_dirac;
    p.beta = beta;
    p.mu = mu;
    return p;
  }

  static OccupationProfile tabulated(std::vector<double> omegas,
                                     std::vector<double> values) {
    if (omegas.size() != values.size() || omegas.empty()) {
      throw GridError("tabulated occupation needs matching nonempty grids");
    }
    OccupationProfile p;
    p.kind = Kind::tabulated;
    p.tab_omegas = std::move(omegas);
    p.tab_values = std::move(values);
    return p;
  }

  double value(double omega) const {
    switch (kind) {
      case Kind::empty:
        return 0.0;
      case Kind::fermi_dirac: {
        const double x = beta * (omega - mu);
        // guard exp overflow; limits are exactly 0 / 1
        if (x > 700.0) return 0.0;
        if (x < -700.0) return 1.0;
        return 1.0 / (std::exp(x) + 1.0);
      }
      case Kind::tabulated: {
        if (omega <= tab_omegas.front()) return tab_values.front();
        if (omega >= tab_omegas.back()) return tab_values.back();
        const auto it = std::upper_bound(tab_omegas.begin(), tab_omegas.end(), omega);
        const size_t j = static_cast<size_t>(it - tab_omegas.begin());
        const double w = (omega - tab_omegas[j - 1]) / (tab_omegas[j] - tab_omegas[j - 1]);
        return (1.0 - w) * tab_values[j - 1] + w * tab_values[j];
      }
    }
    return 0.0;
  }
};

inline RealVector mode_occupations(const BathSpectrum& spec,
                                   const OccupationProfile& occ,
                                   Statistics statistics = Statistics::fermion) {
  RealVector n(spec.mode_energies.size());
  for (Eigen::Index k = 0; k < n.size(); ++k) {
    n(k) = occ.value(spec.mode_energies(k));
    if (statistics == Statistics::fermion && (n(k) < 0.0 || n(k) > 1.0)) {
      throw GridError("fermionic occupation outside [0,1]");
    }
    if (statistics == Statistics::boson && n(k) < 0.0) {
      throw GridError("bosonic occupation must be nonnegative");
    }
  }
  return n;
}

// Reference environment block in the site basis for mode occupations n_k.
// The SPDM rho_{ab} = <a†_a a_b> transforms with the conjugate basis matrix,
// so a block that is diag(n_k) in the eigenbasis reads conj(W) diag(n) W^T here.
inline ComplexMatrix env_reference_block(const BathSpectrum& spec,
                                         const RealVector& occupations) {
  if (occupations.size() != spec.mode_energies.size()) {
    throw DimensionMismatchError("occupation vector does not match mode count");
  }
  return spec.env_eigenvectors.conjugate() *
         occupations.asDiagonal().toDenseMatrix().cast<Complex>() *
         spec.env_eigenvectors.transpose();
}

inline ComplexMatrix env_reference_block(const QuadraticHamiltonian& h,
                                         const OccupationProfile& occ) {
  const BathSpectrum spec = bath_spectrum(h);
  return env_reference_block(spec, mode_occupations(spec, occ, h.statistics));
}

}  // namespace resetmap
