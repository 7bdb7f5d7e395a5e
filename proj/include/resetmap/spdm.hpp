// spdm.hpp — SPDM evolution engine: exact unitary steps, reset specifications
// (general R/K plus the RI and EC presets), the exact affine stroboscopic map
// V[n+1] = D(tau) V[n] + C(tau), and a brute-force stroboscopic simulator that
// serves as the oracle for the map.

#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "resetmap/errors.hpp"
#include "resetmap/linalg.hpp"
#include "resetmap/model.hpp"

namespace resetmap {

struct SPDM {
  ComplexMatrix matrix;  // rho_{ab} = <a†_a a_b>
  Statistics statistics = Statistics::fermion;

  int dim() const { return static_cast<int>(matrix.rows()); }

  // Hermiticity and statistics-dependent eigenvalue bounds.
  void validate(double herm_tol = 1e-10, double eig_tol = 1e-9) const {
    const double scale = std::max(max_abs(matrix), 1.0);
    if (max_abs(matrix - matrix.adjoint()) > herm_tol * scale) {
      throw NotHermitianError("SPDM is not Hermitian within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (matrix + matrix.adjoint()),
                                                    Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo < -eig_tol) throw Error("SPDM has a negative occupation eigenvalue");
    if (statistics == Statistics::fermion && hi > 1.0 + eig_tol) {
      throw Error("fermionic SPDM eigenvalue exceeds 1");
    }
  }
};

// One unitary step in the SPDM component convention,
// rho'_{ab} = sum U*_{aa'} U_{bb'} rho_{a'b'},  i.e.  rho' = conj(U) rho U^T.
inline SPDM unitary_step(const SPDM& rho, const ComplexMatrix& u) {
  if (u.rows() != u.cols() || u.rows() != rho.matrix.rows()) {
    throw DimensionMismatchError("propagator/SPDM dimension mismatch");
  }
  const ComplexMatrix gram = u.adjoint() * u;
  if (max_abs(gram - ComplexMatrix::Identity(u.rows(), u.cols())) > kUnitaryTol) {
    throw NonUnitaryError("propagator is not unitary within tolerance");
  }
  return {u.conjugate() * rho.matrix * u.transpose(), rho.statistics};
}

// Reset specification: the set R of overwritten index pairs with their values,
// and the kept set K enumerated in fixed row-major order over (alpha, beta).
class ResetSpec {
 public:
  struct ResetEntry {
    int alpha;
    int beta;
    Complex value;
  };

  static ResetSpec custom(int dim, const std::vector<ResetEntry>& resets) {
    ResetSpec spec;
    spec.dim_ = dim;
    spec.kept_index_.assign(static_cast<size_t>(dim) * static_cast<size_t>(dim), -1);
    std::vector<char> in_reset(spec.kept_index_.size(), 0);
    std::vector<Complex> values(spec.kept_index_.size());
    for (const auto& r : resets) {
      if (r.alpha < 0 || r.alpha >= dim || r.beta < 0 || r.beta >= dim) {
        throw ResetSpecError("reset pair index out of range");
      }
      const size_t flat = spec.flat(r.alpha, r.beta);
      if (in_reset[flat]) throw ResetSpecError("duplicate reset pair");
      in_reset[flat] = 1;
      values[flat] = r.value;
    }
    // conjugation closure: R closed under (a,b) -> (b,a) with conjugate values
    for (const auto& r : resets) {
      const size_t mirror = spec.flat(r.beta, r.alpha);
      if (!in_reset[mirror]) {
        throw ResetSpecError("reset set not closed under conjugate transposition");
      }
      if (std::abs(values[mirror] - std::conj(r.value)) > 1e-12) {
        throw ResetSpecError("reset values are not Hermitian");
      }
    }
    spec.reset_ = resets;
    spec.reset_value_ = std::move(values);
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        if (!in_reset[spec.flat(a, b)]) {
          spec.kept_index_[spec.flat(a, b)] = static_cast<int>(spec.kept_.size());
          spec.kept_.emplace_back(a, b);
        }
      }
    }
    return spec;
  }

  int dim() const { return dim_; }
  const std::vector<std::pair<int, int>>& kept_pairs() const { return kept_; }
  const std::vector<ResetEntry>& reset_entries() const { return reset_; }
  int kept_count() const { return static_cast<int>(kept_.size()); }
  int reset_count() const { return static_cast<int>(reset_.size()); }

  bool is_reset(int a, int b) const { return kept_index_[flat(a, b)] < 0; }

  // position of a kept pair in the row-major enumeration, or -1 if reset
  int kept_index(int a, int b) const { return kept_index_[flat(a, b)]; }

  // frozen value of a reset pair (zero is never stored for kept pairs, so
  // callers must check is_reset first; this is not validated here for speed)
  Complex reset_value(int a, int b) const { return reset_value_[flat(a, b)]; }

  ComplexVector kept_vector(const ComplexMatrix& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) {
      throw DimensionMismatchError("SPDM dimension does not match reset spec");
    }
    ComplexVector v(kept_count());
    for (int i = 0; i < kept_count(); ++i) {
      v(i) = rho(kept_[static_cast<size_t>(i)].first,
                 kept_[static_cast<size_t>(i)].second);
    }
    return v;
  }

  void apply(ComplexMatrix& rho) const {
    for (const auto& r : reset_) rho(r.alpha, r.beta) = r.value;
  }

 private:
  size_t flat(int a, int b) const {
    return static_cast<size_t>(a) * static_cast<size_t>(dim_) +
           static_cast<size_t>(b);
  }

  int dim_ = 0;
  std::vector<std::pair<int, int>> kept_;
  std::vector<ResetEntry> reset_;
  std::vector<int> kept_index_;
  std::vector<Complex> reset_value_;
};

// RI preset: R = all EE, SE, ES pairs; EE values from the reference block,
// coherences reset to zero; K = SS pairs only.
inline ResetSpec ri_reset_spec(const QuadraticHamiltonian& h,
                               const ComplexMatrix& env_reference) {
  const int ne = static_cast<int>(h.env_indices.size());
  if (env_reference.rows() != ne || env_reference.cols() != ne) {
    throw ResetSpecError("environment reference block has wrong dimension");
  }
  if (ne > 0 && !is_hermitian(env_reference, 1e-10)) {
    throw ResetSpecError("environment reference block is not Hermitian");
  }
  std::vector<ResetSpec::ResetEntry> resets;
  for (int i = 0; i < ne; ++i) {
    for (int j = 0; j < ne; ++j) {
      resets.push_back({h.env_indices[static_cast<size_t>(i)],
                        h.env_indices[static_cast<size_t>(j)],
                        env_reference(i, j)});
    }
  }
  for (int s : h.system_indices) {
    for (int e : h.env_indices) {
      resets.push_back({s, e, Complex(0, 0)});
      resets.push_back({e, s, Complex(0, 0)});
    }
  }
  return ResetSpec::custom(h.dim(), resets);
}

// EC preset: only the EE block is overwritten; K = SS, SE, ES pairs.
inline ResetSpec ec_reset_spec(const QuadraticHamiltonian& h,
                               const ComplexMatrix& env_reference) {
  const int ne = static_cast<int>(h.env_indices.size());
  if (env_reference.rows() != ne || env_reference.cols() != ne) {
    throw ResetSpecError("environment reference block has wrong dimension");
  }
  if (ne > 0 && !is_hermitian(env_reference, 1e-10)) {
    throw ResetSpecError("environment reference block is not Hermitian");
  }
  std::vector<ResetSpec::ResetEntry> resets;
  for (int i = 0; i < ne; ++i) {
    for (int j = 0; j < ne; ++j) {
      resets.push_back({h.env_indices[static_cast<size_t>(i)],
                        h.env_indices[static_cast<size_t>(j)],
                        env_reference(i, j)});
    }
  }
  return ResetSpec::custom(h.dim(), resets);
}

struct AffineMap {
  ComplexMatrix D;  // D_{ij} = U*_{a_i a_j} U_{b_i b_j}
  ComplexVector C;  // C_i = sum_{(a',b') in R} U*_{a_i a'} U_{b_i b'} rho0_{a'b'}
  double tau = 0.0;
};

inline AffineMap build_affine_map(const QuadraticHamiltonian& h,
                                  const ResetSpec& spec, double tau) {
  if (!(tau > 0)) throw GridError("build_affine_map requires tau > 0");
  if (spec.dim() != h.dim()) {
    throw DimensionMismatchError("reset spec dimension does not match model");
  }
  const ComplexMatrix u = Propagator(h.matrix).at(tau);
  const int nk = spec.kept_count();
  AffineMap map;
  map.tau = tau;
  map.D.resize(nk, nk);
  map.C = ComplexVector::Zero(nk);
  const auto& kept = spec.kept_pairs();
  for (int i = 0; i < nk; ++i) {
    const auto [ai, bi] = kept[static_cast<size_t>(i)];
    for (int j = 0; j < nk; ++j) {
      const auto [aj, bj] = kept[static_cast<size_t>(j)];
      map.D(i, j) = std::conj(u(ai, aj)) * u(bi, bj);
    }
    for (const auto& r : spec.reset_entries()) {
      map.C(i) += std::conj(u(ai, r.alpha)) * u(bi, r.beta) * r.value;
    }
  }
  return map;
}

struct StepTrace {
  std::vector<double> times;               // t_n = n tau
  std::vector<ComplexVector> kept_history; // V[n]
  std::vector<ComplexMatrix> snapshots;    // full SPDMs, only when requested
};

inline StepTrace iterate_map(const AffineMap& map, const ComplexVector& v0,
                             int n_steps) {
  if (v0.size() != map.D.rows()) {
    throw DimensionMismatchError("kept vector does not match affine map");
  }
  StepTrace trace;
  trace.times.reserve(static_cast<size_t>(n_steps) + 1);
  trace.kept_history.reserve(static_cast<size_t>(n_steps) + 1);
  ComplexVector v = v0;
  trace.times.push_back(0.0);
  trace.kept_history.push_back(v);
  for (int n = 1; n <= n_steps; ++n) {
    v = map.D * v + map.C;
    trace.times.push_back(static_cast<double>(n) * map.tau);
    trace.kept_history.push_back(v);
  }
  return trace;
}

// Full-SPDM stroboscopic simulator: evolve unitarily for tau, overwrite the
// R entries, repeat. This is the oracle the affine map is checked against.
inline StepTrace brute_force_stroboscopic(const QuadraticHamiltonian& h,
                                          const ResetSpec& spec,
                                          const SPDM& rho_init, double tau,
                                          int n_steps,
                                          bool keep_snapshots = false) {
  if (spec.dim() != h.dim() || rho_init.dim() != h.dim()) {
    throw DimensionMismatchError("model, reset spec and SPDM dimensions differ");
  }
  const ComplexMatrix u = Propagator(h.matrix).at(tau);
  StepTrace trace;
  ComplexMatrix rho = rho_init.matrix;
  trace.times.push_back(0.0);
  trace.kept_history.push_back(spec.kept_vector(rho));
  if (keep_snapshots) trace.snapshots.push_back(rho);
  for (int n = 1; n <= n_steps; ++n) {
    rho = u.conjugate() * rho * u.transpose();
    spec.apply(rho);
    trace.times.push_back(static_cast<double>(n) * tau);
    trace.kept_history.push_back(spec.kept_vector(rho));
    if (keep_snapshots) trace.snapshots.push_back(rho);
  }
  return trace;
}

}  // namespace resetmap
