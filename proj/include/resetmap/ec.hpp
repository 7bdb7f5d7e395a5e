// ec.hpp — evolving-correlation (continuous-reset) dynamics: the exact
// generator of the tau -> 0 limit on the kept component vector, the
// single-level system+coherences ODE integrated with RK4, the equivalent
// memory-kernel (Volterra) form with closed-form kernel and inhomogeneity,
// exponential rate fitting, and the stroboscopic-vs-continuous comparison.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "resetmap/errors.hpp"
#include "resetmap/linalg.hpp"
#include "resetmap/model.hpp"
#include "resetmap/spdm.hpp"

namespace resetmap {

// dV/dt = Dgen V + Cgen over the kept pairs of a reset specification.
struct ECGenerator {
  ComplexMatrix Dgen;
  ComplexVector Cgen;
};

// Exact continuous-reset generator: for kept pairs i=(alpha_i,beta_i),
//   Dgen_ij = i ( M_{alpha_j alpha_i} delta_{beta_i beta_j}
//               - delta_{alpha_i alpha_j} M_{beta_i beta_j} )
// and Cgen collects the same couplings into the frozen reset entries.
inline ECGenerator ec_generator(const QuadraticHamiltonian& h,
                                const ResetSpec& spec) {
  if (spec.dim() != h.dim()) {
    throw DimensionMismatchError("reset spec does not match model dimension");
  }
  const ComplexMatrix& m = h.matrix;
  const auto& kept = spec.kept_pairs();
  const Eigen::Index nk = static_cast<Eigen::Index>(kept.size());
  ECGenerator gen;
  gen.Dgen = ComplexMatrix::Zero(nk, nk);
  gen.Cgen = ComplexVector::Zero(nk);
  const Complex iunit(0.0, 1.0);
  const int dim = h.dim();
  for (Eigen::Index i = 0; i < nk; ++i) {
    const auto [ai, bi] = kept[static_cast<size_t>(i)];
    // column runs over source pairs (alpha', beta') with alpha' free,
    // beta' = bi, and alpha' = ai, beta' free
    for (int ap = 0; ap < dim; ++ap) {
      const Complex w = iunit * m(ap, ai);
      const int j = spec.kept_index(ap, bi);
      if (j >= 0) gen.Dgen(i, j) += w;
      else gen.Cgen(i) += spec.reset_value(ap, bi) * w;
    }
    for (int bp = 0; bp < dim; ++bp) {
      const Complex w = -iunit * m(bi, bp);
      const int j = spec.kept_index(ai, bp);
      if (j >= 0) gen.Dgen(i, j) += w;
      else gen.Cgen(i) += spec.reset_value(ai, bp) * w;
    }
  }
  return gen;
}

struct ECTrajectory {
  std::vector<double> times;
  std::vector<double> populations;  // Re rho_ss(t)
  double max_imag = 0.0;            // largest |Im rho_ss| seen (consistency)
};

// Single-level continuous-reset ODE in the bath eigenbasis:
//   dP/dt   = -i sum_k ( g_k conj(s_k) - s_k conj(g_k) )
//   ds_k/dt = -i [ Delta_k s_k + g_k ( n_k - P ) ],  Delta_k = omega0 - omega_k
// with s_k(0) = 0, integrated with classical RK4. The step must resolve the
// fastest detuning: dt * max|Delta_k| <= 0.1.
inline ECTrajectory ec_evolve_ode(const QuadraticHamiltonian& h,
                                  const OccupationProfile& occ, double p0,
                                  double t_end, double dt) {
  if (!(dt > 0) || !(t_end > 0)) throw GridError("ec_evolve_ode needs dt, t_end > 0");
  const BathSpectrum spec = bath_spectrum(h);
  const double omega0 =
      std::real(h.matrix(h.system_indices[0], h.system_indices[0]));
  const Eigen::Index nk = spec.mode_energies.size();
  RealVector delta(nk);
  for (Eigen::Index k = 0; k < nk; ++k) delta(k) = omega0 - spec.mode_energies(k);
  const double fastest = delta.cwiseAbs().maxCoeff();
  if (dt * fastest > 0.1) {
    throw StepTooLargeError("ec_evolve_ode: dt * max|Delta_k| exceeds 0.1");
  }
  const RealVector n = mode_occupations(spec, occ, h.statistics);
  const ComplexVector g = spec.couplings;
  const Complex iunit(0.0, 1.0);

  // state y = (P, s_1..s_K), P carried as complex so a generator error would
  // surface as a growing imaginary part instead of being silently discarded
  ComplexVector y = ComplexVector::Zero(nk + 1);
  y(0) = Complex(p0, 0.0);
  auto rhs = [&](const ComplexVector& v) {
    ComplexVector d(nk + 1);
    Complex dp(0.0, 0.0);
    for (Eigen::Index k = 0; k < nk; ++k) {
      dp += g(k) * std::conj(v(k + 1)) - v(k + 1) * std::conj(g(k));
      d(k + 1) = -iunit * (delta(k) * v(k + 1) + g(k) * (n(k) - v(0)));
    }
    d(0) = -iunit * dp;
    return d;
  };

  const int n_steps = static_cast<int>(std::llround(t_end / dt));
  ECTrajectory traj;
  traj.times.reserve(static_cast<size_t>(n_steps) + 1);
  traj.populations.reserve(static_cast<size_t>(n_steps) + 1);
  traj.times.push_back(0.0);
  traj.populations.push_back(p0);
  for (int s = 0; s < n_steps; ++s) {
    const ComplexVector k1 = rhs(y);
    const ComplexVector k2 = rhs(y + 0.5 * dt * k1);
    const ComplexVector k3 = rhs(y + 0.5 * dt * k2);
    const ComplexVector k4 = rhs(y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    traj.times.push_back(static_cast<double>(s + 1) * dt);
    traj.populations.push_back(std::real(y(0)));
    traj.max_imag = std::max(traj.max_imag, std::abs(std::imag(y(0))));
  }
  return traj;
}

// Equivalent time-convolution form,
//   dP/dt = -int_0^t K(t-t') P(t') dt' + H(t),
//   K(s) = 2 sum_k |g_k|^2 cos(Delta_k s),
//   H(t) = sum_k 2 |g_k|^2 n_k sin(Delta_k t)/Delta_k   (-> t as Delta_k -> 0),
// integrated with the implicit trapezoid rule; the P_{m+1} contribution inside
// the convolution is solved for exactly, so each step costs one history sweep.
inline ECTrajectory ec_evolve_memory_kernel(const QuadraticHamiltonian& h,
                                            const OccupationProfile& occ,
                                            double p0, double t_end, double dt) {
  if (!(dt > 0) || !(t_end > 0)) {
    throw GridError("ec_evolve_memory_kernel needs dt, t_end > 0");
  }
  const BathSpectrum spec = bath_spectrum(h);
  const double omega0 =
      std::real(h.matrix(h.system_indices[0], h.system_indices[0]));
  const Eigen::Index nk = spec.mode_energies.size();
  const RealVector n = mode_occupations(spec, occ, h.statistics);
  RealVector g2(nk), delta(nk);
  for (Eigen::Index k = 0; k < nk; ++k) {
    g2(k) = std::norm(spec.couplings(k));
    delta(k) = omega0 - spec.mode_energies(k);
  }
  auto kernel = [&](double s) {
    double out = 0.0;
    for (Eigen::Index k = 0; k < nk; ++k) out += 2.0 * g2(k) * std::cos(delta(k) * s);
    return out;
  };
  auto inhom = [&](double t) {
    double out = 0.0;
    for (Eigen::Index k = 0; k < nk; ++k) {
      const double d = delta(k);
      out += 2.0 * g2(k) * n(k) *
             (std::abs(d) < 1e-12 ? t : std::sin(d * t) / d);
    }
    return out;
  };

  const int n_steps = static_cast<int>(std::llround(t_end / dt));
  std::vector<double> p;
  p.reserve(static_cast<size_t>(n_steps) + 1);
  p.push_back(p0);
  const double k0 = kernel(0.0);
  // precompute K on the step grid; K(t_m - t_j) only ever needs these values
  std::vector<double> kgrid(static_cast<size_t>(n_steps) + 1);
  for (int m = 0; m <= n_steps; ++m) kgrid[static_cast<size_t>(m)] = kernel(m * dt);

  auto convolution = [&](int m) {
    // trapezoid of K(t_m - t_j) p_j over j = 0..m, excluding nothing
    if (m == 0) return 0.0;
    double s = 0.5 * (kgrid[static_cast<size_t>(m)] * p[0] + k0 * p[static_cast<size_t>(m)]);
    for (int j = 1; j < m; ++j) {
      s += kgrid[static_cast<size_t>(m - j)] * p[static_cast<size_t>(j)];
    }
    return s * dt;
  };

  ECTrajectory traj;
  traj.times.reserve(static_cast<size_t>(n_steps) + 1);
  traj.populations.reserve(static_cast<size_t>(n_steps) + 1);
  traj.times.push_back(0.0);
  traj.populations.push_back(p0);
  for (int m = 0; m < n_steps; ++m) {
    const double fm = -convolution(m) + inhom(m * dt);
    // partial convolution at t_{m+1} over the known history j = 0..m
    double s_known = 0.5 * kgrid[static_cast<size_t>(m + 1)] * p[0];
    for (int j = 1; j <= m; ++j) {
      s_known += kgrid[static_cast<size_t>(m + 1 - j)] * p[static_cast<size_t>(j)];
    }
    s_known *= dt;
    const double rhs_known = -s_known + inhom((m + 1) * dt);
    const double pm = p[static_cast<size_t>(m)];
    const double p_next = (pm + 0.5 * dt * fm + 0.5 * dt * rhs_known) /
                          (1.0 + 0.25 * dt * dt * k0);
    p.push_back(p_next);
    traj.times.push_back((m + 1) * dt);
    traj.populations.push_back(p_next);
  }
  return traj;
}

// Golden-rule rate from the broadened spectral density.
inline double markov_rate(const QuadraticHamiltonian& h, double sigma) {
  const BathSpectrum spec = bath_spectrum(h);
  const double omega0 =
      std::real(h.matrix(h.system_indices[0], h.system_indices[0]));
  return 2.0 * std::numbers::pi * spectral_density(spec, omega0, sigma);
}

// Least-squares slope of ln|P(t) - target| over [0.1, 0.9] * t_fit, returned
// as a positive decay rate. Points at or below the target are skipped (they
// carry no log signal); fewer than five usable points is an error.
inline double fit_decay_rate(const std::vector<double>& times,
                             const std::vector<double>& populations,
                             double target, double t_fit) {
  if (times.size() != populations.size()) {
    throw DimensionMismatchError("fit_decay_rate: times/populations mismatch");
  }
  const double lo = 0.1 * t_fit;
  const double hi = 0.9 * t_fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long count = 0;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < lo || times[i] > hi) continue;
    const double d = populations[i] - target;
    if (!(std::abs(d) > 0)) continue;
    const double x = times[i];
    const double y = std::log(std::abs(d));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++count;
  }
  if (count < 5) throw TooFewPointsError("fit_decay_rate: fewer than 5 points in window");
  const double denom = count * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw TooFewPointsError("fit_decay_rate: degenerate window");
  return -(count * sxy - sx * sy) / denom;
}

struct ECCompareRow {
  double tau = 0.0;
  double gamma_strobo = 0.0;
  double gamma_ode = 0.0;
  double gamma_markov = 0.0;
};

// Stroboscopic environment-only resets at spacing tau against the continuous
// ODE and golden-rule rates. Each t_end must be an integer number of cycles.
inline std::vector<ECCompareRow> ec_stroboscopic_compare(
    const QuadraticHamiltonian& h, const OccupationProfile& occ,
    const std::vector<double>& tau_list, double t_end, double dt, double sigma,
    double p0, double target, double t_fit) {
  const BathSpectrum spec = bath_spectrum(h);
  const RealVector n = mode_occupations(spec, occ, h.statistics);
  const ComplexMatrix env_ref = env_reference_block(spec, n);
  const ResetSpec reset = ec_reset_spec(h, env_ref);
  const Eigen::Index s_idx = h.system_indices[0];

  // initial SPDM: thermal environment, system at p0, no coherences
  ComplexMatrix rho0 = ComplexMatrix::Zero(h.dim(), h.dim());
  rho0(s_idx, s_idx) = Complex(p0, 0.0);
  for (size_t a = 0; a < h.env_indices.size(); ++a) {
    for (size_t b = 0; b < h.env_indices.size(); ++b) {
      rho0(h.env_indices[a], h.env_indices[b]) =
          env_ref(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }

  const ECTrajectory ode = ec_evolve_ode(h, occ, p0, t_end, dt);
  const double gamma_ode =
      fit_decay_rate(ode.times, ode.populations, target, t_fit);
  const double gamma_m = markov_rate(h, sigma);

  std::vector<ECCompareRow> rows;
  rows.reserve(tau_list.size());
  const int p_index = reset.kept_index(s_idx, s_idx);
  if (p_index < 0) throw InternalCheckError("system pair unexpectedly reset");
  for (double tau : tau_list) {
    if (!(tau > 0)) throw GridError("ec_stroboscopic_compare requires tau > 0");
    const double cycles = t_end / tau;
    if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, cycles)) {
      throw GridError("t_end must be an integer multiple of tau");
    }
    const int n_steps = static_cast<int>(std::llround(cycles));
    const AffineMap map = build_affine_map(h, reset, tau);
    const StepTrace trace = iterate_map(map, reset.kept_vector(rho0), n_steps);
    std::vector<double> pops(trace.kept_history.size());
    for (size_t m = 0; m < pops.size(); ++m) {
      pops[m] = std::real(trace.kept_history[m](p_index));
    }
    ECCompareRow row;
    row.tau = tau;
    row.gamma_strobo = fit_decay_rate(trace.times, pops, target, t_fit);
    row.gamma_ode = gamma_ode;
    row.gamma_markov = gamma_m;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace resetmap
