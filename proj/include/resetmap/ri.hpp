// ri.hpp — repeated-interaction analysis: the exact single-level affine
// recurrence a(tau), b(tau), its closed-form solution and fixed point, the
// map-extracted decay rate Gamma_eff(tau) = -ln a(tau)/tau, short-time Zeno
// laws with Pauli/Bose factors, the double-commutator identity, anti-Zeno
// window detection, and the (tau, omega0) design map with ridge extraction.

#pragma once

#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "resetmap/errors.hpp"
#include "resetmap/linalg.hpp"
#include "resetmap/model.hpp"
#include "resetmap/spdm.hpp"

namespace resetmap {

enum class PointFlag : int {
  ok = 0,
  infinite = 1,         // a(tau) at rounding zero; Gamma clamped to +inf sentinel
  recurrence_guard = 2  // evolved time beyond the finite-chain revival guard
};

// Exact single-level RI recurrence P_{n+1} = a P_n + b.
struct RIScalarMap {
  double a = 1.0;  // |U_00(tau)|^2
  double b = 0.0;  // sum_{e,e'} U*_{0e} U_{0e'} rho0_{ee'}
  double tau = 0.0;
};

namespace detail {

inline void require_single_level(const QuadraticHamiltonian& h) {
  if (h.system_indices.size() != 1) {
    throw MultiLevelSystemError("operation requires a single system level");
  }
}

}  // namespace detail

inline RIScalarMap ri_scalar_map(const Propagator& prop,
                                 const QuadraticHamiltonian& h,
                                 const ComplexMatrix& env_reference, double tau) {
  detail::require_single_level(h);
  if (!(tau > 0)) throw GridError("ri_scalar_map requires tau > 0");
  const int s = h.system_indices[0];
  const ComplexVector row = prop.row(s, tau);
  RIScalarMap map;
  map.tau = tau;
  map.a = std::norm(row(s));
  const int ne = static_cast<int>(h.env_indices.size());
  ComplexVector u_env(ne);
  for (int e = 0; e < ne; ++e) u_env(e) = row(h.env_indices[static_cast<size_t>(e)]);
  map.b = std::real((u_env.adjoint() * env_reference * u_env)(0, 0));
  return map;
}

inline RIScalarMap ri_scalar_map(const QuadraticHamiltonian& h,
                                 const OccupationProfile& occ, double tau) {
  detail::require_single_level(h);
  const BathSpectrum spec = bath_spectrum(h);
  const ComplexMatrix ref =
      env_reference_block(spec, mode_occupations(spec, occ, h.statistics));
  return ri_scalar_map(Propagator(h.matrix), h, ref, tau);
}

struct RIEvolveResult {
  std::vector<double> populations;      // P_0 .. P_n, closed form
  std::optional<double> fixed_point;    // b/(1-a); absent when |1-a| < 1e-14
};

// Closed-form solution P_n = P* + a^n (P_0 - P*).
inline RIEvolveResult ri_evolve(const RIScalarMap& map, double p0, int n_steps) {
  RIEvolveResult out;
  out.populations.reserve(static_cast<size_t>(n_steps) + 1);
  if (std::abs(1.0 - map.a) < 1e-14) {
    // degenerate map: P* = b/(1-a) is numerically meaningless
    for (int n = 0; n <= n_steps; ++n) {
      out.populations.push_back(p0 + static_cast<double>(n) * map.b);
    }
    return out;
  }
  const double pstar = map.b / (1.0 - map.a);
  out.fixed_point = pstar;
  double an = 1.0;
  for (int n = 0; n <= n_steps; ++n) {
    out.populations.push_back(pstar + an * (p0 - pstar));
    an *= map.a;
  }
  return out;
}

struct GammaValue {
  double gamma = 0.0;
  PointFlag flag = PointFlag::ok;
};

// Gamma_eff(tau) = -(1/tau) ln |U_00(tau)|^2. Interference nulls of U_00 are
// legitimate; they are reported as a flagged infinity, never an exception.
inline GammaValue gamma_eff_at(const Propagator& prop, Eigen::Index site,
                               double tau) {
  if (!(tau > 0)) throw GridError("gamma_eff requires tau > 0");
  const Complex u00 = prop.survival_amplitude(site, tau);
  if (std::abs(u00) < 1e-15) {
    return {std::numeric_limits<double>::infinity(), PointFlag::infinite};
  }
  return {-std::log(std::norm(u00)) / tau, PointFlag::ok};
}

inline double gamma_eff(const QuadraticHamiltonian& h, double tau) {
  detail::require_single_level(h);
  return gamma_eff_at(Propagator(h.matrix), h.system_indices[0], tau).gamma;
}

// A_T = sum_k |g_k|^2 f(n_k) with f = 1-n (fermions), 1+n (bosons),
// 1 for an empty bath.
inline double zeno_coefficient(const QuadraticHamiltonian& h,
                               const OccupationProfile& occ) {
  detail::require_single_level(h);
  const BathSpectrum spec = bath_spectrum(h);
  const RealVector n = mode_occupations(spec, occ, h.statistics);
  double out = 0.0;
  for (Eigen::Index k = 0; k < n.size(); ++k) {
    const double f =
        h.statistics == Statistics::fermion ? 1.0 - n(k) : 1.0 + n(k);
    out += std::norm(spec.couplings(k)) * f;
  }
  return out;
}

// Leading-order per-cycle change of the system population for a diagonal
// SPDM: delta P = -tau^2 sum_x |M_0x|^2 (P - n_x), with n_x the environment
// diagonal entries of rho.
inline double short_time_delta_p(const QuadraticHamiltonian& h,
                                 const RealVector& rho_diag, double tau) {
  detail::require_single_level(h);
  if (rho_diag.size() != h.dim()) {
    throw DimensionMismatchError("diagonal SPDM does not match model dimension");
  }
  const int s = h.system_indices[0];
  const double p = rho_diag(s);
  double sum = 0.0;
  for (int x : h.env_indices) {
    sum += std::norm(h.matrix(s, x)) * (p - rho_diag(x));
  }
  return -tau * tau * sum;
}

// [M,[M,rho]]_00 for diagonal rho, evaluated both via the closed form
// 2 sum_g |M_0g|^2 (rho_00 - rho_gg) and via the direct matrix expression
// M^2 rho + rho M^2 - 2 M rho M. The two routes must agree.
inline double double_commutator_00(const ComplexMatrix& m,
                                   const RealVector& rho_diag) {
  if (m.rows() != m.cols() || rho_diag.size() != m.rows()) {
    throw DimensionMismatchError("matrix/diagonal dimension mismatch");
  }
  const ComplexMatrix ms = symmetrized(m);
  double closed = 0.0;
  for (Eigen::Index g = 0; g < ms.rows(); ++g) {
    closed += 2.0 * std::norm(ms(0, g)) * (rho_diag(0) - rho_diag(g));
  }
  const ComplexMatrix rho = rho_diag.asDiagonal().toDenseMatrix().cast<Complex>();
  const ComplexMatrix m2 = ms * ms;
  const Complex direct = (m2 * rho + rho * m2 - 2.0 * ms * rho * ms)(0, 0);
  const double scale = std::max({std::abs(closed), std::abs(direct), 1.0});
  if (std::abs(direct - Complex(closed, 0)) > 1e-10 * scale) {
    throw InternalCheckError("double-commutator closed form disagrees with "
                             "direct matrix evaluation");
  }
  return closed;
}

struct RateCurve {
  RealVector tau_grid;
  RealVector gamma_eff;
  double zeno_coefficient = 0.0;  // A_T
  std::vector<PointFlag> flags;
};

inline RateCurve ri_rate_curve(const QuadraticHamiltonian& h,
                               const OccupationProfile& occ,
                               const RealVector& tau_grid,
                               double revival_time =
                                   std::numeric_limits<double>::infinity()) {
  detail::require_single_level(h);
  const Propagator prop(h.matrix);
  const Eigen::Index site = h.system_indices[0];
  RateCurve curve;
  curve.tau_grid = tau_grid;
  curve.gamma_eff.resize(tau_grid.size());
  curve.flags.resize(static_cast<size_t>(tau_grid.size()), PointFlag::ok);
  curve.zeno_coefficient = zeno_coefficient(h, occ);
  for (Eigen::Index i = 0; i < tau_grid.size(); ++i) {
    const GammaValue g = gamma_eff_at(prop, site, tau_grid(i));
    curve.gamma_eff(i) = g.gamma;
    curve.flags[static_cast<size_t>(i)] = g.flag;
    if (g.flag == PointFlag::ok && tau_grid(i) > revival_time) {
      curve.flags[static_cast<size_t>(i)] = PointFlag::recurrence_guard;
    }
  }
  return curve;
}

namespace detail {

// Local maxima on a discrete curve. Strict against both neighbors; a plateau
// that eventually falls is attributed to its smallest-tau point.
inline std::vector<Eigen::Index> local_maxima(const RealVector& y) {
  std::vector<Eigen::Index> out;
  const Eigen::Index n = y.size();
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (!(y(i) > y(i - 1))) continue;
    Eigen::Index j = i;
    while (j + 1 < n && y(j + 1) == y(i)) ++j;
    if (j + 1 < n && y(j + 1) < y(i)) out.push_back(i);
    i = j;
  }
  return out;
}

}  // namespace detail

struct AntiZenoWindow {
  double tau_start = 0.0;
  double tau_peak = 0.0;
  double tau_end = 0.0;
  double gamma_peak = 0.0;
};

// Maximal intervals over which the discrete rate curve rises then falls,
// each reported with its interior local maximum.
inline std::vector<AntiZenoWindow> anti_zeno_windows(const RateCurve& curve) {
  const Eigen::Index n = curve.tau_grid.size();
  if (n < 5) throw TooFewPointsError("anti_zeno_windows needs >= 5 grid points");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(curve.tau_grid(i) > curve.tau_grid(i - 1))) {
      throw GridError("anti_zeno_windows needs a strictly ascending tau grid");
    }
  }
  std::vector<AntiZenoWindow> windows;
  for (Eigen::Index peak : detail::local_maxima(curve.gamma_eff)) {
    Eigen::Index lo = peak;
    while (lo > 0 && curve.gamma_eff(lo - 1) < curve.gamma_eff(lo)) --lo;
    Eigen::Index hi = peak;
    while (hi + 1 < n && curve.gamma_eff(hi + 1) < curve.gamma_eff(hi)) ++hi;
    windows.push_back({curve.tau_grid(lo), curve.tau_grid(peak),
                       curve.tau_grid(hi), curve.gamma_eff(peak)});
  }
  return windows;
}

struct DesignMap {
  RealVector tau_grid;
  RealVector omega0_grid;
  RealMatrix gamma;  // gamma(i, j) = Gamma_eff(tau_j, omega0_i)
  // per-omega0 ridge points (tau*, Gamma*), finite-tau local maxima
  std::vector<std::vector<std::pair<double, double>>> ridge;
  double band_edge = 0.0;  // 2J
};

// Gamma_eff(tau, omega0) for the single-level + chain model. Grid points are
// independent; evaluation is parallel over omega0 columns, each sharing one
// eigendecomposition.
inline DesignMap design_map(const RealVector& omega0_grid,
                            const RealVector& tau_grid, double hopping,
                            double coupling, int n_bath, int workers = 0) {
  if (tau_grid.size() < 1 || omega0_grid.size() < 1) {
    throw GridError("design_map needs nonempty grids");
  }
  if (tau_grid.minCoeff() <= 0) throw GridError("design_map requires tau > 0");
  DesignMap map;
  map.tau_grid = tau_grid;
  map.omega0_grid = omega0_grid;
  map.gamma.resize(omega0_grid.size(), tau_grid.size());
  map.ridge.resize(static_cast<size_t>(omega0_grid.size()));
  map.band_edge = 2.0 * hopping;

  auto column = [&](Eigen::Index i) {
    const QuadraticHamiltonian h =
        build_single_level_chain(omega0_grid(i), hopping, coupling, n_bath);
    const Propagator prop(h.matrix);
    for (Eigen::Index j = 0; j < tau_grid.size(); ++j) {
      map.gamma(i, j) = gamma_eff_at(prop, 0, tau_grid(j)).gamma;
    }
    const RealVector row = map.gamma.row(i).transpose();
    for (Eigen::Index j : detail::local_maxima(row)) {
      map.ridge[static_cast<size_t>(i)].emplace_back(tau_grid(j), row(j));
    }
  };

  int n_workers = workers > 0
                      ? workers
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  if (n_workers == 1 || omega0_grid.size() == 1) {
    for (Eigen::Index i = 0; i < omega0_grid.size(); ++i) column(i);
  } else {
    std::atomic<Eigen::Index> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (Eigen::Index i = next.fetch_add(1); i < omega0_grid.size();
             i = next.fetch_add(1)) {
          column(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return map;
}

}  // namespace resetmap
