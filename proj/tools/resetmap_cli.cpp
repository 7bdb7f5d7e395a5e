// resetmap — command-line front end: rate curves, scalar-map evolution,
// continuous-reset runs, the (tau, omega0) design map, and a built-in
// self-test suite. Exit codes: 0 success, 1 config error, 2 numerical
// failure, 3 selftest failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resetmap/config.hpp"
#include "resetmap/csv.hpp"
#include "resetmap/ec.hpp"
#include "resetmap/errors.hpp"
#include "resetmap/linalg.hpp"
#include "resetmap/model.hpp"
#include "resetmap/ri.hpp"
#include "resetmap/spdm.hpp"

namespace {

using namespace resetmap;

struct Overrides {
  std::string config_path;
  std::string out_dir;
  int workers = 0;
  std::optional<double> tau;
  std::optional<double> omega0;
};

RunConfig load_config(const Overrides& ov) {
  RunConfig cfg =
      ov.config_path.empty() ? RunConfig{} : parse_config_file(ov.config_path);
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (ov.omega0) cfg.omega0 = *ov.omega0;
  if (ov.tau) {
    cfg.tau_min = cfg.tau_max = *ov.tau;
    cfg.tau_count = 1;
  }
  cfg.validate();
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& stem) {
  return cfg.out_dir + "/" + cfg.prefix + "_" + stem + ".csv";
}

QuadraticHamiltonian chain_from(const RunConfig& cfg) {
  return build_single_level_chain(cfg.omega0, cfg.hopping, cfg.coupling,
                                  cfg.n_bath, cfg.statistics);
}

int cmd_ri_rate(const RunConfig& cfg) {
  const QuadraticHamiltonian h = chain_from(cfg);
  const OccupationProfile occ = cfg.occupation_profile();
  const std::vector<double> taus = cfg.tau_grid();
  RealVector tau_grid(static_cast<Eigen::Index>(taus.size()));
  for (size_t i = 0; i < taus.size(); ++i) {
    tau_grid(static_cast<Eigen::Index>(i)) = taus[i];
  }
  const double revival = cfg.n_bath / (2.0 * cfg.hopping);
  const RateCurve curve = ri_rate_curve(h, occ, tau_grid, revival);

  std::ofstream os = open_output(out_path(cfg, "rate"));
  CsvWriter w(os);
  for (const auto& line : cfg.resolved_lines()) w.comment(line);
  w.comment("zeno_coefficient A_T = " + format_double(curve.zeno_coefficient));
  w.header({"tau", "gamma_eff", "gamma_zeno_asymptote", "gamma_collapse", "flag"});
  for (Eigen::Index i = 0; i < tau_grid.size(); ++i) {
    const double at = curve.zeno_coefficient;
    w.row({tau_grid(i), curve.gamma_eff(i), at * tau_grid(i),
           curve.gamma_eff(i) / (at * cfg.hopping),
           static_cast<double>(curve.flags[static_cast<size_t>(i)])});
  }
  std::cout << "wrote " << out_path(cfg, "rate") << "\n";
  return 0;
}

int cmd_ri_evolve(const RunConfig& cfg) {
  const QuadraticHamiltonian h = chain_from(cfg);
  const OccupationProfile occ = cfg.occupation_profile();
  const double tau = cfg.tau_min;
  const RIScalarMap map = ri_scalar_map(h, occ, tau);
  const int n_steps =
      std::max(1, static_cast<int>(std::llround(cfg.t_end / tau)));
  const RIEvolveResult res = ri_evolve(map, 1.0, n_steps);

  std::ofstream os = open_output(out_path(cfg, "evolve"));
  CsvWriter w(os);
  for (const auto& line : cfg.resolved_lines()) w.comment(line);
  w.comment("a = " + format_double(map.a) + ", b = " + format_double(map.b));
  if (res.fixed_point) {
    w.comment("fixed_point = " + format_double(*res.fixed_point));
  }
  w.header({"n", "t", "population"});
  for (size_t n = 0; n < res.populations.size(); ++n) {
    w.row({static_cast<double>(n), static_cast<double>(n) * tau,
           res.populations[n]});
  }
  std::cout << "wrote " << out_path(cfg, "evolve") << "\n";
  return 0;
}

int cmd_ec_run(const RunConfig& cfg) {
  const QuadraticHamiltonian h = chain_from(cfg);
  const OccupationProfile occ = cfg.occupation_profile();
  const double p0 = 1.0;
  const double target = occ.value(cfg.omega0);
  const double revival = cfg.n_bath / (2.0 * cfg.hopping);
  const double t_fit = std::min(cfg.t_end, 0.5 * revival);

  const ECTrajectory ode = ec_evolve_ode(h, occ, p0, cfg.t_end, cfg.dt);
  {
    std::ofstream os = open_output(out_path(cfg, "trajectory"));
    CsvWriter w(os);
    for (const auto& line : cfg.resolved_lines()) w.comment(line);
    w.comment("max_imag = " + format_double(ode.max_imag));
    w.header({"t", "population"});
    for (size_t i = 0; i < ode.times.size(); ++i) {
      w.row({ode.times[i], ode.populations[i]});
    }
  }

  // snap requested tau values to exact divisors of t_end (>= 10 cycles)
  std::vector<double> tau_list;
  for (double tau : cfg.tau_grid()) {
    const double cycles = std::round(cfg.t_end / tau);
    if (cycles < 10) continue;
    const double snapped = cfg.t_end / cycles;
    if (tau_list.empty() || std::abs(tau_list.back() - snapped) > 1e-12) {
      tau_list.push_back(snapped);
    }
  }
  if (tau_list.empty()) {
    throw GridError("no tau value admits >= 10 cycles within t_end");
  }
  const std::vector<ECCompareRow> rows = ec_stroboscopic_compare(
      h, occ, tau_list, cfg.t_end, cfg.dt, cfg.resolved_sigma(), p0, target,
      t_fit);
  {
    std::ofstream os = open_output(out_path(cfg, "compare"));
    CsvWriter w(os);
    for (const auto& line : cfg.resolved_lines()) w.comment(line);
    w.header({"tau", "gamma_strobo", "gamma_ode", "gamma_markov"});
    for (const auto& r : rows) {
      w.row({r.tau, r.gamma_strobo, r.gamma_ode, r.gamma_markov});
    }
  }
  std::cout << "wrote " << out_path(cfg, "trajectory") << " and "
            << out_path(cfg, "compare") << "\n";
  return 0;
}

int cmd_design_map(const RunConfig& cfg, int workers) {
  const std::vector<double> taus = cfg.tau_grid();
  const std::vector<double> omegas = cfg.omega0_grid();
  RealVector tau_grid(static_cast<Eigen::Index>(taus.size()));
  for (size_t i = 0; i < taus.size(); ++i) {
    tau_grid(static_cast<Eigen::Index>(i)) = taus[i];
  }
  RealVector omega_grid(static_cast<Eigen::Index>(omegas.size()));
  for (size_t i = 0; i < omegas.size(); ++i) {
    omega_grid(static_cast<Eigen::Index>(i)) = omegas[i];
  }
  const DesignMap map = design_map(omega_grid, tau_grid, cfg.hopping,
                                   cfg.coupling, cfg.n_bath, workers);

  std::ofstream os = open_output(out_path(cfg, "design_map"));
  CsvWriter w(os);
  for (const auto& line : cfg.resolved_lines()) w.comment(line);
  w.comment("band_edge omega0/J = +/- " +
            format_double(map.band_edge / cfg.hopping));
  w.header({"omega0", "tau", "gamma", "is_ridge"});
  for (Eigen::Index i = 0; i < omega_grid.size(); ++i) {
    const auto& ridge = map.ridge[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < tau_grid.size(); ++j) {
      double is_ridge = 0.0;
      for (const auto& [rt, rg] : ridge) {
        if (rt == tau_grid(j)) is_ridge = 1.0;
      }
      w.row({omega_grid(i), tau_grid(j), map.gamma(i, j), is_ridge});
    }
  }
  std::cout << "wrote " << out_path(cfg, "design_map") << "\n";
  return 0;
}

// --- selftest -------------------------------------------------------------

ComplexMatrix random_hermitian(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix m(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) m(a, b) = Complex(u(rng), u(rng));
  }
  return ComplexMatrix(scale * 0.5 * (m + m.adjoint()));
}

ComplexMatrix random_spdm_matrix(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(u(rng), u(rng));
  }
  ComplexMatrix rho = a * a.adjoint();
  return ComplexMatrix(rho / (rho.trace().real() + 1.0));
}

// random conjugation-closed reset set avoiding pair (0,0)
ResetSpec random_reset_spec(std::mt19937& rng, int dim,
                            const ComplexMatrix& values) {
  std::uniform_int_distribution<int> pick(0, dim - 1);
  std::vector<ResetSpec::ResetEntry> entries;
  std::vector<char> used(static_cast<size_t>(dim * dim), 0);
  const int n_pairs = 1 + pick(rng);
  for (int p = 0; p < n_pairs; ++p) {
    const int a = pick(rng);
    const int b = pick(rng);
    if (a == 0 && b == 0) continue;
    if (used[static_cast<size_t>(a * dim + b)]) continue;
    used[static_cast<size_t>(a * dim + b)] = 1;
    entries.push_back({a, b, values(a, b)});
    if (a != b && !used[static_cast<size_t>(b * dim + a)]) {
      used[static_cast<size_t>(b * dim + a)] = 1;
      entries.push_back({b, a, std::conj(values(a, b))});
    }
  }
  if (entries.empty()) entries.push_back({0, 1, values(0, 1)}),
      entries.push_back({1, 0, std::conj(values(0, 1))});
  return ResetSpec::custom(dim, entries);
}

int cmd_selftest() {
  int failures = 0;
  auto report = [&](const char* name, bool ok, double residual) {
    std::printf("%s: %s (residual %s)\n", ok ? "pass" : "FAIL", name,
                format_double(residual).c_str());
    if (!ok) ++failures;
  };

  std::mt19937 rng(20240817);

  {  // oracle equivalence: affine map vs brute-force stroboscopic evolution
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int dim = 3 + static_cast<int>(rng() % 4);
      const ComplexMatrix m = random_hermitian(rng, dim, 1.0);
      std::vector<int> env;
      for (int i = 1; i < dim; ++i) env.push_back(i);
      const QuadraticHamiltonian h = build_general(m, {0}, env);
      const ComplexMatrix ref = random_spdm_matrix(rng, dim);
      const ResetSpec spec = random_reset_spec(rng, dim, ref);
      const ComplexMatrix rho0 = random_spdm_matrix(rng, dim);
      const double tau = 0.3;
      const AffineMap map = build_affine_map(h, spec, tau);
      ComplexMatrix rho_start = rho0;
      spec.apply(rho_start);
      const StepTrace fast =
          iterate_map(map, spec.kept_vector(rho_start), 30);
      const StepTrace slow = brute_force_stroboscopic(
          h, spec, SPDM{rho_start, Statistics::fermion}, tau, 30);
      for (size_t n = 0; n < fast.kept_history.size(); ++n) {
        worst = std::max(
            worst, (fast.kept_history[n] - slow.kept_history[n]).cwiseAbs().maxCoeff());
      }
    }
    report("oracle-equivalence", worst <= 1e-12, worst);
  }

  {  // propagator unitarity
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int dim = 2 + static_cast<int>(rng() % 7);
      const ComplexMatrix m = random_hermitian(rng, dim, 2.0);
      const ComplexMatrix u = propagator(m, 0.7 + 0.1 * trial);
      worst = std::max(
          worst, max_abs(u.adjoint() * u - ComplexMatrix::Identity(dim, dim)));
    }
    report("unitarity", worst <= 1e-10, worst);
  }

  {  // double-commutator identity on random diagonal SPDMs
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 20; ++trial) {
      const int dim = 2 + static_cast<int>(rng() % 9);
      const ComplexMatrix m = random_hermitian(rng, dim, 1.5);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      RealVector diag(dim);
      for (int i = 0; i < dim; ++i) diag(i) = u01(rng);
      try {
        double_commutator_00(m, diag);  // throws if the two routes disagree
      } catch (const InternalCheckError&) {
        ok = false;
      }
    }
    report("double-commutator", ok, worst);
  }

  {  // generator consistency: (D(tau)-1)/tau -> generator, linear in tau
    double worst_slope_dev = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const int dim = 3 + static_cast<int>(rng() % 3);
      const ComplexMatrix m = random_hermitian(rng, dim, 1.0);
      std::vector<int> env;
      for (int i = 1; i < dim; ++i) env.push_back(i);
      const QuadraticHamiltonian h = build_general(m, {0}, env);
      const ComplexMatrix ref = random_spdm_matrix(rng, dim);
      const ResetSpec spec = random_reset_spec(rng, dim, ref);
      const ECGenerator gen = ec_generator(h, spec);
      auto residual = [&](double tau) {
        const AffineMap map = build_affine_map(h, spec, tau);
        const Eigen::Index nk = gen.Dgen.rows();
        const double rd = max_abs(
            (map.D - ComplexMatrix::Identity(nk, nk)) / tau - gen.Dgen);
        const double rc = (map.C / tau - gen.Cgen).cwiseAbs().maxCoeff();
        return std::max(rd, rc);
      };
      const double r1 = residual(1e-3);
      const double r2 = residual(1e-4);
      const double slope = std::log10(r1 / r2);
      worst_slope_dev = std::max(worst_slope_dev, std::abs(slope - 1.0));
    }
    report("generator-consistency", worst_slope_dev <= 0.2, worst_slope_dev);
  }

  if (failures > 0) {
    std::printf("selftest: %d failure(s)\n", failures);
    return 3;
  }
  std::printf("selftest: all checks passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stroboscopic-reset dynamics for quadratic open systems"};
  app.require_subcommand(1);
  app.fallthrough();  // allow --config etc. after the subcommand name

  Overrides ov;
  app.add_option("--config", ov.config_path, "configuration file");
  app.add_option("--out", ov.out_dir, "output directory (overrides config)");
  app.add_option("--workers", ov.workers, "worker thread count (0 = cores)");
  double tau_flag = 0.0, omega0_flag = 0.0;
  const auto* tau_opt = app.add_option("--tau", tau_flag, "single tau override");
  const auto* omega0_opt =
      app.add_option("--omega0", omega0_flag, "omega0 override");

  auto* sub_rate = app.add_subcommand("ri-rate", "rate curve Gamma_eff(tau)");
  auto* sub_evolve =
      app.add_subcommand("ri-evolve", "scalar-map population evolution");
  auto* sub_ec = app.add_subcommand("ec-run", "continuous-reset run");
  auto* sub_map = app.add_subcommand("design-map", "Gamma_eff(tau, omega0) grid");
  auto* sub_self = app.add_subcommand("selftest", "built-in consistency checks");

  CLI11_PARSE(app, argc, argv);

  if (tau_opt->count() > 0) ov.tau = tau_flag;
  if (omega0_opt->count() > 0) ov.omega0 = omega0_flag;

  try {
    if (sub_self->parsed()) return cmd_selftest();
    const RunConfig cfg = load_config(ov);
    if (sub_rate->parsed()) return cmd_ri_rate(cfg);
    if (sub_evolve->parsed()) return cmd_ri_evolve(cfg);
    if (sub_ec->parsed()) return cmd_ec_run(cfg);
    if (sub_map->parsed()) return cmd_design_map(cfg, ov.workers);
    std::cerr << "no subcommand selected\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
