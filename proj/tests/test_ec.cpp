#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "resetmap/ec.hpp"
#include "resetmap/errors.hpp"
#include "resetmap/model.hpp"
#include "resetmap/spdm.hpp"
#include "test_helpers.hpp"

using namespace resetmap;

TEST_CASE("EC generator closed form on a two-level model") {
  // M = [[w0, g], [g, w1]], reset R = {(1,1) -> n}; kept (0,0),(0,1),(1,0)
  const double w0 = 0.3, w1 = -0.2, g = 0.5, n = 0.4;
  ComplexMatrix m(2, 2);
  m << w0, g, g, w1;
  const QuadraticHamiltonian h = build_general(m, {0}, {1});
  const ResetSpec spec = ResetSpec::custom(2, {{1, 1, Complex(n, 0.0)}});
  const ECGenerator gen = ec_generator(h, spec);
  REQUIRE(gen.Dgen.rows() == 3);
  const Complex I(0.0, 1.0);
  // d rho00/dt = i g (rho10 - rho01): row 0
  CHECK(std::abs(gen.Dgen(0, 0)) < 1e-14);
  CHECK(std::abs(gen.Dgen(0, 1) - (-I * g)) < 1e-14);
  CHECK(std::abs(gen.Dgen(0, 2) - I * g) < 1e-14);
  CHECK(std::abs(gen.Cgen(0)) < 1e-14);
  // d rho01/dt = i (w0 - w1) rho01 + i g rho11(frozen) - i g rho00
  CHECK(std::abs(gen.Dgen(1, 1) - I * (w0 - w1)) < 1e-14);
  CHECK(std::abs(gen.Dgen(1, 0) - (-I * g)) < 1e-14);
  CHECK(std::abs(gen.Cgen(1) - I * g * n) < 1e-14);
  CHECK(std::abs(gen.Cgen(2) - std::conj(I * g * n)) < 1e-14);
}

TEST_CASE("EC generator is the tau->0 limit of the affine map (Richardson)") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const int dim = 3 + static_cast<int>(rng() % 3);
    const QuadraticHamiltonian h = testutil::random_model(rng, dim, 1.0);
    const ComplexMatrix values = testutil::random_spdm_matrix(rng, dim);
    const ResetSpec spec = testutil::random_reset_spec(rng, dim, values);
    const ECGenerator gen = ec_generator(h, spec);
    auto residual = [&](double tau) {
      const AffineMap map = build_affine_map(h, spec, tau);
      const Eigen::Index nk = gen.Dgen.rows();
      const double rd =
          max_abs((map.D - ComplexMatrix::Identity(nk, nk)) / tau - gen.Dgen);
      const double rc = (map.C / tau - gen.Cgen).cwiseAbs().maxCoeff();
      return std::max(rd, rc);
    };
    const double slope = std::log10(residual(1e-3) / residual(1e-4));
    CHECK(slope > 0.8);
    CHECK(slope < 1.2);
  }
}

TEST_CASE("ODE and memory-kernel solvers agree") {
  const QuadraticHamiltonian h = build_single_level_chain(0.0, 1.0, 0.15, 40);
  const OccupationProfile occ = OccupationProfile::fermi_dirac(1.0, 0.0);
  const double t_end = 10.0, dt = 5e-3;
  const ECTrajectory a = ec_evolve_ode(h, occ, 1.0, t_end, dt);
  const ECTrajectory b = ec_evolve_memory_kernel(h, occ, 1.0, t_end, dt);
  REQUIRE(a.times.size() == b.times.size());
  double worst = 0.0;
  for (size_t i = 0; i < a.times.size(); ++i) {
    worst = std::max(worst, std::abs(a.populations[i] - b.populations[i]));
  }
  CHECK(worst < 1e-4);
  CHECK(a.max_imag < 1e-10);  // population stays real
}

TEST_CASE("ODE stepper rejects steps that cannot resolve the detuning") {
  const QuadraticHamiltonian h = build_single_level_chain(0.0, 1.0, 0.1, 20);
  const OccupationProfile occ = OccupationProfile::empty();
  // max |Delta_k| ~ 2J = 2, so dt = 0.1 gives dt*max|Delta| = 0.2 > 0.1
  CHECK_THROWS_AS(ec_evolve_ode(h, occ, 1.0, 1.0, 0.1), StepTooLargeError);
  CHECK_THROWS_AS(ec_evolve_ode(h, occ, 1.0, 0.0, 0.01), GridError);
}

TEST_CASE("decoupled system gives a flat trajectory") {
  const QuadraticHamiltonian h = build_single_level_chain(0.5, 1.0, 1e-13, 20);
  const OccupationProfile occ = OccupationProfile::empty();
  const ECTrajectory traj = ec_evolve_ode(h, occ, 0.7, 2.0, 0.01);
  for (double p : traj.populations) CHECK(std::abs(p - 0.7) < 1e-12);
}

TEST_CASE("markov rate equals 2 pi J(omega0)") {
  const QuadraticHamiltonian h = build_single_level_chain(0.4, 1.0, 0.05, 100);
  const BathSpectrum spec = bath_spectrum(h);
  CHECK(markov_rate(h, 0.02) ==
        doctest::Approx(2.0 * std::numbers::pi * spectral_density(spec, 0.4, 0.02))
            .epsilon(1e-14));
}

TEST_CASE("rate fitting recovers a synthetic exponential") {
  std::vector<double> t, p;
  const double gamma = 0.0123, target = 0.31;
  for (int i = 0; i <= 1000; ++i) {
    const double ti = 0.05 * i;
    t.push_back(ti);
    p.push_back(target + 0.6 * std::exp(-gamma * ti));
  }
  CHECK(fit_decay_rate(t, p, target, 50.0) == doctest::Approx(gamma).epsilon(1e-10));
  CHECK_THROWS_AS(fit_decay_rate({0.0, 1.0}, {1.0, 0.5}, 0.0, 1.0),
                  TooFewPointsError);
}

TEST_CASE("thermal EC evolution equilibrates to the bath occupation") {
  // n(omega0 = 0) = 1/2 at mu = 0; Gamma_EC ~ 2 t_c^2 = 0.045 so t = 120
  // covers > 5/Gamma while staying inside the N_b = 400 revival guard
  const QuadraticHamiltonian h = build_single_level_chain(0.0, 1.0, 0.15, 400);
  const OccupationProfile occ = OccupationProfile::fermi_dirac(1.0, 0.0);
  const ECTrajectory traj = ec_evolve_ode(h, occ, 1.0, 120.0, 0.02);
  CHECK(std::abs(traj.populations.back() - 0.5) < 0.05);
}

TEST_CASE("stroboscopic comparison validates the grid and tracks the ODE") {
  const QuadraticHamiltonian h = build_single_level_chain(0.0, 1.0, 0.15, 60);
  const OccupationProfile occ = OccupationProfile::empty();
  CHECK_THROWS_AS(ec_stroboscopic_compare(h, occ, {0.3}, 10.0, 5e-3, 0.02, 1.0,
                                          0.0, 10.0),
                  GridError);  // 10/0.3 is not an integer
  // broadening chosen ~ mode spacing (2pi/61) so the finite-size comb is smooth
  const auto rows = ec_stroboscopic_compare(h, occ, {0.05}, 12.0, 5e-3, 0.15,
                                            1.0, 0.0, 12.0);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].gamma_strobo ==
        doctest::Approx(rows[0].gamma_ode).epsilon(0.25));
  CHECK(rows[0].gamma_ode == doctest::Approx(rows[0].gamma_markov).epsilon(0.5));
}
