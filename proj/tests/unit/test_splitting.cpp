#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "biotfs/mandel.hpp"
#include "biotfs/splitting.hpp"

using namespace biotfs;

namespace {

MandelParams small_mandel(const char* preset) {
  auto mp = mandel_preset(preset);
  return mp;
}

double max_rel_diff(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
  double worst = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    std::vector<double> d(a[n].size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[n][i] - b[n][i];
    const double scale = norm2(a[n]);
    if (scale > 0.0) worst = std::max(worst, norm2(d) / scale);
  }
  return worst;
}

std::vector<double> random_vector(std::size_t n, double scale, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("theoretical rate") {
  const auto m = mandel_preset("fig3").material;
  CHECK(theoretical_rate(m, 0.0) == 0.0);
  CHECK(theoretical_rate(m, m.l_phys()) == doctest::Approx(0.800).epsilon(1e-3));
  // Rate increases towards 1 as the medium becomes incompressible.
  double prev = 0.0;
  for (double beta : {1e10, 1e12, 1e14}) {
    auto v = m;
    v.biot_modulus = beta;
    const double r = theoretical_rate(v, 1e-10);
    CHECK(r > prev);
    CHECK(r < 1.0);
    prev = r;
  }
  CHECK(prev > 0.9999);
  CHECK_THROWS_AS(theoretical_rate(m, -1.0), std::invalid_argument);
}

TEST_CASE("split configuration") {
  SplitConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.stabilization = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SplitConfig{};
  cfg.workers = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SplitConfig{};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK(to_string(SplitMethod::FixedStress) == "fs");
  CHECK(to_string(SplitMethod::ParallelFixedStress) == "pfs");
}

TEST_CASE("flow step matches a dense oracle") {
  const auto mp = small_mandel("nu0.4");
  const auto setup = make_mandel_setup(mp, 2, 1, 1, 0.5);
  const auto& sys = setup.system;
  const auto& m = mp.material;
  SplitConfig cfg;
  cfg.stabilization = 1.7 * m.l_phys();
  const SplittingOperators ops(sys, m, cfg, 0.5);

  std::mt19937 rng(1);
  const std::size_t np = sys.raw.pressure_mass.rows();
  const std::size_t nu = sys.raw.elasticity.rows();
  const auto p_prev = random_vector(np, 1e6, rng);
  const auto p_lag = random_vector(np, 1e6, rng);
  const auto p_lag_prev = random_vector(np, 1e6, rng);
  const auto u_lag = random_vector(nu, 1e-2, rng);
  const auto u_lag_prev = random_vector(nu, 1e-2, rng);
  const auto p = ops.flow_step(1, p_prev, p_lag, p_lag_prev, u_lag, u_lag_prev);

  const double tau = 0.5, s = 1.0 / m.biot_modulus, l = cfg.stabilization;
  const double alpha = m.biot_coefficient;
  auto dense = oracle::zeros(np, np);
  std::vector<double> rhs(np, 0.0);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double mij = sys.raw.pressure_mass.coeff(i, j);
      dense[i][j] = (s + l) / tau * mij + sys.raw.pressure_stiffness.coeff(i, j);
      rhs[i] += (s + l) / tau * mij * p_prev[j] + l / tau * mij * (p_lag[j] - p_lag_prev[j]);
    }
    for (std::size_t j = 0; j < nu; ++j) {
      rhs[i] -= alpha / tau * sys.raw.coupling.coeff(i, j) * (u_lag[j] - u_lag_prev[j]);
    }
  }
  for (int d : sys.dofs.pressure_dirichlet) {
    for (std::size_t j = 0; j < np; ++j) dense[d][j] = (d == static_cast<int>(j)) ? 1.0 : 0.0;
    rhs[d] = 0.0;
  }
  const auto ref = oracle::dense_solve(dense, rhs);
  for (std::size_t i = 0; i < np; ++i) CHECK(std::abs(p[i] - ref[i]) <= 1e-10 * norm2(ref));
}

TEST_CASE("mechanics under uniform pressure matches the free expansion") {
  // Rollers on x = 0 and y = 0, everything else traction free: a uniform
  // pressure p0 produces the isotropic strain alpha p0 / (2 (G + lambda)).
  auto m = mandel_preset("fig3").material;
  m.biot_coefficient = 0.7;
  const auto mesh = build_rect(1.0, 1.0, 1, 1);
  auto table = mandel_boundary_table();
  table[static_cast<int>(BoundaryTag::Top)].mechanics = MechanicsCondition::TractionFree;
  table[static_cast<int>(BoundaryTag::Right)].flow = FlowCondition::NoFlux;
  const auto sys = apply_constraints(assemble_system(mesh, m), build_dof_map(mesh, table), 0.0);
  SplitConfig cfg;
  const SplittingOperators ops(sys, m, cfg, 1.0);
  const double p0 = 3.0e6;
  const std::vector<double> p(mesh.num_nodes(), p0);
  const auto u = ops.mechanics_step(p);

  // Dense oracle on the same two-element mesh.
  const double e = m.biot_coefficient * p0 / (2.0 * (m.shear_modulus() + m.lame_lambda()));
  const auto exact = interpolate_displacement(mesh, [e](double x, double y) {
    return std::array<double, 2>{e * x, e * y};
  });
  const int n = static_cast<int>(u.size());
  auto dense = oracle::zeros(n, n);
  auto rhs = spmv_transpose(sys.raw.coupling, p);
  for (auto& v : rhs) v *= m.biot_coefficient;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) dense[i][j] = sys.raw.elasticity.coeff(i, j);
  }
  for (int d : sys.dofs.displacement_dirichlet) {
    for (int j = 0; j < n; ++j) dense[d][j] = d == j ? 1.0 : 0.0;
    rhs[d] = 0.0;
  }
  const auto ref = oracle::dense_solve(dense, rhs);
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(u[i] - ref[i]) <= 1e-9 * norm2(ref));
    CHECK(std::abs(u[i] - exact[i]) <= 1e-9 * norm2(exact));
  }

  // Zero pressure and no loads: zero displacement.
  for (double v : ops.mechanics_step(std::vector<double>(mesh.num_nodes(), 0.0))) CHECK(v == 0.0);
}

TEST_CASE("zero data stays zero") {
  const auto mp = mandel_preset("nu0.4");
  const auto mesh = build_rect(mp.a, mp.b, 4, 4);
  const auto sys = apply_constraints(assemble_system(mesh, mp.material),
                                     build_dof_map(mesh, mandel_boundary_table()), 0.0);
  const auto guess = SpaceTimeState::constant(std::vector<double>(num_displacement_dofs(mesh), 0.0),
                                              std::vector<double>(num_pressure_dofs(mesh), 0.0), 3, 1.0);
  SplitConfig cfg;
  cfg.stabilization = mp.material.l_phys();
  for (auto method : {SplitMethod::ParallelFixedStress, SplitMethod::FixedStress}) {
    const auto r = split_solve(method, sys, mp.material, cfg, guess);
    CHECK(r.report.converged);
    for (const auto& p : r.state.p) {
      for (double v : p) CHECK(v == 0.0);
    }
    for (const auto& u : r.state.u) {
      for (double v : u) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("decoupled problem converges after one effective iteration") {
  auto mp = mandel_preset("fig3");
  mp.material.biot_coefficient = 0.0;
  const auto setup = make_mandel_setup(mp, 6, 6, 4, 1.0);
  SplitConfig cfg;
  cfg.stabilization = mp.material.l_phys();
  CHECK(cfg.stabilization == 0.0);

  const auto pfs = pfs_solve(setup.system, mp.material, cfg, setup.initial_guess);
  CHECK(pfs.report.converged);
  REQUIRE(pfs.report.iteration_count == 2);
  CHECK(pfs.report.iterations[1].increment_measure == 0.0);
  CHECK(pfs.report.iterations[1].max_displacement_increment == 0.0);
  REQUIRE(observed_rate(pfs.report, 2).has_value());
  CHECK(*observed_rate(pfs.report, 2) == 0.0);

  // A plain backward-Euler heat solve gives the same pressures.
  const SplittingOperators ops(setup.system, mp.material, cfg, 1.0);
  auto heat = setup.initial_guess;
  flow_sweep(ops, setup.initial_guess, heat);
  for (int n = 0; n <= 4; ++n) CHECK(heat.p[n] == pfs.state.p[n]);

  const auto fs = fs_solve(setup.system, mp.material, cfg, setup.initial_guess);
  CHECK(fs.report.converged);
  for (int c : fs.report.step_iterations) CHECK(c == 2);
  CHECK(max_rel_diff(fs.state.p, pfs.state.p) <= 1e-12);
}

TEST_CASE("space-time and sequential schemes reach the same fixed point") {
  const auto mp = mandel_preset("nu0.499");
  const auto setup = make_mandel_setup(mp, 8, 8, 6, 1.0);
  SplitConfig cfg;
  cfg.stabilization = mp.material.l_phys();
  const auto pfs = pfs_solve(setup.system, mp.material, cfg, setup.initial_guess);
  const auto fs = fs_solve(setup.system, mp.material, cfg, setup.initial_guess);
  REQUIRE(pfs.report.converged);
  REQUIRE(fs.report.converged);
  CHECK(max_rel_diff(fs.state.p, pfs.state.p) <= 1e-6);
  CHECK(max_rel_diff(fs.state.u, pfs.state.u) <= 1e-6);
  CHECK(fs.state.p[0] == setup.initial_guess.p[0]);
  CHECK(pfs.state.u[0] == setup.initial_guess.u[0]);
  CHECK(fs.report.step_iterations.size() == 6);
  CHECK(pfs.report.factorizations == 2);
  CHECK(fs.report.factorizations == 2);
}

TEST_CASE("mechanics stage is independent of the worker count") {
  const auto mp = mandel_preset("nu0.49");
  const auto setup = make_mandel_setup(mp, 6, 6, 7, 1.0);
  SplitConfig cfg;
  cfg.stabilization = mp.material.l_phys();
  std::vector<SplitResult> runs;
  for (int w : {1, 2, 3, 8}) {
    cfg.workers = w;
    runs.push_back(pfs_solve(setup.system, mp.material, cfg, setup.initial_guess));
  }
  for (const auto& r : runs) {
    CHECK(r.report.iteration_count == runs[0].report.iteration_count);
    CHECK(r.state.u == runs[0].state.u);
    CHECK(r.state.p == runs[0].state.p);
  }
}

TEST_CASE("observed rates and contraction") {
  const auto mp = mandel_preset("fig3");
  const auto setup = make_mandel_setup(mp, 6, 6, 5, 1.0);
  SplitConfig cfg;
  cfg.stabilization = mp.material.l_phys();
  const auto r = pfs_solve(setup.system, mp.material, cfg, setup.initial_guess);
  REQUIRE(r.report.converged);
  REQUIRE(r.report.iteration_count >= 3);
  CHECK_FALSE(r.report.iterations[0].observed_rate.has_value());
  for (int i = 2; i <= r.report.iteration_count; ++i) {
    const auto rate = observed_rate(r.report, i);
    REQUIRE(rate.has_value());
    CHECK(*rate <= r.report.theoretical_rate + 0.05);
  }
  CHECK_THROWS_AS(observed_rate(r.report, 1), std::out_of_range);
  CHECK_THROWS_AS(observed_rate(r.report, r.report.iteration_count + 1), std::out_of_range);
  CHECK(r.report.warnings.empty());

  IterationReport zero;
  zero.iterations.resize(2);
  CHECK_FALSE(observed_rate(zero, 2).has_value());

  const auto fs = fs_solve(setup.system, mp.material, cfg, setup.initial_guess);
  CHECK_THROWS_AS(observed_rate(fs.report, 2), std::invalid_argument);
}

TEST_CASE("non-convergence is reported, not thrown") {
  const auto mp = mandel_preset("fig3");
  const auto setup = make_mandel_setup(mp, 4, 4, 3, 1.0);
  SplitConfig cfg;
  cfg.stabilization = mp.material.l_phys();
  cfg.max_iter = 2;
  const auto pfs = pfs_solve(setup.system, mp.material, cfg, setup.initial_guess);
  CHECK_FALSE(pfs.report.converged);
  CHECK(pfs.report.iteration_count == 2);
  const auto fs = fs_solve(setup.system, mp.material, cfg, setup.initial_guess);
  CHECK_FALSE(fs.report.converged);
  CHECK(fs.report.failed_step == 1);
}

TEST_CASE("under-stabilization is warned about") {
  const auto mp = mandel_preset("fig3");
  const auto setup = make_mandel_setup(mp, 4, 4, 2, 1.0);
  SplitConfig cfg;
  cfg.stabilization = 0.25 * mp.material.l_phys();
  const auto r = pfs_solve(setup.system, mp.material, cfg, setup.initial_guess);
  CHECK(r.report.warnings.size() == 1);
}

TEST_CASE("initial guess must match the system") {
  const auto mp = mandel_preset("fig3");
  const auto setup = make_mandel_setup(mp, 4, 4, 2, 1.0);
  auto guess = setup.initial_guess;
  guess.p[1].pop_back();
  SplitConfig cfg;
  CHECK_THROWS(pfs_solve(setup.system, mp.material, cfg, guess));
  CHECK_THROWS_AS(SpaceTimeState::constant({}, {}, 0, 1.0), std::invalid_argument);
}
