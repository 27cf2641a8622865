#include <doctest.h>

#include <cmath>
#include <random>

#include "msm/solver.hpp"
#include "oracles/riemann_exact.hpp"
#include "support/dam_break.hpp"

using namespace msm;

namespace {

RheologyParams bagnold_params() { return {0.363, 0.74, 0.279, 0.04, 2500.0, 0.62}; }

GridState random_state(std::mt19937_64& rng, std::size_t nx, std::size_t layers) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GridState s(nx, layers, 0.0, 0.01);
  for (std::size_t i = 0; i < nx; ++i) {
    s.h(i) = unit(rng) < 0.3 ? 0.0 : 0.2 * unit(rng);
    if (!s.wet(i)) continue;
    for (std::size_t a = 1; a <= layers; ++a) s.u(i, a) = 2.0 * unit(rng) - 1.0;
  }
  return s;
}

}  // namespace

TEST_SUITE("hyperbolic") {

TEST_CASE("exact Riemann oracle self-consistency") {
  const oracle::RiemannExact exact({1.0, 0.0}, {0.5, 0.0}, 9.81);
  // star state of the classic 1 / 0.5 dam break
  CHECK(exact.h_star() == doctest::Approx(0.726925).epsilon(1e-5));
  CHECK(exact.sample(-100.0).h == 1.0);
  CHECK(exact.sample(100.0).h == 0.5);
  CHECK(exact.sample(exact.u_star()).h == doctest::Approx(exact.h_star()).epsilon(1e-14));
  // the fan joins the left state continuously
  const double head = -std::sqrt(9.81);
  CHECK(exact.sample(head + 1e-9).h == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("stable time step") {
  GridState s(10, 2, 0.0, 0.01);
  for (std::size_t i = 0; i < 10; ++i) s.h(i) = 1.0;
  const Environment env;
  CHECK(stable_dt(s, env, 0.5, 10.0) == doctest::Approx(0.5 * 0.01 / std::sqrt(9.81)).epsilon(1e-14));
  CHECK(stable_dt(s, env, 0.5, 10.0) == doctest::Approx(1.596e-3).epsilon(1e-3));
  GridState wide(10, 2, 0.0, 0.02);
  for (std::size_t i = 0; i < 10; ++i) wide.h(i) = 1.0;
  CHECK(stable_dt(wide, env, 0.5, 10.0) == doctest::Approx(2.0 * stable_dt(s, env, 0.5, 10.0)).epsilon(1e-15));
  CHECK(stable_dt(s, env, 0.5, 1e-4) == 1e-4);
  GridState dry(10, 2, 0.0, 0.01);
  dry.set_time(0.25);
  CHECK(stable_dt(dry, env, 0.5, 1.0) == 0.75);
}

TEST_CASE("uniform state at rest on a flat bed is unchanged") {
  const auto part = LayerPartition::uniform(3);
  GridState s(8, 3, 0.0, 0.1);
  for (std::size_t i = 0; i < 8; ++i) s.h(i) = 0.3;
  const auto next = hyperbolic_step(s, Environment{}, part, 1e-3).state;
  CHECK(next.thickness().size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(next.h(i) == 0.3);
    for (double u : next.column(i)) CHECK(u == 0.0);
  }
  CHECK(next.time() == 1e-3);
}

TEST_CASE("uniform flow is accelerated by the downslope gravity") {
  const auto part = LayerPartition::uniform(2);
  Environment env;
  env.theta = 0.2;
  GridState s(8, 2, 0.0, 0.1);
  for (std::size_t i = 0; i < 8; ++i) {
    s.h(i) = 0.3;
    s.u(i, 1) = s.u(i, 2) = 0.5;
  }
  const double dt = 1e-3;
  const auto next = hyperbolic_step(s, env, part, dt).state;
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(next.h(i) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(next.u(i, 1) == doctest::Approx(0.5 + dt * env.g_tangential()).epsilon(1e-13));
  }
}

TEST_CASE("lake at rest over a bump is preserved by the composed step") {
  const auto part = LayerPartition::uniform(4);
  SolverConfig config;
  config.t_end = 1e9;
  config.stop_on_quiescence = false;
  const Solver solver(part, Environment{}, bagnold_params(), config);
  GridState s(64, 4, 0.0, 0.015625);
  for (std::size_t i = 0; i < 64; ++i) {
    const double bump = (i >= 20 && i < 40) ? 0.25 * static_cast<double>((i - 20) % 5) : 0.0;
    s.z_b(i) = bump;
    s.h(i) = 1.0 - bump;
  }
  const GridState initial = s;
  for (int k = 0; k < 10000; ++k) s = solver.step(s).first;
  double worst = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    worst = std::max(worst, std::abs(s.h(i) - initial.h(i)));
    for (double u : s.column(i)) worst = std::max(worst, std::abs(u));
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("positivity and mass conservation on random wet and dry states") {
  std::mt19937_64 rng(19);
  const Environment env;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t layers = 1 + trial % 4;
    const auto part = LayerPartition::uniform(layers);
    GridState s = random_state(rng, 50, layers);
    const BoundaryConditions walls{Boundary::Wall, Boundary::Wall};
    const double mass = s.mass();
    for (int k = 0; k < 20; ++k) {
      const double dt = stable_dt(s, env, 0.5, 1e9);
      s = hyperbolic_step(s, env, part, dt, walls).state;
      for (double h : s.thickness()) CHECK(h >= 0.0);
    }
    CHECK(std::abs(s.mass() - mass) <= 1e-12 * mass);
  }
}

TEST_CASE("oversized steps are reported, not silently accepted") {
  const auto part = LayerPartition::uniform(1);
  GridState s(20, 1, 0.0, 0.01);
  for (std::size_t i = 0; i < 20; ++i) {
    s.h(i) = i < 10 ? 1.0 : 1e-3;
    s.u(i, 1) = i < 10 ? 3.0 : -3.0;
  }
  CHECK_THROWS_AS(hyperbolic_step(s, Environment{}, part, 1.0), SolverError);
}

TEST_CASE("frictionless dam break approaches the exact solution at first order") {
  const support::DamBreak problem;
  const double coarse = support::dam_break_l1_error(problem, 200);
  const double fine = support::dam_break_l1_error(problem, 400);
  CHECK(fine < coarse);
  CHECK(coarse / fine >= 1.6);
  CHECK(coarse / fine <= 2.4);
  CHECK(fine < 0.01);
}

TEST_CASE("serial and parallel hyperbolic steps agree bitwise") {
  std::mt19937_64 rng(5);
  Environment env;
  env.theta = 0.3;
  const auto part = LayerPartition::uniform(5);
  const GridState s = random_state(rng, 300, 5);
  const double dt = stable_dt(s, env, 0.5, 1e9);
  const auto serial = hyperbolic_step(s, env, part, dt, {}, Execution::Serial);
  const auto parallel = hyperbolic_step(s, env, part, dt, {}, Execution::Parallel);
  CHECK(serial.state == parallel.state);
  CHECK(serial.mass_transfer == parallel.mass_transfer);
}

}
