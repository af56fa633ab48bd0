#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "contact/error.hpp"
#include "contact/integrators.hpp"
#include "contact/variational.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace contact;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

Window window(double xj, double xn, double zj, double zn, double t, double h) {
  return Window{v1(xj), v1(xn), zj, zn, t, h};
}

// Same discrete Lagrangian as contact2 but with every partial left to finite differences.
DiscreteLagrangian fd_only_contact2(double alpha) {
  return DiscreteLagrangian(
      "fd-contact2",
      [alpha](const Window& w) {
        const double chord = (w.x_next[0] - w.x_j[0]) / w.h;
        return 0.5 * chord * chord - 0.25 * (w.x_j[0] * w.x_j[0] + w.x_next[0] * w.x_next[0]) -
               0.5 * alpha * (w.z_j + w.z_next);
      },
      true);
}

}  // namespace

TEST_CASE("solve_z_update examples") {
  const auto c1 = contact1_lagrangian(OscillatorSystem::damped(0.1));
  CHECK_FALSE(c1.depends_on_z_next());
  CHECK(solve_z_update(c1, v1(1), v1(0.995), 0.0, 0.0, 0.1) ==
        doctest::Approx(-0.049625625).epsilon(1e-14));
  CHECK(solve_z_update(c1, v1(0), v1(0), 0.0, 0.0, 0.1) == 0.0);
  CHECK(solve_z_update(contact2_lagrangian(OscillatorSystem::damped(0.1)), v1(0), v1(0), 0.0, 0.0,
                       0.1) == 0.0);

  const auto q = contact_quad_z_lagrangian(OscillatorSystem::quadratic(0.1));
  CHECK(q.depends_on_z_next());
  const double expected =
      oracle::bisect([](double z) { return z - 1.0 - 0.1 * (-0.025 - 0.025 * z * z); }, 0.5, 1.5);
  const double z = solve_z_update(q, v1(0), v1(0), 1.0, 0.0, 0.1);
  CHECK(std::abs(z - expected) <= 1e-11);
  CHECK(std::abs(z - 0.995024814048584) <= 1e-11);
  const double L = q(window(0, 0, 1.0, z, 0.0, 0.1));
  CHECK(std::abs(z - 1.0 - 0.1 * L) <= 1e-12 * (1.0 + std::abs(z)));
}

TEST_CASE("solve_z_update picks the root continuous in h") {
  const auto q = contact_quad_z_lagrangian(OscillatorSystem::quadratic(0.5));
  for (double h : {0.2, 0.1, 0.01}) {
    const double z = solve_z_update(q, v1(0.3), v1(0.31), 0.8, 0.0, h);
    CHECK(std::abs(z - 0.8) < 0.2);
  }
}

TEST_CASE("solve_z_update failures") {
  // z+ = z + h (1 + z+^2) has no real root for h = 1, z = 1.
  DiscreteLagrangian none("no-root", [](const Window& w) { return 1.0 + w.z_next * w.z_next; },
                          true);
  CHECK_THROWS_AS((void)solve_z_update(none, v1(0), v1(0), 1.0, 0.0, 1.0), Error);

  // D4 L = 1/h makes 1 - h D4 L vanish.
  DiscreteLagrangian singular("singular", [](const Window& w) { return 10.0 * w.z_next; }, true);
  singular.with_d4([](const Window&) { return 10.0; });
  CHECK_THROWS_AS((void)solve_z_update(singular, v1(0), v1(0), 1.0, 0.0, 0.1), SingularUpdate);
}

TEST_CASE("analytic partials match finite differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const std::vector<DiscreteLagrangian> Ls = {
      contact1_lagrangian(OscillatorSystem::damped(0.3)),
      contact2_lagrangian(OscillatorSystem::damped(0.3)),
      contact_quad_z_lagrangian(OscillatorSystem::quadratic(0.3)),
      contact2_forced_lagrangian(OscillatorSystem::forced(0.3, 0.5, 0.8))};
  for (const auto& L : Ls) {
    CHECK(L.has_analytic_partials());
    for (int i = 0; i < 20; ++i) {
      const Window w = window(u(rng), u(rng), u(rng), u(rng), u(rng), 0.1);
      CHECK(partials_error(L, w) <= 1e-6);
      CHECK(std::abs(cross_hessian(L, w).determinant()) > 1.0);
    }
  }
}

TEST_CASE("finite-difference partials stand in for missing ones") {
  const auto fd = fd_only_contact2(0.2);
  const auto an = contact2_lagrangian(OscillatorSystem::damped(0.2));
  CHECK_FALSE(fd.has_analytic_partials());
  const Window w = window(0.7, 0.65, 0.1, 0.08, 0.0, 0.1);
  CHECK(fd.d1(w)[0] == doctest::Approx(an.d1(w)[0]).epsilon(1e-7));
  CHECK(fd.d2(w)[0] == doctest::Approx(an.d2(w)[0]).epsilon(1e-7));
  CHECK(fd.d3(w) == doctest::Approx(an.d3(w)).epsilon(1e-7));
  CHECK(fd.d4(w) == doctest::Approx(an.d4(w)).epsilon(1e-7));

  // The engine driven by FD partials reproduces the closed-form stepper.
  const auto sys = OscillatorSystem::damped(0.2);
  const ContactState s = make_state(0, 0.7, -0.2, 0.1);
  const ContactState a = position_momentum_step(fd, s, 0.1);
  const ContactState b = contact2_step(sys, s, 0.1);
  CHECK(std::abs(a.x[0] - b.x[0]) <= 1e-9);
  CHECK(std::abs(a.p[0] - b.p[0]) <= 1e-7);
  CHECK(std::abs(a.z - b.z) <= 1e-9);
}

TEST_CASE("dgel_residual") {
  SUBCASE("undamped leapfrog points") {
    const auto sys = OscillatorSystem::damped(0.0);
    const auto L = contact1_lagrangian(sys);
    ContactState s0 = make_state(0, 1, 0, 0);
    const ContactState s1 = leapfrog_step(sys, s0, 0.1);
    const ContactState s2 = leapfrog_step(sys, s1, 0.1);
    const StepTriple tr{s0.x, s1.x, s2.x, s0.z, s1.z, s2.z, s1.t, 0.1};
    CHECK(std::abs(dgel_residual(L, tr)[0]) <= 1e-12);
  }
  SUBCASE("contact1 outputs and first-order perturbation") {
    const auto sys = OscillatorSystem::damped(0.1);
    const auto L = contact1_lagrangian(sys);
    const ContactState s0 = make_state(0, 1, 0, 0);
    const ContactState s1 = contact1_step(sys, s0, 0.1);
    const ContactState s2 = contact1_step(sys, s1, 0.1);
    StepTriple tr{s0.x, s1.x, s2.x, s0.z, s1.z, s2.z, 0.1, 0.1};
    CHECK(std::abs(dgel_residual(L, tr)[0]) <= 1e-12);

    const double cross = -1.0 / (0.1 * 0.1);  // d/dx_{j+1} of D1 L
    tr.x_next[0] += 1e-3;
    tr.z_next = solve_z_update(L, tr.x_cur, tr.x_next, tr.z_cur, tr.t_cur, 0.1);
    CHECK(dgel_residual(L, tr)[0] == doctest::Approx(1e-3 * cross).epsilon(1e-9));
    CHECK(cross_hessian(L, tr.current())(0, 0) == doctest::Approx(cross).epsilon(1e-6));
  }
}

TEST_CASE("solve_next_position") {
  SUBCASE("contact1 matches the closed-form stepper") {
    const auto sys = OscillatorSystem::damped(0.1);
    const auto L = contact1_lagrangian(sys);
    const ContactState s1 = contact1_step(sys, make_state(0, 1, 0, 0), 0.1);
    const ContactState s2 = contact1_step(sys, s1, 0.1);
    CHECK(s1.z == doctest::Approx(-0.049625625).epsilon(1e-14));
    const auto [x, z] = solve_next_position(L, v1(1), v1(0.995), 0.0, -0.049625625, 0.1, 0.1);
    CHECK(std::abs(x[0] - s2.x[0]) <= 1e-12);
    CHECK(std::abs(z - s2.z) <= 1e-12);
  }
  SUBCASE("alpha = 0 reproduces leapfrog") {
    const auto sys = OscillatorSystem::damped(0.0);
    const auto L = contact2_lagrangian(sys);
    const ContactState s0 = make_state(0, 0.4, 1.1, 0);
    const ContactState s1 = leapfrog_step(sys, s0, 0.1);
    const ContactState s2 = leapfrog_step(sys, s1, 0.1);
    const auto [x, z] = solve_next_position(L, s0.x, s1.x, s0.z, s1.z, s1.t, 0.1);
    CHECK(std::abs(x[0] - s2.x[0]) <= 1e-12);
  }
  SUBCASE("quadratic z from random states is self-consistent") {
    const auto sys = OscillatorSystem::quadratic(0.4);
    const auto L = contact_quad_z_lagrangian(sys);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 10; ++i) {
      const ContactState s0 = make_state(0, u(rng), u(rng), u(rng));
      const ContactState s1 = contact_quad_z_step(sys, s0, 0.1);
      const auto [x, z] = solve_next_position(L, s0.x, s1.x, s0.z, s1.z, s1.t, 0.1);
      const StepTriple tr{s0.x, s1.x, x, s0.z, s1.z, z, s1.t, 0.1};
      CHECK(std::abs(dgel_residual(L, tr)[0]) <= 1e-12);
    }
  }
  SUBCASE("a vector configuration") {
    const auto sys = OscillatorSystem::damped(0.3);
    const auto L = contact2_lagrangian(sys);
    ContactState s0;
    s0.x = Vector{{0.5, -1.0, 0.2}};
    s0.p = Vector{{0.1, 0.3, -0.7}};
    const ContactState s1 = contact2_step(sys, s0, 0.1);
    const ContactState s2 = contact2_step(sys, s1, 0.1);
    const auto [x, z] = solve_next_position(L, s0.x, s1.x, s0.z, s1.z, s1.t, 0.1);
    CHECK((x - s2.x).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(std::abs(z - s2.z) <= 1e-12);
  }
}

TEST_CASE("discrete Legendre transforms") {
  const auto c1 = contact1_lagrangian(OscillatorSystem::damped(0.1));
  const auto c2 = contact2_lagrangian(OscillatorSystem::damped(0.1));
  const Window w = window(1, 0.995, 0, 0, 0, 0.1);
  CHECK(legendre_minus(c1, w)[0] == doctest::Approx(-0.09975).epsilon(1e-13));
  CHECK(legendre_minus(c2, w)[0] == doctest::Approx(-0.09975 / 1.005).epsilon(1e-13));
  CHECK(legendre_minus(c2, w)[0] == doctest::Approx(-0.099253731).epsilon(1e-8));
  CHECK(std::abs(legendre_plus(c1, w)[0]) <= 1e-15);

  const auto c0 = contact1_lagrangian(OscillatorSystem::damped(0.0));
  CHECK(legendre_plus(c0, w)[0] == doctest::Approx(-0.1 * c0.d1(w)[0]).epsilon(1e-15));
}

TEST_CASE("momenta match on dgEL-satisfying triples") {
  for (StepperId id : {StepperId::Contact1, StepperId::Contact2, StepperId::ContactQuadZ,
                       StepperId::Contact2Forced}) {
    const OscillatorSystem sys = id == StepperId::ContactQuadZ ? OscillatorSystem::quadratic(0.3)
                                 : id == StepperId::Contact2Forced
                                     ? OscillatorSystem::forced(0.3, 0.5, 0.8)
                                     : OscillatorSystem::damped(0.3);
    const auto L = *discrete_lagrangian_for(id, sys);
    const Trajectory traj = integrate(id, sys, make_state(0, 1.2, -0.4, 0.3), 0.1, 50);
    for (std::size_t j = 1; j + 1 < traj.size(); ++j) {
      const ContactState& a = traj.states[j - 1];
      const ContactState& b = traj.states[j];
      const ContactState& c = traj.states[j + 1];
      const Vector pm = legendre_minus(L, Window{a.x, b.x, a.z, b.z, a.t, 0.1});
      const Vector pp = legendre_plus(L, Window{b.x, c.x, b.z, c.z, b.t, 0.1});
      CHECK(std::abs(pm[0] - pp[0]) <= 1e-10);
      CHECK(std::abs(pm[0] - b.p[0]) <= 1e-10);
    }
  }
}

TEST_CASE("position_momentum_step") {
  const ContactState s = make_state(0.0, 0.8, -0.3, 0.2);
  const auto lin = OscillatorSystem::damped(0.1);
  ContactState a = position_momentum_step(contact1_lagrangian(lin), s, 0.1);
  ContactState b = contact1_step(lin, s, 0.1);
  CHECK(std::abs(a.x[0] - b.x[0]) <= 1e-12);
  CHECK(std::abs(a.p[0] - b.p[0]) <= 1e-12);
  CHECK(std::abs(a.z - b.z) <= 1e-12);

  a = position_momentum_step(contact2_lagrangian(lin), s, 0.1);
  b = contact2_step(lin, s, 0.1);
  CHECK(std::abs(a.x[0] - b.x[0]) <= 1e-12);
  CHECK(std::abs(a.p[0] - b.p[0]) <= 1e-12);
  CHECK(std::abs(a.z - b.z) <= 1e-12);

  const ContactState o = position_momentum_step(contact2_lagrangian(lin), make_state(0, 0, 0, 0), 0.1);
  CHECK(o.t == doctest::Approx(0.1));
  CHECK(o.x[0] == 0.0);
  CHECK(o.p[0] == 0.0);
  CHECK(o.z == 0.0);
}

TEST_CASE("discrete_conformal_factor") {
  const Window w = window(0.3, 0.2, 0.5, 0.4, 0, 0.1);
  CHECK(discrete_conformal_factor(contact1_lagrangian(OscillatorSystem::damped(0.1)), w) ==
        doctest::Approx(0.99).epsilon(1e-15));
  CHECK(discrete_conformal_factor(contact2_lagrangian(OscillatorSystem::damped(0.1)), w) ==
        doctest::Approx(0.995 / 1.005).epsilon(1e-15));
  CHECK(discrete_conformal_factor(contact2_lagrangian(OscillatorSystem::damped(0.1)), w) ==
        doctest::Approx(0.990049751).epsilon(1e-9));
  CHECK(discrete_conformal_factor(contact2_lagrangian(OscillatorSystem::damped(0.0)), w) == 1.0);
  CHECK(discrete_conformal_factor(contact_quad_z_lagrangian(OscillatorSystem::quadratic(0.1)), w) ==
        doctest::Approx((1.0 - 0.1 * 0.05 * 0.5) / (1.0 + 0.1 * 0.05 * 0.4)).epsilon(1e-15));
}

TEST_CASE("wrong damping kind is rejected") {
  CHECK_THROWS_AS((void)contact_quad_z_lagrangian(OscillatorSystem::damped(0.1)), UnsupportedSystem);
  CHECK_THROWS_AS((void)contact2_forced_lagrangian(OscillatorSystem::quadratic(0.1)),
                  UnsupportedSystem);
}
