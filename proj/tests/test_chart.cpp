#include <doctest.h>

#include <cmath>

#include "chart.hpp"
#include "steady.hpp"

using namespace antonov;

TEST_CASE("quadratic potential: closed-form orbit data") {
  const double omega = 2.0;
  SteadyState st = test_potential_state(omega, 1.0);

  for (int i = 1; i <= 50; ++i) {
    const double E = st.Emin + (st.E0 - st.Emin) * i / 51.0;
    CHECK(turning_point(st, E) == doctest::Approx(std::sqrt(2 * E) / omega).epsilon(1e-13));
    CHECK(period(st, E) == doctest::Approx(2 * M_PI / omega).epsilon(1e-12));
    CHECK(period_derivative(st, E) == 0.0);
  }
  CHECK(period_at_min_energy(st) == doctest::Approx(2 * M_PI / omega).epsilon(1e-14));

  const double E = 0.5;
  EnergyRecord rec = make_energy_record(st, E);
  const double xp = rec.xplus;
  CHECK(rec.T == doctest::Approx(M_PI).epsilon(1e-12));

  // angle of x = xplus/sqrt(2) on the rising branch is 3/8
  CHECK(angle_of_x(rec, xp / std::sqrt(2.0)) == doctest::Approx(0.375).epsilon(1e-9));
  // x(theta) = -xplus cos(2 pi theta)
  for (int i = 0; i <= 40; ++i) {
    const double th = i / 40.0;
    CHECK(x_of_angle(rec, th) ==
          doctest::Approx(-xp * std::cos(2 * M_PI * th)).scale(xp).epsilon(1e-8));
  }
  // theta(x) inverts the sine
  for (int i = -9; i <= 9; ++i) {
    const double x = xp * i / 10.0;
    const double want = (std::asin(x / xp) + M_PI / 2) / (2 * M_PI);
    CHECK(angle_of_x(rec, x) == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("chart conventions and round trips") {
  SteadyState st = solve_steady_state(ProfileKind::polytrope, 1, 1);
  const double E = st.Emin + 0.6 * (st.E0 - st.Emin);
  EnergyRecord rec = make_energy_record(st, E);

  CHECK(rec.xplus < st.R0);
  CHECK(st.U0(rec.xplus) == doctest::Approx(E).epsilon(1e-12));

  // quarter-orbit symmetry: theta(x) + theta(-x) = 1/2 on the upper branch
  for (double f : {0.15, 0.5, 0.95}) {
    CHECK(angle_of_x(rec, f * rec.xplus) + angle_of_x(rec, -f * rec.xplus) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
  // endpoints
  CHECK(angle_of_x(rec, rec.xplus) == 0.5);
  CHECK(angle_of_x(rec, -rec.xplus) == 0.0);
  CHECK(x_of_angle(rec, 0.25) == doctest::Approx(0.0).scale(1).epsilon(1e-12));

  // x(theta(x)) round trip
  for (int i = -19; i <= 19; ++i) {
    const double x = rec.xplus * i / 20.0;
    CHECK(x_of_angle(rec, angle_of_x(rec, x)) == doctest::Approx(x).scale(rec.xplus).epsilon(1e-9));
  }

  // full-circle conventions and exact energy conservation
  for (int i = 0; i < 24; ++i) {
    const double th = i / 24.0;
    auto [x, v] = position_velocity(st, rec, th);
    CHECK(0.5 * v * v + st.U0(x) == doctest::Approx(E).epsilon(1e-11));
    if (th > 0 && th < 0.5) CHECK(v > 0);
    if (th > 0.5) CHECK(v < 0);
    // lower branch mirrors the upper one (v is only sqrt-accurate at turning points)
    auto [xm, vm] = position_velocity(st, rec, 1.0 - th);
    CHECK(xm == doctest::Approx(x).scale(rec.xplus).epsilon(1e-12));
    CHECK(vm == doctest::Approx(-v).scale(1).epsilon(1e-7));
  }
}

TEST_CASE("period derivative matches finite differences") {
  SteadyState st = solve_steady_state(ProfileKind::polytrope, 1, 1);
  const double range = st.E0 - st.Emin;
  for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double E = st.Emin + f * range;
    const double d = 1e-5 * range;
    const double fd = (period(st, E + d) - period(st, E - d)) / (2 * d);
    CHECK(period_derivative(st, E) == doctest::Approx(fd).epsilon(1e-6));
  }
  // periods grow with energy for this profile
  double prev = 0;
  for (int i = 1; i <= 20; ++i) {
    const double T = period(st, st.Emin + range * i / 21.0);
    CHECK(T > prev);
    CHECK(period_derivative(st, st.Emin + range * i / 21.0) > 0);
    prev = T;
  }
}

TEST_CASE("period approaches the center limit at low energy") {
  for (auto kind : {ProfileKind::polytrope, ProfileKind::king}) {
    SteadyState st = solve_steady_state(kind, kind == ProfileKind::polytrope ? 1.5 : 0, 1);
    const double range = st.E0 - st.Emin;
    const double Tlim = period_at_min_energy(st);
    CHECK(Tlim == doctest::Approx(std::sqrt(M_PI / st.rho0(0))).epsilon(1e-12));
    CHECK(period(st, st.Emin + 1e-6 * range) == doctest::Approx(Tlim).epsilon(1e-3));
    // T - Tlim is asymptotically linear in E - Emin: two-point extrapolation
    const double T1 = period(st, st.Emin + 1e-4 * range);
    const double T2 = period(st, st.Emin + 2e-4 * range);
    CHECK(2 * T1 - T2 == doctest::Approx(Tlim).epsilon(1e-6));
  }
}

TEST_CASE("king chart sanity") {
  SteadyState st = solve_steady_state(ProfileKind::king, 0, 1);
  const double E = st.Emin + 0.8 * (st.E0 - st.Emin);
  EnergyRecord rec = make_energy_record(st, E);
  CHECK(rec.T > 0);
  CHECK(rec.Tprime > 0);
  CHECK(rec.xplus > 0);
  CHECK(rec.xplus < st.R0);
  const double fd =
      (period(st, E + 1e-5) - period(st, E - 1e-5)) / 2e-5;
  CHECK(rec.Tprime == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("chart rejects energies at or below the minimum") {
  SteadyState st = solve_steady_state(ProfileKind::polytrope, 1, 1);
  CHECK_THROWS_AS(turning_point(st, st.Emin), std::domain_error);
  CHECK_THROWS_AS(period(st, st.Emin - 0.1), std::domain_error);
}
