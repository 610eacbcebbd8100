#include <doctest.h>

#include <cmath>

#include "util/interp.hpp"
#include "util/ode.hpp"
#include "util/quad.hpp"

using namespace antonov;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  auto r = gauss_legendre(8, -1.0, 3.0);
  double s = integrate(r, [](double x) { return 5 * x * x * x - x + 2; });
  // \int_{-1}^{3} (5x^3 - x + 2) dx = 5/4 (81-1) - (9-1)/2 + 2*4 = 104
  CHECK(s == doctest::Approx(104.0).epsilon(1e-14));
  auto c = composite_gl(8, 16, 0.0, 1.0);
  double t = integrate(c, [](double x) { return std::exp(x); });
  CHECK(t == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-13));
}

TEST_CASE("tanh-sinh handles inverse-sqrt endpoint singularities") {
  // \int_0^1 dx/sqrt(1-x^2) = pi/2, singular at the right endpoint
  double v = tanh_sinh(
      [](double x, double xc) {
        double one_minus_x = xc < 0 ? -xc : 1.0 - x;
        return 1.0 / std::sqrt(one_minus_x * (1.0 + x));
      },
      0.0, 1.0);
  CHECK(v == doctest::Approx(M_PI / 2).epsilon(1e-12));
  // smooth case
  double w = tanh_sinh([](double x) { return std::cos(x); }, 0.0, 1.0);
  CHECK(w == doctest::Approx(std::sin(1.0)).epsilon(1e-13));
}

TEST_CASE("adaptive gauss-kronrod") {
  double v = adaptive_gk([](double x) { return std::exp(-x * x); }, 0.0, 10.0);
  CHECK(v == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-12));
}

TEST_CASE("principal value oracles") {
  // PV \int_0^2 beta/(beta-1) dbeta = 2
  double v1 = principal_value([](double b) { return b; }, 0.0, 2.0, 1.0);
  CHECK(std::abs(v1 - 2.0) <= 1e-10);
  // PV \int_0^2 1/(beta-1) dbeta = 0
  double v2 = principal_value([](double) { return 1.0; }, 0.0, 2.0, 1.0);
  CHECK(std::abs(v2) <= 1e-10);
  // PV \int_0^2 beta^2/(beta-1) dbeta = \int_0^2 (beta+1) dbeta = 4
  double v3 = principal_value([](double b) { return b * b; }, 0.0, 2.0, 1.0);
  CHECK(std::abs(v3 - 4.0) <= 1e-10);
  // off-center pole: PV \int_0^2 1/(x-1/2) dx = log((2-1/2)/(1/2)) = log 3
  double v4 = principal_value([](double) { return 1.0; }, 0.0, 2.0, 0.5);
  CHECK(std::abs(v4 - std::log(3.0)) <= 1e-10);
}

TEST_CASE("steffen interpolation is monotone and accurate") {
  std::vector<double> x, y;
  for (int i = 0; i <= 40; ++i) {
    double t = i / 40.0;
    x.push_back(t);
    y.push_back(t * t * t + 0.2 * t);
  }
  Interp f(x, y);
  CHECK(f(0.333) == doctest::Approx(0.333 * 0.333 * 0.333 + 0.2 * 0.333).epsilon(1e-4));
  CHECK(f.deriv(0.5) == doctest::Approx(3 * 0.25 + 0.2).epsilon(1e-3));
  double prev = f(0.0);
  for (int i = 1; i <= 1000; ++i) {
    double v = f(i / 1000.0);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  // clamping outside the span
  CHECK(f(-1.0) == doctest::Approx(f(0.0)));
  CHECK(f(2.0) == doctest::Approx(f(1.0)));
}

TEST_CASE("event integration locates crossings on dense output") {
  // y'' = -y with y(0)=0, y'(0)=1: y = sin(x); event y - 1/2 => x = pi/6
  auto rhs = [](const State2& y, State2& dy, double) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  auto ev = [](double, const State2& y) { return y[0] - 0.5; };
  EventResult r = integrate_to_event(rhs, {0.0, 1.0}, 0.0, 0.01, 10.0, ev, 1e-12, 1e-14);
  REQUIRE(r.hit);
  CHECK(r.x == doctest::Approx(M_PI / 6).epsilon(1e-10));
  CHECK(r.y[1] == doctest::Approx(std::cos(M_PI / 6)).epsilon(1e-10));
}
