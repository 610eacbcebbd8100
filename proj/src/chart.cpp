#include "chart.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "util/quad.hpp"

namespace antonov {

namespace {

// D(s) = (U0(xplus) - U0(xplus - s^2)) / s^2, the regularized kinetic factor
// after the substitution x = xplus - s^2.  Near s = 0 the difference is formed
// from a Taylor expansion at xplus to avoid cancellation; D(0) = U0'(xplus).
struct KineticFactor {
  const SteadyState* st;
  double xplus, d1, d2, d3;

  KineticFactor(const SteadyState& s, double xp)
      : st(&s), xplus(xp), d1(s.dU0(xp)), d2(s.d2U0(xp)), d3(s.d3U0(xp)) {}

  double operator()(double s) const {
    const double xc = s * s;
    if (xc <= 1e-4 * xplus) {
      return d1 - xc * (d2 / 2 - xc * d3 / 6);
    }
    return (st->U0(xplus) - st->U0(xplus - xc)) / xc;
  }
};

// Integrand weight of dT/dE: M(y) = 1 - 2 (U0 - Emin) U0'' / U0'^2, which
// vanishes quadratically at the center; the closed form cancels there, so a
// small-y expansion takes over.
double tprime_weight(const SteadyState& st, double y) {
  if (st.synthetic) return 0;
  if (y < 1e-6 * st.R0) {  // 0/0 guard at the center; leading behavior
    return M_PI * rho_of_depth_deriv(st.profile.kind, st.profile.k, st.h) * y * y;
  }
  const double du = st.dU0(y);
  return 1 - 2 * (st.U0(y) - st.Emin) * st.d2U0(y) / (du * du);
}

}  // namespace

double turning_point(const SteadyState& st, double E) {
  if (!(E > st.Emin)) throw std::domain_error("energy must exceed the potential minimum");
  if (st.synthetic) return std::sqrt(2 * (E - st.Emin)) / st.omega;
  if (E >= st.E0) return st.R0 + (E - st.E0) / (2 * M_PI * st.M0);
  double a = 0, b = st.R0;
  for (int i = 0; i < 200 && (b - a) > 1e-17 * st.R0; ++i) {
    const double m = 0.5 * (a + b);
    (st.U0(m) < E ? a : b) = m;
  }
  return 0.5 * (a + b);
}

double period(const SteadyState& st, double E) {
  const double xp = turning_point(st, E);
  const KineticFactor D(st, xp);
  const double I = integrate(composite_gl(8, 64, 0, std::sqrt(xp)),
                             [&](double s) { return 1 / std::sqrt(D(s)); });
  return 4 * std::sqrt(2.0) * I;
}

double period_derivative(const SteadyState& st, double E) {
  if (st.synthetic) return 0;
  const double xp = turning_point(st, E);
  const KineticFactor D(st, xp);
  const double I = integrate(composite_gl(8, 64, 0, std::sqrt(xp)), [&](double s) {
    return tprime_weight(st, xp - s * s) / std::sqrt(D(s));
  });
  return 2 * std::sqrt(2.0) * I / (E - st.Emin);
}

double period_at_min_energy(const SteadyState& st) { return 2 * M_PI / std::sqrt(st.d2U0(0)); }

EnergyRecord make_energy_record(const SteadyState& st, double E, int n_nodes) {
  if (n_nodes < 9) throw std::domain_error("angle table needs at least 9 nodes");
  const double xp = turning_point(st, E);
  const KineticFactor D(st, xp);
  const double smax = std::sqrt(xp);
  const int n = n_nodes;

  // Cumulative quarter-orbit transit time from x = xplus inward, on an
  // s-uniform grid (uniform in sqrt(xplus - x), which is linear in theta near
  // the turning point).
  std::vector<double> svals(n), cum(n, 0.0);
  for (int j = 0; j < n; ++j) svals[j] = smax * j / (n - 1);
  for (int j = 1; j < n; ++j) {
    const QuadRule r = gauss_legendre(8, svals[j - 1], svals[j]);
    cum[j] = cum[j - 1] + std::sqrt(2.0) * integrate(r, [&](double s) {
               return 1 / std::sqrt(D(s));
             });
  }

  EnergyRecord rec;
  rec.E = E;
  rec.xplus = xp;
  rec.T = 4 * cum[n - 1];
  rec.Tprime = period_derivative(st, E);

  //  theta(x_j) = 1/2 - cum_j / T,  x_j = xplus - s_j^2  (descending in j)
  std::vector<double> xs(n), th(n);
  for (int j = 0; j < n; ++j) {
    xs[n - 1 - j] = xp - svals[j] * svals[j];
    th[n - 1 - j] = 0.5 - cum[j] / rec.T;
  }
  xs[0] = 0.0;  // exact endpoints
  th[0] = 0.25;
  xs[n - 1] = xp;
  th[n - 1] = 0.5;
  rec.theta_of_x = Interp(xs, th, Interp::Kind::steffen);
  rec.x_of_theta = Interp(th, xs, Interp::Kind::steffen);
  return rec;
}

double angle_of_x(const EnergyRecord& rec, double x) {
  if (x >= rec.xplus) return 0.5;
  if (x <= -rec.xplus) return 0.0;
  return x >= 0 ? rec.theta_of_x(x) : 0.5 - rec.theta_of_x(-x);
}

double x_of_angle(const EnergyRecord& rec, double theta) {
  double t = theta - std::floor(theta);
  if (t > 0.5) t = 1 - t;  // lower branch mirrors the upper one in x
  return t >= 0.25 ? rec.x_of_theta(t) : -rec.x_of_theta(0.5 - t);
}

std::pair<double, double> position_velocity(const SteadyState& st, const EnergyRecord& rec,
                                            double theta) {
  const double t = theta - std::floor(theta);
  const double x = x_of_angle(rec, theta);
  double v = std::sqrt(std::max(0.0, 2 * (rec.E - st.U0(x))));
  if (t > 0.5) v = -v;
  return {x, v};
}

}  // namespace antonov
