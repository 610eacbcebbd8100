#include "steady.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "util/ode.hpp"

namespace antonov {

namespace odeint = boost::numeric::odeint;

std::string to_string(ProfileKind k) { return k == ProfileKind::polytrope ? "polytrope" : "king"; }

ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "polytrope") return ProfileKind::polytrope;
  if (s == "king") return ProfileKind::king;
  throw std::domain_error("unknown profile kind: " + s);
}

double AnsatzProfile::phi(double E) const {
  const double d = E0 - E;
  if (d <= 0) return 0;
  return kind == ProfileKind::polytrope ? std::pow(d, k) : std::expm1(d);
}

double AnsatzProfile::phi_prime_abs(double E) const {
  const double d = E0 - E;
  if (d <= 0) return 0;
  return kind == ProfileKind::polytrope ? k * std::pow(d, k - 1) : std::exp(d);
}

double rho_of_depth(ProfileKind kind, double k, double d) {
  if (d <= 0) return 0;
  if (kind == ProfileKind::polytrope) {
    const double c = std::sqrt(2 * M_PI) * std::exp(std::lgamma(k + 1) - std::lgamma(k + 1.5));
    return c * std::pow(d, k + 0.5);
  }
  if (d < 1e-2) {
    // series; the closed form cancels catastrophically as d -> 0
    const double b = 1 + d * (2.0 / 5 + d * (4.0 / 35 + d * (8.0 / 315)));
    return (4 * std::sqrt(2.0) / 3) * std::pow(d, 1.5) * b;
  }
  return std::sqrt(2 * M_PI) * std::exp(d) * std::erf(std::sqrt(d)) - 2 * std::sqrt(2 * d);
}

double rho_of_depth_deriv(ProfileKind kind, double k, double d) {
  if (d <= 0) return 0;
  if (kind == ProfileKind::polytrope) {
    const double c = std::sqrt(2 * M_PI) * std::exp(std::lgamma(k + 1) - std::lgamma(k + 0.5));
    return c * std::pow(d, k - 0.5);
  }
  return std::sqrt(2 * M_PI) * std::exp(d) * std::erf(std::sqrt(d));
}

double rho_of_depth_deriv2(ProfileKind kind, double k, double d) {
  if (d <= 0) return 0;
  if (kind == ProfileKind::polytrope) {
    if (!(k > 0.5)) throw std::domain_error("second depth derivative needs k > 1/2");
    const double c = std::sqrt(2 * M_PI) * std::exp(std::lgamma(k + 1) - std::lgamma(k - 0.5));
    return c * std::pow(d, k - 1.5);
  }
  return rho_of_depth_deriv(kind, k, d) + std::sqrt(2 / d);
}

double SteadyState::U0(double x) const {
  const double ax = std::abs(x);
  if (synthetic) return Emin + 0.5 * omega * omega * x * x;
  if (ax >= R0) return E0 + 2 * M_PI * M0 * (ax - R0);
  if (ax < x_ser) {
    const double x2 = ax * ax;
    return Emin + ((c6 * x2 + c4) * x2 + c2) * x2;
  }
  return Emin + W_of_x(ax);
}

double SteadyState::dU0(double x) const {
  const double ax = std::abs(x), s = x < 0 ? -1.0 : 1.0;
  if (synthetic) return omega * omega * x;
  if (ax >= R0) return s * 2 * M_PI * M0;
  if (ax < x_ser) {
    const double x2 = ax * ax;
    return s * ((6 * c6 * x2 + 4 * c4) * x2 + 2 * c2) * ax;
  }
  return s * dW_of_x(ax);
}

double SteadyState::rho0(double x) const {
  if (synthetic) return omega * omega / (4 * M_PI);
  const double ax = std::abs(x);
  if (ax >= R0) return 0;
  return rho_of_depth(profile.kind, profile.k, std::max(0.0, E0 - U0(ax)));
}

double SteadyState::d2U0(double x) const { return 4 * M_PI * rho0(x); }

double SteadyState::d3U0(double x) const {
  if (synthetic) return 0;
  const double ax = std::abs(x), s = x < 0 ? -1.0 : 1.0;
  if (ax >= R0) return 0;
  if (ax < x_ser) return s * (120 * c6 * ax * ax + 24 * c4) * ax;
  const double d = std::max(0.0, E0 - U0(ax));
  return s * (-4 * M_PI) * rho_of_depth_deriv(profile.kind, profile.k, d) * dU0(ax);
}

namespace {

struct Shot {
  double R0, V_end;
};

Shot shoot(ProfileKind kind, double k, double h, double tol) {
  auto rhs = [&](const State2& y, State2& dy, double) {
    dy[0] = y[1];
    dy[1] = 4 * M_PI * rho_of_depth(kind, k, std::max(0.0, h - y[0]));
  };
  const double g_h = rho_of_depth(kind, k, h);
  const double scale = std::sqrt(h / (4 * M_PI * g_h));
  auto ev = [h](double, const State2& y) { return y[0] - h; };
  EventResult r =
      integrate_to_event(rhs, {0.0, 0.0}, 0.0, 1e-3 * scale, 1e4 * scale, ev, tol, tol * h);
  if (!r.hit) throw std::runtime_error("steady-state shooting did not exhaust the depth");
  return {r.x, r.y[1]};
}

// Center expansion of W'' = 4*pi*g(h - W) with W(0) = W'(0) = 0:
//   W = a x^2/2 + b x^4/24 + w6 x^6/720,
//   a = 4*pi*g(h), b = -4*pi*g'(h) a, w6 = 4*pi*(3 g''(h) a^2 - g'(h) b).
// Replaces the sampled interpolant near the center, where differences of the
// kind U0'^2 - 2 (U0 - Emin) U0'' would otherwise drown in sampling noise.
static void set_center_series(SteadyState& st) {
  const ProfileKind kind = st.profile.kind;
  const double k = st.profile.k, h = st.h;
  const double a = 4 * M_PI * rho_of_depth(kind, k, h);
  const double b = -4 * M_PI * rho_of_depth_deriv(kind, k, h) * a;
  const double w6 =
      4 * M_PI * (3 * rho_of_depth_deriv2(kind, k, h) * a * a - rho_of_depth_deriv(kind, k, h) * b);
  st.c2 = a / 2;
  st.c4 = b / 24;
  st.c6 = w6 / 720;
  const auto& xs = st.W_of_x.xs();
  st.x_ser = std::min(8 * (xs[1] - xs[0]), st.R0 / 10);
}

}  // namespace

SteadyState solve_steady_state(ProfileKind kind, double k, double h, double tol,
                               std::size_t n_nodes) {
  if (!(h > 0)) throw std::domain_error("depth must be positive");
  if (kind == ProfileKind::polytrope && !(k >= 1)) throw std::domain_error("polytrope needs k >= 1");
  if (!(tol > 0) || n_nodes < 16) throw std::domain_error("bad solver parameters");

  Shot s = shoot(kind, k, h, tol);

  SteadyState st;
  st.profile.kind = kind;
  st.profile.k = k;
  st.h = h;
  st.tol = tol;
  st.R0 = s.R0;
  st.M0 = s.V_end / (2 * M_PI);
  st.E0 = 2 * M_PI * st.M0 * st.R0;
  st.Emin = st.E0 - h;
  st.profile.E0 = st.E0;

  // dense resample of (W, W') on a uniform grid for the evaluators
  std::vector<double> xs(n_nodes), Ws(n_nodes), dWs(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) xs[i] = st.R0 * double(i) / double(n_nodes - 1);
  auto rhs = [&](const State2& y, State2& dy, double) {
    dy[0] = y[1];
    dy[1] = 4 * M_PI * rho_of_depth(kind, k, std::max(0.0, h - y[0]));
  };
  auto stepper = odeint::make_dense_output(tol * h, tol, odeint::runge_kutta_dopri5<State2>());
  State2 y0{0.0, 0.0};
  stepper.initialize(y0, 0.0, 1e-4 * st.R0);
  std::size_t next = 0;
  Ws[0] = 0;
  dWs[0] = 0;
  next = 1;
  while (next < n_nodes) {
    stepper.do_step(rhs);
    while (next < n_nodes && stepper.current_time() >= xs[next]) {
      State2 y;
      stepper.calc_state(xs[next], y);
      Ws[next] = y[0];
      dWs[next] = y[1];
      ++next;
    }
    if (stepper.current_time() > 2 * st.R0) break;
  }
  if (next < n_nodes) {  // final node coincides with the integration end
    Ws[n_nodes - 1] = h;
    dWs[n_nodes - 1] = s.V_end;
    if (next < n_nodes - 1) throw std::runtime_error("steady-state resampling fell short");
  }
  st.W_of_x = Interp(xs, Ws, Interp::steffen);
  st.dW_of_x = Interp(xs, dWs, Interp::steffen);
  set_center_series(st);
  return st;
}

SteadyState solve_for_mass(ProfileKind kind, double k, double M_target, double tol, double h_lo,
                           double h_hi) {
  if (!(M_target > 0)) throw std::domain_error("target mass must be positive");
  auto mass = [&](double h) { return shoot(kind, k, h, 1e-10).V_end / (2 * M_PI); };
  double m_lo = mass(h_lo), m_hi = mass(h_hi);
  if (M_target < m_lo || M_target > m_hi)
    throw std::domain_error("target mass outside the admissible depth range");
  double lo = h_lo, hi = h_hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double m = mass(mid);
    (m < M_target ? lo : hi) = mid;
    if (std::abs(m - M_target) <= tol * M_target && (hi - lo) <= 1e-12 * (1 + mid)) break;
  }
  return solve_steady_state(kind, k, 0.5 * (lo + hi));
}

SteadyState test_potential_state(double omega, double h, double Emin) {
  if (!(omega > 0) || !(h > 0)) throw std::domain_error("test potential needs omega, h > 0");
  SteadyState st;
  st.synthetic = true;
  st.omega = omega;
  st.h = h;
  st.Emin = Emin;
  st.E0 = Emin + h;
  st.R0 = std::sqrt(2 * h) / omega;
  st.M0 = omega * omega * st.R0 / (2 * M_PI);
  st.profile.kind = ProfileKind::polytrope;
  st.profile.k = 1;
  st.profile.E0 = st.E0;
  return st;
}

nlohmann::json steady_to_json(const SteadyState& s) {
  nlohmann::json j;
  j["schema"] = "steady-state/1";
  j["kind"] = to_string(s.profile.kind);
  j["k"] = s.profile.k;
  j["h"] = s.h;
  j["tol"] = s.tol;
  j["M0"] = s.M0;
  j["R0"] = s.R0;
  j["E0"] = s.E0;
  j["Emin"] = s.Emin;
  j["synthetic"] = s.synthetic;
  j["omega"] = s.omega;
  if (!s.synthetic) {
    j["nodes"]["x"] = s.W_of_x.xs();
    j["nodes"]["W"] = s.W_of_x.ys();
    j["nodes"]["dW"] = s.dW_of_x.ys();
  }
  return j;
}

SteadyState steady_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "steady-state/1") throw std::domain_error("bad steady-state file");
  SteadyState s;
  s.profile.kind = profile_kind_from_string(j.at("kind").get<std::string>());
  s.profile.k = j.at("k").get<double>();
  s.h = j.at("h").get<double>();
  s.tol = j.at("tol").get<double>();
  s.M0 = j.at("M0").get<double>();
  s.R0 = j.at("R0").get<double>();
  s.E0 = j.at("E0").get<double>();
  s.Emin = j.at("Emin").get<double>();
  s.synthetic = j.at("synthetic").get<bool>();
  s.omega = j.at("omega").get<double>();
  s.profile.E0 = s.E0;
  if (!s.synthetic) {
    auto x = j.at("nodes").at("x").get<std::vector<double>>();
    auto W = j.at("nodes").at("W").get<std::vector<double>>();
    auto dW = j.at("nodes").at("dW").get<std::vector<double>>();
    s.W_of_x = Interp(x, W, Interp::steffen);
    s.dW_of_x = Interp(std::move(x), std::move(dW), Interp::steffen);
    set_center_series(s);
  }
  return s;
}

}  // namespace antonov
