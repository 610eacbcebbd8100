#pragma once
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "util/interp.hpp"

namespace antonov {

enum class ProfileKind { polytrope, king };

std::string to_string(ProfileKind k);
ProfileKind profile_kind_from_string(const std::string& s);

// Microscopic ansatz f0 = phi(E): polytrope (E0-E)_+^k (k >= 1) or King
// exp(E0-E)-1 above the cutoff E0.
struct AnsatzProfile {
  ProfileKind kind = ProfileKind::polytrope;
  double k = 1.0;
  double E0 = 0.0;

  double phi(double E) const;
  double phi_prime_abs(double E) const;  // |phi'(E)| for E < E0, else 0
};

// Spatial density at potential depth d = E0 - U0(x): g(d) = \int phi dv, in
// closed form. g(0)=0 and g is strictly increasing.
double rho_of_depth(ProfileKind kind, double k, double d);
double rho_of_depth_deriv(ProfileKind kind, double k, double d);
double rho_of_depth_deriv2(ProfileKind kind, double k, double d);  // needs k > 1/2 or King

// Plane-symmetric self-gravitating steady state. U0 is even and convex with
// U0(0) = Emin, U0(+-R0) = E0, and the exact linear tail U0 = 2*pi*M0*|x|
// outside the support. Inside, U0'' = 4*pi*rho0 holds by construction.
struct SteadyState {
  AnsatzProfile profile;
  double h = 0;  // central depth E0 - U0(0)
  double M0 = 0, R0 = 0, E0 = 0, Emin = 0;
  double tol = 1e-10;

  bool synthetic = false;  // harmonic test potential, not self-consistent
  double omega = 0;        // synthetic: U0 = Emin + omega^2 x^2/2 everywhere

  // interior samples on [0, R0]: W = U0 - Emin and W' = U0'
  Interp W_of_x, dW_of_x;

  // center series W = c2 x^2 + c4 x^4 + c6 x^6, used for |x| < x_ser where it
  // beats the sampled interpolant (exact cancellations near the center)
  double c2 = 0, c4 = 0, c6 = 0, x_ser = 0;

  double U0(double x) const;
  double dU0(double x) const;
  double d2U0(double x) const;  // = 4*pi*rho0 inside the support, 0 outside
  double d3U0(double x) const;
  double rho0(double x) const;
  double phi_prime_abs(double E) const { return profile.phi_prime_abs(E); }
};

// Shoot W'' = 4*pi*g(h - W) from W(0)=W'(0)=0 to the depth-exhaustion radius
// W = h; h must be positive.
SteadyState solve_steady_state(ProfileKind kind, double k, double h, double tol = 1e-10,
                               std::size_t n_nodes = 4001);

// Bisect the central depth until the total mass matches.
SteadyState solve_for_mass(ProfileKind kind, double k, double M_target, double tol = 1e-8,
                           double h_lo = 1e-6, double h_hi = 60.0);

// Harmonic test potential with exact closed-form evaluators (|phi'| == 1).
SteadyState test_potential_state(double omega, double h, double Emin = 0.0);

nlohmann::json steady_to_json(const SteadyState& s);
SteadyState steady_from_json(const nlohmann::json& j);

}  // namespace antonov
