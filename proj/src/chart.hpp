#pragma once

#include <utility>

#include "steady.hpp"
#include "util/interp.hpp"

namespace antonov {

// Per-energy trapped-orbit data: turning point, period, period derivative,
// and angle tables on the quarter orbit x in [0, xplus] (velocity > 0).
// Angle convention: theta(-xplus)=0, theta(0)=1/4, theta(+xplus)=1/2 on the
// upper branch; the lower branch is theta -> 1-theta.
struct EnergyRecord {
  double E = 0;
  double xplus = 0;
  double T = 0;
  double Tprime = 0;
  Interp theta_of_x;  // [0, xplus] -> [1/4, 1/2]
  Interp x_of_theta;  // [1/4, 1/2] -> [0, xplus]
};

// Rightmost point reachable at energy E (solves U0(x) = E, x >= 0).
double turning_point(const SteadyState& st, double E);

// Period of the trapped orbit at energy E in (Emin, ...).
double period(const SteadyState& st, double E);

// dT/dE, computed from the regularized derivative integral (0 for the
// quadratic test potential).
double period_derivative(const SteadyState& st, double E);

// Limit of the period as E -> Emin: 2*pi / sqrt(U0''(0)).
double period_at_min_energy(const SteadyState& st);

EnergyRecord make_energy_record(const SteadyState& st, double E, int n_nodes = 513);

// Angle of phase point (x, v>0); clamps to [0, 1/2] outside [-xplus, xplus].
double angle_of_x(const EnergyRecord& rec, double x);

// Position on the full circle theta in [0, 1) (wraps outside).
double x_of_angle(const EnergyRecord& rec, double theta);

// (x, v) of the phase point at angle theta.
std::pair<double, double> position_velocity(const SteadyState& st, const EnergyRecord& rec,
                                            double theta);

}  // namespace antonov
