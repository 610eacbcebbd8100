#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "bands.hpp"
#include "chart.hpp"
#include "steady.hpp"

namespace antonov {

// Discretization of odd-in-velocity phase-space functions
//   g(theta, E) = sum_l ghat_l(E) sqrt(2) sin(4 pi l theta),   l = 1..lmax,
// on Gauss-Legendre energy nodes E_j with weights q_j. The weighted inner
// product uses w_j = q_j T_j / |phi'_j|; orthonormal coordinates are
// c_{lj} = sqrt(w_j) ghat_l(E_j), stored l-major (index (l-1)*NE + j).
//
// The velocity moment m(x) = 4 pi \int v g dv is evaluated on a uniform
// x grid by the energy substitution lambda = U0(x) + u^2, which absorbs the
// square-root vanishing of sin(4 pi l theta(x, lambda)) at lambda = U0(x).
// Between nodes, ghat is extended by local cubic Lagrange interpolation
// (zero outside the node span).
struct ModeGrid {
  SteadyState st;
  BandStructure bands;
  int lmax = 0, NE = 0, NX = 0;

  std::vector<double> E, q;    // energy nodes and plain GL weights
  std::vector<double> T;       // periods T(E_j)
  std::vector<double> phip;    // |phi'(E_j)|
  std::vector<double> w;       // H-norm weights q T / |phi'|
  std::vector<double> xg, wx;  // x nodes on [-R0, R0] and trapezoid weights

  Eigen::MatrixXd Vm;  // NX x (lmax NE): c -> m(x_i)
  Eigen::MatrixXd P;   // (lmax NE) x NX: (1/4pi) Vm^T diag(wx)

  int n_coords() const { return lmax * NE; }
  int idx(int l, int j) const { return (l - 1) * NE + j; }

  // theta(x_i, lambda) for grid point i on the upper branch; 1/2 at and below
  // the local potential value, mirrored for negative x_i.
  double theta_at(int i, double lambda) const;

  // Local cubic Lagrange extension of nodal data to energy lambda: on return
  // j0 is the first of four consecutive nodes and wt their weights; all-zero
  // weights outside the node span.
  void lagrange(double lambda, int& j0, double wt[4]) const;

  Eigen::VectorXd velocity_moment(const Eigen::VectorXd& c) const { return Vm * c; }

  // tables theta(x_i, U0(x_i) + w^2) for x_i >= 0, indexed from the center
  struct ThetaTab {
    double U = 0, wmax = 0;
    bool flat = false;  // orbit range degenerate (x_i at the edge)
    Interp th;
  };
  std::vector<ThetaTab> tabs;
};

ModeGrid build_mode_grid(const SteadyState& st, const BandStructure& bands, int NE, int NX = 401);

// c-coordinates of a phase-space function f(theta, E) (trapezoid in theta).
Eigen::VectorXd project_to_coords(const ModeGrid& g, const std::function<double(double, double)>& f,
                                  int ntheta = 1024);

// Pointwise synthesis of coordinates at (theta, E), E anywhere in the span.
double eval_coords(const ModeGrid& g, const Eigen::VectorXd& c, double theta, double E);

}  // namespace antonov
