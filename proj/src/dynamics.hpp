#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ops.hpp"
#include "scatter.hpp"

namespace antonov {

// Spectral solution of the wave equation d^2/dt^2 g + A g = 0 with g(0) = f0
// and dg/dt(0) = 0:
//   g(t) = cos(sqrt(A) t) f0,   h(t) = -A^{-1/2} sin(sqrt(A) t) f0,
// with the gravitational force F(t) = -Vm h(t) (the velocity moment of the
// auxiliary variable), dF/dt = Vm g(t), and U(t,x) = -int_{-R0}^x F. The time
// grid is uniform over [0, horizon]; a negative horizon runs backwards.
struct EvolutionResult {
  std::vector<double> t;
  Eigen::MatrixXd g, h;    // coordinates, one column per snapshot
  Eigen::MatrixXd Fx, Ux;  // force and potential profiles on the x grid
  Eigen::VectorXd Fnorm, dFnorm;  // L2(x) norms per snapshot
  Eigen::VectorXd Usup;           // sup-norm of the potential per snapshot
  double energy_drift = 0;        // max relative drift of |dg|^2 + <Ag,g>
  double recurrence_T = 0;        // 2 pi / median nn gap of in-band sqrt(lambda)
  bool horizon_warning = false;   // |horizon| above half the recurrence time
};

EvolutionResult evolve(const OperatorSet& ops, const EigenReport& eig, const Eigen::VectorXd& f0,
                       double horizon, int nt);

// force profile of auxiliary coordinates: F = -Vm h, supported in [-R0, R0]
Eigen::VectorXd force_profile(const ModeGrid& g, const Eigen::VectorXd& h);

// potential from a force profile: U(x) = -int_{-R0}^x F, trapezoid on the x grid
Eigen::VectorXd potential_profile(const ModeGrid& g, const Eigen::VectorXd& F);

// Landau-damping metrics of one evolution:
//   late_ratio_F  = sup ||F|| over the last fifth of the horizon / max ||F||,
//   late_ratio_U  = same for sup|U|,
//   cesaro_dF     = (1/T) int_0^T ||dF/dt|| at log-spaced T (decreasing for
//                   damped runs, the averaged-decay surrogate),
//   pot_bound_max = max_t sup|U| / (sqrt(2 R0) ||F||), <= 1 + quadrature slack,
//   fft: dominant frequency of F(t, x_probe) over the leading power-of-two
//   window, x_probe the peak-force grid point; expected peak sqrt(lambda)/2pi
//   for eigenvector data with frequency resolution one bin.
struct DampingReport {
  double late_ratio_F = 0, late_ratio_U = 0;
  std::vector<double> cesaro_T, cesaro_dF;
  bool cesaro_decreasing = false;
  double pot_bound_max = 0;
  double fft_freq = 0, fft_bin = 0;  // peak frequency and bin width
  bool horizon_warning = false;
};

DampingReport damping_report(const ModeGrid& g, const EvolutionResult& ev, int n_cesaro = 6);

// distance of the evolution to the free asymptote
//   g_as(t) = Re( e^{-it sqrt(A0)} Wp^H f0 )
// on the same uniform grid, with the Cesaro mean over the late window
struct FreeFlowReport {
  std::vector<double> t, dist;
  double dist0 = 0;
  double cesaro_late = 0;
};

FreeFlowReport free_flow_comparison(const OperatorSet& ops, const EigenReport& eig,
                                    const SpectralMaps& maps, const Eigen::VectorXd& f0,
                                    double horizon, int nt);

// initial-data library
// (a) single-mode Gaussian bump ghat_l(E) = exp(-(E-Ec)^2 / 2 s^2)
Eigen::VectorXd data_mode_bump(const ModeGrid& g, int l, double Ec, double s);
// (b) projection of f onto the selected eigenvector span
Eigen::VectorXd project_ac(const EigenReport& eig, const std::vector<int>& sel,
                           const Eigen::VectorXd& f);
// (c) random vector in the selected span, unit norm
Eigen::VectorXd data_random_ac(const EigenReport& eig, const std::vector<int>& sel,
                               unsigned seed = 2024);
// (d) quasi-mode at an embedded candidate: normalized sum of eigenvectors
// within the candidate radius; empty when no embedded candidate is flagged
Eigen::VectorXd data_quasimode(const EigenReport& eig, const ExceptionalSet& exc);

// compactness surrogate: singular values of x-weighted Vm A^{-1/2} (the
// coefficient-to-force map of the wave equation), descending
Eigen::VectorXd force_map_singvals(const ModeGrid& g, const OperatorSet& ops,
                                   const EigenReport& eig);

}  // namespace antonov
