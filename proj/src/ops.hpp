#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "modegrid.hpp"

namespace antonov {

// Dense discretization of the linearized dynamics in mode-grid coordinates:
//   A0 = multiplication by beta_l(E_j), diagonal,
//   B  = the force coupling (Gram-symmetric, PSD),   A = A0 - B.
struct OperatorSet {
  ModeGrid grid;
  Eigen::VectorXd beta;  // A0 diagonal: beta[(l-1)NE+j] = (4 pi l / T_j)^2
  Eigen::MatrixXd B, A;
};

OperatorSet build_operators(const ModeGrid& grid);

enum class SpectralClass { discrete, unresolved, essential };

struct EigenReport {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns matching values
  std::vector<SpectralClass> cls;
  double edge_margin = 0;  // beta-units margin used for "unresolved"
};

// Full symmetric eigendecomposition of A with a band classification of each
// eigenvalue; throws runtime_error if the bottom of the spectrum is not
// strictly positive (the discretization must inherit the operator's
// positivity).
EigenReport eigendecompose(const OperatorSet& ops);

// (A0 - z)^-1 f (componentwise) and (A - z)^-1 f (dense solve). Real z must
// keep off the band union; use the boundary operators on the bands instead.
Eigen::VectorXcd resolvent_A0(const OperatorSet& ops, std::complex<double> z,
                              const Eigen::VectorXcd& f);
Eigen::VectorXcd resolvent_A(const OperatorSet& ops, std::complex<double> z,
                             const Eigen::VectorXcd& f);

// PV int_A^B f(beta)/(beta-gamma) dbeta by singularity subtraction,
//   int (f(beta)-f(gamma))/(beta-gamma) + f(gamma) log((B-gamma)/(gamma-A)),
// on composite panels split at the supplied interior breakpoints.
double pv_band_quadrature(const std::function<double(double)>& f, double A, double B, double gamma,
                          std::vector<double> breaks = {});

// Resolvent-weighted moment matrix: column (l,j) holds the x-grid samples of
//   8 pi sqrt(2) int L_j(E_l(beta)) sin(4 pi l theta(x, E_l(beta)))
//                |p_l(beta)| / (beta - z) dbeta / sqrt(w_j),
// each band integral cut off above at beta*_l(x) = beta_l(U0(x)), where the
// integrand vanishes like a square root (the orbit stops reaching x). For
// real z = gamma inside a band the pole contributes a principal value plus
// sign * i pi times the residue; off the real axis `sign` is ignored.
Eigen::MatrixXcd resolvent_moment_matrix(const ModeGrid& g, std::complex<double> z, int sign);

// Boundary values (B R0)_pm(gamma) in coordinates: P * resolvent_moment_matrix
// at gamma +- i0. gamma must keep a relative `edge_margin` away from every
// band edge, where the boundary value genuinely degenerates.
Eigen::MatrixXcd boundary_BR0(const OperatorSet& ops, double gamma, int sign,
                              double edge_margin = 1e-9);

// The same operator off the real axis (no boundary limit, Im z != 0).
Eigen::MatrixXcd BR0_complex(const OperatorSet& ops, std::complex<double> z);

// Scan along the band union: at each gamma record the distance of
// spec(bscale * (B R0)_sign(gamma)) to 1; local minima below `thresh` are
// refined on a tenfold finer local grid and reported as embedded-eigenvalue
// candidates.
struct ScanPoint {
  double gamma = 0;
  double dist = 0;
};
struct EmbeddedScan {
  int sign = 1;
  double bscale = 1;
  double spacing = 0;              // coarse grid spacing
  std::vector<ScanPoint> points;   // coarse grid, ascending in gamma
  std::vector<double> candidates;  // refined flagged minima
};
EmbeddedScan scan_embedded(const OperatorSet& ops, int n_gamma, int sign, double bscale = 1,
                           double thresh = 1e-2);

// Exceptional frequencies: band edges (radius 0, carved out by consumers'
// own margins) plus embedded candidates from the scans, with an exclusion
// radius of one refined grid step.
struct ExceptionalSet {
  struct Entry {
    double value = 0;
    double radius = 0;
    bool embedded = false;
  };
  std::vector<Entry> entries;  // ascending in value
};
ExceptionalSet exceptional_set(const OperatorSet& ops, const EmbeddedScan& plus,
                               const EmbeddedScan& minus);

// Coordinates from samples of g on the midpoint theta rule (rows) times the
// energy nodes (columns). The representation only carries functions with
//   g(theta + 1/2) = g(theta),  g(1 - theta) = -g(theta);
// samples breaking either symmetry beyond sym_tol * max|g| are rejected.
Eigen::VectorXd project_samples(const ModeGrid& g, const Eigen::MatrixXd& samples,
                                double sym_tol = 1e-8);

}  // namespace antonov
