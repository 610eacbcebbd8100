#pragma once

#include <utility>
#include <vector>

#include "steady.hpp"
#include "util/interp.hpp"

namespace antonov {

// Mode-l frequency-squared curve beta_l(E) = (4 pi l / T(E))^2 sweeps the band
// [beta_l(E0), beta_l(Emin)] as E runs over the trapped range (T grows with E
// for the profiles built here, so beta_l falls).
struct Band {
  int l = 0;
  double lo = 0, hi = 0;
};

// Maximal interval on which the set of bands covering it is constant; an
// empty mode set marks a spectral gap between bands.
struct Segment {
  double lo = 0, hi = 0;
  std::vector<int> modes;
};

// Split the hull of closed intervals (the i-th one belongs to mode ids[i])
// into maximal segments of constant covering set. Zero-length segments are
// dropped; edges closer than a relative 1e-12 are merged.
std::vector<Segment> decompose_intervals(const std::vector<std::pair<double, double>>& intervals,
                                         const std::vector<int>& ids);

struct BandStructure {
  int lmax = 0;
  double E_lo = 0, E_hi = 0;  // tabulated energy window (Emin + delta, E0]
  double T_center = 0;        // period limit at the center energy Emin
  double T_cutoff = 0;        // period at the cutoff energy E0
  Interp T_tab;               // E -> T on the window
  Interp Tp_tab;              // E -> dT/dE
  std::vector<Interp> E_tab;  // per mode: beta -> E inverse tables
  std::vector<Band> bands;
  std::vector<Segment> segments;
  bool gapless = false;  // union of all bands is a single interval

  double T_of_E(double E) const { return T_tab(E); }
  double Tp_of_E(double E) const { return Tp_tab(E); }
  double beta_of(int l, double E) const;
  // Inverse of beta_of in E; beta must lie inside band l (edges clamp).
  double energy_of_beta(int l, double beta) const;
  // Transform weight |p_l| = T^3 / (2 (4 pi l)^2 T') at E = energy_of_beta.
  double p_abs(int l, double beta) const;
  // Sorted deduplicated band edges (the exceptional frequencies).
  std::vector<double> thresholds() const;
};

BandStructure compute_band_structure(const SteadyState& st, int lmax, int n_energy = 1025);

}  // namespace antonov
