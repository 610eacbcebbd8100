#include "bands.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chart.hpp"

namespace antonov {

std::vector<Segment> decompose_intervals(const std::vector<std::pair<double, double>>& intervals,
                                         const std::vector<int>& ids) {
  if (intervals.size() != ids.size()) throw std::domain_error("interval/id count mismatch");
  std::vector<double> edges;
  double scale = 0;
  for (const auto& [lo, hi] : intervals) {
    if (hi < lo) throw std::domain_error("interval with negative length");
    edges.push_back(lo);
    edges.push_back(hi);
    scale = std::max({scale, std::abs(lo), std::abs(hi)});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [&](double a, double b) { return b - a <= 1e-12 * scale; }),
              edges.end());

  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Segment s{edges[i], edges[i + 1], {}};
    const double mid = 0.5 * (s.lo + s.hi);
    for (std::size_t j = 0; j < intervals.size(); ++j) {
      if (intervals[j].first < mid && mid < intervals[j].second) s.modes.push_back(ids[j]);
    }
    std::sort(s.modes.begin(), s.modes.end());
    segs.push_back(std::move(s));
  }
  return segs;
}

double BandStructure::beta_of(int l, double E) const {
  const double w = 4 * M_PI * l / T_tab(E);
  return w * w;
}

double BandStructure::energy_of_beta(int l, double beta) const {
  if (l < 1 || l > lmax) throw std::domain_error("mode index outside the computed range");
  const Band& b = bands[l - 1];
  if (b.hi <= b.lo) throw std::domain_error("degenerate point band has no energy chart");
  if (beta < b.lo - 1e-9 * b.hi || beta > b.hi + 1e-9 * b.hi)
    throw std::domain_error("frequency outside the band");
  return E_tab[l - 1](beta);  // interp clamps at the edges
}

double BandStructure::p_abs(int l, double beta) const {
  const double E = energy_of_beta(l, beta);
  const double T = T_tab(E), w = 4 * M_PI * l;
  return T * T * T / (2 * w * w * Tp_tab(E));
}

std::vector<double> BandStructure::thresholds() const {
  std::vector<double> t;
  for (const Band& b : bands) {
    t.push_back(b.lo);
    t.push_back(b.hi);
  }
  std::sort(t.begin(), t.end());
  const double scale = t.empty() ? 0 : t.back();
  t.erase(std::unique(t.begin(), t.end(),
                      [&](double a, double b) { return b - a <= 1e-12 * scale; }),
          t.end());
  return t;
}

BandStructure compute_band_structure(const SteadyState& st, int lmax, int n_energy) {
  if (lmax < 1) throw std::domain_error("need at least one mode band");
  if (n_energy < 33) throw std::domain_error("band table needs more energy nodes");

  BandStructure bs;
  bs.lmax = lmax;
  const double range = st.E0 - st.Emin;
  bs.E_lo = st.Emin + 1e-8 * range;
  bs.E_hi = st.E0;
  bs.T_center = period_at_min_energy(st);

  std::vector<double> Es(n_energy), Ts(n_energy), Tps(n_energy);
  for (int j = 0; j < n_energy; ++j) {
    Es[j] = bs.E_lo + (bs.E_hi - bs.E_lo) * j / (n_energy - 1);
    Ts[j] = period(st, Es[j]);
    Tps[j] = period_derivative(st, Es[j]);
  }
  bs.T_cutoff = Ts[n_energy - 1];
  bs.T_tab = Interp(Es, Ts, Interp::steffen);
  bs.Tp_tab = Interp(Es, Tps, Interp::steffen);

  std::vector<std::pair<double, double>> iv;
  std::vector<int> ids;
  for (int l = 1; l <= lmax; ++l) {
    // beta falls as E rises (T grows), so reverse for an ascending table
    std::vector<double> betas(n_energy), Erev(n_energy);
    for (int j = 0; j < n_energy; ++j) {
      const double w = 4 * M_PI * l / Ts[n_energy - 1 - j];
      betas[j] = w * w;
      Erev[j] = Es[n_energy - 1 - j];
    }
    const auto [mn, mx] = std::minmax_element(betas.begin(), betas.end());
    if (*mx - *mn <= 1e-10 * std::abs(*mx)) {  // constant period: degenerate point band
      const double mid = 0.5 * (*mn + *mx);
      bs.E_tab.emplace_back();
      bs.bands.push_back({l, mid, mid});
    } else {
      bs.E_tab.emplace_back(betas, Erev, Interp::steffen);
      bs.bands.push_back({l, betas.front(), betas.back()});
    }
    iv.emplace_back(bs.bands.back().lo, bs.bands.back().hi);
    ids.push_back(l);
  }

  bs.segments = decompose_intervals(iv, ids);
  bs.gapless = std::none_of(bs.segments.begin(), bs.segments.end(),
                            [](const Segment& s) { return s.modes.empty(); });
  return bs;
}

}  // namespace antonov
