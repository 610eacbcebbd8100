#include "dynamics.hpp"

#include <gsl/gsl_fft_real.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

namespace antonov {

namespace {

// median nearest-neighbor gap of sqrt(lambda) over in-band eigenvalues
double recurrence_time(const EigenReport& eig, const BandStructure& bands) {
  std::vector<double> roots;
  for (int n = 0; n < eig.values.size(); ++n) {
    const double v = eig.values[n];
    for (const Band& b : bands.bands) {
      if (v > b.lo && v < b.hi) {
        roots.push_back(std::sqrt(v));
        break;
      }
    }
  }
  if (roots.size() < 2) return std::numeric_limits<double>::infinity();
  std::sort(roots.begin(), roots.end());
  std::vector<double> gaps(roots.size() - 1);
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) gaps[i] = roots[i + 1] - roots[i];
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  const double med = gaps[gaps.size() / 2];
  return med > 0 ? 2 * M_PI / med : std::numeric_limits<double>::infinity();
}

}  // namespace

EvolutionResult evolve(const OperatorSet& ops, const EigenReport& eig, const Eigen::VectorXd& f0,
                       double horizon, int nt) {
  const ModeGrid& g = ops.grid;
  const int M = g.n_coords();
  if (f0.size() != M) throw std::domain_error("initial data has wrong dimension");
  if (nt < 2 || horizon == 0) throw std::domain_error("evolution needs a time grid");

  EvolutionResult ev;
  ev.recurrence_T = recurrence_time(eig, g.bands);
  ev.horizon_warning = std::abs(horizon) > 0.5 * ev.recurrence_T;

  const Eigen::VectorXd c0 = eig.vectors.transpose() * f0;  // spectral coefficients
  const Eigen::VectorXd rt = eig.values.cwiseSqrt();
  ev.t.resize(nt);
  ev.g.resize(M, nt);
  ev.h.resize(M, nt);
  ev.Fx.resize(g.NX, nt);
  ev.Ux.resize(g.NX, nt);
  ev.Fnorm.resize(nt);
  ev.dFnorm.resize(nt);
  ev.Usup.resize(nt);

  const double E0 = c0.dot(eig.values.asDiagonal() * c0);  // <A f0, f0>
  double drift = 0;
  Eigen::VectorXd cg(M), ch(M), cd(M);
  for (int k = 0; k < nt; ++k) {
    const double t = horizon * k / (nt - 1);
    ev.t[k] = t;
    for (int n = 0; n < M; ++n) {
      const double s = std::sin(rt[n] * t), c = std::cos(rt[n] * t);
      cg[n] = c * c0[n];
      ch[n] = -s / rt[n] * c0[n];
      cd[n] = -s * rt[n] * c0[n];  // dg/dt
    }
    ev.g.col(k) = eig.vectors * cg;
    ev.h.col(k) = eig.vectors * ch;
    ev.Fx.col(k) = force_profile(g, ev.h.col(k));
    ev.Ux.col(k) = potential_profile(g, ev.Fx.col(k));
    double f2 = 0, df2 = 0;
    const Eigen::VectorXd dF = g.Vm * ev.g.col(k);  // dF/dt = Vm g
    for (int i = 0; i < g.NX; ++i) {
      f2 += g.wx[i] * ev.Fx(i, k) * ev.Fx(i, k);
      df2 += g.wx[i] * dF[i] * dF[i];
    }
    ev.Fnorm[k] = std::sqrt(f2);
    ev.dFnorm[k] = std::sqrt(df2);
    ev.Usup[k] = ev.Ux.col(k).cwiseAbs().maxCoeff();
    const double Et = cd.squaredNorm() + cg.dot(eig.values.asDiagonal() * cg);
    drift = std::max(drift, std::abs(Et - E0));
  }
  ev.energy_drift = E0 > 0 ? drift / E0 : drift;
  return ev;
}

Eigen::VectorXd force_profile(const ModeGrid& g, const Eigen::VectorXd& h) {
  return -(g.Vm * h);
}

Eigen::VectorXd potential_profile(const ModeGrid& g, const Eigen::VectorXd& F) {
  Eigen::VectorXd U(g.NX);
  U[0] = 0;
  for (int i = 1; i < g.NX; ++i)
    U[i] = U[i - 1] - 0.5 * (g.xg[i] - g.xg[i - 1]) * (F[i] + F[i - 1]);
  return U;
}

DampingReport damping_report(const ModeGrid& g, const EvolutionResult& ev, int n_cesaro) {
  const int nt = int(ev.t.size());
  if (nt < 8) throw std::domain_error("damping report needs a longer time grid");
  DampingReport rep;
  rep.horizon_warning = ev.horizon_warning;
  const double H = std::abs(ev.t.back());

  const double fmax = ev.Fnorm.maxCoeff();
  const double umax = ev.Usup.maxCoeff();
  double flate = 0, ulate = 0;
  for (int k = 0; k < nt; ++k) {
    if (std::abs(ev.t[k]) >= 0.8 * H) {
      flate = std::max(flate, ev.Fnorm[k]);
      ulate = std::max(ulate, ev.Usup[k]);
    }
  }
  rep.late_ratio_F = fmax > 0 ? flate / fmax : 0;
  rep.late_ratio_U = umax > 0 ? ulate / umax : 0;

  // Cesaro average of ||dF/dt|| over [0, T] at log-spaced horizons
  const double dt = std::abs(ev.t[1] - ev.t[0]);
  rep.cesaro_T.resize(n_cesaro);
  rep.cesaro_dF.resize(n_cesaro);
  for (int m = 0; m < n_cesaro; ++m) {
    const double T = H * std::pow(2.0, -(n_cesaro - 1 - m));
    int kT = std::min(nt - 1, std::max(1, int(std::round(T / dt))));
    double acc = 0;
    for (int k = 0; k < kT; ++k) acc += 0.5 * dt * (ev.dFnorm[k] + ev.dFnorm[k + 1]);
    rep.cesaro_T[m] = ev.t[kT];
    rep.cesaro_dF[m] = acc / std::abs(ev.t[kT]);
  }
  rep.cesaro_decreasing = true;
  for (int m = 0; m + 1 < n_cesaro; ++m)
    rep.cesaro_decreasing = rep.cesaro_decreasing && rep.cesaro_dF[m + 1] < rep.cesaro_dF[m];

  // Cauchy-Schwarz bound sup|U| <= sqrt(2 R0) ||F||
  const double R0 = g.st.R0;
  double worst = 0;
  for (int k = 0; k < nt; ++k)
    if (ev.Fnorm[k] > 1e-300)
      worst = std::max(worst, ev.Usup[k] / (std::sqrt(2 * R0) * ev.Fnorm[k]));
  rep.pot_bound_max = worst;

  // dominant frequency of the force at the peak-force grid point
  int km = 0, im = 0;
  ev.Fx.cwiseAbs().maxCoeff(&im, &km);
  int n = 1;
  while (2 * n <= nt) n *= 2;
  std::vector<double> sig(n);
  for (int k = 0; k < n; ++k) sig[k] = ev.Fx(im, k);
  gsl_fft_real_radix2_transform(sig.data(), 1, n);
  const double span = std::abs(ev.t[n - 1] - ev.t[0]);
  rep.fft_bin = 1.0 / span;
  double best = -1;
  for (int k = 1; k <= n / 2; ++k) {
    const double re = sig[k], imc = (k == n / 2) ? 0.0 : sig[n - k];
    const double p = re * re + imc * imc;
    if (p > best) {
      best = p;
      rep.fft_freq = k / span;
    }
  }
  return rep;
}

FreeFlowReport free_flow_comparison(const OperatorSet& ops, const EigenReport& eig,
                                    const SpectralMaps& maps, const Eigen::VectorXd& f0,
                                    double horizon, int nt) {
  if (nt < 2 || !(horizon > 0)) throw std::domain_error("comparison needs a time grid");
  const int M = int(f0.size());
  FreeFlowReport rep;
  rep.t.resize(nt);
  rep.dist.resize(nt);
  const Eigen::VectorXcd gp0 = maps.Wp.adjoint() * f0.cast<std::complex<double>>();
  const Eigen::VectorXd c0 = eig.vectors.transpose() * f0;
  const Eigen::VectorXd rt = eig.values.cwiseSqrt();
  Eigen::VectorXd cg(eig.values.size()), as(M);
  for (int k = 0; k < nt; ++k) {
    const double t = horizon * k / (nt - 1);
    rep.t[k] = t;
    for (int n = 0; n < cg.size(); ++n) cg[n] = std::cos(rt[n] * t) * c0[n];
    const Eigen::VectorXd gt = eig.vectors * cg;
    for (int n = 0; n < M; ++n) {
      const double ph = -t * std::sqrt(ops.beta[n]);
      as[n] = gp0[n].real() * std::cos(ph) - gp0[n].imag() * std::sin(ph);
    }
    rep.dist[k] = (gt - as).norm();
  }
  rep.dist0 = rep.dist[0];
  double acc = 0;
  int cnt = 0;
  for (int k = 0; k < nt; ++k) {
    if (rep.t[k] >= 0.8 * horizon) {
      acc += rep.dist[k];
      ++cnt;
    }
  }
  rep.cesaro_late = cnt ? acc / cnt : 0;
  return rep;
}

Eigen::VectorXd data_mode_bump(const ModeGrid& g, int l, double Ec, double s) {
  if (l < 1 || l > g.lmax) throw std::domain_error("mode index out of range");
  if (!(s > 0)) throw std::domain_error("bump width must be positive");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(g.n_coords());
  for (int j = 0; j < g.NE; ++j) {
    const double z = (g.E[j] - Ec) / s;
    c[g.idx(l, j)] = std::sqrt(g.w[j]) * std::exp(-0.5 * z * z);
  }
  const double nrm = c.norm();
  if (nrm > 0) c /= nrm;
  return c;
}

Eigen::VectorXd project_ac(const EigenReport& eig, const std::vector<int>& sel,
                           const Eigen::VectorXd& f) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (int a : sel) out += eig.vectors.col(a).dot(f) * eig.vectors.col(a);
  return out;
}

Eigen::VectorXd data_random_ac(const EigenReport& eig, const std::vector<int>& sel,
                               unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd raw(eig.vectors.rows());
  for (int n = 0; n < raw.size(); ++n) raw[n] = nd(rng);
  Eigen::VectorXd f = project_ac(eig, sel, raw);
  const double nrm = f.norm();
  if (nrm > 0) f /= nrm;
  return f;
}

Eigen::VectorXd data_quasimode(const EigenReport& eig, const ExceptionalSet& exc) {
  for (const auto& e : exc.entries) {
    if (!e.embedded) continue;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(eig.vectors.rows());
    int hits = 0;
    for (int n = 0; n < eig.values.size(); ++n) {
      if (std::abs(eig.values[n] - e.value) <= std::max(e.radius, eig.edge_margin)) {
        f += eig.vectors.col(n);
        ++hits;
      }
    }
    if (hits) return f / f.norm();
  }
  return Eigen::VectorXd();
}

Eigen::VectorXd force_map_singvals(const ModeGrid& g, const OperatorSet& ops,
                                   const EigenReport& eig) {
  // x-weighted coefficient-to-force map -Vm A^{-1/2}, so singular values are
  // with respect to L2(x) and the coordinate norm
  const Eigen::VectorXd ir = eig.values.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd K = g.Vm * (eig.vectors * ir.asDiagonal() * eig.vectors.transpose());
  for (int i = 0; i < g.NX; ++i) K.row(i) *= std::sqrt(g.wx[i]);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(K);
  return svd.singularValues();
}

}  // namespace antonov
