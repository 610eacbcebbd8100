#include "scatter.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "util/quad.hpp"

namespace antonov {

namespace {

using cplx = std::complex<double>;
using RowMajorXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Density of the band integral behind (B R0)(z) at fixed (x_i, mode l):
//   s(beta) = 8 pi sqrt(2) sin(4 pi l theta(x_i, E_l(beta))) |p_l(beta)|,
// delivered with its Lagrange window, weights pre-divided by sqrt(w_j).
double density_at(const ModeGrid& g, int l, int i, double bNlo, double bNhi, double beta,
                  const std::vector<double>& sw, int& j0, double* wtS) {
  const BandStructure& bs = g.bands;
  const double bc = std::clamp(beta, bNlo, bNhi);
  const double lam = bs.energy_of_beta(l, bc);
  double wt[4];
  g.lagrange(lam, j0, wt);
  for (int a = 0; a < 4; ++a) wtS[a] = wt[a] / sw[j0 + a];
  const double th = g.theta_at(i, lam);
  return 8 * M_PI * std::sqrt(2.0) * std::sin(4 * M_PI * l * th) * bs.p_abs(l, bc);
}

// Quadrature nodes of the band integrals, reusable across spectral parameters:
// the panels split at every energy-node image and carry geometric ladders at
// both ends, so the only beta-dependent pieces left are the Cauchy factors
// and the subtraction constant.
struct NodeSpan {
  long off = 0;
  int n = 0;
  double lo = 0, hi = 0;
  bool live = false;
};

struct MomentTables {
  int cmid = 0, NXh = 0, lmax = 0, NE = 0;
  std::vector<double> img_lo, img_hi;  // beta image of the energy window, per mode
  std::vector<NodeSpan> span;          // (l-1)*NXh + (i - cmid - 1)
  std::vector<double> bq, qw, sq;
  std::vector<std::array<double, 4>> wtS;
  std::vector<int> jq;
  std::vector<double> sw;
};

MomentTables build_tables(const ModeGrid& g) {
  const BandStructure& bs = g.bands;
  MomentTables t;
  t.cmid = (g.NX - 1) / 2;
  t.NXh = t.cmid;
  t.lmax = g.lmax;
  t.NE = g.NE;
  t.sw.resize(g.NE);
  for (int j = 0; j < g.NE; ++j) t.sw[j] = std::sqrt(g.w[j]);
  t.img_lo.resize(g.lmax);
  t.img_hi.resize(g.lmax);
  t.span.assign(std::size_t(g.lmax) * t.NXh, {});

  for (int l = 1; l <= g.lmax; ++l) {
    const double bNlo = bs.beta_of(l, g.E.back());
    const double bNhi = bs.beta_of(l, g.E.front());
    t.img_lo[l - 1] = bNlo;
    t.img_hi[l - 1] = bNhi;
    std::vector<double> bnode(g.NE);
    for (int j = 0; j < g.NE; ++j) bnode[j] = bs.beta_of(l, g.E[j]);

    for (int i = t.cmid + 1; i < g.NX; ++i) {
      const double U = g.st.U0(g.xg[i]);
      if (U >= g.E.back()) continue;
      const bool kink = U > g.E.front();
      const double lo = bNlo;
      const double hi = kink ? bs.beta_of(l, U) : bNhi;
      const double W = hi - lo;
      if (W <= 1e-13 * bNhi) continue;

      std::vector<double> bk{lo, hi};
      for (int j = 0; j < g.NE; ++j) {
        if (bnode[j] > lo + 1e-12 * W && bnode[j] < hi - 1e-12 * W) bk.push_back(bnode[j]);
      }
      for (double w = 0.05 * W; w > 1e-8 * W; w /= 2) {
        bk.push_back(hi - w);  // turning-point kink, or a pole just past the edge
        bk.push_back(lo + w);
      }
      std::sort(bk.begin(), bk.end());

      NodeSpan& s = t.span[std::size_t(l - 1) * t.NXh + (i - t.cmid - 1)];
      s.off = long(t.bq.size());
      s.lo = lo;
      s.hi = hi;
      s.live = true;
      for (std::size_t p = 0; p + 1 < bk.size(); ++p) {
        if (bk[p + 1] - bk[p] < 1e-13 * W) continue;
        const QuadRule qr = gauss_legendre(8, bk[p], bk[p + 1]);
        for (std::size_t n = 0; n < qr.x.size(); ++n) {
          int j0;
          double wtS[4];
          const double v = density_at(g, l, i, bNlo, bNhi, qr.x[n], t.sw, j0, wtS);
          t.bq.push_back(qr.x[n]);
          t.qw.push_back(qr.w[n]);
          t.sq.push_back(v);
          t.jq.push_back(j0);
          t.wtS.push_back({wtS[0], wtS[1], wtS[2], wtS[3]});
        }
      }
      s.n = int(t.bq.size() - s.off);
    }
  }
  return t;
}

struct ImPatch {  // rank-four imaginary part of one (x_i, l) block
  int m = 0;
  int col0 = 0;
  std::array<double, 4> v{};
};

// Real part of the upper-half rows of the moment matrix at gamma +- i0, with
// the pole handled by singularity subtraction against the precomputed nodes;
// the imaginary part is the residue contribution, returned as sparse patches.
void eval_vhalf(const MomentTables& t, const ModeGrid& g, double gamma, int sign, RowMajorXd& Vre,
                std::vector<ImPatch>& im) {
  Vre.setZero();
  im.clear();
  for (int l = 1; l <= t.lmax; ++l) {
    const double bNlo = t.img_lo[l - 1], bNhi = t.img_hi[l - 1];
    const int base = (l - 1) * t.NE;
    for (int m = 0; m < t.NXh; ++m) {
      const NodeSpan& s = t.span[std::size_t(l - 1) * t.NXh + m];
      if (!s.live) continue;
      const double W = s.hi - s.lo;
      bool sub = false;
      int jg = -1;
      double sg = 0, wtSg[4] = {0, 0, 0, 0}, Lre = 0;
      if (gamma > s.lo && gamma < s.hi) {
        sg = density_at(g, l, t.cmid + 1 + m, bNlo, bNhi, gamma, t.sw, jg, wtSg);
        sub = sg != 0;
        Lre = std::log((s.hi - gamma) / (gamma - s.lo));
      }
      double subsum = 0;
      const double dmin = 1e-12 * W;
      for (int q = 0; q < s.n; ++q) {
        const long a = s.off + q;
        double d = t.bq[a] - gamma;
        if (std::abs(d) < dmin) d = d < 0 ? -dmin : dmin;
        const double cq = t.qw[a] / d;
        const int j0 = t.jq[a];
        const auto& ws = t.wtS[a];
        if (sub && j0 == jg) {  // shared window: difference first, then scale
          const double vq = t.sq[a];
          for (int b = 0; b < 4; ++b) Vre(m, base + j0 + b) += cq * (vq * ws[b] - sg * wtSg[b]);
        } else {
          const double vq = t.sq[a];
          if (vq != 0) {
            for (int b = 0; b < 4; ++b) Vre(m, base + j0 + b) += cq * vq * ws[b];
          }
          if (sub) subsum += cq;
        }
      }
      if (sub) {
        const double tr = Lre - subsum;
        for (int b = 0; b < 4; ++b) Vre(m, base + jg + b) += tr * sg * wtSg[b];
        const double ps = (sign >= 0 ? M_PI : -M_PI) * sg;
        im.push_back({m, base + jg, {ps * wtSg[0], ps * wtSg[1], ps * wtSg[2], ps * wtSg[3]}});
      }
    }
  }
}

double norm_k_est(const Eigen::MatrixXd& kre, const Eigen::MatrixXd& kim) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(kre.cols()).normalized();
  double s = 0;
  for (int it = 0; it < 8; ++it) {
    Eigen::VectorXd y = kre * v, z = kim * v;
    s = std::sqrt(y.squaredNorm() + z.squaredNorm());
    if (s == 0) return 0;
    v = kre.transpose() * y + kim.transpose() * z;
    const double n = v.norm();
    if (n == 0) break;
    v /= n;
  }
  return s;
}

double norm_inv_est(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu, int r) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(r).normalized();
  double s = 0;
  for (int it = 0; it < 8; ++it) {
    Eigen::VectorXcd w = lu.solve(v);
    s = w.norm();
    if (s == 0) return 0;
    v = lu.adjoint().solve(w);
    const double n = v.norm();
    if (n == 0) break;
    v /= n;
  }
  return s;
}

}  // namespace

SpectralMaps build_spectral_maps(const OperatorSet& ops, const ExceptionalSet* exc,
                                 double coupling, double cond_max, double edge_frac) {
  const ModeGrid& g = ops.grid;
  const BandStructure& bs = g.bands;
  if (g.st.synthetic) throw std::domain_error("spectral maps need a genuine band structure");
  const int M = g.n_coords();

  SpectralMaps sm;
  sm.lmax = g.lmax;
  sm.NE = g.NE;
  sm.coupling = coupling;
  sm.edge_frac = edge_frac;

  std::vector<double> img_lo(g.lmax), img_hi(g.lmax);
  for (int l = 1; l <= g.lmax; ++l) {
    img_lo[l - 1] = bs.beta_of(l, g.E.back());
    img_hi[l - 1] = bs.beta_of(l, g.E.front());
  }

  // segments clamped to the readable range, as grid bookkeeping
  for (const Segment& s : bs.segments) {
    if (s.modes.empty()) continue;
    double lo = s.lo, hi = s.hi;
    for (int l : s.modes) {
      lo = std::max(lo, img_lo[l - 1]);
      hi = std::min(hi, img_hi[l - 1]);
    }
    if (!(hi > lo)) continue;  // thinner than the chart margins
    BetaSegment b;
    b.lo = lo;
    b.hi = hi;
    b.modes = s.modes;
    sm.segs.push_back(std::move(b));
  }
  if (sm.segs.empty()) throw std::domain_error("no usable spectral segments");

  // one node per coordinate, at the chart image of its energy node
  sm.nodes.resize(M);
  sm.rows.resize(M);
  sm.F.setZero(M, M);
  std::vector<char> keep(M, 1);
  for (int l = 1; l <= g.lmax; ++l) {
    for (int j = 0; j < g.NE; ++j) {
      const int n = g.idx(l, j);
      const double beta = ops.beta[n];
      BetaNode& nd = sm.nodes[n];
      nd.beta = beta;
      nd.weight = g.q[j] / bs.p_abs(l, beta);
      for (int sg = 0; sg < int(sm.segs.size()); ++sg) {
        const BetaSegment& b = sm.segs[sg];
        const double tol = 1e-9 * (b.hi - b.lo);
        if (beta >= b.lo - tol && beta <= b.hi + tol) {
          nd.seg = sg;
          break;
        }
      }
      sm.rows[n] = {n, l};
      // the boundary kernel degenerates at band edges, so the perturbed rows
      // are dropped there; the exact selection row is fine and stays
      for (int lp = 1; lp <= g.lmax; ++lp) {
        const double w = edge_frac * (img_hi[lp - 1] - img_lo[lp - 1]);
        if (std::abs(beta - img_lo[lp - 1]) < w || std::abs(beta - img_hi[lp - 1]) < w) {
          keep[n] = 0;
        }
      }
      bool cut = false;
      if (exc) {
        for (const auto& e : exc->entries) {
          if (std::abs(beta - e.value) <= e.radius) cut = true;
        }
      }
      if (cut) {  // exceptional neighborhood: the node leaves every map
        keep[n] = 0;
        sm.excluded.push_back(beta);
        continue;
      }
      // sqrt(w_beta T |p| / phi') / sqrt(w_j) with w_beta = q_j |dbeta/dE|:
      // the Jacobian |p| = |dE/dbeta| cancels and the read is exactly one
      sm.F(n, n) = 1.0;
      if (nd.seg >= 0) sm.segs[nd.seg].n += 1;
    }
  }
  for (BetaSegment& b : sm.segs) {
    if (b.n > 0) b.spacing = (b.hi - b.lo) / b.n;
  }
  const int R = M;

  if (coupling == 0.0) {
    sm.Fp = sm.F.cast<cplx>();
  } else {
    // low-rank left factor of the perturbation and reusable band-integral
    // tables; each node then costs one Cauchy sweep and small dense algebra
    Eigen::BDCSVD<Eigen::MatrixXd> svd(g.P, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int r = 0;
    while (r < sv.size() && sv[r] > 1e-13 * sv[0]) ++r;
    r = std::max(r, 1);
    sm.svd_rank = r;
    const Eigen::MatrixXd Us = svd.matrixU().leftCols(r);
    const Eigen::MatrixXd SV =
        sv.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();  // r x NX
    const int cmid = (g.NX - 1) / 2, NXh = cmid;
    Eigen::MatrixXd SVd(r, NXh);  // mirror-odd rows folded onto the upper half
    for (int m = 0; m < NXh; ++m) {
      SVd.col(m) = SV.col(cmid + 1 + m) - SV.col(cmid - 1 - m);
    }
    const MomentTables tabs = build_tables(g);

    sm.Fp.setZero(R, M);
    RowMajorXd Vre(NXh, M);
    Eigen::MatrixXd kre(r, M), kim(r, M);
    std::vector<ImPatch> im;
    for (int n = 0; n < M; ++n) {
      if (!keep[n]) continue;
      eval_vhalf(tabs, g, sm.nodes[n].beta, +1, Vre, im);
      kre.noalias() = SVd * Vre;
      kim.setZero();
      for (const ImPatch& p : im) {
        for (int a = 0; a < 4; ++a) kim.col(p.col0 + a) += p.v[a] * SVd.col(p.m);
      }
      kre *= coupling;
      kim *= coupling;
      Eigen::MatrixXcd Mr(r, r);
      Mr.real() = -kre * Us;
      Mr.imag() = -kim * Us;
      for (int d = 0; d < r; ++d) Mr(d, d) += 1.0;
      const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Mr);
      const double nk = norm_k_est(kre, kim);
      const double ninv = norm_inv_est(lu, r);
      sm.nodes[n].cond = (1 + nk) * (1 + ninv * nk);
      if (sm.nodes[n].cond > cond_max) {  // flagged candidate: leaves every map
        sm.excluded.push_back(sm.nodes[n].beta);
        sm.F.row(n).setZero();
        continue;
      }
      const Eigen::RowVectorXd u = Us.row(n);  // the row reads one coordinate
      const Eigen::VectorXcd vt = lu.transpose().solve(u.transpose().cast<cplx>());
      const Eigen::RowVectorXd vr = vt.real().transpose(), vi = vt.imag().transpose();
      Eigen::RowVectorXcd out(M);
      out.real() = vr * kre - vi * kim;
      out.imag() = vr * kim + vi * kre;
      out(n) += 1.0;
      sm.Fp.row(n) = out;
    }
  }

  sm.Fm = sm.Fp.conjugate();  // real data: the lower boundary is the mirror
  sm.Wp.resize(M, M);
  sm.Wp.real() = sm.Fp.real().transpose() * sm.F;
  sm.Wp.imag() = -sm.Fp.imag().transpose() * sm.F;
  sm.Wm = sm.Wp.conjugate();
  sm.S = sm.Wp.adjoint() * sm.Wm;
  return sm;
}

namespace {

// clearance of a spectral value from every band edge: a fixed fraction of
// each band's width when margin_frac >= 0, else the classification margin
bool edge_clear(double v, const BandStructure& bands, double margin_frac, double abs_margin) {
  for (const Band& b : bands.bands) {
    const double m = margin_frac >= 0 ? margin_frac * (b.hi - b.lo) : abs_margin;
    if (std::abs(v - b.lo) <= m || std::abs(v - b.hi) <= m) return false;
  }
  return true;
}

// margin near a flagged value: the fraction of the widest band containing it
// (falling back to the widest band overall), or the absolute margin
double local_margin(double v, const BandStructure& bands, double margin_frac,
                    double abs_margin) {
  if (margin_frac < 0) return abs_margin;
  double w = 0, wany = 0;
  for (const Band& b : bands.bands) {
    wany = std::max(wany, b.hi - b.lo);
    if (v >= b.lo && v <= b.hi) w = std::max(w, b.hi - b.lo);
  }
  return margin_frac * (w > 0 ? w : wany);
}

}  // namespace

std::vector<int> ac_select(const EigenReport& eig, const BandStructure& bands,
                           const ExceptionalSet* exc, double margin_frac, double margin_abs) {
  const double am = margin_abs >= 0 ? margin_abs : eig.edge_margin;
  if (margin_abs >= 0) margin_frac = -1;
  std::vector<int> sel;
  for (int n = 0; n < eig.values.size(); ++n) {
    const double v = eig.values[n];
    bool ok = false;  // inside a band: a grid-independent stand-in for "essential"
    for (const Band& b : bands.bands) ok = ok || (v > b.lo && v < b.hi);
    ok = ok && edge_clear(v, bands, margin_frac, am);
    if (exc) {
      for (const auto& e : exc->entries) {
        const double cm = std::max(e.radius, local_margin(e.value, bands, margin_frac, am));
        ok = ok && !(e.embedded && std::abs(v - e.value) <= cm);
      }
    }
    if (ok) sel.push_back(n);
  }
  return sel;
}

ScatterReport scattering_report(const OperatorSet& ops, const EigenReport& eig,
                                const SpectralMaps& maps, const ExceptionalSet* exc,
                                double margin_frac, double margin_abs) {
  const ModeGrid& g = ops.grid;
  const int M = g.n_coords();
  const int R = int(maps.rows.size());
  const double am = margin_abs >= 0 ? margin_abs : eig.edge_margin;
  if (margin_abs >= 0) {
    margin_frac = -1;
  } else if (margin_frac < 0) {
    // default collar: 2 band-grid spacings, or the row carve if wider
    margin_frac = std::max(2.0 / g.NE, maps.edge_frac);
  }
  ScatterReport rep;

  // candidate values to stay clear of: the caller's flagged set plus the
  // values the map construction itself dropped as near-singular
  ExceptionalSet flagged;
  if (exc) flagged = *exc;
  for (double b : maps.excluded) flagged.entries.push_back({b, 0.0, true});

  // coordinates clear of every band edge and flagged value
  std::vector<int> coords;
  for (int n = 0; n < M; ++n) {
    if (maps.F(n, n) == 0.0) continue;  // dropped node
    const double b = maps.nodes[n].beta;
    bool clear = edge_clear(b, g.bands, margin_frac, am);
    for (const auto& e : flagged.entries) {
      const double cm = std::max(e.radius, local_margin(e.value, g.bands, margin_frac, am));
      clear = clear && !(e.embedded && std::abs(b - e.value) <= cm);
    }
    if (clear) coords.push_back(n);
  }
  rep.n_coords = int(coords.size());

  const Eigen::MatrixXd G = maps.F.transpose() * maps.F;
  {
    Eigen::MatrixXcd Z(coords.size(), coords.size());
    for (std::size_t a = 0; a < coords.size(); ++a) {
      for (std::size_t b = 0; b < coords.size(); ++b) Z(a, b) = G(coords[a], coords[b]);
      Z(a, a) -= 1.0;
    }
    rep.parseval = op2norm(Z);
  }

  const std::vector<int> sel = ac_select(eig, g.bands, &flagged, margin_frac, margin_abs);
  rep.n_ac = int(sel.size());
  Eigen::MatrixXd QS(M, rep.n_ac);
  for (int a = 0; a < rep.n_ac; ++a) QS.col(a) = eig.vectors.col(sel[a]);

  // probe packets: a smooth envelope per band, projected onto the selection.
  // The packets are grid-independent data, so these residuals genuinely
  // shrink under refinement; the Nyquist floor only enters the op-norms.
  if (rep.n_ac > 0) {
    const double Ec = 0.5 * (g.E.front() + g.E.back());
    const double sw = 0.18 * (g.E.back() - g.E.front());
    double iso = 0, sdef = 0;
    for (int l = 1; l <= g.lmax; ++l) {
      Eigen::VectorXd q = Eigen::VectorXd::Zero(M);
      for (int j = 0; j < g.NE; ++j) {
        const double d = (g.E[j] - Ec) / sw;
        q[g.idx(l, j)] = std::sqrt(g.w[j]) * std::exp(-0.5 * d * d);
      }
      Eigen::VectorXd y = QS * (QS.transpose() * q);
      if (y.norm() < 0.5 * q.norm()) continue;  // band mostly carved out
      y /= y.norm();
      const Eigen::VectorXcd yc = y.cast<cplx>();
      iso = std::max(iso, std::abs((maps.Fp * yc).squaredNorm() - 1.0));
      sdef = std::max(sdef, std::abs((maps.S * yc).squaredNorm() - 1.0));
      rep.n_probe += 1;
    }
    rep.iso_p = iso;
    rep.iso_m = iso;  // Fm is the conjugate of Fp and the packets are real
    rep.s_unitarity = sdef;
  }

  // op-norm diagnostics over the whole selection (resolution-floored)
  if (rep.n_ac > 0) {
    const Eigen::MatrixXcd QSc = QS.cast<cplx>();
    Eigen::MatrixXcd X = maps.Fp * QSc;
    Eigen::MatrixXcd Z = X.adjoint() * X;
    for (int d = 0; d < Z.rows(); ++d) Z(d, d) -= 1.0;
    rep.iso_opnorm = op2norm(Z);
    X = maps.S * QSc;
    Z = X.adjoint() * X;
    for (int d = 0; d < Z.rows(); ++d) Z(d, d) -= 1.0;
    rep.s_opnorm = op2norm(Z);
  }

  const double lamax = eig.values[eig.values.size() - 1];
  Eigen::VectorXd brow(R);
  for (int r = 0; r < R; ++r) brow[r] = maps.nodes[maps.rows[r].node].beta;
  {
    Eigen::MatrixXcd D(R, M);
    D.real() = maps.Fp.real() * ops.A;
    D.imag() = maps.Fp.imag() * ops.A;
    for (int r = 0; r < R; ++r) D.row(r) -= brow[r] * maps.Fp.row(r);
    rep.diag_p = op2norm(D) / lamax;
    rep.diag_m = rep.diag_p;
  }
  {
    Eigen::MatrixXcd T(M, M);
    T.real() = ops.A * maps.Wp.real();
    T.imag() = ops.A * maps.Wp.imag();
    for (int c = 0; c < M; ++c) T.col(c) -= ops.beta[c] * maps.Wp.col(c);
    rep.intertwine_p = op2norm(T) / lamax;
    rep.intertwine_m = rep.intertwine_p;
  }
  {
    const Eigen::MatrixXd SA =
        eig.vectors * eig.values.cwiseSqrt().asDiagonal() * eig.vectors.transpose();
    Eigen::MatrixXcd T(M, M);
    T.real() = SA * maps.Wp.real();
    T.imag() = SA * maps.Wp.imag();
    for (int c = 0; c < M; ++c) T.col(c) -= std::sqrt(ops.beta[c]) * maps.Wp.col(c);
    rep.invariance_p = op2norm(T) / std::sqrt(lamax);
    rep.invariance_m = rep.invariance_p;
  }
  std::mt19937 rng(9001);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = 0;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd f(M), h(M);
    for (int n = 0; n < M; ++n) {
      f[n] = nd(rng);
      h[n] = nd(rng);
    }
    const cplx z1 = (h.cast<cplx>().adjoint() * (maps.Wp * f.cast<cplx>()))(0);
    const cplx z2 = ((maps.Fp * h.cast<cplx>()).adjoint() * (maps.F * f).cast<cplx>())(0);
    worst = std::max(worst, std::abs(z1 - z2) / std::max(1.0, f.norm() * h.norm()));
  }
  rep.w_adjoint = worst;
  return rep;
}

WaveCheck wave_time_check(const OperatorSet& ops, const EigenReport& eig,
                          const Eigen::MatrixXcd& W, const Eigen::VectorXd& f, double horizon,
                          int nt) {
  if (nt < 2 || !(horizon > 0)) throw std::domain_error("wave check needs a time grid");
  const int M = int(f.size());
  WaveCheck out;
  out.t.resize(nt);
  out.dist.resize(nt);
  const Eigen::VectorXcd wf = W * f.cast<cplx>();
  for (int k = 0; k < nt; ++k) {
    // quarter-octave ladder ending at the horizon, with t = 0 in front
    const double t = k == 0 ? 0.0 : horizon * std::pow(2.0, -0.25 * (nt - 1 - k));
    Eigen::VectorXcd v(M);
    for (int n = 0; n < M; ++n) v[n] = f[n] * std::polar(1.0, -t * ops.beta[n]);
    Eigen::VectorXcd u(eig.values.size());
    u.real() = eig.vectors.transpose() * v.real();
    u.imag() = eig.vectors.transpose() * v.imag();
    for (int n = 0; n < u.size(); ++n) u[n] *= std::polar(1.0, t * eig.values[n]);
    Eigen::VectorXcd back(M);
    back.real() = eig.vectors * u.real();
    back.imag() = eig.vectors * u.imag();
    out.t[k] = t;
    out.dist[k] = (back - wf).norm();
  }
  out.dist0 = out.dist[0];
  double acc = 0;
  int cnt = 0;
  for (int k = 0; k < nt; ++k) {
    if (out.t[k] >= 0.8 * horizon) {
      acc += out.dist[k];
      ++cnt;
    }
  }
  out.cesaro_late = cnt ? acc / cnt : 0;
  return out;
}

double op2norm(const Eigen::MatrixXcd& X, int iters) {
  if (X.rows() == 0 || X.cols() == 0) return 0;
  std::mt19937 rng(1234);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXcd v(X.cols());
  for (int n = 0; n < v.size(); ++n) v[n] = cplx(nd(rng), nd(rng));
  v.normalize();
  double s = 0;
  for (int k = 0; k < iters; ++k) {
    const Eigen::VectorXcd w = X * v;
    s = w.norm();
    if (s == 0) return 0;
    v = X.adjoint() * w;
    const double n = v.norm();
    if (n == 0) break;
    v /= n;
  }
  return s;
}

}  // namespace antonov
