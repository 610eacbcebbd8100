#include "ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "util/quad.hpp"

namespace antonov {

OperatorSet build_operators(const ModeGrid& grid) {
  OperatorSet ops;
  ops.grid = grid;
  const int M = grid.n_coords();
  ops.beta.resize(M);
  for (int l = 1; l <= grid.lmax; ++l) {
    for (int j = 0; j < grid.NE; ++j) {
      const double f = 4 * M_PI * l / grid.T[j];
      ops.beta[grid.idx(l, j)] = f * f;
    }
  }
  ops.B = grid.P * grid.Vm;
  ops.A = -ops.B;
  ops.A.diagonal() += ops.beta;
  return ops;
}

// ten mean node spacings of the widest band; the resolution below which an
// eigenvalue cannot be told apart from a band edge
static double band_margin(const ModeGrid& g) {
  double m = 0;
  for (const Band& b : g.bands.bands) m = std::max(m, (b.hi - b.lo) / g.NE);
  return 10 * m;
}

EigenReport eigendecompose(const OperatorSet& ops) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ops.A);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  EigenReport rep;
  rep.values = es.eigenvalues();
  rep.vectors = es.eigenvectors();
  rep.edge_margin = band_margin(ops.grid);
  if (rep.values[0] <= 0) {
    throw std::runtime_error("operator positivity lost: bottom eigenvalue " +
                             std::to_string(rep.values[0]));
  }
  rep.cls.reserve(rep.values.size());
  for (int n = 0; n < rep.values.size(); ++n) {
    const double v = rep.values[n];
    bool near_edge = false, inside = false;
    for (const Band& b : ops.grid.bands.bands) {
      near_edge = near_edge || std::abs(v - b.lo) <= rep.edge_margin ||
                  std::abs(v - b.hi) <= rep.edge_margin;
      inside = inside || (v > b.lo && v < b.hi);
    }
    rep.cls.push_back(near_edge ? SpectralClass::unresolved
                                : inside ? SpectralClass::essential : SpectralClass::discrete);
  }
  return rep;
}

static void check_off_bands(const ModeGrid& g, std::complex<double> z) {
  if (z.imag() != 0) return;
  for (const Band& b : g.bands.bands) {
    if (z.real() >= b.lo && z.real() <= b.hi) {
      throw std::domain_error("real spectral parameter inside the band union");
    }
  }
}

Eigen::VectorXcd resolvent_A0(const OperatorSet& ops, std::complex<double> z,
                              const Eigen::VectorXcd& f) {
  check_off_bands(ops.grid, z);
  Eigen::VectorXcd out(f.size());
  for (int n = 0; n < f.size(); ++n) out[n] = f[n] / (ops.beta[n] - z);
  return out;
}

Eigen::VectorXcd resolvent_A(const OperatorSet& ops, std::complex<double> z,
                             const Eigen::VectorXcd& f) {
  check_off_bands(ops.grid, z);
  Eigen::MatrixXcd Az = ops.A.cast<std::complex<double>>();
  Az.diagonal().array() -= z;
  Eigen::VectorXcd x = Az.partialPivLu().solve(f);
  if (!((Az * x - f).norm() <= 1e-8 * std::max(f.norm(), 1e-300))) {
    throw std::runtime_error("resolvent solve failed (spectral parameter at the spectrum?)");
  }
  return x;
}

double pv_band_quadrature(const std::function<double(double)>& f, double A, double B, double gamma,
                          std::vector<double> breaks) {
  if (!(B > A)) throw std::domain_error("empty principal-value interval");
  const double W = B - A;
  if (std::abs(gamma - A) < 1e-14 * W || std::abs(gamma - B) < 1e-14 * W) {
    throw std::domain_error("principal-value pole at an endpoint");
  }
  breaks.push_back(A);
  breaks.push_back(B);
  std::sort(breaks.begin(), breaks.end());
  const bool inside = gamma > A && gamma < B;
  const double fg = inside ? f(gamma) : 0;
  double acc = inside ? fg * std::log((B - gamma) / (gamma - A)) : 0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = std::clamp(breaks[p], A, B), b = std::clamp(breaks[p + 1], A, B);
    if (b - a < 1e-14 * W) continue;
    acc += integrate(gauss_legendre(16, a, b), [&](double x) {
      double d = x - gamma;
      if (std::abs(d) < 1e-13 * W) {  // node collided with the pole: sidestep
        d = 1e-7 * W;
        return (f(gamma + d) - fg) / d;
      }
      return (f(x) - fg) / d;
    });
  }
  return acc;
}

Eigen::MatrixXcd resolvent_moment_matrix(const ModeGrid& g, std::complex<double> z, int sign) {
  if (g.st.synthetic) {
    throw std::domain_error("boundary operators need a genuine band structure");
  }
  const BandStructure& bs = g.bands;
  const int cmid = (g.NX - 1) / 2, M = g.n_coords();
  const bool realz = z.imag() == 0;
  const double gam = z.real(), eps = std::abs(z.imag());
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(g.NX, M);
  std::vector<double> sw(g.NE);
  for (int j = 0; j < g.NE; ++j) sw[j] = std::sqrt(g.w[j]);
  const double amp = 8 * M_PI * std::sqrt(2.0);

  for (int l = 1; l <= g.lmax; ++l) {
    const double bNlo = bs.beta_of(l, g.E.back());
    const double bNhi = bs.beta_of(l, g.E.front());
    std::vector<double> bnode(g.NE);
    for (int j = 0; j < g.NE; ++j) bnode[j] = bs.beta_of(l, g.E[j]);

    for (int i = cmid + 1; i < g.NX; ++i) {
      const double U = g.st.U0(g.xg[i]);
      if (U >= g.E.back()) continue;
      const bool kink = U > g.E.front();  // turning point cuts the band interior
      const double lo = bNlo;
      const double hi = kink ? bs.beta_of(l, U) : bNhi;
      const double W = hi - lo;
      if (W <= 1e-13 * bNhi) continue;

      // s(beta) = amp sin(4 pi l theta) |p_l|, with the Lagrange window for
      // the energy the evaluation lands on
      auto smooth = [&](double beta, int& j0, double* wt) {
        const double bc = std::clamp(beta, bNlo, bNhi);
        const double lam = bs.energy_of_beta(l, bc);
        g.lagrange(lam, j0, wt);
        const double th = g.theta_at(i, lam);
        return amp * std::sin(4 * M_PI * l * th) * bs.p_abs(l, bc);
      };

      // subtraction constant at the pole (any constant is exact; the pole
      // value is the one that removes the principal-value singularity)
      int jg = 0;
      double wtg[4] = {0, 0, 0, 0}, sg = 0;
      std::complex<double> Lam(0, 0);
      bool sub = false;
      if (realz) {
        if (gam > lo && gam < hi) {
          sg = smooth(gam, jg, wtg);
          Lam = {std::log((hi - gam) / (gam - lo)), sign >= 0 ? M_PI : -M_PI};
          sub = sg != 0;
        }
      } else {
        sg = smooth(std::clamp(gam, lo + 1e-12 * W, hi - 1e-12 * W), jg, wtg);
        Lam = std::log((hi - z) / (lo - z));
        sub = sg != 0;
      }

      std::vector<double> bk{lo, hi};
      for (int j = 0; j < g.NE; ++j) {
        if (bnode[j] > lo + 1e-12 * W && bnode[j] < hi - 1e-12 * W) bk.push_back(bnode[j]);
      }
      if (kink) {  // resolve the square-root vanishing at the cutoff
        for (double w = 0.05 * W; w > 1e-8 * W; w /= 2) bk.push_back(hi - w);
      }
      if (realz) {
        // pole just outside the interval: resolve the near-singular edge
        if (gam >= hi && gam - hi < 0.1 * W && !kink) {
          for (double w = 0.05 * W; w > 1e-8 * W; w /= 2) bk.push_back(hi - w);
        }
        if (gam <= lo && lo - gam < 0.1 * W) {
          for (double w = 0.05 * W; w > 1e-8 * W; w /= 2) bk.push_back(lo + w);
        }
      } else if (gam > lo && gam < hi) {  // resolve the Lorentzian peak
        bk.push_back(gam);
        for (double w = eps / 2; w < 0.3 * W; w *= 2) {
          if (gam - w > lo) bk.push_back(gam - w);
          if (gam + w < hi) bk.push_back(gam + w);
        }
      }
      std::sort(bk.begin(), bk.end());

      std::complex<double> subsum = 0;
      for (std::size_t p = 0; p + 1 < bk.size(); ++p) {
        if (bk[p + 1] - bk[p] < 1e-13 * W) continue;
        const QuadRule qr = gauss_legendre(8, bk[p], bk[p + 1]);
        for (std::size_t n = 0; n < qr.x.size(); ++n) {
          const double bq = qr.x[n];
          int jq;
          double wtq[4];
          const double sq = smooth(bq, jq, wtq);
          const std::complex<double> cq = qr.w[n] / (bq - z);
          if (sub && jq == jg) {  // same window: difference first, then scale
            for (int a = 0; a < 4; ++a) {
              V(i, g.idx(l, jq + a)) += cq * (sq * wtq[a] - sg * wtg[a]) / sw[jq + a];
            }
          } else {
            if (sq != 0) {
              for (int a = 0; a < 4; ++a) V(i, g.idx(l, jq + a)) += cq * sq * wtq[a] / sw[jq + a];
            }
            if (sub) subsum += cq;
          }
        }
      }
      if (sub) {
        const std::complex<double> t = Lam - subsum;
        for (int a = 0; a < 4; ++a) V(i, g.idx(l, jg + a)) += t * sg * wtg[a] / sw[jg + a];
      }
    }
  }
  for (int i = cmid + 1; i < g.NX; ++i) V.row(2 * cmid - i) = -V.row(i);
  return V;
}

static Eigen::MatrixXcd project_left(const ModeGrid& g, const Eigen::MatrixXcd& V) {
  Eigen::MatrixXcd K(g.n_coords(), g.n_coords());
  K.real() = g.P * V.real();
  K.imag() = g.P * V.imag();
  return K;
}

Eigen::MatrixXcd boundary_BR0(const OperatorSet& ops, double gamma, int sign,
                              double edge_margin) {
  const std::vector<double> thr = ops.grid.bands.thresholds();
  const double scale = thr.empty() ? 1.0 : thr.back();
  for (double t : thr) {
    if (std::abs(gamma - t) < edge_margin * scale) {
      throw std::domain_error("spectral parameter too close to a band edge");
    }
  }
  return project_left(ops.grid, resolvent_moment_matrix(ops.grid, {gamma, 0.0}, sign));
}

Eigen::MatrixXcd BR0_complex(const OperatorSet& ops, std::complex<double> z) {
  if (z.imag() == 0) throw std::domain_error("use the boundary operator for real parameters");
  return project_left(ops.grid, resolvent_moment_matrix(ops.grid, z, 0));
}

EmbeddedScan scan_embedded(const OperatorSet& ops, int n_gamma, int sign, double bscale,
                           double thresh) {
  if (n_gamma < 2) throw std::domain_error("scan needs at least two points");
  const auto& segs = ops.grid.bands.segments;
  double total = 0;
  for (const Segment& s : segs) {
    if (!s.modes.empty()) total += s.hi - s.lo;
  }
  if (total <= 0) throw std::domain_error("no band interior to scan");

  EmbeddedScan out;
  out.sign = sign;
  out.bscale = bscale;
  out.spacing = total / n_gamma;

  auto dist_at = [&](double gamma) {
    Eigen::MatrixXcd K = boundary_BR0(ops, gamma, sign);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(K, false);
    double d = std::numeric_limits<double>::infinity();
    for (int n = 0; n < ces.eigenvalues().size(); ++n) {
      d = std::min(d, std::abs(bscale * ces.eigenvalues()[n] - 1.0));
    }
    return d;
  };

  for (const Segment& s : segs) {
    if (s.modes.empty()) continue;
    const int ns = std::max(1, int(std::llround((s.hi - s.lo) / out.spacing)));
    const double step = (s.hi - s.lo) / ns;
    const int first = int(out.points.size());
    for (int m = 0; m < ns; ++m) {
      const double gamma = s.lo + (m + 0.5) * step;
      out.points.push_back({gamma, dist_at(gamma)});
    }
    const int last = int(out.points.size()) - 1;
    for (int m = first; m <= last; ++m) {
      const double d = out.points[m].dist;
      if (d >= thresh) continue;
      if (m > first && out.points[m - 1].dist < d) continue;
      if (m < last && out.points[m + 1].dist < d) continue;
      // refine tenfold around the flagged minimum
      double best_g = out.points[m].gamma, best_d = d;
      for (int q = -5; q <= 5; ++q) {
        if (q == 0) continue;
        const double gq = std::clamp(out.points[m].gamma + q * step / 10, s.lo + step / 20,
                                     s.hi - step / 20);
        const double dq = dist_at(gq);
        if (dq < best_d) {
          best_d = dq;
          best_g = gq;
        }
      }
      out.candidates.push_back(best_g);
    }
  }
  std::sort(out.candidates.begin(), out.candidates.end());
  return out;
}

ExceptionalSet exceptional_set(const OperatorSet& ops, const EmbeddedScan& plus,
                               const EmbeddedScan& minus) {
  ExceptionalSet xs;
  for (double t : ops.grid.bands.thresholds()) xs.entries.push_back({t, 0.0, false});
  std::vector<double> cand = plus.candidates;
  cand.insert(cand.end(), minus.candidates.begin(), minus.candidates.end());
  std::sort(cand.begin(), cand.end());
  const double rad = std::max(plus.spacing, minus.spacing) / 10;
  for (std::size_t n = 0; n < cand.size(); ++n) {
    if (n > 0 && cand[n] - cand[n - 1] <= rad) continue;  // merge duplicates
    xs.entries.push_back({cand[n], rad, true});
  }
  std::sort(xs.entries.begin(), xs.entries.end(),
            [](const auto& a, const auto& b) { return a.value < b.value; });
  return xs;
}

Eigen::VectorXd project_samples(const ModeGrid& g, const Eigen::MatrixXd& samples,
                                double sym_tol) {
  const int N = int(samples.rows());
  if (samples.cols() != g.NE) throw std::domain_error("sample columns must match the energy nodes");
  if (N < 8 * g.lmax || N % 2 != 0) {
    throw std::domain_error("theta sampling must be even and resolve every mode");
  }
  const double gmax = std::max(samples.cwiseAbs().maxCoeff(), 1e-300);
  double defect = 0;
  for (int n = 0; n < N; ++n) {
    const int shift = (n + N / 2) % N, mirror = N - 1 - n;
    for (int j = 0; j < g.NE; ++j) {
      defect = std::max(defect, std::abs(samples(n, j) - samples(shift, j)));
      defect = std::max(defect, std::abs(samples(n, j) + samples(mirror, j)));
    }
  }
  if (defect > sym_tol * gmax) {
    throw std::domain_error("samples break the half-period/odd symmetry of the representation");
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(g.n_coords());
  for (int j = 0; j < g.NE; ++j) {
    for (int l = 1; l <= g.lmax; ++l) {
      double acc = 0;
      for (int n = 0; n < N; ++n) {
        acc += std::sin(4 * M_PI * l * (n + 0.5) / N) * samples(n, j);
      }
      c[g.idx(l, j)] = std::sqrt(2.0) * std::sqrt(g.w[j]) * acc / N;
    }
  }
  return c;
}

}  // namespace antonov
