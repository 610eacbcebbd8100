#include "modegrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "util/quad.hpp"

namespace antonov {

namespace {

// theta(x, lambda) on the upper branch by direct partial-time quadrature,
// using the same regularized kinetic factor as the chart module.
double theta_direct(const SteadyState& st, double T, double x, double lambda) {
  const double xp = turning_point(st, lambda);
  if (x >= xp) return 0.5;
  const double send = std::sqrt(xp - x);
  const double d1 = st.dU0(xp), d2 = st.d2U0(xp), d3 = st.d3U0(xp);
  auto D = [&](double s) {
    const double xc = s * s;
    if (xc <= 1e-4 * xp) return d1 - xc * (d2 / 2 - xc * d3 / 6);
    return (st.U0(xp) - st.U0(xp - xc)) / xc;
  };
  const double I = integrate(composite_gl(8, 12, 0, send),
                             [&](double s) { return 1 / std::sqrt(D(s)); });
  return 0.5 - std::sqrt(2.0) * I / T;
}

}  // namespace

double ModeGrid::theta_at(int i, double lambda) const {
  const int c = (NX - 1) / 2;  // index of x = 0
  if (i == c) return 0.25;
  const bool neg = i < c;
  const ThetaTab& t = tabs[neg ? c - i : i - c];
  double th;
  if (t.flat || lambda <= t.U) {
    th = 0.5;
  } else {
    th = t.th(std::sqrt(lambda - t.U));
  }
  return neg ? 0.5 - th : th;
}

void ModeGrid::lagrange(double lambda, int& j0, double wt[4]) const {
  wt[0] = wt[1] = wt[2] = wt[3] = 0;
  j0 = 0;
  if (lambda < E.front() || lambda > E.back()) return;
  // first node above lambda
  const int hi = int(std::upper_bound(E.begin(), E.end(), lambda) - E.begin());
  j0 = std::clamp(hi - 2, 0, NE - 4);
  for (int a = 0; a < 4; ++a) {
    double p = 1;
    for (int b = 0; b < 4; ++b) {
      if (b != a) p *= (lambda - E[j0 + b]) / (E[j0 + a] - E[j0 + b]);
    }
    wt[a] = p;
  }
}

ModeGrid build_mode_grid(const SteadyState& st, const BandStructure& bands, int NE, int NX) {
  if (NE < 8) throw std::domain_error("mode grid needs at least 8 energy nodes");
  if (NX < 21 || NX % 2 == 0) throw std::domain_error("x grid size must be odd and >= 21");

  ModeGrid g;
  g.st = st;
  g.bands = bands;
  g.lmax = bands.lmax;
  g.NE = NE;
  g.NX = NX;

  const double range = st.E0 - st.Emin;
  const double Elo = st.Emin + 1e-4 * range, Ehi = st.E0 - 1e-4 * range;
  QuadRule r = gauss_legendre(NE, Elo, Ehi);
  g.E = r.x;
  g.q = r.w;
  g.T.resize(NE);
  g.phip.resize(NE);
  g.w.resize(NE);
  for (int j = 0; j < NE; ++j) {
    g.T[j] = period(st, g.E[j]);
    g.phip[j] = st.phi_prime_abs(g.E[j]);
    g.w[j] = g.q[j] * g.T[j] / g.phip[j];
  }

  g.xg.resize(NX);
  g.wx.resize(NX);
  const double hx = 2 * st.R0 / (NX - 1);
  for (int i = 0; i < NX; ++i) {
    g.xg[i] = -st.R0 + hx * i;
    g.wx[i] = (i == 0 || i == NX - 1) ? hx / 2 : hx;
  }
  g.xg[(NX - 1) / 2] = 0.0;  // exact center

  // theta tables for x_i >= 0, resolved in w = sqrt(lambda - U0(x_i))
  const int c = (NX - 1) / 2;
  const int nw = std::max(65, NE / 2 + 1);
  g.tabs.resize(c + 1);
  for (int k = 0; k <= c; ++k) {
    ModeGrid::ThetaTab& t = g.tabs[k];
    const double x = g.xg[c + k];
    t.U = st.U0(x);
    const double span = st.E0 - t.U;
    if (span <= 1e-12 * (st.E0 - st.Emin)) {
      t.flat = true;
      continue;
    }
    t.wmax = std::sqrt(span);
    std::vector<double> ws(nw), th(nw);
    for (int a = 0; a < nw; ++a) {
      ws[a] = t.wmax * a / (nw - 1);
      if (a == 0) {
        th[a] = 0.5;
        continue;
      }
      const double lam = t.U + ws[a] * ws[a];
      th[a] = theta_direct(st, bands.T_of_E(std::min(lam, st.E0)), x, lam);
    }
    t.th = Interp(ws, th, Interp::steffen);  // theta falls with w; that is fine
  }

  // moment matrix: m(x_i) = 8 pi sqrt(2) sum_l \int ghat_l(lambda)
  //   sin(4 pi l theta(x_i, lambda)) dlambda, lambda = U0(x_i) + u^2,
  // with panels split at the energy nodes so the Lagrange extension is a
  // fixed cubic inside each panel.
  const int M = g.n_coords();
  g.Vm = Eigen::MatrixXd::Zero(NX, M);
  for (int i = c + 1; i < NX; ++i) {
    const double U = st.U0(g.xg[i]);
    const double lamlo = std::max(U, g.E.front()), lamhi = g.E.back();
    if (lamlo >= lamhi) continue;
    std::vector<double> ub{std::sqrt(lamlo - U), std::sqrt(lamhi - U)};
    for (int j = 0; j < NE; ++j) {
      if (g.E[j] > lamlo && g.E[j] < lamhi) ub.push_back(std::sqrt(g.E[j] - U));
    }
    std::sort(ub.begin(), ub.end());
    for (std::size_t p = 0; p + 1 < ub.size(); ++p) {
      if (ub[p + 1] - ub[p] < 1e-14) continue;
      const QuadRule qr = gauss_legendre(8, ub[p], ub[p + 1]);
      for (std::size_t n = 0; n < qr.x.size(); ++n) {
        const double u = qr.x[n], lam = U + u * u;
        int j0;
        double wt[4];
        g.lagrange(lam, j0, wt);
        const double th = g.theta_at(i, lam);
        const double base = qr.w[n] * 8 * M_PI * std::sqrt(2.0) * 2 * u;
        for (int l = 1; l <= g.lmax; ++l) {
          const double s = base * std::sin(4 * M_PI * l * th);
          for (int a = 0; a < 4; ++a) {
            if (wt[a] != 0) g.Vm(i, g.idx(l, j0 + a)) += s * wt[a] / std::sqrt(g.w[j0 + a]);
          }
        }
      }
    }
    g.Vm.row(2 * c - i) = -g.Vm.row(i);  // odd moment by symmetry
  }

  g.P = Eigen::MatrixXd(M, NX);
  for (int i = 0; i < NX; ++i) g.P.col(i) = (0.25 / M_PI) * g.wx[i] * g.Vm.row(i).transpose();
  return g;
}

Eigen::VectorXd project_to_coords(const ModeGrid& g, const std::function<double(double, double)>& f,
                                  int ntheta) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(g.n_coords());
  for (int j = 0; j < g.NE; ++j) {
    for (int n = 0; n < ntheta; ++n) {
      const double th = (n + 0.5) / ntheta;
      const double v = f(th, g.E[j]) / ntheta;
      for (int l = 1; l <= g.lmax; ++l) {
        c[g.idx(l, j)] += v * std::sqrt(2.0) * std::sin(4 * M_PI * l * th);
      }
    }
    for (int l = 1; l <= g.lmax; ++l) c[g.idx(l, j)] *= std::sqrt(g.w[j]);
  }
  return c;
}

double eval_coords(const ModeGrid& g, const Eigen::VectorXd& c, double theta, double E) {
  int j0;
  double wt[4];
  g.lagrange(E, j0, wt);
  double out = 0;
  for (int l = 1; l <= g.lmax; ++l) {
    double gl = 0;
    for (int a = 0; a < 4; ++a) {
      if (wt[a] != 0) gl += wt[a] * c[g.idx(l, j0 + a)] / std::sqrt(g.w[j0 + a]);
    }
    out += gl * std::sqrt(2.0) * std::sin(4 * M_PI * l * theta);
  }
  return out;
}

}  // namespace antonov
