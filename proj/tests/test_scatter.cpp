#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "bands.hpp"
#include "modegrid.hpp"
#include "ops.hpp"
#include "scatter.hpp"
#include "steady.hpp"
#include "util/quad.hpp"

using namespace antonov;
using cplx = std::complex<double>;

namespace {

const SteadyState& poly_state() {
  static SteadyState st = solve_steady_state(ProfileKind::polytrope, 1.0, 1.0);
  return st;
}

const OperatorSet& poly_ops() {
  static OperatorSet ops = [] {
    BandStructure bs = compute_band_structure(poly_state(), 3, 513);
    return build_operators(build_mode_grid(poly_state(), bs, 48, 121));
  }();
  return ops;
}

const EigenReport& poly_eig() {
  static EigenReport eig = eigendecompose(poly_ops());
  return eig;
}

}  // namespace

TEST_CASE("spectral grid: exact selection rows and the change of variables") {
  const OperatorSet& ops = poly_ops();
  const ModeGrid& g = ops.grid;
  const int M = g.n_coords();
  const SpectralMaps maps = build_spectral_maps(ops, nullptr, 0.0);

  REQUIRE(maps.segs.size() == 3);  // no band overlap at this mode count
  for (const BetaSegment& s : maps.segs) CHECK(s.modes.size() == 1);
  REQUIRE(int(maps.rows.size()) == M);
  REQUIRE(int(maps.nodes.size()) == M);

  // the chart Jacobian cancels the coordinate weights exactly
  CHECK((maps.F - Eigen::MatrixXd::Identity(M, M)).norm() == 0.0);
  for (int n = 0; n < M; n += 17) {
    CHECK(maps.nodes[n].beta == ops.beta[n]);
    CHECK(maps.nodes[n].seg >= 0);
    CHECK(maps.nodes[n].weight > 0);
  }

  // energy-side and beta-side integrals of a smooth profile agree:
  // int h^2 T/|phi'| dE = int h(E_l(beta))^2 T |p_l| / |phi'| dbeta
  const BandStructure& bs = g.bands;
  for (int l = 1; l <= g.lmax; ++l) {
    const double Ec = 0.5 * (g.E.front() + g.E.back());
    const double sc = (g.E.back() - g.E.front()) / 8;
    const auto h = [&](double E) { return std::exp(-std::pow((E - Ec) / sc, 2)); };
    double lhs = 0;
    for (int j = 0; j < g.NE; ++j) {
      lhs += g.q[j] * g.T[j] / g.phip[j] * h(g.E[j]) * h(g.E[j]);
    }
    const QuadRule qr =
        gauss_legendre(256, bs.beta_of(l, g.E.back()), bs.beta_of(l, g.E.front()));
    double rhs = 0;
    for (std::size_t q = 0; q < qr.x.size(); ++q) {
      const double E = bs.energy_of_beta(l, qr.x[q]);
      rhs += qr.w[q] * h(E) * h(E) * bs.T_of_E(E) * bs.p_abs(l, qr.x[q]) /
             g.st.phi_prime_abs(E);
    }
    CHECK(rhs == doctest::Approx(lhs).epsilon(1e-7));
  }

  const ScatterReport rep = scattering_report(ops, poly_eig(), maps);
  MESSAGE("parseval=", rep.parseval, " n_coords=", rep.n_coords, "/", M);
  CHECK(rep.parseval < 1e-12);
  CHECK(rep.n_coords > M / 3);
}

TEST_CASE("free coupling: maps collapse and the wave limit is immediate") {
  OperatorSet free = poly_ops();
  free.B.setZero();
  free.A = free.beta.asDiagonal();
  const int M = free.grid.n_coords();
  const SpectralMaps maps = build_spectral_maps(free, nullptr, 0.0);

  CHECK((maps.Fp - maps.F.cast<cplx>()).norm() == 0.0);
  CHECK((maps.Fm - maps.F.cast<cplx>()).norm() == 0.0);
  CHECK((maps.Wp - Eigen::MatrixXcd::Identity(M, M)).norm() == 0.0);
  CHECK((maps.Wm - Eigen::MatrixXcd::Identity(M, M)).norm() == 0.0);
  CHECK((maps.S - Eigen::MatrixXcd::Identity(M, M)).norm() == 0.0);

  const EigenReport eig = eigendecompose(free);
  const ScatterReport rep = scattering_report(free, eig, maps);
  MESSAGE("free diag=", rep.diag_p, " intertwine=", rep.intertwine_p,
          " invariance=", rep.invariance_p, " iso=", rep.iso_p);
  CHECK(rep.parseval < 1e-14);
  CHECK(rep.iso_p < 1e-12);
  CHECK(rep.diag_p < 1e-14);
  CHECK(rep.intertwine_p < 1e-14);
  CHECK(rep.invariance_p < 1e-10);
  CHECK(rep.s_unitarity < 1e-14);
  CHECK(rep.w_adjoint < 1e-12);

  // e^{itA} e^{-itA0} is the identity when the coupling is off
  Eigen::VectorXd f(M);
  std::mt19937 rng(77);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int n = 0; n < M; ++n) f[n] = nd(rng);
  const Eigen::MatrixXcd W = Eigen::MatrixXcd::Identity(M, M);
  const WaveCheck wc = wave_time_check(free, eig, W, f, 2.0, 33);
  CHECK(wc.dist0 < 1e-10);
  for (double d : wc.dist) CHECK(d < 1e-8 * f.norm());
  CHECK(wc.cesaro_late < 1e-8 * f.norm());

  CHECK_THROWS_AS(wave_time_check(free, eig, W, f, -1.0, 33), std::domain_error);
}

TEST_CASE("perturbed rows match dense resolvent-boundary solves") {
  const OperatorSet& ops = poly_ops();
  const int M = ops.grid.n_coords();
  const SpectralMaps maps = build_spectral_maps(ops);
  CHECK((maps.Fm - maps.Fp.conjugate()).norm() == 0.0);

  // skip rows dropped by the band-edge carve: they have no perturbed row
  const auto kept = [&](int r0) {
    for (int r = r0; r < M; ++r) {
      if (maps.Fp.row(r).norm() != 0.0) return r;
    }
    return -1;
  };
  double worst = 0;
  for (int r0 : {5, M / 3, 2 * M / 3, M - 6}) {
    const int r = kept(r0);
    REQUIRE(r >= 0);
    const double beta = maps.nodes[r].beta;
    const Eigen::MatrixXcd K = boundary_BR0(ops, beta, +1);
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Identity(M, M) - K;
    const Eigen::VectorXcd dense =
        T.transpose().partialPivLu().solve(maps.F.row(r).transpose().cast<cplx>());
    const double rel = (maps.Fp.row(r).transpose() - dense).norm() / dense.norm();
    worst = std::max(worst, rel);
  }
  MESSAGE("fast-vs-dense worst rel=", worst);
  CHECK(worst < 2e-5);

  // the minus boundary is the conjugate solve
  {
    const int r = kept(M / 2);
    REQUIRE(r >= 0);
    const double beta = maps.nodes[r].beta;
    const Eigen::MatrixXcd K = boundary_BR0(ops, beta, -1);
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Identity(M, M) - K;
    const Eigen::VectorXcd dense =
        T.transpose().partialPivLu().solve(maps.F.row(r).transpose().cast<cplx>());
    CHECK((maps.Fm.row(r).transpose() - dense).norm() / dense.norm() < 2e-5);
  }
}

TEST_CASE("stationary residuals shrink under refinement") {
  const SteadyState& st = poly_state();
  const BandStructure bs = compute_band_structure(st, 3, 513);

  // the probe packets are grid-independent data, so the default collars
  // already give a comparable refinement study
  auto report_at = [&](int NE) {
    const OperatorSet ops = build_operators(build_mode_grid(st, bs, NE, 121));
    const EigenReport eig = eigendecompose(ops);
    const SpectralMaps maps = build_spectral_maps(ops);
    return scattering_report(ops, eig, maps);
  };
  const ScatterReport lo = report_at(24);
  const ScatterReport hi = report_at(48);
  MESSAGE("iso    ", lo.iso_p, " -> ", hi.iso_p);
  MESSAGE("diag   ", lo.diag_p, " -> ", hi.diag_p);
  MESSAGE("intw   ", lo.intertwine_p, " -> ", hi.intertwine_p);
  MESSAGE("sqrt   ", lo.invariance_p, " -> ", hi.invariance_p);
  MESSAGE("sunit  ", lo.s_unitarity, " -> ", hi.s_unitarity, " wadj ", hi.w_adjoint);
  MESSAGE("opnorm iso ", lo.iso_opnorm, " -> ", hi.iso_opnorm, " s ", lo.s_opnorm, " -> ",
          hi.s_opnorm);

  CHECK(lo.iso_p < 1e-2);
  CHECK(hi.iso_p < 0.7 * lo.iso_p);
  CHECK(hi.diag_p < 0.7 * lo.diag_p);
  CHECK(hi.intertwine_p < 0.7 * lo.intertwine_p);
  CHECK(hi.invariance_p < 0.7 * lo.invariance_p);
  CHECK(hi.w_adjoint < 1e-10);
  CHECK(hi.parseval < 1e-12);
  CHECK(lo.n_probe == 3);
  CHECK(hi.n_probe == 3);

  // the triangle-inequality bound holds for the op-norm pair
  CHECK(lo.s_opnorm <= 2 * lo.iso_opnorm + 1e-6);
  CHECK(hi.s_opnorm <= 2 * hi.iso_opnorm + 1e-6);
}

TEST_CASE("the two boundary signs separate in the transient wave check") {
  const OperatorSet& ops = poly_ops();
  const ModeGrid& g = ops.grid;
  const EigenReport& eig = poly_eig();
  const SpectralMaps maps = build_spectral_maps(ops);
  const int M = g.n_coords();

  // smooth packet in the top band, projected onto the selected eigenspace
  Eigen::VectorXd q = Eigen::VectorXd::Zero(M);
  const double Ec = 0.5 * (g.E.front() + g.E.back());
  const double sc = 0.18 * (g.E.back() - g.E.front());
  for (int j = 0; j < g.NE; ++j) {
    const double d = (g.E[j] - Ec) / sc;
    q[g.idx(3, j)] = std::sqrt(g.w[j]) * std::exp(-0.5 * d * d);
  }
  const std::vector<int> sel = ac_select(eig, g.bands);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(M);
  for (int a : sel) y += eig.vectors.col(a).dot(q) * eig.vectors.col(a);
  REQUIRE(y.norm() > 0.5);
  y.normalize();

  const WaveCheck wp = wave_time_check(ops, eig, maps.Wp, y, 1.0, 41);
  const WaveCheck wm = wave_time_check(ops, eig, maps.Wm, y, 1.0, 41);
  CHECK(wp.dist0 == doctest::Approx(wm.dist0).epsilon(1e-9));
  double mp = wp.dist0, mm = wm.dist0;
  for (std::size_t k = 1; k < wp.dist.size(); ++k) mp = std::min(mp, wp.dist[k]);
  for (std::size_t k = 1; k < wm.dist.size(); ++k) mm = std::min(mm, wm.dist[k]);
  MESSAGE("dist0 ", wp.dist0, " min+ ", mp, " min- ", mm);

  // the forward-limit operator shows a transient dip below the initial
  // distance; the backward one only dephases upward on this window
  CHECK(mp < 0.9 * wp.dist0);
  CHECK(mm > mp);
}

TEST_CASE("overlapping bands: shared segments carry nodes of both modes") {
  const SteadyState& st = poly_state();
  const BandStructure bs = compute_band_structure(st, 5, 513);
  const OperatorSet ops = build_operators(build_mode_grid(st, bs, 24, 81));
  const SpectralMaps maps = build_spectral_maps(ops);

  int multi = -1;
  for (int sg = 0; sg < int(maps.segs.size()); ++sg) {
    if (maps.segs[sg].modes.size() > 1) multi = sg;
  }
  REQUIRE(multi >= 0);  // bands 4 and 5 overlap at this mode count

  std::vector<int> per_mode(ops.grid.lmax + 1, 0);
  for (int n = 0; n < int(maps.nodes.size()); ++n) {
    if (maps.nodes[n].seg == multi) per_mode[maps.rows[n].l] += 1;
  }
  int covered = 0;
  for (int l : maps.segs[multi].modes) covered += per_mode[l] > 0;
  CHECK(covered == int(maps.segs[multi].modes.size()));

  const EigenReport eig = eigendecompose(ops);
  const ScatterReport rep = scattering_report(ops, eig, maps);
  MESSAGE("overlap iso=", rep.iso_p, " diag=", rep.diag_p, " sunit=", rep.s_unitarity);
  CHECK(std::isfinite(rep.iso_p));
  CHECK(rep.parseval < 1e-12);
}

TEST_CASE("operator norm estimator and exclusion plumbing") {
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(3, 3);
  X(0, 0) = 3.0;
  X(1, 1) = cplx(0, 1);
  X(2, 2) = -0.5;
  CHECK(op2norm(X) == doctest::Approx(3.0).epsilon(1e-10));

  std::mt19937 rng(5);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXcd Y(7, 5);
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 5; ++j) Y(i, j) = cplx(nd(rng), nd(rng));
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Y);
  CHECK(op2norm(Y) == doctest::Approx(svd.singularValues()[0]).epsilon(1e-8));

  // an exceptional value inside a band knocks its neighborhood off the grid
  const OperatorSet& ops = poly_ops();
  const SpectralMaps plain = build_spectral_maps(ops, nullptr, 0.0);
  ExceptionalSet exc;
  const double mid = 0.5 * (plain.segs[0].lo + plain.segs[0].hi);
  const double radius = 0.05 * (plain.segs[0].hi - plain.segs[0].lo);
  exc.entries.push_back({mid, radius, true});
  const SpectralMaps cut = build_spectral_maps(ops, &exc, 0.0);
  CHECK(!cut.excluded.empty());
  int zeros = 0;
  for (int n = 0; n < int(cut.nodes.size()); ++n) {
    if (cut.F(n, n) == 0.0) {
      ++zeros;
      CHECK(std::abs(cut.nodes[n].beta - mid) <= radius);
    } else {
      CHECK(std::abs(cut.nodes[n].beta - mid) > radius);
    }
  }
  CHECK(zeros == int(cut.excluded.size()));
}
