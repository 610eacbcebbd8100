#pragma once
#include <cstddef>
#include <functional>
#include <vector>

namespace antonov {

struct QuadRule {
  std::vector<double> x, w;
  std::size_t size() const { return x.size(); }
};

// n-point Gauss-Legendre rule on [a,b]
QuadRule gauss_legendre(std::size_t n, double a, double b);

// `panels` equal panels of an np-point Gauss-Legendre rule on [a,b]
QuadRule composite_gl(std::size_t np, std::size_t panels, double a, double b);

double integrate(const QuadRule& r, const std::function<double(double)>& f);

// Double-exponential quadrature on (a,b); integrable endpoint singularities are fine.
// The two-argument form passes xc = signed distance to the nearest endpoint
// (x-a > 0 near a, x-b < 0 near b) so integrands can avoid cancellation there.
double tanh_sinh(const std::function<double(double, double)>& f, double a, double b,
                 double tol = 1e-12);
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

// adaptive Gauss-Kronrod 15-point, depth-limited
double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-12);

// Cauchy principal value of \int_a^b f(x)/(x-c) dx for a<c<b via singularity
// subtraction: \int (f(x)-f(c))/(x-c) dx + f(c) log((b-c)/(c-a)).
double principal_value(const std::function<double(double)>& f, double a, double b,
                       double c, std::size_t n = 256);

}  // namespace antonov
