#include "util/quad.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <stdexcept>

namespace antonov {

namespace {
const int gsl_handler_off = [] {
  gsl_set_error_handler_off();
  return 0;
}();
}  // namespace

QuadRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0 || !(b > a)) throw std::invalid_argument("gauss_legendre: bad rule");
  gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
  if (!t) throw std::runtime_error("gauss_legendre: alloc failed");
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, i, &r.x[i], &r.w[i], t);
  gsl_integration_glfixed_table_free(t);
  return r;
}

QuadRule composite_gl(std::size_t np, std::size_t panels, double a, double b) {
  if (panels == 0) throw std::invalid_argument("composite_gl: zero panels");
  QuadRule r;
  r.x.reserve(np * panels);
  r.w.reserve(np * panels);
  const double h = (b - a) / double(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    QuadRule sub = gauss_legendre(np, a + h * double(p), a + h * double(p + 1));
    r.x.insert(r.x.end(), sub.x.begin(), sub.x.end());
    r.w.insert(r.w.end(), sub.w.begin(), sub.w.end());
  }
  return r;
}

double integrate(const QuadRule& r, const std::function<double(double)>& f) {
  double s = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(r.x[i]);
  return s;
}

double tanh_sinh(const std::function<double(double, double)>& f, double a, double b,
                 double tol) {
  boost::math::quadrature::tanh_sinh<double> integrator(15);
  // boost passes b-x (>0) near b and a-x (<0) near a; flip to the documented
  // convention (x-a > 0 near a, x-b < 0 near b)
  return integrator.integrate([&f](double x, double bxc) { return f(x, -bxc); }, a, b, tol);
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol) {
  return tanh_sinh([&f](double x, double) { return f(x); }, a, b, tol);
}

double adaptive_gk(const std::function<double(double)>& f, double a, double b, double tol) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 14, tol);
}

double principal_value(const std::function<double(double)>& f, double a, double b, double c,
                       std::size_t n) {
  if (!(a < c && c < b)) throw std::invalid_argument("principal_value: c outside (a,b)");
  const double fc = f(c);
  QuadRule r = composite_gl(8, std::max<std::size_t>(1, n / 8), a, b);
  double s = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = r.x[i] - c;
    s += r.w[i] * ((f(r.x[i]) - fc) / d);
  }
  return s + fc * std::log((b - c) / (c - a));
}

}  // namespace antonov
