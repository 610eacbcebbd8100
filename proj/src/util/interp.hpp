#pragma once
#include <gsl/gsl_interp.h>
#include <gsl/gsl_spline.h>

#include <memory>
#include <vector>

namespace antonov {

// 1-D interpolant over strictly increasing abscissae; evaluation clamps to the
// node span. `steffen` is monotonicity-preserving cubic, `cspline` a natural
// cubic spline.
class Interp {
 public:
  enum Kind { steffen, cspline, linear };

  Interp() = default;
  Interp(std::vector<double> x, std::vector<double> y, Kind kind = steffen);

  double operator()(double x) const;
  double deriv(double x) const;

  bool empty() const { return x_.empty(); }
  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }
  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }

 private:
  std::vector<double> x_, y_;
  std::shared_ptr<gsl_spline> sp_;
  std::shared_ptr<gsl_interp_accel> acc_;
};

}  // namespace antonov
