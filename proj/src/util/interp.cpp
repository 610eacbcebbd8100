#include "util/interp.hpp"

#include <gsl/gsl_interp.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <stdexcept>

namespace antonov {

Interp::Interp(std::vector<double> x, std::vector<double> y, Kind kind)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() < 2)
    throw std::invalid_argument("Interp: need >=2 matching nodes");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("Interp: abscissae not increasing");

  const gsl_interp_type* t = gsl_interp_steffen;
  if (kind == cspline) t = gsl_interp_cspline;
  if (kind == linear) t = gsl_interp_linear;
  if (x_.size() < gsl_interp_type_min_size(t)) t = gsl_interp_linear;

  sp_ = std::shared_ptr<gsl_spline>(gsl_spline_alloc(t, x_.size()), gsl_spline_free);
  acc_ = std::shared_ptr<gsl_interp_accel>(gsl_interp_accel_alloc(), gsl_interp_accel_free);
  if (!sp_ || !acc_) throw std::runtime_error("Interp: alloc failed");
  if (gsl_spline_init(sp_.get(), x_.data(), y_.data(), x_.size()) != 0)
    throw std::runtime_error("Interp: init failed");
}

double Interp::operator()(double x) const {
  if (!sp_) throw std::logic_error("Interp: evaluating an empty interpolant");
  x = std::clamp(x, x_.front(), x_.back());
  return gsl_spline_eval(sp_.get(), x, acc_.get());
}

double Interp::deriv(double x) const {
  if (!sp_) throw std::logic_error("Interp: evaluating an empty interpolant");
  x = std::clamp(x, x_.front(), x_.back());
  return gsl_spline_eval_deriv(sp_.get(), x, acc_.get());
}

}  // namespace antonov
