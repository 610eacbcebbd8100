#include "util/ode.hpp"

#include <boost/numeric/odeint.hpp>
#include <stdexcept>

namespace antonov {

namespace odeint = boost::numeric::odeint;

EventResult integrate_to_event(
    const std::function<void(const State2&, State2&, double)>& rhs, State2 y0, double x0,
    double dx0, double xmax, const std::function<double(double, const State2&)>& event,
    double rtol, double atol) {
  auto stepper =
      odeint::make_dense_output(atol, rtol, odeint::runge_kutta_dopri5<State2>());
  stepper.initialize(y0, x0, dx0);

  EventResult res;
  double eprev = event(x0, y0);
  if (eprev >= 0) return {x0, y0, true};

  while (stepper.current_time() < xmax) {
    stepper.do_step(rhs);
    const double t1 = stepper.current_time();
    const double e1 = event(t1, stepper.current_state());
    if (e1 >= 0) {
      double lo = stepper.previous_time(), hi = t1;
      State2 y;
      for (int it = 0; it < 200 && (hi - lo) > 1e-15 * (1 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, y);
        (event(mid, y) < 0 ? lo : hi) = mid;
      }
      stepper.calc_state(hi, y);
      return {hi, y, true};
    }
    eprev = e1;
  }
  res.x = stepper.current_time();
  res.y = stepper.current_state();
  return res;
}

}  // namespace antonov
