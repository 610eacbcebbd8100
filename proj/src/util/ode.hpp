#pragma once
#include <array>
#include <functional>

namespace antonov {

using State2 = std::array<double, 2>;

struct EventResult {
  double x = 0;
  State2 y{0, 0};
  bool hit = false;
};

// Integrate dy/dx = rhs(y) from (x0, y0) with adaptive dopri5 until
// event(x, y) >= 0 (event assumed increasing through the crossing), locating
// the crossing on the dense output by bisection. Gives up at xmax.
EventResult integrate_to_event(
    const std::function<void(const State2&, State2&, double)>& rhs, State2 y0, double x0,
    double dx0, double xmax, const std::function<double(double, const State2&)>& event,
    double rtol, double atol);

}  // namespace antonov
