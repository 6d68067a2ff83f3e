#pragma once

#include <cstddef>

namespace locsim {

/// Classical fourth-order Runge-Kutta for y' = f(t, y) with a fixed step.
/// `State` is any Eigen dense expression type (vector or matrix).
template <class State, class Rhs>
State rk4_integrate(Rhs&& rhs, State y, double t0, double t1, std::size_t steps) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  State k1, k2, k3, k4, tmp;
  for (std::size_t j = 0; j < steps; ++j) {
    const double t = t0 + h * static_cast<double>(j);
    k1 = rhs(t, y);
    tmp = y + (0.5 * h) * k1;
    k2 = rhs(t + 0.5 * h, tmp);
    tmp = y + (0.5 * h) * k2;
    k3 = rhs(t + 0.5 * h, tmp);
    tmp = y + h * k3;
    k4 = rhs(t + h, tmp);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace locsim
