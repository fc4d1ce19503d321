#pragma once

// Dormand–Prince 5(4) with step-size control, generic over Eigen dense
// states (vectors for wave functions, matrices for density operators).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fslt/types.hpp"

namespace fslt {

struct Tolerances {
  double rtol = 1e-9;
  double atol = 1e-12;
  std::size_t max_steps = 50'000'000;
  double max_step = 0.0;  // 0 = unbounded
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

namespace detail {

struct DoPri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <class State>
double scaled_rms(const State& err, const State& y0, const State& y1, const Tolerances& tol) {
  const auto scale = (tol.atol + tol.rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array());
  const double sum = (err.cwiseAbs().array() / scale).square().sum();
  return std::sqrt(sum / static_cast<double>(err.size()));
}

template <class State>
double scaled_rms(const State& v, const State& y, const Tolerances& tol) {
  return scaled_rms(v, y, y, tol);
}

}  // namespace detail

struct NoPostStep {
  template <class State>
  void operator()(State&, State&) const {}
};

// Integrates dy/dt = rhs(t, y, dydt) across `grid` (strictly increasing),
// landing exactly on every grid time and calling observe(k, t_k, y(t_k)).
// post_step(y, dydt) runs after each accepted step (e.g. re-symmetrization)
// and must leave dydt equal to rhs at the modified y.
template <class State, class Rhs, class Observer, class PostStep = NoPostStep>
IntegrationStats integrate_dopri5(Rhs&& rhs, State y, std::span<const double> grid, const Tolerances& tol,
                                  Observer&& observe, PostStep&& post_step = {}) {
  using C = detail::DoPri5;
  require(!grid.empty(), "integrate: empty time grid");
  for (std::size_t k = 1; k < grid.size(); ++k)
    require(grid[k] > grid[k - 1], "integrate: time grid must be strictly increasing");

  IntegrationStats stats;
  double t = grid.front();
  observe(std::size_t{0}, t, static_cast<const State&>(y));
  if (grid.size() == 1) return stats;

  State k1 = State::Zero(y.rows(), y.cols()), k2 = k1, k3 = k1, k4 = k1, k5 = k1, k6 = k1, k7 = k1;
  State ytmp = k1, ynew = k1;
  auto eval = [&](double tt, const State& yy, State& out) {
    rhs(tt, yy, out);
    ++stats.rhs_evaluations;
  };

  eval(t, y, k1);

  // Initial step (Hairer, Nørsett & Wanner II.4).
  double h;
  {
    const double d0 = detail::scaled_rms(y, y, tol);
    const double d1 = detail::scaled_rms(k1, y, tol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, grid.back() - t);
    ytmp = y + h0 * k1;
    eval(t + h0, ytmp, k2);
    const double d2 = detail::scaled_rms(State(k2 - k1), y, tol) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
  }

  std::size_t steps = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double t_end = grid[k];
    while (t < t_end) {
      if (++steps > tol.max_steps) throw NumericalError("integrator: step budget exhausted at t = " + std::to_string(t), t);
      if (tol.max_step > 0.0) h = std::min(h, tol.max_step);
      // Stretch slightly rather than leave a sliver before the grid point.
      const bool last = t + 1.01 * h >= t_end;
      const double step = last ? t_end - t : h;
      if (step <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
        throw NumericalError("integrator: step size underflow at t = " + std::to_string(t), t);

      ytmp = y + step * (C::a21 * k1);
      eval(t + C::c2 * step, ytmp, k2);
      ytmp = y + step * (C::a31 * k1 + C::a32 * k2);
      eval(t + C::c3 * step, ytmp, k3);
      ytmp = y + step * (C::a41 * k1 + C::a42 * k2 + C::a43 * k3);
      eval(t + C::c4 * step, ytmp, k4);
      ytmp = y + step * (C::a51 * k1 + C::a52 * k2 + C::a53 * k3 + C::a54 * k4);
      eval(t + C::c5 * step, ytmp, k5);
      ytmp = y + step * (C::a61 * k1 + C::a62 * k2 + C::a63 * k3 + C::a64 * k4 + C::a65 * k5);
      eval(t + step, ytmp, k6);
      ynew = y + step * (C::a71 * k1 + C::a73 * k3 + C::a74 * k4 + C::a75 * k5 + C::a76 * k6);
      eval(t + step, ynew, k7);

      ytmp = step * (C::e1 * k1 + C::e3 * k3 + C::e4 * k4 + C::e5 * k5 + C::e6 * k6 + C::e7 * k7);
      const double err = detail::scaled_rms(ytmp, y, ynew, tol);
      if (!std::isfinite(err)) throw NumericalError("integrator: non-finite error estimate at t = " + std::to_string(t), t);

      if (err <= 1.0) {
        ++stats.accepted;
        t = last ? t_end : t + step;
        y.swap(ynew);
        post_step(y, k7);
        k1.swap(k7);  // FSAL
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A step clipped to hit the grid does not set the next proposal.
        if (!(last && step < h)) h = step * factor;
      } else {
        ++stats.rejected;
        h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
    }
    observe(k, t, static_cast<const State&>(y));
  }
  return stats;
}

// n evenly spaced points over [t0, t1], endpoints exact.
inline std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
  require(n >= 2 && t1 > t0, "uniform_grid: need n >= 2 and t1 > t0");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = t1;
  return g;
}

}  // namespace fslt
