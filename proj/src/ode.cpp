#include "vmlab/ode.hpp"

#include <algorithm>
#include <cmath>

#include "vmlab/types.hpp"

namespace vmlab::ode {
namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Step {
  State y;
  double err;
};

Step rk_step(const Rhs& f, double s, const State& y, const State& k1, double h, double tol) {
  const Eigen::Index n = y.size();
  State k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  f(s + c2 * h, y + h * a21 * k1, k2);
  f(s + c3 * h, y + h * (a31 * k1 + a32 * k2), k3);
  f(s + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4);
  f(s + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
  f(s + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
  State yn = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  f(s + h, yn, k7);
  State e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  double err = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(yn[i])));
    err = std::max(err, std::abs(e[i]) / sc);
  }
  return {std::move(yn), err};
}

}  // namespace

Solution dopri45(const Rhs& rhs, double s0, const State& y0, double s1, const Options& opt,
                 const Event& event, const Confirm& confirm) {
  Solution sol;
  sol.s.push_back(s0);
  sol.y.push_back(y0);
  if (s1 == s0) return sol;
  const double dir = s1 > s0 ? 1.0 : -1.0;
  double s = s0;
  State y = y0, k1(y0.size());
  double h = dir * std::min(opt.initial_step, std::abs(s1 - s0));
  while (dir * (s1 - s) > 0.0) {
    if (sol.steps + sol.rejected > opt.max_steps) {
      throw Error(ErrorCode::StepSizeUnderflow, "ODE step budget exhausted");
    }
    if (dir * (s + h - s1) > 0.0) h = s1 - s;
    rhs(s, y, k1);
    Step st = rk_step(rhs, s, y, k1, h, opt.tol);
    if (st.err > 1.0) {
      ++sol.rejected;
      h *= std::max(0.1, 0.9 * std::pow(st.err, -0.2));
      if (std::abs(h) < opt.min_step * (1.0 + std::abs(s))) {
        throw Error(ErrorCode::StepSizeUnderflow, "ODE step size underflow");
      }
      continue;
    }
    ++sol.steps;
    sol.max_local_error = std::max(sol.max_local_error, st.err * opt.tol);
    if (event) {
      if (event(s, y, y) > 0.0 && event(s + h, st.y, y) <= 0.0) {
        // Bisect on the step length, restarting from the accepted left state.
        double lo = 0.0, hi = std::abs(h);
        State yhi = st.y;
        while (hi - lo > opt.event_tol) {
          double mid = 0.5 * (lo + hi);
          Step m = rk_step(rhs, s, y, k1, dir * mid, opt.tol);
          if (event(s + dir * mid, m.y, y) > 0.0) {
            lo = mid;
          } else {
            hi = mid;
            yhi = m.y;
          }
        }
        if (!confirm || confirm(s + dir * hi, yhi)) {
          sol.event_hit = true;
          sol.event_s = s + dir * hi;
          sol.s.push_back(sol.event_s);
          sol.y.push_back(yhi);
          return sol;
        }
      }
    }
    s += h;
    y = std::move(st.y);
    sol.s.push_back(s);
    sol.y.push_back(y);
    double fac = st.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(st.err, -0.2), 0.2, 5.0);
    h *= fac;
  }
  return sol;
}

}  // namespace vmlab::ode
