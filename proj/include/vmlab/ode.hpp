#pragma once
// Adaptive Dormand–Prince 5(4) integrator with a sign-change event.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace vmlab::ode {

using State = Eigen::VectorXd;
using Rhs = std::function<void(double, const State&, State&)>;
/// Integration stops when the event function changes sign from > 0 to ≤ 0 within a
/// step. It receives the state at the left end of the step as a reference.
using Event = std::function<double(double, const State&, const State& left)>;
/// Optional check of a located crossing; rejected crossings are ignored.
using Confirm = std::function<bool(double, const State&)>;

struct Options {
  double tol = 1e-10;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  long max_steps = 2'000'000;
  /// Width of the final bracket around an event crossing.
  double event_tol = 1e-12;
};

struct Solution {
  std::vector<double> s;
  std::vector<State> y;
  long steps = 0;
  long rejected = 0;
  double max_local_error = 0.0;
  bool event_hit = false;
  double event_s = 0.0;
};

/// Integrates from s0 to s1 (either direction). Throws StepSizeUnderflow.
Solution dopri45(const Rhs& rhs, double s0, const State& y0, double s1, const Options& opt = {},
                 const Event& event = nullptr, const Confirm& confirm = nullptr);

}  // namespace vmlab::ode
