#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "vmlab/counterexample.hpp"

using namespace vmlab;

TEST_CASE("cutoff profile") {
  CHECK(cutoff(0.0) == 1.0);
  CHECK(cutoff(1.0) == 1.0);
  CHECK(cutoff(-5.0) == 1.0);
  CHECK(cutoff(3.0) == 0.0);
  CHECK(cutoff(4.0) == 0.0);
  CHECK(cutoff(2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cutoff_derivative(2.0) < 0.0);
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double s = 1.0 + 2.0 * k / 200.0;
    if (s > 1.1 && s < 2.9) CHECK(cutoff(s) < prev);
    CHECK(cutoff(s) <= prev);
    CHECK(cutoff(s) + cutoff(4.0 - s) == doctest::Approx(1.0).epsilon(1e-14));
    prev = cutoff(s);
  }
  // w χ′(2w²) is not constant near w = 1.
  std::set<double> values;
  for (double w : {0.9, 1.0, 1.1}) values.insert(w * cutoff_derivative(2.0 * w * w));
  CHECK(values.size() >= 2);
  // Derivative against a central difference.
  const double h = 1e-6;
  CHECK(cutoff_derivative(1.7) == doctest::Approx((cutoff(1.7 + h) - cutoff(1.7 - h)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("counterexample constants") {
  // χ(s) + χ(4 − s) = 1 gives ∫₀³χ = 2, so in the plane 1/M = π·2.
  auto d2 = build_counterexample(2);
  CHECK(d2.M == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(d2.M0 == doctest::Approx(40.0));
  CHECK_THROWS_AS(build_counterexample(1), Error);

  auto d = build_counterexample(4);
  SpaceVec<double> diag = SpaceVec<double>::Ones(4);
  CHECK(d.E0.at({0.0, diag})(0, 1) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(d.E0.at({0.0, SpaceVec<double>::Zero(4)})(0, 3) == 20.0);
  // sup |div E0| is attained along the diagonal direction.
  double brute = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    const double y = 0.5 + 1.5 * k / 4000.0;
    const auto g = field_gradient(d.E0, {0.0, SpaceVec<double>::Constant(4, y)});
    double div = 0.0;
    for (int i = 1; i <= 4; ++i) div += g[i](0, i);
    brute = std::max(brute, std::abs(div));
  }
  CHECK(d.div_sup >= brute * (1.0 - 1e-12));
  CHECK(d.div_sup == doctest::Approx(brute).epsilon(1e-5));
  // Densities are nonnegative.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  for (int k = 0; k < 200; ++k) {
    SpaceVec<double> x(4), v(4);
    for (int i = 0; i < 4; ++i) {
      x[i] = u(rng);
      v[i] = 0.5 * u(rng);
    }
    const PhasePoint<double> p{0.0, x, v};
    CHECK(d.f01(p, 0.0) >= 0.0);
    CHECK(d.f02(p, 1.0) >= 0.0);
  }
}

TEST_CASE("initial data satisfy the constraint") {
  for (int n : {2, 3}) {
    auto d = build_counterexample(n);
    CHECK(constraint_residual(d) <= 1e-8);
  }
}

TEST_CASE("transposition symmetries") {
  auto d = build_counterexample(3);
  auto res = symmetry_check(d.E0, {d.f01, d.f02});
  for (const auto& [name, value] : res) CHECK_MESSAGE(value <= 1e-10, name);
  CHECK(res.at("magnetic_antisym") == 0.0);
  CHECK(res.at("magnetic_swap") == 0.0);

  const FieldSampler E0 = d.E0;
  auto tilted = FieldSampler::analytic(3, [E0](const auto& t, const auto& x) {
    auto F = E0(t, x);
    F(0, 1) *= 1.01;
    F(1, 0) *= 1.01;
    return F;
  });
  auto bad = symmetry_check(tilted);
  CHECK(bad.at("electric_swap") > 1e-3);
  CHECK(bad.at("magnetic_fixed") == 0.0);
}

TEST_CASE("diagonal characteristic") {
  auto ten = constant_profile(10.0);
  for (double s : {0.0, 0.3, 0.7}) {
    auto st = diagonal_velocity(0.4, s, 0.7, 3, ten);
    CHECK(st.velocity == doctest::Approx(0.4 + 10.0 * (s - 0.7)).epsilon(1e-13));
    CHECK(st.position == doctest::Approx(1.0 + (s - 0.7) / std::sqrt(3.0)).epsilon(1e-15));
  }
  CHECK(diagonal_velocity(0.25, 0.5, 0.5, 4, ten).velocity == 0.25);

  // Full characteristic ODE for the massless species under the static field.
  const int n = 3;
  auto d = build_counterexample(n);
  const double eta = 0.5, t = 0.02;
  CharacteristicOptions co;
  co.tol = 1e-12;
  auto c = integrate_characteristic(0.0, d.E0, t, SpaceVec<double>::Ones(n), eta * SpaceVec<double>::Ones(n), -t, co);
  REQUIRE(c.status == CharacteristicStatus::Completed);
  auto prof = static_profile(d);
  double dev = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    auto st = diagonal_velocity(eta, c.s[k], t, n, prof);
    dev = std::max(dev, (c.V[k] - SpaceVec<double>::Constant(n, st.velocity)).cwiseAbs().maxCoeff());
    dev = std::max(dev, (c.X[k] - SpaceVec<double>::Constant(n, st.position)).cwiseAbs().maxCoeff());
  }
  CHECK(dev <= 1e-8);
}

TEST_CASE("vanishing time") {
  auto ten = constant_profile(10.0);
  for (double eta : {1e-3, 0.02, 0.1}) CHECK(vanishing_time(eta, 4, ten, 40.0) == doctest::Approx(eta / 10.0).epsilon(1e-11));

  auto d = build_counterexample(4);
  auto prof = static_profile(d);
  auto curve = vanishing_curve(log_spaced(1e-3, 1e-1, 20), 4, prof, d.M0);
  REQUIRE(curve.size() == 20);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].T >= curve[i].bracket_low);
    CHECK(curve[i].T <= curve[i].bracket_high);
    if (i > 0) CHECK(curve[i].T > curve[i - 1].T);
  }
  // T_η → 0: the field stays near its value at the diagonal point, so T_η ≈ η/10.
  CHECK(curve.front().T == doctest::Approx(1e-4).epsilon(1e-2));

  std::ostringstream csv;
  write_vanishing_csv(csv, curve);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "eta,T_eta,bracket_low,bracket_high");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 20);

  try {
    vanishing_time(0.01, 4, constant_profile(3.0), 40.0);
    FAIL("expected NoRootInBracket");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoRootInBracket);
  }
  CHECK(default_eta_max(10.0) == 0.05);
  CHECK(default_eta_max(0.1) == doctest::Approx(0.025));
}

TEST_CASE("vanishing instant after the vanishing time") {
  auto d = build_counterexample(4);
  const double M0 = d.M0;
  auto stat = static_profile(d);
  auto base = static_profile(d);
  // |∂_t E¹| ≤ 20·0.02·2 < 1.
  DiagonalProfile wobble = [base](double s, double y) { return base(s, y) * (1.0 + 0.02 * std::sin(2.0 * s)); };
  const double eta = 0.05;
  for (const auto& prof : {stat, wobble}) {
    const double T = vanishing_time(eta, 4, prof, M0);
    CHECK(std::abs(vanishing_instant(eta, T * (1.0 + 1e-9), 4, prof)) <= 1e-8);
    for (double t : {T + 0.01, T + 0.05, T + 0.2}) {
      const double sstar = vanishing_instant(eta, t, 4, prof);
      CHECK(std::abs(diagonal_velocity(eta, sstar, t, 4, prof).velocity) <= 1e-10);
      const double slope = vanishing_instant_slope(eta, t, 4, prof);
      CHECK(slope >= 4.0 / M0);
      CHECK(slope <= (M0 + 1.0) / 5.0);
      // The extension meets the characteristic where the velocity vanishes.
      const double tau = t - sstar;
      CHECK(extended_position(eta, sstar, t, 4, prof) ==
            doctest::Approx(diagonal_velocity(eta, sstar, t, 4, prof).position).epsilon(1e-12));
      CHECK(extended_position(eta, sstar, t, 4, prof) == doctest::Approx(1.0 - tau / 2.0).epsilon(1e-12));
    }
  }
  // A static field makes t − τ_η(t) a unit-speed shift.
  CHECK(vanishing_instant_slope(eta, 0.1, 4, stat) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(vanishing_instant(eta, 1e-4, 4, stat), Error);
}

TEST_CASE("velocity bound along characteristics") {
  SpaceVec<double> x(3), v(3);
  x << 0.1, -0.2, 0.3;
  v << 0.5, 0.0, 0.0;
  auto free = velocity_bound_check(1.0, zero_field(3), 0.0, x, v, 4.0);
  CHECK(free.energy_identity == 0.0);
  CHECK(free.min_speed == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(free.report.verdict);

  SpaceVec<double> E(3);
  E << 0.0, 0.3, 0.0;
  auto perp = velocity_bound_check(1.0, constant_electric_field(E), 0.0, x, v, 5.0);
  CHECK(perp.energy_identity <= 1e-8);
  CHECK(perp.min_speed == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(perp.report.verdict);

  // Massless particle with a large speed in a weak copy of the static field.
  auto d = build_counterexample(3);
  const FieldSampler E0 = d.E0;
  auto weak = FieldSampler::analytic(3, [E0](const auto& t, const auto& y) {
    auto F = E0(t, y);
    F *= 0.01;
    return F;
  });
  SpaceVec<double> fast(3);
  fast << -2.0, 0.5, 0.0;
  auto m0 = velocity_bound_check(0.0, weak, 0.0, SpaceVec<double>::Ones(3), fast, 1.0);
  CHECK(m0.energy_identity <= 1e-8);
  CHECK(m0.min_speed >= 0.5 * fast.norm());
  CHECK(m0.lower_margin >= -1e-12);
  CHECK(m0.report.verdict);
  CHECK_THROWS_AS(velocity_bound_check(0.0, weak, 0.0, x, SpaceVec<double>::Zero(3), 1.0), Error);
}
