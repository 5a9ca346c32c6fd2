#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "vmlab/potential.hpp"

using namespace vmlab;

namespace {

constexpr double kWidth = 0.6;

// Divergence-free spatial part (∂₂φ, −∂₁φ, 0) plus A₀ = ψ and a linear-in-t factor.
OneFormSampler manufactured_potential() {
  return OneFormSampler::analytic(3, [](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    using std::exp;
    T r2 = x.squaredNorm();
    T phi = exp(-0.5 * r2 / (kWidth * kWidth));
    T g = -phi / (kWidth * kWidth);  // ∂_iφ = g x_i
    T psi = 0.7 * exp(-0.5 * (r2 - 0.4 * x[2]) / (kWidth * kWidth));
    STVec<T> A(4);
    A[0] = psi;
    A[1] = (1.0 + 0.5 * t) * g * x[1];
    A[2] = -(1.0 + 0.5 * t) * g * x[0];
    A[3] = T(0.0);
    return A;
  });
}

Grid test_grid() { return Grid::cube(3, 64, 5.5); }

}  // namespace

TEST_CASE("zero data gives a zero potential") {
  Grid g = Grid::cube(3, 16, 3.0);
  GridField F0(g, GridKind::TwoForm);
  PotentialData pot = build_initial_potential(F0);
  CHECK(pot.A0.max_abs() == 0.0);
  CHECK(pot.modes.empty());
  CHECK(pot.A(0.3, SpaceVec<double>(SpaceVec<double>::Ones(3))).norm() == 0.0);
}

TEST_CASE("manufactured potential is recovered") {
  OneFormSampler Astar = manufactured_potential();
  FieldSampler F = exterior_derivative(Astar);
  Grid g = test_grid();
  GridField F0 = sample_field(F, g, 0.0);
  PotentialData pot = build_initial_potential(F0);
  CHECK(pot.gauge_residual_bound <= 1e-10);
  GridField dA = exterior_derivative_at_zero(pot);
  double worst = 0.0;
  for (std::size_t i = 0; i < dA.data.size(); ++i) worst = std::max(worst, std::abs(dA.data[i] - F0.data[i]));
  CHECK(worst <= 1e-8);
  // Divergence-free data: the spatial parts agree (no constant mode to remove).
  double diff = 0.0;
  for (std::size_t i = 0; i < g.size(); i += 97) {
    STVecd a = Astar(0.0, g.point(i));
    for (int k = 1; k <= 3; ++k) diff = std::max(diff, std::abs(pot.A0.component(k)[i] - a[k]));
  }
  CHECK(diff <= 1e-8);
  // The Fourier series reproduces the nodes and satisfies the gauge off-grid.
  const std::size_t probe = g.size() / 2 + 40;
  STVecd at = pot.A(0.0, g.point(probe));
  for (int mu = 0; mu <= 3; ++mu) CHECK(std::abs(at[mu] - pot.A0.component(mu)[probe]) <= 1e-10);
  SpaceVec<double> x(3);
  x << 0.13, -0.41, 0.27;
  CHECK(std::abs(lorenz_residual(pot.A, {0.0, x})) <= 1e-10);
  FieldSampler dpot = exterior_derivative(pot.A);
  CHECK((dpot(0.0, x) - F(0.0, x)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("single Fourier mode inverts exactly") {
  Grid g = Grid::cube(2, 32, 2.0);
  GridField s(g, GridKind::Scalar);
  const double L = g.length(0);
  for (std::size_t i = 0; i < g.size(); ++i) s.data[i] = std::sin(2.0 * std::numbers::pi * g.point(i)[0] / L);
  GridField u = solve_poisson(s);
  const double c = -std::pow(L / (2.0 * std::numbers::pi), 2);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(u.data[i] - c * s.data[i]) <= 1e-13);
  GridField m(g, GridKind::Scalar);
  std::fill(m.data.begin(), m.data.end(), 1.0);
  CHECK_THROWS_AS(solve_poisson(m), Error);
}

TEST_CASE("data touching the boundary is rejected") {
  OneFormSampler wide = OneFormSampler::analytic(2, [](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    using std::exp;
    STVec<T> A = STVec<T>::Zero(3);
    A[1] = exp(-0.5 * x.squaredNorm());
    return A;
  });
  GridField F0 = sample_field(exterior_derivative(wide), Grid::cube(2, 32, 3.0), 0.0);
  try {
    build_initial_potential(F0);
    FAIL("expected BoxTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoxTooSmall);
  }
}

TEST_CASE("gauge residual of a pure gauge is the wave operator") {
  // χ = sin t cos x¹ exp(x²/3): □χ = −∂_t²χ + Δχ = χ/9.
  OneFormSampler A = OneFormSampler::analytic(3, [](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    using std::cos;
    using std::exp;
    using std::sin;
    using D = ad::Dual<T>;
    auto chi = [](const auto& tt, const auto& x1, const auto& x2) {
      return sin(tt) * cos(x1) * exp(x2 / 3.0);
    };
    STVec<T> out = STVec<T>::Zero(4);
    out[0] = chi(D(t, 1.0), D(x[0], 0.0), D(x[1], 0.0)).der;
    out[1] = chi(D(t, 0.0), D(x[0], 1.0), D(x[1], 0.0)).der;
    out[2] = chi(D(t, 0.0), D(x[0], 0.0), D(x[1], 1.0)).der;
    return out;
  });
  for (double t : {0.0, 0.4, 1.3}) {
    SpaceVec<double> x(3);
    x << 0.3, -0.8, 0.5;
    const double chi = std::sin(t) * std::cos(x[0]) * std::exp(x[1] / 3.0);
    CHECK(lorenz_residual(A, {t, x}) == doctest::Approx(chi / 9.0).epsilon(1e-12));
  }
  CHECK(lorenz_residual(OneFormSampler::zero(3, 4, 1), {0.0, SpaceVec<double>::Zero(3)}) == 0.0);
}

TEST_CASE("Lie derivatives preserve the Lorenz gauge") {
  OneFormSampler A = hertz_potential(3);
  SpaceVec<double> x(3);
  x << 0.4, -0.2, 0.9;
  CHECK(std::abs(lorenz_residual(A, {0.7, x})) <= 1e-10);
  for (const auto& Z : vector_field_set(FieldSet::K, 3)) {
    OneFormSampler LA = lie_derivative_1form(Z, A);
    CHECK(std::abs(lorenz_residual(LA, {0.7, x})) <= 1e-9);
  }
}

TEST_CASE("wave source parity and neutrality") {
  PhaseFunction iso = PhaseFunction::analytic(
      [](const auto& p, double) {
        using std::exp;
        return exp(-p.x.squaredNorm() - p.v.squaredNorm());
      },
      SupportHint{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  0.75, 0.75});
  SpaceVec<double> x(3);
  x << 0.2, 0.1, -0.3;
  CHECK(wave_source({}, {0.5, x}).norm() == 0.0);
  STVecd J = wave_source({{iso, 1.0, 1.0}}, {0.5, x});
  CHECK(J[0] < 0.0);
  CHECK(J.tail(3).cwiseAbs().maxCoeff() <= 1e-14);
  STVecd zero = wave_source({{iso, 1.0, 1.0}, {iso, -1.0, 1.0}}, {0.5, x});
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grid files round-trip") {
  Grid g = Grid::cube(2, 8, 1.5);
  g.dims[1] = 6;
  GridField f(g, GridKind::OneForm);
  for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = 0.25 * static_cast<double>(i) - 3.0;
  std::stringstream ss;
  write_grid(ss, f);
  CHECK(ss.str().size() == 8 + 6 * 4 + 2 * 8 + 2 * 2 * 8 + f.data.size() * 8);
  GridField back = read_grid(ss);
  CHECK(back.kind == GridKind::OneForm);
  CHECK(back.grid.dims == g.dims);
  CHECK(back.data == f.data);
  std::stringstream bad("NOTAGRID");
  CHECK_THROWS_AS(read_grid(bad), Error);
}

TEST_CASE("potential bound ratio is finite in four dimensions") {
  OneFormSampler Astar = OneFormSampler::analytic(4, [](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    using std::exp;
    STVec<T> A = STVec<T>::Zero(5);
    T phi = exp(-x.squaredNorm());
    A[1] = (1.0 + t) * x[1] * phi;
    A[2] = -(1.0 + t) * x[0] * phi;
    A[3] = t * x[3] * phi;
    return A;
  });
  GridField F0 = sample_field(exterior_derivative(Astar), Grid::cube(4, 24, 7.0), 0.0);
  PotentialData pot = build_initial_potential(F0);
  for (int N : {0, 1}) {
    PotentialBound b = potential_bound(pot, F0, N);
    CHECK(b.lhs > 0.0);
    CHECK(std::isfinite(b.ratio()));
  }
}
