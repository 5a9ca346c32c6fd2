#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vmlab/quadrature.hpp"

using namespace vmlab::quad;

TEST_CASE("Gauss-Legendre exactness") {
  for (int n = 1; n <= 20; ++n) {
    Rule1D g = gauss_legendre(n, 0.0, 2.0);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += g.w[i] * std::pow(g.x[i], deg);
      CHECK(s == doctest::Approx(std::pow(2.0, deg + 1) / (deg + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("Gauss-Hermite moments") {
  Rule1D g = gauss_hermite(30);
  double m0 = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    m0 += g.w[i];
    m2 += g.w[i] * g.x[i] * g.x[i];
    m4 += g.w[i] * std::pow(g.x[i], 4);
  }
  const double sp = std::sqrt(std::numbers::pi);
  CHECK(m0 == doctest::Approx(sp).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(sp / 2).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3 * sp / 4).epsilon(1e-13));
}

TEST_CASE("adaptive Gauss-Kronrod") {
  auto r = integrate([](double x) { return 1.0 / std::pow(1.0 + x * x, 2); }, 0.0, INFINITY);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(std::numbers::pi / 4).epsilon(1e-11));
  auto s = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-13, 1e-12);
  CHECK(s.value == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  auto bad = integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-14, 1e-14, 20);
  CHECK_FALSE(bad.converged);
}

TEST_CASE("sphere rule") {
  for (int n = 1; n <= 6; ++n) {
    SphereRule s = sphere_rule(n, 6);
    CHECK(s.weights.sum() == doctest::Approx(sphere_area(n)).epsilon(1e-12));
    for (Eigen::Index k = 0; k < s.size(); ++k) CHECK(std::abs(s.nodes.col(k).norm() - 1.0) < 1e-14);
    if (n >= 2) {
      double m2 = 0.0;
      for (Eigen::Index k = 0; k < s.size(); ++k) m2 += s.weights[k] * s.nodes(0, k) * s.nodes(0, k);
      CHECK(m2 == doctest::Approx(sphere_area(n) / n).epsilon(1e-11));
    }
  }
  CHECK(sphere_area(4) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("ball rule integrates |x|^2") {
  CloudRule b = radial_spherical(4, 0.0, 1.0, 8, 1, 4);
  double s = 0.0;
  for (Eigen::Index k = 0; k < b.size(); ++k) s += b.weights[k] * b.nodes.col(k).squaredNorm();
  CHECK(s == doctest::Approx(sphere_area(4) / 6.0).epsilon(1e-12));
}

TEST_CASE("Halton points are deterministic and in the unit cube") {
  Halton h1(5, 42), h2(5, 42), h3(5, 43);
  for (int i = 0; i < 100; ++i) {
    auto p = h1.point(i);
    CHECK((p - h2.point(i)).norm() == 0.0);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.maxCoeff() < 1.0);
  }
  CHECK((h1.point(3) - h3.point(3)).norm() > 0.0);
}
