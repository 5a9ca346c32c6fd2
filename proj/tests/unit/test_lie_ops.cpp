#include <doctest.h>

#include <cmath>
#include <random>

#include "vmlab/lie_ops.hpp"

using namespace vmlab;
using VF = VectorFieldSpec;

namespace {

PhasePoint<double> point(double t, std::initializer_list<double> x, std::initializer_list<double> v) {
  PhasePoint<double> p{t, SpaceVec<double>(static_cast<Eigen::Index>(x.size())),
                       SpaceVec<double>(static_cast<Eigen::Index>(v.size()))};
  Eigen::Index i = 0;
  for (double a : x) p.x[i++] = a;
  i = 0;
  for (double a : v) p.v[i++] = a;
  return p;
}

PhasePoint<double> random_point(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  PhasePoint<double> p{std::abs(g(rng)), SpaceVec<double>(n), SpaceVec<double>(n)};
  for (int i = 0; i < n; ++i) {
    p.x[i] = g(rng);
    p.v[i] = g(rng);
  }
  return p;
}

// Smooth test function mixing all phase variables.
PhaseFunction gaussian_mix() {
  return PhaseFunction::analytic([](const auto& p, double) {
    using std::exp;
    using std::sin;
    auto q = p.x.squaredNorm() + 0.5 * p.v.squaredNorm();
    return exp(-0.3 * q) * (1.0 + 0.2 * sin(p.t + p.x[0] * p.v[1]));
  });
}

PhaseFunction cubic_poly() {
  return PhaseFunction::analytic([](const auto& p, double) {
    return p.t * p.x[0] * p.v[1] + p.x[1] * p.x[1] * p.v[0] - 2.0 * p.v[0] * p.v[1] * p.x[0] + p.t * p.t;
  });
}

}  // namespace

TEST_CASE("first-order actions") {
  auto x1 = PhaseFunction::analytic([](const auto& p, double) { return p.x[0]; });
  CHECK(apply_vf(VF::rotation(1, 2), x1, point(0, {3, 5, 0, 0}, {0, 0, 0, 0}), 1.0) ==
        doctest::Approx(-5.0));

  auto v1 = PhaseFunction::analytic([](const auto& p, double) { return p.v[0]; });
  auto p = point(0.3, {1, 2, 3, 4}, {0.5, -1, 2, 0.25});
  double v0 = std::sqrt(1.0 + p.v.squaredNorm());
  CHECK(apply_vf(VF::boost(1).lift(), v1, p, 1.0) == doctest::Approx(v0));
  CHECK(apply_vf(VF::boost(1), v1, p, 1.0) == 0.0);

  // S(x^μ v_μ / v⁰) = x^μ v_μ / v⁰: homogeneous of degree one in (t, x).
  auto s = PhaseFunction::analytic([](const auto& q, double m) { return WeightSpec::scalar_product()(q, m); });
  double expect = (p.x.dot(p.v) - p.t * v0) / v0;
  CHECK(apply_vf(VF::scaling(), s, p, 1.0) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("words") {
  auto h = gaussian_mix();
  auto p = point(0.7, {0.1, -0.2, 0.3, 0.4}, {1, 0, -1, 0.5});
  CHECK(apply_word(MultiIndex{}, h, p, 1.0) == h(p, 1.0));
  auto t2 = PhaseFunction::analytic([](const auto& q, double) { return q.t * q.t; });
  CHECK(apply_word(MultiIndex{{VF::translation(0), VF::translation(0)}}, t2, p, 1.0) ==
        doctest::Approx(2.0));

  auto set = vector_field_set(FieldSet::PHat0, 4);
  CHECK(set.size() == 16);
  CHECK(set.back().kind == VF::Kind::Scaling);
  auto words = enumerate_words(set, 2);
  CHECK(words.size() == 1 + 16 + 256);
  CHECK(words[1].word[0] == set[0]);
  CHECK(words[17].word[0] == set[0]);
  CHECK(words[17].word[1] == set[0]);
  CHECK(words[18].word[1] == set[1]);
}

TEST_CASE("boost commutator is a rotation") {
  auto h = cubic_poly();
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) {
    auto p = random_point(rng, 4);
    MultiIndex ab{{VF::boost(1).lift(), VF::boost(2).lift()}};
    MultiIndex ba{{VF::boost(2).lift(), VF::boost(1).lift()}};
    double diff = apply_word(ab, h, p, 1.0) - apply_word(ba, h, p, 1.0);
    CHECK(diff == doctest::Approx(apply_vf(VF::rotation(1, 2).lift(), h, p, 1.0)).epsilon(1e-12));
  }
  auto set = vector_field_set(FieldSet::PHat, 4);
  auto ex = commutator_expansion(VF::boost(1).lift(), VF::boost(2).lift(), set, 4, 1.0);
  CHECK(ex.residual < 1e-10);
  for (std::size_t c = 0; c < set.size(); ++c) {
    double expect = set[c] == VF::rotation(1, 2).lift() ? 1.0 : 0.0;
    CHECK(std::abs(ex.coefficients[c] - expect) < 1e-10);
  }
}

TEST_CASE("closure of the commutation sets") {
  const int n = 3;
  for (FieldSet fs : {FieldSet::K, FieldSet::P, FieldSet::PHat0}) {
    auto set = vector_field_set(fs, n);
    double worst = 0.0;
    for (const auto& a : set)
      for (const auto& b : set) {
        auto ex = commutator_expansion(a, b, set, n, 1.0);
        worst = std::max(worst, ex.residual);
      }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("transport commutators") {
  auto h = gaussian_mix();
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    auto p = random_point(rng, 4);
    CHECK(std::abs(transport_commutator_residual(1.0, VF::boost(1).lift(), h, p)) < 1e-12);
    CHECK(std::abs(transport_commutator_residual(0.0, VF::scaling(), h, p)) < 1e-12);
  }
  auto flat = PhaseFunction::analytic([](const auto& p, double) { return p.t * p.v[0] + p.v[1]; });
  CHECK(transport_commutator_residual(1.0, VF::translation(1), flat, random_point(rng, 4)) == 0.0);
  // The unlifted boost does not commute with T_m.
  CHECK(std::abs(transport_commutator_residual(1.0, VF::boost(1), h, random_point(rng, 4))) > 1e-6);

  auto p0 = point(0, {1, 0}, {0, 0});
  CHECK_THROWS_AS(transport_commutator_residual(0.0, VF::scaling(), h, p0), Error);
}

TEST_CASE("sampled functions match forward mode") {
  auto h = gaussian_mix();
  auto hs = PhaseFunction::sampled([h](const PhasePoint<double>& p, double m) { return h(p, m); });
  std::mt19937_64 rng(4);
  auto set = vector_field_set(FieldSet::PHat0, 4);
  for (int k = 0; k < 5; ++k) {
    auto p = random_point(rng, 4);
    for (const auto& z : set) {
      double a = apply_vf(z, h, p, 1.0), b = apply_vf(z, hs, p, 1.0);
      CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("Lie derivative of 2-forms") {
  const int n = 4;
  auto stat = FieldSampler::analytic(n, [](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    STMat<T> F = STMat<T>::Zero(5, 5);
    F(0, 1) = x[0] * x[1];
    F(2, 3) = x[2] + 0.5 * x[3] * x[3];
    F.template triangularView<Eigen::StrictlyLower>() = -F.transpose();
    return F;
  });
  SpacetimePoint<double> p{1.5, SpaceVec<double>(n)};
  p.x << 0.3, -0.4, 0.7, 1.1;
  CHECK(lie_derivative_2form(VF::translation(0), stat, p).norm() == 0.0);

  STMatd C = STMatd::Zero(5, 5);
  C(0, 2) = 1.5;
  C(1, 3) = -2.0;
  C(3, 4) = 0.25;
  C = C - C.transpose();
  auto cf = FieldSampler::analytic(n, [C](const auto& t, const auto&) {
    using T = std::remove_cvref_t<decltype(t)>;
    return STMat<T>(C.cast<T>());
  });
  CHECK((lie_derivative_2form(VF::scaling(), cf, p) - 2.0 * C).norm() < 1e-15);

  STMatd R = STMatd::Zero(5, 5);
  R(1, 2) = 3.0;
  R(2, 1) = -3.0;
  auto rf = FieldSampler::analytic(n, [R](const auto& t, const auto&) {
    using T = std::remove_cvref_t<decltype(t)>;
    return STMat<T>(R.cast<T>());
  });
  CHECK(lie_derivative_2form(VF::rotation(1, 2), rf, p).norm() < 1e-15);

  STMatd L = lie_derivative_2form(VF::boost(2), stat, p);
  CHECK((L + L.transpose()).norm() == 0.0);
}
