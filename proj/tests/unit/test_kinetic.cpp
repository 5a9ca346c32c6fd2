#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "vmlab/kinetic.hpp"

using namespace vmlab;

namespace {

SpaceVec<double> vec(std::initializer_list<double> a) {
  SpaceVec<double> v(static_cast<Eigen::Index>(a.size()));
  Eigen::Index i = 0;
  for (double x : a) v[i++] = x;
  return v;
}

SpaceVec<double> random_vec(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SpaceVec<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

// Free-transport solution with a Gaussian initial datum.
PhaseFunction free_gaussian(double sx, double sv, double mass) {
  return PhaseFunction::analytic(
      [sx, sv, mass](const auto& p, double) {
        using T = std::remove_cvref_t<decltype(p.t)>;
        using std::exp;
        T v0 = energy_of(p.v, mass);
        SpaceVec<T> y = p.x - (p.t / v0) * p.v;
        return T(exp(-0.5 * y.squaredNorm() / (sx * sx) - 0.5 * p.v.squaredNorm() / (sv * sv)));
      },
      SupportHint{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  sv, sx});
}

template <class T>
T bump(const T& r2) {
  using std::exp;
  if (ad::value(r2) >= 1.0) return T(0.0);
  return exp(1.0 - 1.0 / (1.0 - r2));
}

PhaseFunction free_bump(double mass) {
  return PhaseFunction::analytic(
      [mass](const auto& p, double) {
        using T = std::remove_cvref_t<decltype(p.t)>;
        T v0 = energy_of(p.v, mass);
        SpaceVec<T> y = p.x - (p.t / v0) * p.v;
        return bump(y.squaredNorm()) * bump(p.v.squaredNorm());
      },
      SupportHint{1.0, 1.0, 1.0, 1.0});
}

}  // namespace

TEST_CASE("transport of a free solution vanishes") {
  std::mt19937_64 rng(7);
  PhaseFunction f = free_gaussian(1.0, 1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    PhasePoint<double> p{1.5, random_vec(rng, 3, 2.0), random_vec(rng, 3, 1.0)};
    CHECK(std::abs(transport_apply(1.0, f, FieldSampler{}, p)) < 1e-12);
  }
  PhaseFunction c = PhaseFunction::analytic([](const auto& p, double) { return decltype(p.t)(2.5); });
  PhasePoint<double> p{0.3, vec({1, 2, 3}), vec({0.1, -0.2, 0.3})};
  CHECK(transport_apply(1.0, c, FieldSampler{}, p) == 0.0);
}

TEST_CASE("force term contracts with the velocity gradient") {
  const double E = 0.7;
  FieldSampler F = constant_electric_field(vec({E, 0.0, 0.0}));
  PhaseFunction f = PhaseFunction::analytic([](const auto& p, double) { return p.v[0]; });
  PhasePoint<double> p{0.0, vec({0.1, 0.2, 0.3}), vec({0.4, -0.5, 0.6})};
  // v^μ∂_μ(v¹) = 0, so only F(v, ∇_v f) = v⁰E remains.
  const double v0 = energy_of(p.v, 1.0);
  CHECK(transport_apply(1.0, f, F, p) == doctest::Approx(v0 * E).epsilon(1e-14));
  CHECK_THROWS_AS(transport_apply(0.0, f, F, PhasePoint<double>{0.0, vec({1, 0, 0}), vec({0, 0, 0})}),
                  Error);
}

TEST_CASE("weights are conserved along free characteristics") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10; ++k) {
    SpaceVec<double> x0 = random_vec(rng, 3, 3.0), v0 = random_vec(rng, 3, 2.0);
    Characteristic c = integrate_characteristic(1.0, FieldSampler{}, 0.0, x0, v0, 20.0);
    for (const auto& z : k1_weights(3)) {
      const double z0 = z(c.point(0), 1.0);
      CHECK(weight_drift(z, c) <= 1e-9 * (1.0 + std::abs(z0)));
    }
    Characteristic m = integrate_characteristic(0.0, FieldSampler{}, 0.0, x0, v0, -15.0);
    CHECK(weight_drift(WeightSpec::scalar_product(), m) <= 1e-9);
    CHECK(m.status == CharacteristicStatus::Completed);
  }
}

TEST_CASE("lifted boost maps v0 times an angular weight into the weight set") {
  PhaseFunction f = PhaseFunction::analytic([](const auto& p, double mass) {
    return WeightSpec::angular(1, 2, false)(p, mass);
  });
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    PhasePoint<double> p{0.7, random_vec(rng, 3, 2.0), random_vec(rng, 3, 2.0)};
    const double got = apply_vf(VectorFieldSpec::boost(1).lift(), f, p, 1.0);
    const double want = p.t * p.v[1] - p.x[1] * energy_of(p.v, 1.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("free characteristic is a straight line") {
  SpaceVec<double> x0 = vec({1, -2, 0.5, 3}), v0 = vec({0.3, 0.1, -0.7, 1.2});
  Characteristic c = integrate_characteristic(1.0, zero_field(4), 2.0, x0, v0, 30.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    SpaceVec<double> want = x0 + (c.s[k] - 2.0) / energy_of(v0, 1.0) * v0;
    CHECK((c.X[k] - want).norm() < 1e-9);
    CHECK((c.V[k] - v0).norm() == 0.0);
  }
  CHECK(c.s.back() == doctest::Approx(32.0));
}

TEST_CASE("massless backward characteristic stops when the velocity vanishes") {
  const double eta = 0.37, t0 = 5.0;
  FieldSampler F = constant_electric_field(vec({10.0, 0.0, 0.0}));
  Characteristic c = integrate_characteristic(0.0, F, t0, vec({0, 0, 0}), vec({eta, 0, 0}), -1.0);
  REQUIRE(c.status == CharacteristicStatus::VelocityVanished);
  CHECK(std::abs(c.vanish_time - (t0 - eta / 10.0)) < 1e-10);
  CHECK(c.V.back().norm() < 1e-9);
}

TEST_CASE("massive motion in a constant field matches the closed form") {
  const double cE = 0.8;
  SpaceVec<double> E = vec({cE, 0.0, 0.0}), x0 = vec({0.2, -0.1, 0.4}), v0 = vec({0.5, 1.0, -0.3});
  Characteristic c = integrate_characteristic(1.0, constant_electric_field(E), 1.0, x0, v0, 6.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double ds = c.s[k] - 1.0;
    // Oracle: V¹ is linear; transverse motion by quadrature of V/V⁰.
    CHECK(std::abs(c.V[k][0] - (v0[0] + cE * ds)) < 1e-9);
    SpaceVec<double> X = x0;
    for (int i = 0; i < 3; ++i) {
      auto rate = [&](double s) {
        SpaceVec<double> V = v0;
        V[0] += cE * s;
        return V[i] / energy_of(V, 1.0);
      };
      X[i] += quad::integrate(rate, 0.0, ds, 1e-14, 1e-13).value;
    }
    worst = std::max(worst, (c.X[k] - X).norm());
    SpaceVec<double> xc = x0, vc = v0;
    constant_field_map(1.0, E, ds, xc, vc);
    worst = std::max(worst, (c.X[k] - xc).norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("ensemble dump is one JSON record per trajectory") {
  std::vector<Characteristic> ens;
  ens.push_back(integrate_characteristic(1.0, FieldSampler{}, 0.0, vec({0, 0}), vec({1, 0}), 1.0));
  FieldSampler F = constant_electric_field(vec({10.0, 0.0}));
  ens.push_back(integrate_characteristic(0.0, F, 0.0, vec({0, 0}), vec({0.5, 0}), -1.0));
  std::ostringstream os;
  write_ensemble(os, ens);
  std::istringstream is(os.str());
  std::string line;
  int count = 0;
  while (std::getline(is, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j["id"] == count);
    CHECK(j["samples"][0].size() == 5);
    ++count;
  }
  CHECK(count == 2);
  CHECK(nlohmann::json::parse(os.str().substr(os.str().find('\n') + 1))["status"] == "velocity_vanished");
}

TEST_CASE("extra-decay identities") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const double mass = k % 2 ? 1.0 : 0.0;
    PhasePoint<double> p{std::abs(random_vec(rng, 1, 10.0)[0]), random_vec(rng, 4, 10.0),
                         random_vec(rng, 4, 5.0)};
    ExtraDecayCheck c = extradecay_identities(p, mass);
    CHECK(c.outgoing_residual <= 1e-10);
    CHECK(c.incoming_residual <= 1e-10);
    CHECK(c.angular_bound_ok);
    CHECK(c.mass_bound_ok);
  }
  // Radial massless momentum has no angular part.
  ExtraDecayCheck radial = extradecay_identities({1.0, vec({1, 1, 0, 0}), vec({2, 2, 0, 0})}, 0.0);
  CHECK(radial.vB_norm < 1e-15);
  CHECK(radial.sqrt_vL_vLbar < 1e-7);
  ExtraDecayCheck rest = extradecay_identities({1.0, vec({1, 0, 0, 0}), vec({0, 0, 0, 0})}, 1.0);
  CHECK(rest.vLbar == doctest::Approx(0.5));
  CHECK(rest.mass_bound == doctest::Approx(0.25));
  // Tangential massless momentum attains |v^B| = 2√(v^L v^Lbar).
  ExtraDecayCheck tang = extradecay_identities({1.0, vec({1, 0, 0, 0}), vec({0, 3, 0, 0})}, 0.0);
  CHECK(tang.vB_norm == doctest::Approx(2.0 * tang.sqrt_vL_vLbar));
  CHECK_THROWS_AS(extradecay_identities({1.0, vec({0, 0, 0, 0}), vec({0, 3, 0, 0})}, 0.0), Error);
}

TEST_CASE("good derivative identities hold on smooth functions") {
  PhaseFunction f = PhaseFunction::analytic([](const auto& p, double) {
    using std::cos;
    using std::exp;
    using std::sin;
    return sin(p.t + 0.3 * p.x[0]) * exp(-0.1 * p.x.squaredNorm()) * cos(p.v[1] - p.x[2] * p.v[0]);
  });
  std::mt19937_64 rng(17);
  for (int k = 0; k < 50; ++k) {
    PhasePoint<double> p{2.0 * (k % 5), random_vec(rng, 3, 3.0), random_vec(rng, 3, 2.0)};
    CHECK(good_derivative_residual(f, p, k % 2 ? 1.0 : 0.0) <= 1e-9);
  }
}

TEST_CASE("v-derivative bound ratios are finite on a free solution") {
  PhaseFunction f = free_gaussian(1.0, 1.0, 1.0);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    PhasePoint<double> p{1.0 + k, random_vec(rng, 3, 1.0 + k), random_vec(rng, 3, 1.0)};
    VDerivativeRatios r = vderivative_ratios(f, p, 1.0);
    CHECK(std::isfinite(r.outgoing));
    CHECK(std::isfinite(r.angular));
    CHECK(r.outgoing == r.incoming);
  }
}

TEST_CASE("velocity average of a Gaussian at t = 0") {
  const double sv = 0.8;
  PhaseFunction f = free_gaussian(1.0, sv, 1.0);
  quad::Result r = velocity_average(f, {0.0, SpaceVec<double>::Zero(4)}, 1.0, VelocityMoment{});
  CHECK(r.value == doctest::Approx(std::pow(2.0 * std::numbers::pi * sv * sv, 2.0)).epsilon(1e-8));
  CHECK(velocity_average(PhaseFunction::zero(), {1.0, SpaceVec<double>::Zero(4)}, 1.0, {}).value == 0.0);
}

TEST_CASE("pullback and direct velocity averages agree") {
  PhaseFunction f = free_gaussian(0.7, 0.6, 1.0);
  SpacetimePoint<double> p{2.5, vec({0.4, -0.3, 0.2})};
  VelocityQuadOptions pull, direct;
  pull.pullback_min_t = 2.0;
  direct.pullback_min_t = 1e300;
  VelocityMoment m;
  m.q = -1.0;
  m.beta = MultiIndex{{VectorFieldSpec::boost(1).lift()}};
  m.gamma = {WeightSpec::angular(0, 2)};
  // |z Ẑf| has kinks where z Ẑf changes sign, so convergence is only algebraic.
  pull.rel_tol = direct.rel_tol = 5e-3;
  pull.max_refinements = direct.max_refinements = 4;
  double a = velocity_average(f, p, 1.0, m, pull).value;
  double b = velocity_average(f, p, 1.0, m, direct).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-2));
  // Positive integrands converge spectrally on both routes.
  pull.rel_tol = direct.rel_tol = 1e-8;
  a = velocity_average(f, p, 1.0, VelocityMoment{}, pull).value;
  b = velocity_average(f, p, 1.0, VelocityMoment{}, direct).value;
  CHECK(a == doctest::Approx(b).epsilon(1e-7));
}

TEST_CASE("free decay bound for a compactly supported datum") {
  // ‖f₀‖_{L¹ₓL^∞_v}: the v-bump peaks at 1, so this is the x-integral of the bump.
  const double l1 =
      quad::sphere_area(4) *
      quad::integrate([](double r) { return bump(r * r) * r * r * r; }, 0.0, 1.0, 1e-14, 1e-12).value;
  PhaseFunction f = free_bump(1.0);
  VelocityQuadOptions opt;
  opt.rel_tol = 1e-6;
  std::vector<double> lt, lv;
  for (double t : {10.0, 20.0, 50.0, 100.0}) {
    const double avg = velocity_average(f, {t, SpaceVec<double>::Zero(4)}, 1.0, {}, opt).value;
    CHECK(avg > 0.0);
    CHECK(avg <= 8.0 * std::pow(t, -4.0) * l1);
    lt.push_back(std::log(t));
    lv.push_back(std::log(avg));
  }
  const double slope = (lv.back() - lv.front()) / (lt.back() - lt.front());
  CHECK(slope == doctest::Approx(-4.0).epsilon(0.01));
}

TEST_CASE("weight words count multisets") {
  CHECK(weight_words(k1_weights(4), 0).size() == 1);
  CHECK(weight_words(k1_weights(4), 1).size() == 16);
  CHECK(weight_words(k1_weights(4), 2).size() == 1 + 15 + 120);
}

TEST_CASE("kinetic energy of free transport") {
  KineticEnergyOptions opt;
  opt.dim = 2;
  opt.include_cone = false;
  opt.rule = PhaseRuleOptions{16, 12, 2, 14};
  PhaseFunction f = free_gaussian(0.5, 0.5, 1.0);
  CHECK(kinetic_energy(PhaseFunction::zero(), 1.0, 0, 0, false, 0.0, opt).total == 0.0);
  const double e0 = kinetic_energy(f, 0.0, 0, 0, false, 0.0, opt).total;
  // Exact L¹ mass of the Gaussian: (2π·0.25)² in (x, v) for n = 2.
  CHECK(e0 == doctest::Approx(std::pow(2.0 * std::numbers::pi * 0.25, 2.0)).epsilon(1e-6));
  for (double t : {1.0, 2.0}) {
    EnergyReport r = kinetic_energy(f, t, 0, 0, false, 0.0, opt);
    CHECK(r.total == doctest::Approx(e0).epsilon(1e-6));
  }
  // Weighted energies transported by the flow map stay constant.
  opt.flow = free_flow(1.0);
  opt.rule = PhaseRuleOptions{12, 10, 1, 12};
  opt.rel_tol = 5e-2;
  EnergyReport a = kinetic_energy(f, 0.0, 1, 1, false, 0.0, opt);
  EnergyReport b = kinetic_energy(f, 3.0, 1, 1, false, 0.0, opt);
  REQUIRE(a.entries.size() == b.entries.size());
  CHECK(a.entries.size() == 8 * 7);
  for (std::size_t e = 0; e < a.entries.size(); ++e)
    CHECK(b.entries[e].value == doctest::Approx(a.entries[e].value).epsilon(1e-9));
}

TEST_CASE("slice and cone budget with a source") {
  // g is not transported; H = T_1(g) is its source.
  const double mass = 1.0;
  PhaseFunction g = PhaseFunction::analytic(
      [](const auto& p, double) {
        using T = std::remove_cvref_t<decltype(p.t)>;
        using std::exp;
        using std::sin;
        SpaceVec<T> y = p.x - 0.3 * p.t * p.v;
        return T((1.2 + sin(p.t)) * exp(-2.0 * y.squaredNorm() - 2.0 * p.v.squaredNorm()));
      },
      SupportHint{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  0.5, 0.5});
  KineticEnergyOptions opt;
  opt.dim = 2;
  opt.mass = mass;
  opt.rule = PhaseRuleOptions{14, 10, 2, 12};
  opt.u_spacing = 0.25;
  opt.cone_radial = 8;
  opt.cone_sphere_order = 8;
  opt.velocity = VelocityQuadOptions{10, 1, 8, 0, 1e-6, 1e-14, false, 1e300, 0.0};
  const double T = 1.5;
  EnergyReport at0 = kinetic_energy(g, 0.0, 0, 0, false, 0.0, opt);
  EnergyReport atT = kinetic_energy(g, T, 0, 0, false, 0.0, opt);
  const double slice0 = at0.entries[0].value;
  const double sliceT = atT.entries[0].value, coneT = atT.entries[1].value;
  CHECK(coneT > 0.0);
  // Oracle for ∫₀ᵀ∫∫|H|/v⁰: Gauss–Legendre in s on direct phase rules.
  quad::Rule1D gl = quad::gauss_legendre(8, 0.0, T);
  double source = 0.0;
  for (std::size_t k = 0; k < gl.size(); ++k) {
    PhaseRule r = phase_rule(2, gl.x[k], envelope_radius(0.5) + gl.x[k], envelope_radius(0.5),
                             PhaseRuleOptions{14, 10, 2, 12});
    double s = 0.0;
    for (std::size_t a = 0; a < r.nodes.size(); ++a)
      s += r.weights[a] * std::abs(transport_apply(mass, g, FieldSampler{}, r.nodes[a])) /
           energy_of(r.nodes[a].v, mass);
    source += gl.w[k] * s;
  }
  CHECK(sliceT + std::sqrt(2.0) * coneT <= 2.0 * slice0 + 2.0 * source);
}
