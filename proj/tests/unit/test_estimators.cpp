#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include <json.hpp>

#include "vmlab/emfield.hpp"
#include "vmlab/estimators.hpp"

using namespace vmlab;

namespace {

const Calibration& frozen() {
  static const Calibration cal = Calibration::load(std::string(VMLAB_DATA_DIR) + "/calibration.tsv");
  return cal;
}

PhaseFunction gaussian(double sx, double sv) {
  return PhaseFunction::analytic(
      [sx, sv](const auto& p, double) {
        using T = std::remove_cvref_t<decltype(p.t)>;
        using std::exp;
        return T(exp(-0.5 * p.x.squaredNorm() / (sx * sx) - 0.5 * p.v.squaredNorm() / (sv * sv)));
      },
      SupportHint{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), sv, sx});
}

template <class T>
T bump(const T& r2) {
  using std::exp;
  if (ad::value(r2) >= 1.0) return T(0.0);
  return exp(1.0 - 1.0 / (1.0 - r2));
}

}  // namespace

TEST_CASE("integral estimate anchors and hypotheses") {
  CHECK(integral_lhs(2.0, 2.0, 1, 0.0) == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-10));
  CHECK(integral_lhs(0.0, 2.0, 1, 0.0) == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-10));
  // t = 3, a = 0, b = 2, m = 1: ∫ dr / (1 + (r − 3)²) = π/2 + arctan 3.
  CHECK(integral_lhs(0.0, 2.0, 1, 3.0) == doctest::Approx(std::numbers::pi / 2.0 + std::atan(3.0)).epsilon(1e-10));
  auto code_of = [](auto&& call) {
    try {
      call();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of([] { integral_lhs(2.0, 1.0, 1, 1.0); }) == ErrorCode::HypothesisViolated);
  CHECK(code_of([] { integral_lhs(1.0, 1.5, 3, 1.0); }) == ErrorCode::HypothesisViolated);
  CHECK(code_of([] { integral_lhs(2.0, 2.0, 0, 1.0); }) == ErrorCode::HypothesisViolated);
}

TEST_CASE("integral estimate sweep stays under the frozen constants") {
  int tuples = 0, failures = 0;
  for (const auto& tr : integral_triples()) {
    const double limit = frozen().threshold(integral_check_name(tr.a, tr.b, tr.m));
    REQUIRE(std::isfinite(limit));
    for (double t : integral_sweep_times()) {
      auto r = integral_estimate_check(tr.a, tr.b, tr.m, t, limit);
      ++tuples;
      if (!r.verdict) {
        ++failures;
        MESSAGE(to_ndjson(r));
      }
    }
  }
  CHECK(tuples == 200);
  CHECK(failures == 0);
}

TEST_CASE("decay fit of an exact power law") {
  std::vector<std::pair<double, double>> s;
  for (double t : log_spaced(1.0, 1000.0, 15)) s.emplace_back(t, 3.0 * std::pow(t, -2.5));
  DecayFit fit = fit_decay(s, 10.0, 100.0);
  CHECK(fit.samples.size() == 15);
  CHECK(fit.slope == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.slope_stderr <= 1e-10);
  CHECK(fit.ci_low <= fit.slope);
  CHECK(fit.ci_high >= fit.slope);
  CHECK(student_t975(1) == doctest::Approx(12.706).epsilon(1e-4));
  CHECK(student_t975(10000) == doctest::Approx(1.96).epsilon(1e-3));
}

TEST_CASE("square-root Gronwall bound") {
  auto one = [](double) { return 1.0; };
  CHECK(gronwall_sqrt_bound(1.0, one, 2.0) == doctest::Approx(9.0).epsilon(1e-12));
  auto lin = [](double s) { return s; };
  CHECK(gronwall_sqrt_bound(0.0, lin, 3.0) == doctest::Approx(std::pow(4.5, 2)).epsilon(1e-12));
  // The bound is attained by f = C + 2∫g√f.
  auto g = [](double s) { return std::exp(-s) * (1.0 + std::sin(3.0 * s)); };
  const double C = 0.7, T = 2.5;
  auto f = [&](double t) { return gronwall_sqrt_bound(C, g, t); };
  const double rhs = C + 2.0 * quad::integrate([&](double s) { return g(s) * std::sqrt(f(s)); }, 0.0, T, 1e-13, 1e-11).value;
  CHECK(f(T) == doctest::Approx(rhs).epsilon(1e-9));
  CHECK_THROWS_AS(gronwall_sqrt_bound(-1.0, one, 1.0), Error);
}

TEST_CASE("reports serialize and calibration files round-trip") {
  InequalityReport r;
  r.check = "demo";
  r.params = {{"t", 2.0}};
  r.lhs = 3.0;
  r.rhs = 4.0;
  r.finish(std::numeric_limits<double>::infinity());
  auto j = nlohmann::json::parse(to_ndjson(r));
  CHECK(j["ratio"].get<double>() == 0.75);
  CHECK(j["threshold"].is_null());
  CHECK(j["verdict"] == "pass");
  CHECK(j["params"]["t"].get<double>() == 2.0);
  r.finish(0.5);
  CHECK_FALSE(r.verdict);
  InequalityReport zero;
  zero.finish(1.0);
  CHECK(zero.ratio == 0.0);
  CHECK(zero.verdict);

  Calibration c;
  c.constants = {{"a", 1.25}, {"intesti[a=2,b=2,m=1]", 0.1234567891}};
  const auto path = std::filesystem::temp_directory_path() / "vmlab_cal_roundtrip.tsv";
  c.save(path.string());
  Calibration back = Calibration::load(path.string());
  std::filesystem::remove(path);
  CHECK(back.constants == c.constants);
  CHECK(back.threshold("a") == doctest::Approx(1.875));
  CHECK(std::isinf(back.threshold("missing")));
  CHECK_THROWS_AS(Calibration::load("/nonexistent/cal.tsv"), Error);
}

TEST_CASE("phase-space L1 norm of a Gaussian") {
  const double sx = 0.8, sv = 0.5;
  PhaseFunction f = evolve_free(gaussian(sx, sv), 1.0);
  auto table = phase_norms(f, 4, 1.0, {WeightSpec::v_ratio(0)}, 0);
  const double exact = std::pow(2.0 * std::numbers::pi, 4) * std::pow(sx * sv, 4);
  CHECK(table.values.rows() == 1);
  CHECK(table.values.cols() == 1);
  CHECK(table.total() == doctest::Approx(exact).epsilon(5e-3));
  // Order one adds the seventeen first-order words.
  auto first = phase_norms(f, 4, 1.0, {WeightSpec::v_ratio(0)}, 1);
  CHECK(first.words.size() == 17);
  CHECK(first.values(0, 0) == doctest::Approx(table.total()).epsilon(1e-12));
}

TEST_CASE("free velocity averages decay at the transport rate") {
  PhaseFunction f0 = PhaseFunction::analytic(
      [](const auto& p, double) { return bump(p.x.squaredNorm()) * bump(p.v.squaredNorm()); },
      SupportHint{1.0, 1.0, 1.0, 1.0});
  DecayFit fit = free_decay_curve(f0, 1.0, SpaceVec<double>::Zero(4), log_spaced(10.0, 100.0, 12));
  CHECK(fit.samples.size() == 12);
  CHECK(fit.slope == doctest::Approx(-4.0).epsilon(0.05));

  // ‖f0‖_{L¹L^∞} = |S³| ∫ bump(r²) r³ dr, and the explicit bound with R = 1 carries the factor 8.
  const double l1 = quad::sphere_area(4) *
                    quad::integrate([](double r) { return bump(r * r) * r * r * r; }, 0.0, 1.0, 1e-14, 1e-12).value;
  CHECK(compact_velocity_bound(4, 1.0, 1.0, 1.0) == doctest::Approx(8.0));
  for (const auto& [t, value] : fit.samples) CHECK(value <= compact_velocity_bound(4, 1.0, t, l1));

  auto reps = ks_transport_check(f0, 1.0, transport_points(4), {}, frozen().threshold("ks_transport"));
  for (const auto& r : reps) CHECK_MESSAGE(r.verdict, to_ndjson(r));
  CHECK(ks_transport_check(PhaseFunction::zero(), 1.0, transport_points(4)).front().ratio == 0.0);
}

TEST_CASE("phase-space decay check without field") {
  const double limit = frozen().threshold("theorem5");
  auto corpus = calibration_corpus(4);
  auto pts = partition_points(4, {10.0});
  CHECK(pts.size() == 12);
  int regions[3] = {0, 0, 0};
  for (const auto& p : pts) ++regions[static_cast<int>(cone_region(p))];
  CHECK(regions[0] == 4);
  CHECK(regions[1] == 4);
  CHECK(regions[2] == 4);
  auto reps = theorem5_check(corpus.front().f0, std::nullopt, pts, {}, limit);
  for (const auto& r : reps) {
    CHECK_MESSAGE(r.verdict, to_ndjson(r));
    CHECK(r.lhs > 0.0);
  }
  auto zero = theorem5_check(PhaseFunction::zero(), std::nullopt, pts);
  for (const auto& r : zero) {
    CHECK(r.lhs == 0.0);
    CHECK(r.ratio == 0.0);
  }
}

TEST_CASE("weak constant field stays close to the free ratio") {
  auto corpus = calibration_corpus(4);
  auto pts = partition_points(4, {5.0, 20.0});
  SpaceVec<double> E = SpaceVec<double>::Zero(4);
  E[0] = 1e-3;
  auto free = theorem5_check(corpus.front().f0, std::nullopt, pts);
  auto field = theorem5_check(corpus.front().f0, E, pts);
  REQUIRE(free.size() == field.size());
  for (std::size_t i = 0; i < free.size(); ++i) {
    CHECK(field[i].check == "theorem5_field");
    CHECK(field[i].ratio <= 2.0 * free[i].ratio);
    CHECK(field[i].ratio >= 0.5 * free[i].ratio);
    CHECK(field[i].rhs > free[i].rhs);
  }
}

TEST_CASE("null components of a vacuum field against their envelopes") {
  FieldDecaySetup s = field_decay_setup(5);
  CHECK(s.energy > 0.0);
  auto limit = [](const std::string& name) { return frozen().threshold(name); };
  auto reps = field_pointwise_decay_check(s.field, s.energy, field_decay_points(5, {20.0, 80.0}), std::nullopt, limit);
  CHECK(reps.size() == 2 * 7 * 4);
  double cone20 = 0.0, cone80 = 0.0;
  for (const auto& r : reps) {
    CHECK_MESSAGE(r.verdict, to_ndjson(r));
    if (r.check == "field_decay:alphabar" && r.param("r") == r.param("t"))
      (r.param("t") == 20.0 ? cone20 : cone80) = r.ratio;
  }
  // Along the cone the weighted transversal component neither grows nor decays.
  CHECK(cone20 > 0.0);
  CHECK(cone80 == doctest::Approx(cone20).epsilon(0.05));

  // Compactly supported static data at t = 0: all weights are one.
  auto stat = FieldSampler::analytic(5, [](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    STMat<T> F = STMat<T>::Zero(6, 6);
    T b = bump(x.squaredNorm());
    F(1, 2) = b;
    F(2, 1) = -b;
    return F;
  });
  SpaceVec<double> x = SpaceVec<double>::Zero(5);
  auto at0 = field_pointwise_decay_check(stat, 1.0, {{0.0, x}}, 1.0);
  CHECK(at0.size() == 5);
  for (const auto& r : at0) CHECK(r.lhs <= 1.0);
  CHECK(field_interior({10.0, SpaceVec<double>::Constant(5, 1.0)}));
  CHECK_FALSE(field_interior({10.0, SpaceVec<double>::Constant(5, 3.0)}));
}
