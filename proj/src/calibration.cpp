#include <algorithm>
#include <ostream>

#include "vmlab/emfield.hpp"
#include "vmlab/estimators.hpp"

namespace vmlab {

std::vector<SpacetimePoint<double>> transport_points(int n) {
  std::vector<SpacetimePoint<double>> pts;
  int k = 0;
  for (double t : {0.0, 5.0, 20.0}) {
    for (double r : {0.0, 0.5 * t, t, t + 2.0}) {
      SpaceVec<double> x = SpaceVec<double>::Zero(n);
      x[k++ % n] = r;
      pts.push_back({t, x});
    }
  }
  return pts;
}

std::vector<double> theorem5_times() { return {2.0, 5.0, 10.0, 20.0, 40.0}; }

std::vector<SpacetimePoint<double>> field_decay_points(int n, const std::vector<double>& times) {
  const SpaceVec<double> dir = SpaceVec<double>::LinSpaced(n, 1.0, 0.3).normalized();
  std::vector<SpacetimePoint<double>> pts;
  for (double t : times)
    for (double f : {0.0, 0.25, 0.5, 0.9, 1.0, 1.1, 1.5})
      pts.push_back({t, (t > 0.0 ? f * t : f) * dir});
  return pts;
}

FieldDecaySetup field_decay_setup(int n) {
  FieldDecaySetup s{hertz_field(n), 0.0};
  EnergyOptions eo;
  eo.radius = 30.0;
  eo.radial_panels = 30;
  eo.sphere_order = 6;
  eo.tol = 1e-4;
  s.energy = maxwell_energy(s.field, 0.0, EnergyVariant::E, 0, eo).total;
  return s;
}

namespace {

void record(Calibration& cal, const std::string& name, const std::vector<InequalityReport>& reports,
            std::ostream* log) {
  // Components that vanish identically would otherwise freeze rounding noise.
  const double c = std::max(calibrated_constant(reports), 1e-10);
  cal.constants[name] = c;
  if (log) *log << name << ": " << reports.size() << " ratios, C = " << c << '\n';
}

}  // namespace

Calibration calibrate(const CalibrationPlan& plan, std::ostream* log) {
  Calibration cal;
  if (plan.integral) {
    for (const auto& tr : integral_triples()) {
      std::vector<InequalityReport> reps;
      for (double t : integral_calibration_times()) reps.push_back(integral_estimate_check(tr.a, tr.b, tr.m, t));
      record(cal, integral_check_name(tr.a, tr.b, tr.m), reps, log);
    }
  }
  const auto corpus = calibration_corpus(plan.n);
  if (plan.transport) {
    std::vector<InequalityReport> reps;
    for (const auto& c : corpus) {
      auto r = ks_transport_check(c.f0, 1.0, transport_points(plan.n));
      reps.insert(reps.end(), r.begin(), r.end());
    }
    record(cal, "ks_transport", reps, log);
  }
  if (plan.theorem5) {
    std::vector<InequalityReport> reps;
    const auto pts = partition_points(plan.n, theorem5_times());
    for (const auto& c : corpus) {
      auto r = theorem5_check(c.f0, std::nullopt, pts);
      if (log) *log << "  theorem5 " << c.name << ": max ratio " << calibrated_constant(r) / 1.2 << '\n';
      reps.insert(reps.end(), r.begin(), r.end());
    }
    record(cal, "theorem5", reps, log);
  }
  if (plan.field) {
    const FieldDecaySetup s = field_decay_setup(plan.field_n);
    const auto reps = field_pointwise_decay_check(
        s.field, s.energy, field_decay_points(plan.field_n, {0.0, 2.0, 10.0, 20.0, 40.0, 160.0}));
    std::map<std::string, std::vector<InequalityReport>> by_check;
    for (const auto& r : reps) by_check[r.check].push_back(r);
    for (const auto& [name, group] : by_check) record(cal, name, group, log);
  }
  return cal;
}

}  // namespace vmlab
