#pragma once
// Massless data whose diagonal characteristic loses its velocity in finite time.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vmlab/dual.hpp"
#include "vmlab/estimators.hpp"
#include "vmlab/kinetic.hpp"

namespace vmlab {

namespace cutoff_detail {
template <class T>
T mollifier(const T& w) {
  using std::exp;
  if (ad::value(w) <= 0.0) return T(0.0);
  return exp(-1.0 / w);
}
}  // namespace cutoff_detail

/// Smooth step: 1 on (−∞, 1], 0 on [3, ∞), strictly decreasing in between.
template <class T>
T cutoff(const T& s) {
  const T a = cutoff_detail::mollifier(T(3.0 - s));
  const T b = cutoff_detail::mollifier(T(s - 1.0));
  return a / (a + b);
}
double cutoff_derivative(double s);

struct CounterexampleData {
  int n = 0;
  /// Static electric field E^i = 20 χ(2r²/n) for every i, no magnetic part.
  FieldSampler E0;
  PhaseFunction f01;  // charge +1, massless
  PhaseFunction f02;  // charge −1
  /// 1/∫χ(|v|²)dv.
  double M = 0.0;
  /// Upper bound on the diagonal field component.
  double M0 = 0.0;
  /// sup |div E0|.
  double div_sup = 0.0;
};
CounterexampleData build_counterexample(int n);

/// max over random points of |∫(f01 − f02)dv − div(E0)χ(2r²/(3n))|, by n-dimensional
/// velocity quadrature.
double constraint_residual(const CounterexampleData& d, int points = 20, std::uint64_t seed = 3);

/// Residuals of the coordinate-transposition symmetries of the data.
std::map<std::string, double> symmetry_check(const FieldSampler& F0, const std::vector<PhaseFunction>& f = {},
                                             int points = 50, std::uint64_t seed = 11);

/// Field component E¹(s, y·(1, …, 1)) on the diagonal.
using DiagonalProfile = std::function<double(double s, double y)>;
DiagonalProfile static_profile(const CounterexampleData& d);
DiagonalProfile constant_profile(double value);

struct DiagonalState {
  /// Common component of V.
  double velocity = 0.0;
  /// Common component of X.
  double position = 0.0;
};
/// Characteristic through (t, (1, …, 1), η(1, …, 1)) read at time s ≤ t, while the velocity stays positive.
DiagonalState diagonal_velocity(double eta, double s, double t, int n, const DiagonalProfile& E1);

struct RootOptions {
  double tol = 1e-12;
  int max_iter = 200;
};

/// Root of t ↦ g_η(0, t) inside [η/M0, η/5]. Throws NoRootInBracket.
double vanishing_time(double eta, int n, const DiagonalProfile& E1, double M0, const RootOptions& opt = {});
/// Time s* = t − τ_η(t) at which the velocity vanishes, for t ≥ T_η.
double vanishing_instant(double eta, double t, int n, const DiagonalProfile& E1, const RootOptions& opt = {});
/// Central difference of t ↦ t − τ_η(t).
double vanishing_instant_slope(double eta, double t, int n, const DiagonalProfile& E1, double h = 1e-5);
/// Position on the extended characteristic for s ≤ t − τ_η(t).
double extended_position(double eta, double s, double t, int n, const DiagonalProfile& E1);

struct VanishingSample {
  double eta;
  double T;
  double bracket_low;
  double bracket_high;
};
std::vector<VanishingSample> vanishing_curve(const std::vector<double>& etas, int n, const DiagonalProfile& E1,
                                             double M0);
void write_vanishing_csv(std::ostream& out, const std::vector<VanishingSample>& curve);

/// Default upper end of the η range for a field valid up to `field_time`.
double default_eta_max(double field_time);

/// Along the characteristic from (t0, x, v): max_s | |V|² − |v|² − 2∫⟨E, V⟩ | as `energy_identity`,
/// max_s |V(s)|/(|v| + ∫|E|) as the report, and min_s (|V(s)| − max(0, |v| − ∫|E|))
/// as the lower-bound margin.
struct VelocityBound {
  InequalityReport report;
  double energy_identity = 0.0;
  double min_speed = 0.0;
  double lower_margin = 0.0;
};
VelocityBound velocity_bound_check(double mass, const FieldSampler& F, double t0, const SpaceVec<double>& x,
                                   const SpaceVec<double>& v, double span);

}  // namespace vmlab
