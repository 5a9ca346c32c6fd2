#pragma once
// Numerical checks of decay inequalities: each check reports both sides and
// their ratio, and constants are calibrated once and then frozen.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vmlab/kinetic.hpp"

namespace vmlab {

struct InequalityReport {
  std::string check;
  std::vector<std::pair<std::string, double>> params;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double threshold = std::numeric_limits<double>::infinity();
  bool verdict = true;

  /// Sets ratio = lhs/rhs (0 when both vanish) and the verdict against threshold.
  void finish(double threshold_value);
  double param(const std::string& key) const;
};

/// {check, params, lhs, rhs, ratio, threshold, verdict} as one line of JSON.
std::string to_ndjson(const InequalityReport& r);

/// Ordinary least squares of log value against log t inside [t_min, t_max].
struct DecayFit {
  std::vector<std::pair<double, double>> samples;
  double t_min = 10.0;
  double t_max = 100.0;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  /// 95% confidence interval for the slope (Student t).
  double ci_low = 0.0;
  double ci_high = 0.0;
};
DecayFit fit_decay(const std::vector<std::pair<double, double>>& samples, double t_min = 10.0,
                   double t_max = 100.0);
/// Two-sided 95% Student-t quantile.
double student_t975(int dof);
/// `count` log-spaced values on [a, b].
std::vector<double> log_spaced(double a, double b, int count);

/// Frozen constants keyed by check name (TSV: name TAB value).
struct Calibration {
  std::map<std::string, double> constants;
  /// Regressions fail above factor · C_emp.
  double factor = 1.5;

  static Calibration load(const std::string& path);
  void save(const std::string& path) const;
  std::optional<double> get(const std::string& name) const;
  /// factor · C_emp, or +infinity when the name is not calibrated.
  double threshold(const std::string& name) const;
};
/// 1.2 times the largest ratio.
double calibrated_constant(const std::vector<InequalityReport>& reports);

// ∫₀^∞ r^{m−1} τ₊^{−a} τ₋^{−b} dr against (1 + t^{b−1})/(1 + t^{a+b−m}).

/// Throws HypothesisViolated unless a + b > m, b ≠ 1 and m ≥ 1.
double integral_lhs(double a, double b, int m, double t);
double integral_shape(double a, double b, int m, double t);
InequalityReport integral_estimate_check(double a, double b, int m, double t,
                                         double threshold = std::numeric_limits<double>::infinity());
std::string integral_check_name(double a, double b, int m);

struct IntegralTriple {
  double a;
  double b;
  int m;
};
/// Exponent triples of the sweep; the first two are the closed-form anchors.
std::vector<IntegralTriple> integral_triples();
/// Times used for calibration and for the sweep (disjoint apart from t = 0).
std::vector<double> integral_calibration_times();
std::vector<double> integral_sweep_times();

// Phase-space L¹ norms by quasi-Monte Carlo with a Gaussian or ball proposal.

struct PhaseNormOptions {
  int samples = 1 << 14;
  std::uint64_t seed = 7;
  /// Proposal width relative to the support scale of the datum.
  double widen = 1.3;
};

/// ∫∫|z Ẑ^β f| dx dv at t = 0 for a solution f: rows are the weights, columns
/// the words of order ≤ order over ℙ̂₀.
struct PhaseNormTable {
  std::vector<WeightSpec> weights;
  std::vector<MultiIndex> words;
  Eigen::MatrixXd values;
  double total() const { return values.sum(); }
};
PhaseNormTable phase_norms(const PhaseFunction& f, int n, double mass,
                           const std::vector<WeightSpec>& weights, int order,
                           const PhaseNormOptions& opt = {});

/// ∫₀ᵗ∫∫ |T_F(z Ẑ^β f)| dv/v⁰ dx ds summed over z and |β| ≤ order, for f evolved
/// by `flow` (measure preserving) under F. Gauss–Legendre in s.
double source_integral(const PhaseFunction& f, const PhaseFlow& flow, const FieldSampler& F, int n,
                       double mass, double t, const std::vector<WeightSpec>& weights, int order,
                       int time_nodes,
                       const PhaseNormOptions& opt = {});

struct DecayCheckOptions {
  /// Vector-field order kept in the right-hand norms.
  int order = 1;
  PhaseNormOptions norms;
  VelocityQuadOptions velocity{8, 2, 6, 6, 5e-3, 1e-14, true, 2.0, 0.0};
  /// Absolute accuracy demanded of each ratio; sets the velocity abs_tol per point.
  double ratio_abs_tol = 1e-6;
  int time_nodes = 4;
};

/// ∫|f|dv·τ₊^{n−1}τ₋ against ‖f₀‖ over ℙ̂₀-words (conserved by free transport).
std::vector<InequalityReport> ks_transport_check(const PhaseFunction& f0, double mass,
                                                 const std::vector<SpacetimePoint<double>>& points,
                                                 const DecayCheckOptions& opt = {},
                                                 double threshold = std::numeric_limits<double>::infinity());

/// Velocity averages of the free evolution at x along a time grid, with the fit.
DecayFit free_decay_curve(const PhaseFunction& f0, double mass, const SpaceVec<double>& x,
                          const std::vector<double>& times, const VelocityQuadOptions& opt = {},
                          double t_min = 10.0, double t_max = 100.0);

/// (1+R²)^{(n+2)/2} t^{−n} · ‖f₀‖_{L¹_x L^∞_v} for free massive transport of data with |v| < R.
double compact_velocity_bound(int n, double R, double t, double l1_linf);

enum class ConeRegion { Interior, NearCone, Exterior };
const char* to_string(ConeRegion r);
ConeRegion cone_region(const SpacetimePoint<double>& p);
/// 4·|times|·3 points: four radii per region and time, directions cycling over the axes.
std::vector<SpacetimePoint<double>> partition_points(int n, const std::vector<double>& times);

/// τ₊ⁿ∫|f|dv/(v⁰)² against Σ_z Σ_β (‖zẐ^βf₀‖ + source integral), m = 1.
/// Without a field, f is the free evolution; with a constant electric field E,
/// f is transported exactly by the Lorentz force.
std::vector<InequalityReport> theorem5_check(const PhaseFunction& f0,
                                             const std::optional<SpaceVec<double>>& E,
                                             const std::vector<SpacetimePoint<double>>& points,
                                             const DecayCheckOptions& opt = {},
                                             double threshold = std::numeric_limits<double>::infinity());

/// Null components against their envelopes, with energy √ℰ supplied by the caller.
/// Components: alpha, rho, sigma (τ₊^{(n+1)/2}τ₋^{1/2}), alphabar (τ₊^{(n−1)/2}τ₋^{3/2}),
/// and alpha_potential (τ₊^{(n+2)/2}) when a potential energy is given.
std::vector<InequalityReport> field_pointwise_decay_check(
    const FieldSampler& G, double energy, const std::vector<SpacetimePoint<double>>& points,
    std::optional<double> potential_energy = std::nullopt,
    const std::function<double(const std::string&)>& threshold = {});
/// Spatial region used in the field proof: |x| ≤ 1 + t/2 or outside.
bool field_interior(const SpacetimePoint<double>& p);

/// (√C + ∫₀ᵗ g)².
double gronwall_sqrt_bound(double C, const std::function<double(double)>& g, double t);

/// Eight smooth data in n dimensions used to calibrate the phase-space checks.
struct CorpusEntry {
  std::string name;
  PhaseFunction f0;
};
std::vector<CorpusEntry> calibration_corpus(int n);

// Reference runs whose largest ratios become the frozen constants.

/// Transport check points: t ∈ {0, 5, 20}, |x| ∈ {0, t/2, t, t + 2}.
std::vector<SpacetimePoint<double>> transport_points(int n);
/// Times of the phase-space decay runs.
std::vector<double> theorem5_times();
/// Points at fractions {0, 1/4, 1/2, 9/10, 1, 11/10, 3/2} of t along a generic direction.
std::vector<SpacetimePoint<double>> field_decay_points(int n, const std::vector<double>& times);

/// Vacuum field of the field-decay runs with its energy at t = 0 (no Lie derivatives).
struct FieldDecaySetup {
  FieldSampler field;
  double energy = 0.0;
};
FieldDecaySetup field_decay_setup(int n);

struct CalibrationPlan {
  int n = 4;
  int field_n = 5;
  bool integral = true;
  bool transport = true;
  bool theorem5 = true;
  bool field = true;
};
/// Runs every enabled check on its reference inputs; progress lines go to `log`.
Calibration calibrate(const CalibrationPlan& plan = {}, std::ostream* log = nullptr);

}  // namespace vmlab
