#pragma once
// Named end-to-end runs shared by the command-line driver and the acceptance suite.
// Every run returns its reports with thresholds already applied.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vmlab/counterexample.hpp"
#include "vmlab/estimators.hpp"
#include "vmlab/simharness.hpp"

namespace vmlab {

/// Named tolerances with their defaults; `set` rejects unknown names with ConfigError.
class Tolerances {
 public:
  Tolerances();
  double get(const std::string& name) const;
  void set(const std::string& name, double value);
  /// Parses NAME=VALUE.
  void set_from_string(const std::string& assignment);
  const std::map<std::string, double>& all() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

struct ScenarioResult {
  std::string name;
  std::vector<InequalityReport> reports;
  /// Summary numbers for the report page, in insertion order.
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;

  bool pass() const;
  std::size_t failures() const;
  double metric(const std::string& key) const;
  void add_metric(const std::string& key, double value) { metrics.emplace_back(key, value); }
  /// Adds a report with lhs/rhs and the verdict lhs/rhs ≤ threshold.
  InequalityReport& add(const std::string& check, double lhs, double rhs, double threshold,
                        std::vector<std::pair<std::string, double>> params = {});
  void append(const std::vector<InequalityReport>& more);
};

/// One NDJSON line per report.
void write_reports(std::ostream& out, const ScenarioResult& r);
/// Human-readable page: verdict counts, metrics, notes and failing reports.
void write_summary(std::ostream& out, const std::vector<ScenarioResult>& results);

/// Seeded smooth phase-space functions (Gaussian envelopes with trigonometric modulation).
std::vector<PhaseFunction> smooth_test_functions(int n, int count, std::uint64_t seed);

struct CommutationOptions {
  int n = 4;
  int functions = 20;
  int points = 50;
  std::uint64_t seed = 1;
};
/// [T_m, Ẑ] = 0 on the lifted fields for m ∈ {0, 1} and [T_0, S] = T_0, one report per
/// (mass, field) with the worst residual relative to max(1, |T Ẑh|, |Ẑ Th|).
ScenarioResult commutation_suite(const CommutationOptions& opt, const Tolerances& tol);

struct WeightDriftOptions {
  int n = 4;
  int characteristics = 100;
  double t_end = 50.0;
  std::uint64_t seed = 2;
};
/// Drift of the k₁ weights (m = 1) and k₀ weights (m = 0) along free characteristics.
ScenarioResult weight_conservation(const WeightDriftOptions& opt, const Tolerances& tol);

/// Reconstruction, norm and stress contractions of the null decomposition on random 2-forms.
ScenarioResult null_decomposition_suite(int count, std::uint64_t seed, const Tolerances& tol);

/// check-identities: commutation, closure, weights, null decomposition and pointwise identities.
ScenarioResult identity_suite(const Tolerances& tol, std::uint64_t seed, bool quick = false);

struct FreeDecayOptions {
  int n = 4;
  double t_min = 10.0;
  double t_max = 100.0;
  int samples = 12;
};
/// Free transport of a compactly supported bump: fitted slope of log ∫f dv at x = 0 and
/// the explicit bound with R = 1.
ScenarioResult free_decay_scenario(const FreeDecayOptions& opt, const Tolerances& tol);

struct Theorem5Options {
  int n = 4;
  /// Corpus entries by name; empty means all.
  std::vector<std::string> data;
  /// Constant electric field magnitude along x₁; 0 means no field.
  double field = 0.0;
  std::vector<double> times = theorem5_times();
};
ScenarioResult theorem5_scenario(const Theorem5Options& opt, const Calibration& cal, const Tolerances& tol);

struct FieldDecayOptions {
  int n = 5;
  std::vector<double> times = {0.0, 2.0, 10.0, 20.0, 40.0, 160.0};
};
ScenarioResult field_decay_scenario(const FieldDecayOptions& opt, const Calibration& cal, const Tolerances& tol);

/// dA = F₀ and the Lorenz condition at t = 0 on three manufactured potentials in n = 3.
ScenarioResult potential_scenario(int points, const Tolerances& tol);

struct CounterexampleOptions {
  int n = 4;
  int count = 20;
  double eta_min = 1e-3;
  double eta_max = 1e-1;
};
struct CounterexampleRun {
  ScenarioResult result;
  std::vector<VanishingSample> curve;
};
/// Vanishing times over the η sweep, the derivative bracket, and the E¹ ≡ 10 control.
CounterexampleRun counterexample_scenario(const CounterexampleOptions& opt, const Tolerances& tol);

/// 200-tuple sweep of the r-integral estimate against the frozen constants.
ScenarioResult integral_scenario(const Calibration& cal);

/// Vacuum plane wave energy over `steps` Yee steps and a sourced run's current budget.
ScenarioResult maxwell_balance_scenario(int points, int steps, const Tolerances& tol);

struct SimulationRun {
  ScenarioResult result;
  RunRecord record;
};
/// Coupled run with Gauss residual, energy budget and (for uniform cold data) the ODE oracle.
SimulationRun simulate_scenario(const ScenarioConfig& cfg, const Tolerances& tol);
/// Two-species uniform plasma oscillation used by the acceptance substitute.
ScenarioConfig plasma_oscillation_config();

}  // namespace vmlab
