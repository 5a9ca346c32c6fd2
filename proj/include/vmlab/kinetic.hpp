#pragma once
// Relativistic transport: the operator T_F, conserved weights, characteristics,
// velocity averages and the kinetic energy norms.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vmlab/emfield.hpp"
#include "vmlab/ode.hpp"
#include "vmlab/quadrature.hpp"

namespace vmlab {

/// v^μ∂_μ f + e F(v, ∇_v f) at p. A default or zero sampler means free transport.
double transport_apply(double mass, const PhaseFunction& f, const FieldSampler& F,
                       const PhasePoint<double>& p, double charge = 1.0);

double weight_eval(const WeightSpec& z, const PhasePoint<double>& p, double mass);

enum class CharacteristicStatus { Completed, VelocityVanished };

struct Characteristic {
  double mass = 1.0;
  std::vector<double> s;
  std::vector<SpaceVec<double>> X;
  std::vector<SpaceVec<double>> V;
  long steps = 0;
  double max_local_error = 0.0;
  CharacteristicStatus status = CharacteristicStatus::Completed;
  /// Time at which |V| reached the floor, when status is VelocityVanished.
  double vanish_time = 0.0;

  PhasePoint<double> point(std::size_t k) const { return {s[k], X[k], V[k]}; }
  std::size_t size() const { return s.size(); }
};

struct CharacteristicOptions {
  double tol = 1e-10;
  double charge = 1.0;
  /// Massless integration stops when |V| drops below this.
  double velocity_floor = 1e-10;
};

/// Solves dX/ds = V/V⁰, dV^j/ds = e(F_{0j} + (V^i/V⁰)F_{ij}) from s = t0 to t0 + span.
Characteristic integrate_characteristic(double mass, const FieldSampler& F, double t0,
                                        const SpaceVec<double>& x0, const SpaceVec<double>& v0,
                                        double span, const CharacteristicOptions& opt = {});

/// max_s |z(s) − z(s₀)| along the stored samples.
double weight_drift(const WeightSpec& z, const Characteristic& c);

/// One record per line: {id, mass, samples: [[s, X..., V...], ...], status}.
void write_ensemble(std::ostream& os, const std::vector<Characteristic>& ensemble);

struct ExtraDecayCheck {
  /// |2(t−r)v^L + (x^i/r)z_{0i} + s| with z_{0i} = x^i v⁰ − t v^i, s = x^μv_μ.
  double outgoing_residual = 0.0;
  /// |2(t+r)v^L̄ − (x^i/r)z_{0i} + s|.
  double incoming_residual = 0.0;
  double vB_norm = 0.0;
  double sqrt_vL_vLbar = 0.0;
  double vLbar = 0.0;
  /// m²/(4v⁰).
  double mass_bound = 0.0;
  /// τ₊|v^B|/v⁰ divided by Σ_{z∈k₁}|z|.
  double angular_ratio = 0.0;
  /// |v^B| ≤ 2√(v^Lv^L̄)(1+tol); the constant 2 is attained by tangential massless v.
  bool angular_bound_ok = false;
  bool mass_bound_ok = false;
};

ExtraDecayCheck extradecay_identities(const PhasePoint<double>& p, double mass, double tol = 1e-12);

/// Residuals of t·T₁ = v⁰S + (tv^i − x^iv⁰)∂_i and t v⁰X_i = v⁰Ω_{0i} + (tv^i − x^iv⁰)∂_t,
/// X_i = ∂_i + (v^i/v⁰)∂_t, acting on f. Returns the maximum over both and all i.
double good_derivative_residual(const PhaseFunction& f, const PhasePoint<double>& p, double mass);

/// Ratios of the v-derivative bounds at p.
struct VDerivativeRatios {
  /// v⁰|(∇_v f)^L| / (τ₋ Σ_{Ẑ∈ℙ̂₀}|Ẑf|).
  double outgoing = 0.0;
  /// v⁰|(∇_v f)^L̄| / (τ₋ Σ_{Ẑ∈ℙ̂₀}|Ẑf|).
  double incoming = 0.0;
  /// v^L̄|(∇_v f)^B| / (τ₋ Σ_{Ẑ∈ℙ̂₀} Σ_{z∈k₁}|zẐf|); k₁ contains v⁰/v⁰ = 1.
  double angular = 0.0;
};

VDerivativeRatios vderivative_ratios(const PhaseFunction& f, const PhasePoint<double>& p,
                                     double mass);

/// ∫ (v⁰)^q |z^γ Ẑ^β f| dv, optionally with the factor v^L̄ (needs |x| > 0).
/// `signed_integrand` drops the absolute value (currents and other signed moments).
struct VelocityMoment {
  double q = 0.0;
  std::vector<WeightSpec> gamma;
  MultiIndex beta;
  bool incoming_null_factor = false;
  bool signed_integrand = false;
};

struct VelocityQuadOptions {
  int radial_nodes = 8;
  int panels = 2;
  int sphere_order = 6;
  /// Number of refinement levels tried before giving up.
  int max_refinements = 3;
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  bool check_convergence = true;
  /// Massive averages at t ≥ this use the pullback y = v/v⁰, w = x − t y over the x-support.
  double pullback_min_t = 2.0;
  /// Extra radius added to the x-support for the pullback (drift under a field).
  double x_margin = 0.0;
};

/// Envelope truncation radius: where exp(−r²/(2 scale²)) falls below 1e-14.
double envelope_radius(double scale);

quad::Result velocity_average(const PhaseFunction& f, const SpacetimePoint<double>& p, double mass,
                              const VelocityMoment& mom, const VelocityQuadOptions& opt = {});

/// Maps a phase point at time 0 to time t along a measure-preserving flow.
using PhaseFlow = std::function<void(double t, SpaceVec<double>& x, SpaceVec<double>& v)>;

PhaseFlow free_flow(double mass);

/// Advances (x, v) by dt under the constant electric force b = eE (m > 0):
/// V = v + b·dt and X by the closed-form integral of V/V⁰.
template <class T>
void constant_field_map(double mass, const SpaceVec<double>& b, const T& dt, SpaceVec<T>& x,
                        SpaceVec<T>& v) {
  using std::asinh;
  using std::sqrt;
  const double beta = b.norm();
  if (beta == 0.0) {
    x += (dt / energy_of(v, mass)) * v;
    return;
  }
  SpaceVec<double> e = b / beta;
  T apar(0.0);
  for (Eigen::Index i = 0; i < v.size(); ++i) apar += e[i] * v[i];
  SpaceVec<T> aperp = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) aperp[i] -= apar * e[i];
  T c2 = mass * mass + aperp.squaredNorm();
  T c = sqrt(c2);
  T q1 = apar + beta * dt;
  T r0 = sqrt(c2 + apar * apar), r1 = sqrt(c2 + q1 * q1);
  // √(c²+q₁²) − √(c²+q₀²) without cancellation.
  T par = dt * (q1 + apar) / (r0 + r1);
  T perp = (asinh(q1 / c) - asinh(apar / c)) / beta;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    x[i] += par * e[i] + perp * aperp[i];
    v[i] += b[i] * dt;
  }
}
/// Closed-form motion in a constant electric field E (lower index F_{0j} = E^j), m > 0.
PhaseFlow constant_field_flow(double mass, double charge, const SpaceVec<double>& E);

/// Field with only F_{0j} = E^j, constant in spacetime.
FieldSampler constant_electric_field(const SpaceVec<double>& E);

/// f(t, x, v) = f0(Φ₋ₜ(x, v)) with f0 read at t = 0; the support hint is that of f0.
PhaseFunction evolve_free(const PhaseFunction& f0, double mass);
PhaseFunction evolve_in_constant_field(const PhaseFunction& f0, double mass, double charge,
                                       const SpaceVec<double>& E);

/// Product rule on the initial support, optionally pushed forward to time t.
struct PhaseRule {
  std::vector<PhasePoint<double>> nodes;
  std::vector<double> weights;
};

struct PhaseRuleOptions {
  int x_radial = 6;
  int v_radial = 6;
  int panels = 1;
  int sphere_order = 4;
};

PhaseRule phase_rule(int n, double t, double x_radius, double v_radius,
                     const PhaseRuleOptions& opt = {});
PhaseRule push_forward(const PhaseRule& r, const PhaseFlow& flow, double t);

struct KineticEnergyOptions {
  int dim = 4;
  double mass = 1.0;
  /// Transports an initial-support rule to time t. Without a flow the slice is
  /// integrated directly on the ball of radius x_radius + t.
  std::optional<PhaseFlow> flow;
  PhaseRuleOptions rule;
  bool include_cone = true;
  double u_spacing = 0.5;
  int cone_radial = 4;
  int cone_sphere_order = 4;
  VelocityQuadOptions velocity{6, 1, 4, 0, 1e-6, 1e-14, false, 2.0, 0.0};
  double rel_tol = 1e-6;
  bool check_convergence = true;
};

/// Σ_{|β|≤N, |γ|≤q} ‖(v⁰)^k z^γẐ^βf‖_{L¹}(t) + sup_u ∫_{C_u(t)}∫(v⁰)^{k−1}v^L̄|z^γẐ^βf|,
/// with z ∈ k₁ (massive) or k₀ (massless_weights) and Ẑ ∈ ℙ̂₀.
EnergyReport kinetic_energy(const PhaseFunction& f, double t, int N, int q, bool massless_weights,
                            double k, const KineticEnergyOptions& opt = {});

/// All products of ≤ q weights, non-decreasing in the index (products commute).
std::vector<std::vector<WeightSpec>> weight_words(const std::vector<WeightSpec>& set, int q);

}  // namespace vmlab
