#pragma once
// 2-form algebra: null decomposition, Hodge dual, stress tensor, pointwise
// norms, Maxwell residuals and the weighted field energies.

#include <map>
#include <string>
#include <vector>

#include "vmlab/geometry.hpp"
#include "vmlab/lie_ops.hpp"

namespace vmlab {

template <class T>
struct NullComponents {
  SpaceVec<T> alpha;
  SpaceVec<T> alphabar;
  T rho{};
  SphereMat<T> sigma;

  T alpha2() const { return alpha.squaredNorm(); }
  T alphabar2() const { return alphabar.squaredNorm(); }
  /// Σ_{B<D} σ_{BD}².
  T sigma2() const { return 0.5 * sigma.squaredNorm(); }
  /// |α|² + |ᾱ|² + 2(ρ² + |σ|²).
  T norm2() const { return alpha2() + alphabar2() + 2.0 * (rho * rho + sigma2()); }
};

/// Components of F along the null frame: α_B = F(e_B, L), ᾱ_B = F(e_B, L̄),
/// ρ = ½F(L, L̄), σ_BD = F(e_B, e_D).
template <class T>
NullComponents<T> null_decompose(const STMat<T>& F, const NullFrame<T>& fr) {
  const int n = fr.dim();
  NullComponents<T> c{SpaceVec<T>(n - 1), SpaceVec<T>(n - 1), T(0.0), SphereMat<T>(n - 1, n - 1)};
  STVec<T> FL = F * fr.L, FLb = F * fr.Lbar;
  c.rho = 0.5 * fr.L.dot(FLb);
  for (int B = 0; B < n - 1; ++B) {
    STVec<T> eB = fr.e(B);
    c.alpha[B] = eB.dot(FL);
    c.alphabar[B] = eB.dot(FLb);
    for (int D = 0; D < n - 1; ++D) c.sigma(B, D) = eB.dot(F * fr.e(D));
  }
  return c;
}

/// Inverse of null_decompose.
STMatd reconstruct_2form(const NullComponents<double>& c, const NullFrame<double>& fr);

/// F^{μν} raised with η.
template <class T>
STMat<T> raise(const STMat<T>& F) {
  STMat<T> G = F;
  G.row(0) *= -1.0;
  G.col(0) *= -1.0;
  return G;
}

/// F_{ρσ} F^{ρσ}.
template <class T>
T contraction(const STMat<T>& F) {
  return F.cwiseProduct(raise(F)).sum();
}

/// T_{μν} = F_{μβ} F_ν^β − ¼ η_{μν} F_{ρσ}F^{ρσ}.
template <class T>
STMat<T> stress(const STMat<T>& F) {
  const Eigen::Index d = F.rows();
  STMat<T> Fup = F;
  Fup.col(0) *= -1.0;  // F_ν^β
  STMat<T> S = F * Fup.transpose();
  T c = contraction(F);
  for (Eigen::Index mu = 0; mu < d; ++mu) S(mu, mu) -= 0.25 * eta(static_cast<int>(mu)) * c;
  return S;
}

/// Cartesian |F|² = 2Σ(F_{0i})² + 2Σ_{i<j}(F_{ij})².
template <class T>
T cartesian_norm2(const STMat<T>& F) {
  return F.squaredNorm();
}

/// |F|^# = √(τ₊²|α|² + τ₋²|ᾱ|² + (τ₊²+τ₋²)(ρ²+|σ|²)).
double sharp_norm(const STMatd& F, const SpacetimePoint<double>& p);

/// K̄₀ = ½τ₋² L̄ + ½τ₊² L in Cartesian components.
STVecd morawetz_field(const SpacetimePoint<double>& p);

/// Fully antisymmetric form of degree k in spacetime dimension d, dense storage.
class Form {
 public:
  Form(int spacetime_dim, int degree);
  int degree() const { return k_; }
  int spacetime_dim() const { return d_; }
  double& operator()(std::span<const int> idx);
  double operator()(std::span<const int> idx) const;
  double operator()(std::initializer_list<int> idx) const {
    return (*this)(std::span<const int>(idx.begin(), idx.size()));
  }
  double max_abs() const;
  /// max |ω(σ·idx) − sgn(σ)ω(idx)| over transpositions.
  double antisymmetry_defect() const;

 private:
  std::size_t offset(std::span<const int> idx) const;
  int d_, k_;
  std::vector<double> data_;
};

/// Levi-Civita symbol with ε_{01…n} = +1.
int levi_civita(std::span<const int> idx);

/// *F_{λ₁…λ_{n−1}} = ½ F^{μν} ε_{μνλ₁…λ_{n−1}}.
Form hodge_dual(const STMatd& F);

/// Residuals of the Maxwell equations at p.
struct MaxwellResidual {
  /// ∇^μF_{μν} − J_ν.
  STVecd divergence;
  /// max over λ<μ<ν of |∂_λF_{μν} + ∂_μF_{νλ} + ∂_νF_{λμ}|.
  double closedness = 0.0;
  double max_abs() const { return std::max(divergence.cwiseAbs().maxCoeff(), closedness); }
};

/// `J` may be a default-constructed sampler for the vacuum case.
MaxwellResidual maxwell_residual(const FieldSampler& F, const OneFormSampler& J,
                                 const SpacetimePoint<double>& p);

/// ∂_μ F_{ρσ}, index order (μ, ρ, σ) flattened as μ·d² + ρ·d + σ.
std::vector<STMatd> field_gradient(const FieldSampler& F, const SpacetimePoint<double>& p);

struct EnergyEntry {
  std::string label;
  double value = 0.0;
  double error = 0.0;
};

/// A named set of evaluated functionals with quadrature error estimates.
struct EnergyReport {
  std::string name;
  std::vector<EnergyEntry> entries;
  double total = 0.0;
  double error = 0.0;

  void add(std::string label, double value, double err) {
    entries.push_back({std::move(label), value, err});
    total += value;
    error += err;
  }
};

enum class EnergyVariant { E0, E, ES };

struct EnergyOptions {
  /// Spatial integration over |x| ≤ radius (field assumed negligible outside).
  double radius = 1.0;
  int radial_nodes = 8;
  int radial_panels = 4;
  int sphere_order = 6;
  /// Relative tolerance on the refinement error estimate.
  double tol = 1e-6;
  /// Spacing of the u-grid for the cone supremum of E0.
  double u_spacing = 0.1;
  bool check_convergence = true;
};

/// Energy of F and its Lie derivatives along all 𝕂-words of order ≤ N.
EnergyReport maxwell_energy(const FieldSampler& F, double t, EnergyVariant variant, int N,
                            const EnergyOptions& opt = {});

/// Spatial integral of a pointwise density of F at time t with refinement error estimate.
quad::Result integrate_field_density(
    const FieldSampler& F, double t,
    const std::function<double(const STMatd&, const SpacetimePoint<double>&)>& density,
    const EnergyOptions& opt);

// Analytic field families.

/// F = dA for a 1-form sampler, by forward-mode differentiation.
FieldSampler exterior_derivative(const OneFormSampler& A);

/// Finite superposition of vacuum plane waves F = Σ (k∧ε) sin(k·x − |k|t + φ),
/// with k^με_μ = 0. Deterministic in `seed`.
struct PlaneWaveSet {
  int n = 0;
  std::vector<STVecd> k;    // lower-index wave covectors (−ω, k)
  std::vector<STVecd> eps;  // polarizations, lower index
  std::vector<double> phase;
};
PlaneWaveSet random_plane_waves(int n, int count, double kmax, std::uint64_t seed);
OneFormSampler plane_wave_potential(const PlaneWaveSet& w);
FieldSampler plane_wave_field(const PlaneWaveSet& w);

/// Decaying vacuum solution in Lorenz gauge built from the scalar wave
/// u = Re[((t+i)² − r²)^{−(n−1)/2}]: A₀ = −∂₁u, A₁ = −∂_t u, scaled by `amp`.
OneFormSampler hertz_potential(int n, double amp = 1.0);
FieldSampler hertz_field(int n, double amp = 1.0);

/// Current P_μ of the conformal multiplier for a potential A of G (lower index).
/// `last_sign` selects the sign of the ∂^β(t)A_βA_μ term.
STVecd morawetz_current(const OneFormSampler& A, const SpacetimePoint<double>& p, double last_sign);
/// ∇^μP_μ by differentiating the current.
double morawetz_divergence(const OneFormSampler& A, const SpacetimePoint<double>& p,
                           double last_sign);

}  // namespace vmlab
