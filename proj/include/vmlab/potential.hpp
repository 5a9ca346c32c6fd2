#pragma once
// Lorenz-gauge potentials built from initial field data on a periodic box, and
// the wave-equation sources produced by particle species.

#include <vector>

#include "vmlab/grid.hpp"
#include "vmlab/kinetic.hpp"

namespace vmlab {

/// Fourier mode of a potential: A_μ(t) = Re Σ (a_μ cos|ξ|t + b_μ sin|ξ|t/|ξ|) e^{iξ·x} / N.
struct PotentialMode {
  SpaceVec<double> xi;
  std::vector<std::complex<double>> a;  // spectrum of A_μ(0)
  std::vector<std::complex<double>> b;  // spectrum of ∂_tA_μ(0)
};

struct PotentialData {
  Grid grid;
  /// A_μ(0) and ∂_tA_μ(0) on the grid (OneForm kind).
  GridField A0;
  GridField dtA0;
  /// Modes above the cutoff, evolved exactly by the vacuum wave equation.
  std::vector<PotentialMode> modes;
  /// Spacetime sampler of the Fourier series.
  OneFormSampler A;
  /// max |∂^μA_μ(0)| over the grid.
  double gauge_residual_bound = 0.0;
};

struct PotentialOptions {
  /// Fraction of the box width, per face, in which F0 must be negligible.
  double margin_fraction = 0.1;
  /// Relative size below which F0 counts as negligible.
  double support_tol = 1e-10;
  /// Modes with all coefficients below cutoff·max are dropped from the sampler.
  double mode_cutoff = 1e-15;
  /// Relative size of the zero mode above which a Poisson source is rejected.
  double mean_tol = 1e-10;
};

/// Samples a 2-form on the grid at time t.
GridField sample_field(const FieldSampler& F, const Grid& g, double t);

/// Solves Δu = s per component with the zero mode removed. Throws NonZeroMeanSource.
GridField solve_poisson(const GridField& source, double mean_tol = 1e-10);

/// A₀(0) = 0, ∂_tA₀(0) = 0, ∂_tA_k(0) = F_{0k}(0), ΔA_k(0) = ∂^jF_{jk}(0).
/// Throws BoxTooSmall when F0 reaches the boundary margin.
PotentialData build_initial_potential(const GridField& F0, const PotentialOptions& opt = {});

/// dA at t = 0 from the grid values (TwoForm kind).
GridField exterior_derivative_at_zero(const PotentialData& pot);

/// ∂^μA_μ at p.
double lorenz_residual(const OneFormSampler& A, const SpacetimePoint<double>& p);

/// (ℒ_Z A)_μ = Z^ν∂_νA_μ + A_ν∂_μZ^ν for an unlifted field Z.
OneFormSampler lie_derivative_1form(const VectorFieldSpec& Z, const OneFormSampler& A);

struct Species {
  PhaseFunction f;
  double charge = 1.0;
  double mass = 1.0;
};

/// Σ_k e_k ∫ v_μ/v⁰ Ẑ^βf_k dv (lower index).
STVecd wave_source(const std::vector<Species>& species, const SpacetimePoint<double>& p,
                   const MultiIndex& beta = {}, const VelocityQuadOptions& opt = {});

/// Both sides of the weighted L² bound on the constructed potential at t = 0,
/// for Lie derivatives along 𝕂-words of order ≤ N (N ∈ {0, 1}).
struct PotentialBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};
PotentialBound potential_bound(const PotentialData& pot, const GridField& F0, int N);

}  // namespace vmlab
