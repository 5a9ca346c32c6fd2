#pragma once
// Lattice evolutions on periodic boxes: a staggered Maxwell lattice, a scalar
// leapfrog wave lattice, and a one-dimensional relativistic particle-in-cell run.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vmlab/grid.hpp"
#include "vmlab/sampler.hpp"

namespace vmlab {

// Maxwell lattice. E^i lives on edge midpoints x + h_i e_i/2 at integer steps, F_ij on
// face centres x + (h_i e_i + h_j e_j)/2 at half steps. Stored as a TwoForm field:
// pair (0, i) holds E^i, pair (i, j) holds F_ij.

/// Spatial current J^i(t, x) for i = 1..n.
using CurrentSource = std::function<double(int i, double t, const SpaceVec<double>& x)>;

/// Samples F at time t on the staggered positions.
GridField sample_staggered(const FieldSampler& F, const Grid& g, double t);

struct MaxwellLatticeOptions {
  double dt = 0.0;
  int steps = 0;
  int record_every = 1;
  CurrentSource current;
};

struct MaxwellLatticeRun {
  std::vector<double> t;
  /// ½Σ|E|² + ½Σ F^{−½}·F^{+½}, times the cell volume.
  std::vector<double> energy;
  /// ∫₀ᵗ Σ E·J with E averaged over each step.
  std::vector<double> work;
  GridField final_state;

  /// max |ℰ(t) − ℰ(0)| / ℰ(0).
  double energy_drift() const;
  /// max |ℰ(t) − ℰ(0) + work(t)| relative to max(ℰ(0), max |work|).
  double budget_residual() const;
};

/// `initial` holds E and F at t = 0; F is moved back half a step before the first update.
/// `final_state` holds E at the last step and F averaged over the neighbouring half steps.
/// Throws CFLViolation when dt > h_i/2 on some axis or dt·√(Σ 1/h_i²) > 1.
MaxwellLatticeRun evolve_maxwell_lattice(const GridField& initial, const MaxwellLatticeOptions& opt);

// Scalar wave lattice for □u = S per component, □ = −∂_t² + Δ.

using WaveSource = std::function<double(int component, double t, const SpaceVec<double>& x)>;

struct WaveLatticeOptions {
  double dt = 0.0;
  int steps = 0;
  int record_every = 1;
  WaveSource source;
  /// Called on recorded steps with the current time and field.
  std::function<void(double, const GridField&)> observer;
};

struct WaveLatticeRun {
  std::vector<double> t;
  /// ½|(uⁿ⁺¹ − uⁿ)/dt|² + ½⟨∇uⁿ, ∇uⁿ⁺¹⟩, conserved without source.
  std::vector<double> energy;
  /// Grid mean of component 0.
  std::vector<double> mean;
  GridField final_u;
};

/// Same CFL rule as the Maxwell lattice.
WaveLatticeRun evolve_wave_lattice(const GridField& u0, const GridField& ut0, const WaveLatticeOptions& opt);

// One-dimensional particle-in-cell.

struct SpeciesSpec {
  std::string name = "species";
  double mass = 1.0;
  double charge = -1.0;
  /// Mean number density.
  double density = 1.0;
  /// Density profile density·(1 + amplitude·cos(2π mode x / L)).
  double amplitude = 0.0;
  int mode = 1;
  double drift = 0.0;
  /// Standard deviation of the momentum spread.
  double thermal = 0.0;
  int particles = 100000;
  bool mobile = true;
};

struct ScenarioConfig {
  /// Dimension used by phase-space diagnostics elsewhere; the coupled run is 1-D.
  int n = 4;
  int coupled_dim = 1;
  double length = 6.283185307179586;
  int cells = 64;
  double dt = 0.05;
  double t_end = 10.0;
  std::vector<SpeciesSpec> species;
  /// Uniform background charge density.
  double background = 0.0;
  std::uint64_t seed = 1;
  int record_every = 1;
  double velocity_floor = 1e-10;

  std::string serialize() const;
  /// Hex digest of serialize().
  std::string hash() const;
};

struct RunRecord {
  std::string config_hash;
  std::vector<double> t;
  std::vector<double> field_energy;
  std::vector<double> kinetic_energy;
  std::vector<double> gauss_residual;
  std::vector<double> momentum;
  /// Σ over species of the total particle weight (the zeroth-order kinetic norm).
  std::vector<double> particle_norm;
  /// Grid mean of E.
  std::vector<double> mean_field;
  /// Set when a massless particle's momentum reached the floor.
  bool velocity_vanished = false;
  double vanish_time = 0.0;

  std::vector<double> total_energy() const;
  void write_ndjson(std::ostream& out) const;
};

struct Particles {
  SpeciesSpec spec;
  double weight = 0.0;
  std::vector<double> x;
  std::vector<double> p;
};

class PicSimulation {
 public:
  /// Throws CFLViolation (dt > dx/2), InvalidArgument (coupled_dim ≠ 1), NonZeroMeanSource.
  explicit PicSimulation(const ScenarioConfig& cfg);

  /// One kick–drift–kick step of size dt (negative dt steps backward).
  void step(double dt);
  void advance(int steps) {
    for (int k = 0; k < steps; ++k) step(cfg_.dt);
  }
  /// Runs to t_end recording diagnostics every record_every steps.
  RunRecord run();

  double time() const { return t_; }
  const std::vector<Particles>& species() const { return species_; }
  /// E on faces x_{j+½}.
  const std::vector<double>& field() const { return E_; }
  std::vector<double> charge_density() const;
  double field_energy() const;
  double kinetic_energy() const;
  double momentum() const;
  double gauss_residual() const;
  double dx() const { return cfg_.length / cfg_.cells; }
  const ScenarioConfig& config() const { return cfg_; }

  /// Grid field (TwoForm, one component) followed by one particle block per species.
  void write_checkpoint(std::ostream& out) const;
  /// Restores particles and field written by write_checkpoint into a simulation built from the same config.
  void read_checkpoint(std::istream& in);

 private:
  double field_at(double x) const;
  void kick(Particles& s, std::size_t k, double dp) const;
  void deposit_current(const Particles& s, const std::vector<double>& x_old, double dt, std::vector<double>& I) const;
  double energy_of_momentum(const Particles& s, double p) const;

  ScenarioConfig cfg_;
  std::vector<Particles> species_;
  std::vector<double> E_;
  double t_ = 0.0;
};

RunRecord evolve_coupled(const ScenarioConfig& cfg);

/// Mean field E and momenta p_k of uniform cold species: dE/dt = −Σ e_k n_k p_k/p⁰_k,
/// dp_k/dt = e_k E. Returns E at the requested times.
std::vector<double> uniform_plasma_oracle(const std::vector<SpeciesSpec>& species, double E0,
                                          const std::vector<double>& times);

/// Particle block: "PBLK", u32 version, u32 dim, f64 mass, f64 charge, f64 weight, u64 count,
/// then per particle u64 id, dim f64 positions, dim f64 momenta (little-endian).
void write_particle_block(std::ostream& out, const Particles& s);
Particles read_particle_block(std::istream& in);

}  // namespace vmlab
