#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "vmlab/simharness.hpp"

using namespace vmlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Plane wave moving along x₁ with E polarized along x₂.
FieldSampler plane_wave(int n, double k) {
  return FieldSampler::analytic(n, [n, k](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    using std::cos;
    STMat<T> F = STMat<T>::Zero(n + 1, n + 1);
    const T e = cos(k * (x[0] - t));
    F(0, 2) = e;
    F(2, 0) = -e;
    F(1, 2) = -e;
    F(2, 1) = e;
    return F;
  });
}

SpeciesSpec species(double mass, double charge, double drift, int particles) {
  SpeciesSpec s;
  s.mass = mass;
  s.charge = charge;
  s.drift = drift;
  s.particles = particles;
  return s;
}

ScenarioConfig base_config() {
  ScenarioConfig c;
  c.length = 2.0 * kPi;
  c.cells = 32;
  c.dt = 0.05;
  c.t_end = 2.0;
  return c;
}

}  // namespace

TEST_CASE("Maxwell lattice conserves the staggered energy in vacuum") {
  const double L = 2.0 * kPi;
  Grid g = Grid::cube(3, 12, 0.5 * L);
  auto init = sample_staggered(plane_wave(3, 1.0), g, 0.0);
  MaxwellLatticeOptions opt;
  opt.dt = 0.3 * g.spacing(0);
  opt.steps = 1000;
  opt.record_every = 10;
  auto run = evolve_maxwell_lattice(init, opt);
  CHECK(run.t.size() == 101);
  CHECK(run.energy.front() > 0.0);
  CHECK(run.energy_drift() <= 1e-12);

  // Second-order convergence to the exact plane wave at a fixed time.
  auto error_at = [&](int points) {
    Grid gg = Grid::cube(3, points, 0.5 * L);
    MaxwellLatticeOptions o;
    o.steps = points * 2;
    o.dt = 1.0 / o.steps;
    auto r = evolve_maxwell_lattice(sample_staggered(plane_wave(3, 1.0), gg, 0.0), o);
    auto exact = sample_staggered(plane_wave(3, 1.0), gg, 1.0);
    double err = 0.0;
    for (std::size_t k = 0; k < exact.data.size(); ++k) err = std::max(err, std::abs(exact.data[k] - r.final_state.data[k]));
    return err;
  };
  const double coarse = error_at(12), fine = error_at(24);
  CHECK(coarse <= 2e-2);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));

  opt.dt = 0.6 * g.spacing(0);
  CHECK_THROWS_AS(evolve_maxwell_lattice(init, opt), Error);
}

TEST_CASE("Maxwell lattice closes the current budget") {
  Grid g = Grid::cube(2, 16, kPi);
  auto init = sample_staggered(plane_wave(2, 2.0), g, 0.0);
  MaxwellLatticeOptions opt;
  opt.dt = 0.25 * g.spacing(0);
  opt.steps = 1000;
  opt.current = [](int i, double t, const SpaceVec<double>& x) {
    return i == 1 ? 0.3 * std::sin(x[1]) * std::cos(0.7 * t) : 0.2 * std::cos(x[0] + x[1]);
  };
  auto run = evolve_maxwell_lattice(init, opt);
  CHECK(std::abs(run.work.back()) > 1e-3);
  CHECK(run.budget_residual() <= 1e-10);
}

TEST_CASE("wave lattice standing mode follows the discrete dispersion relation") {
  const double L = 2.0 * kPi;
  Grid g = Grid::cube(2, 16, 0.5 * L);
  GridField u0(g, GridKind::Scalar), ut0(g, GridKind::Scalar);
  const double k = 2.0;
  const std::size_t probe = g.flatten({3, 5});
  for (std::size_t idx = 0; idx < g.size(); ++idx) u0.data[idx] = std::cos(k * g.point(idx)[0]);
  const double h = g.spacing(0);
  const double lambda = 4.0 / (h * h) * std::pow(std::sin(0.5 * k * h), 2);
  WaveLatticeOptions opt;
  opt.dt = 0.2 * h;
  const double omega = std::acos(1.0 - 0.5 * opt.dt * opt.dt * lambda) / opt.dt;
  opt.steps = static_cast<int>(std::ceil(100.0 * 2.0 * kPi / omega / opt.dt));
  double dev = 0.0;
  opt.observer = [&](double t, const GridField& u) {
    dev = std::max(dev, std::abs(u.data[probe] - std::cos(omega * t) * u0.data[probe]));
  };
  auto run = evolve_wave_lattice(u0, ut0, opt);
  CHECK(dev <= 1e-6);
  double drift = 0.0;
  for (double e : run.energy) drift = std::max(drift, std::abs(e - run.energy.front()));
  CHECK(drift <= 1e-10 * run.energy.front());
}

TEST_CASE("wave lattice zero data and constant source") {
  Grid g = Grid::cube(3, 6, 1.0);
  GridField zero(g, GridKind::OneForm);
  WaveLatticeOptions opt;
  opt.dt = 0.05;
  opt.steps = 40;
  auto run = evolve_wave_lattice(zero, zero, opt);
  CHECK(run.final_u.max_abs() == 0.0);
  for (double e : run.energy) CHECK(e == 0.0);

  GridField scalar(g, GridKind::Scalar);
  const double S = 0.7;
  opt.source = [S](int, double, const SpaceVec<double>&) { return S; };
  auto sourced = evolve_wave_lattice(scalar, scalar, opt);
  for (std::size_t k = 0; k < sourced.t.size(); ++k)
    CHECK(sourced.mean[k] == doctest::Approx(-0.5 * S * sourced.t[k] * sourced.t[k]).epsilon(1e-12));
  // The field stays spatially constant.
  const double first = sourced.final_u.data.front();
  for (double v : sourced.final_u.data) CHECK(v == doctest::Approx(first).epsilon(1e-13));

  opt.dt = 0.3;
  CHECK_THROWS_AS(evolve_wave_lattice(scalar, scalar, opt), Error);
}

TEST_CASE("uncharged drifting beam is ballistic") {
  auto cfg = base_config();
  cfg.species = {species(1.0, 0.0, 0.6, 256)};
  PicSimulation sim(cfg);
  const auto x0 = sim.species()[0].x;
  auto rec = sim.run();
  const double v = 0.6 / std::sqrt(1.0 + 0.36);
  for (std::size_t k = 0; k < x0.size(); ++k)
    CHECK(sim.species()[0].x[k] == doctest::Approx(x0[k] + v * sim.time()).epsilon(1e-12));
  for (double e : rec.field_energy) CHECK(e <= 1e-24);
  CHECK(rec.t.size() == 41);
  for (std::size_t k = 1; k < rec.t.size(); ++k) CHECK(rec.t[k] > rec.t[k - 1]);
}

TEST_CASE("identical species of opposite charge produce no field") {
  auto cfg = base_config();
  auto a = species(1.0, 1.0, 0.2, 500);
  a.amplitude = 0.3;
  a.mode = 2;
  auto b = a;
  b.charge = -1.0;
  cfg.species = {a, b};
  cfg.t_end = 5.0;
  auto rec = evolve_coupled(cfg);
  for (double e : rec.field_energy) CHECK(e <= 1e-26);
  for (double r : rec.gauss_residual) CHECK(r <= 1e-12);
}

TEST_CASE("uniform plasma oscillation matches the cold two-species oracle") {
  auto cfg = base_config();
  auto electrons = species(1.0, -1.0, 0.5, 128);
  auto ions = species(50.0, 1.0, 0.0, 128);
  cfg.species = {electrons, ions};
  cfg.t_end = 20.0;
  cfg.dt = 0.02;
  cfg.record_every = 10;
  auto rec = evolve_coupled(cfg);
  const auto oracle = uniform_plasma_oracle(cfg.species, 0.0, rec.t);
  double amp = 0.0, dev = 0.0;
  for (std::size_t k = 0; k < rec.t.size(); ++k) {
    amp = std::max(amp, std::abs(oracle[k]));
    dev = std::max(dev, std::abs(rec.mean_field[k] - oracle[k]));
  }
  CHECK(amp > 0.1);
  CHECK(dev <= 0.01 * amp);
  for (double r : rec.gauss_residual) CHECK(r <= 1e-6);
}

TEST_CASE("thermal run keeps Gauss's law and is reversible") {
  auto cfg = base_config();
  auto e1 = species(1.0, -1.0, 0.4, 2000);
  e1.thermal = 0.05;
  e1.amplitude = 0.05;
  auto e2 = e1;
  e2.drift = -0.4;
  cfg.species = {e1, e2};
  cfg.background = 2.0;
  cfg.t_end = 10.0;
  cfg.record_every = 20;
  auto rec = evolve_coupled(cfg);
  for (double r : rec.gauss_residual) CHECK(r <= 1e-6);
  const auto total = rec.total_energy();
  for (double e : total) CHECK(e == doctest::Approx(total.front()).epsilon(1e-2));
  for (std::size_t k = 0; k < rec.t.size(); ++k) {
    CHECK(rec.field_energy[k] >= 0.0);
    CHECK(rec.kinetic_energy[k] >= 0.0);
    CHECK(rec.particle_norm[k] == rec.particle_norm.front());
  }

  PicSimulation sim(cfg);
  const auto start = sim.species();
  sim.advance(50);
  double moved = 0.0;
  for (std::size_t k = 0; k < start[0].x.size(); ++k) moved = std::max(moved, std::abs(sim.species()[0].x[k] - start[0].x[k]));
  CHECK(moved > 0.5);
  for (int k = 0; k < 50; ++k) sim.step(-cfg.dt);
  double back = 0.0;
  for (std::size_t s = 0; s < start.size(); ++s)
    for (std::size_t k = 0; k < start[s].x.size(); ++k) {
      back = std::max(back, std::abs(sim.species()[s].x[k] - start[s].x[k]));
      back = std::max(back, std::abs(sim.species()[s].p[k] - start[s].p[k]));
    }
  CHECK(back <= 1e-6);
}

TEST_CASE("massless particles stop the run when their speed vanishes") {
  auto cfg = base_config();
  auto light = species(0.0, -1.0, 0.3, 64);
  auto heavy = species(1000.0, 1.0, 0.0, 64);
  heavy.mobile = false;
  cfg.species = {light, heavy};
  cfg.t_end = 3.0;
  auto rec = evolve_coupled(cfg);
  REQUIRE(rec.velocity_vanished);
  // Uniform field E = t and momentum 0.3 − t²/2 vanish at t = √0.6.
  CHECK(rec.vanish_time == doctest::Approx(std::sqrt(0.6)).epsilon(0.1));
  std::ostringstream out;
  rec.write_ndjson(out);
  CHECK(out.str().find("MasslessZeroVelocity") != std::string::npos);

  light.drift = 0.0;
  cfg.species = {light, heavy};
  CHECK_THROWS_AS(PicSimulation{cfg}, Error);
}

TEST_CASE("scenario validation, hashing and NDJSON") {
  auto cfg = base_config();
  cfg.species = {species(1.0, -1.0, 0.1, 64)};
  cfg.background = 1.0;
  const auto h = cfg.hash();
  CHECK(h.size() == 16);
  CHECK(cfg.hash() == h);
  auto other = cfg;
  other.seed = 2;
  CHECK(other.hash() != h);

  auto bad = cfg;
  bad.coupled_dim = 2;
  CHECK_THROWS_AS(PicSimulation{bad}, Error);
  bad = cfg;
  bad.dt = 0.2;
  try {
    PicSimulation sim(bad);
    FAIL("expected CFLViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CFLViolation);
  }
  bad = cfg;
  bad.background = 0.5;
  try {
    PicSimulation sim(bad);
    FAIL("expected NonZeroMeanSource");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonZeroMeanSource);
  }

  auto rec = evolve_coupled(cfg);
  std::ostringstream out;
  rec.write_ndjson(out);
  std::istringstream in(out.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.at("config_hash") == h);
    CHECK(j.contains("gauss_residual"));
    CHECK(j.contains("total_energy"));
    ++lines;
  }
  CHECK(lines == rec.t.size());
}

TEST_CASE("checkpoint round trip") {
  auto cfg = base_config();
  auto e1 = species(1.0, -1.0, 0.3, 300);
  e1.thermal = 0.1;
  cfg.species = {e1, species(20.0, 1.0, 0.0, 100)};
  PicSimulation sim(cfg);
  sim.advance(10);
  std::stringstream buf;
  sim.write_checkpoint(buf);

  PicSimulation restored(cfg);
  restored.read_checkpoint(buf);
  CHECK(restored.time() == sim.time());
  CHECK(restored.field() == sim.field());
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(restored.species()[s].x == sim.species()[s].x);
    CHECK(restored.species()[s].p == sim.species()[s].p);
  }
  sim.advance(5);
  restored.advance(5);
  CHECK(restored.field() == sim.field());

  std::stringstream junk("not a checkpoint");
  CHECK_THROWS_AS(restored.read_checkpoint(junk), Error);
}
