#include "vmlab/simharness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "vmlab/ode.hpp"

namespace vmlab {

namespace {

void check_cfl(const Grid& g, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  double inv2 = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double h = g.spacing(i);
    if (dt > 0.5 * h) throw Error(ErrorCode::CFLViolation, "dt exceeds half the grid spacing");
    inv2 += 1.0 / (h * h);
  }
  if (dt * std::sqrt(inv2) > 1.0) throw Error(ErrorCode::CFLViolation, "dt exceeds the lattice light-cone limit");
}

// Flat index of the node shifted by `step` along `axis`, periodically.
std::size_t shifted(const Grid& g, const std::vector<int>& k, int axis, int step) {
  auto m = k;
  m[axis] = (m[axis] + step + g.dims[axis]) % g.dims[axis];
  return g.flatten(m);
}

struct Neighbours {
  // plus[i][idx], minus[i][idx]
  std::vector<std::vector<std::size_t>> plus, minus;
};

Neighbours neighbours(const Grid& g) {
  Neighbours nb;
  nb.plus.assign(g.n, std::vector<std::size_t>(g.size()));
  nb.minus = nb.plus;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto k = g.unflatten(idx);
    for (int i = 0; i < g.n; ++i) {
      nb.plus[i][idx] = shifted(g, k, i, 1);
      nb.minus[i][idx] = shifted(g, k, i, -1);
    }
  }
  return nb;
}

SpaceVec<double> offset_point(const Grid& g, std::size_t idx, int a, int b = -1) {
  SpaceVec<double> x = g.point(idx);
  x[a] += 0.5 * g.spacing(a);
  if (b >= 0) x[b] += 0.5 * g.spacing(b);
  return x;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

GridField sample_staggered(const FieldSampler& F, const Grid& g, double t) {
  GridField out(g, GridKind::TwoForm);
  const int n = g.n;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    for (int i = 0; i < n; ++i) out.component(pair_index(n, 0, i + 1))[idx] = F.at({t, offset_point(g, idx, i)})(0, i + 1);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        out.component(pair_index(n, i + 1, j + 1))[idx] = F.at({t, offset_point(g, idx, i, j)})(i + 1, j + 1);
  }
  return out;
}

double MaxwellLatticeRun::energy_drift() const {
  double d = 0.0;
  for (double e : energy) d = std::max(d, std::abs(e - energy.front()));
  return energy.front() > 0.0 ? d / energy.front() : d;
}

double MaxwellLatticeRun::budget_residual() const {
  double scale = energy.front(), d = 0.0;
  for (std::size_t k = 0; k < energy.size(); ++k) {
    scale = std::max(scale, std::abs(work[k]));
    d = std::max(d, std::abs(energy[k] - energy.front() + work[k]));
  }
  return scale > 0.0 ? d / scale : d;
}

MaxwellLatticeRun evolve_maxwell_lattice(const GridField& initial, const MaxwellLatticeOptions& opt) {
  if (initial.kind != GridKind::TwoForm) throw Error(ErrorCode::InvalidArgument, "Maxwell lattice needs a 2-form field");
  const Grid& g = initial.grid;
  const int n = g.n;
  const double dt = opt.dt;
  check_cfl(g, dt);
  const std::size_t N = g.size();
  const auto nb = neighbours(g);
  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) h[i] = g.spacing(i);
  const double vol = g.cell_volume();

  std::vector<std::vector<double>> E(n, std::vector<double>(N));
  std::vector<std::vector<std::vector<double>>> F(n, std::vector<std::vector<double>>(n));
  for (int i = 0; i < n; ++i) {
    const double* src = initial.component(pair_index(n, 0, i + 1));
    E[i].assign(src, src + N);
    for (int j = i + 1; j < n; ++j) {
      const double* f = initial.component(pair_index(n, i + 1, j + 1));
      F[i][j].assign(f, f + N);
    }
  }

  // F_ij += c (δ⁺_i E_j − δ⁺_j E_i)
  auto faraday = [&](double c, std::vector<std::vector<std::vector<double>>>& Fx) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (std::size_t idx = 0; idx < N; ++idx)
          Fx[i][j][idx] += c * ((E[j][nb.plus[i][idx]] - E[j][idx]) / h[i] - (E[i][nb.plus[j][idx]] - E[i][idx]) / h[j]);
  };
  auto F_at = [&](const std::vector<std::vector<std::vector<double>>>& Fx, int a, int b, std::size_t idx) {
    return a < b ? Fx[a][b][idx] : -Fx[b][a][idx];
  };
  auto current = [&](double t) {
    std::vector<std::vector<double>> J(n, std::vector<double>(N, 0.0));
    if (!opt.current) return J;
    for (int i = 0; i < n; ++i)
      for (std::size_t idx = 0; idx < N; ++idx) J[i][idx] = opt.current(i + 1, t, offset_point(g, idx, i));
    return J;
  };
  auto face_dot = [&](const auto& A, const auto& B) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += dot(A[i][j], B[i][j]);
    return s;
  };

  auto F_prev = F;  // F at n − ½
  faraday(-0.5 * dt, F_prev);
  auto F_next = F_prev;  // F at n + ½
  faraday(dt, F_next);

  MaxwellLatticeRun run;
  const int every = std::max(1, opt.record_every);
  double work = 0.0;
  auto energy_now = [&] {
    double e = 0.0;
    for (int i = 0; i < n; ++i) e += dot(E[i], E[i]);
    return 0.5 * vol * (e + face_dot(F_prev, F_next));
  };
  for (int step = 0;; ++step) {
    if (step % every == 0 || step == opt.steps) {
      run.t.push_back(step * dt);
      run.energy.push_back(energy_now());
      run.work.push_back(work);
    }
    if (step == opt.steps) break;
    const auto J = current((step + 0.5) * dt);
    auto E_old = E;
    for (int i = 0; i < n; ++i)
      for (std::size_t idx = 0; idx < N; ++idx) {
        double curl = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          curl += (F_at(F_next, j, i, idx) - F_at(F_next, j, i, nb.minus[j][idx])) / h[j];
        }
        E[i][idx] += dt * (curl - J[i][idx]);
      }
    for (int i = 0; i < n; ++i)
      for (std::size_t idx = 0; idx < N; ++idx) work += dt * vol * J[i][idx] * 0.5 * (E_old[i][idx] + E[i][idx]);
    F_prev = F_next;
    faraday(dt, F_next);
  }

  run.final_state = GridField(g, GridKind::TwoForm);
  for (int i = 0; i < n; ++i) {
    std::copy(E[i].begin(), E[i].end(), run.final_state.component(pair_index(n, 0, i + 1)));
    for (int j = i + 1; j < n; ++j) {
      double* dst = run.final_state.component(pair_index(n, i + 1, j + 1));
      for (std::size_t idx = 0; idx < N; ++idx) dst[idx] = 0.5 * (F_prev[i][j][idx] + F_next[i][j][idx]);
    }
  }
  return run;
}

WaveLatticeRun evolve_wave_lattice(const GridField& u0, const GridField& ut0, const WaveLatticeOptions& opt) {
  const Grid& g = u0.grid;
  if (ut0.grid.size() != g.size() || ut0.components != u0.components)
    throw Error(ErrorCode::InvalidArgument, "initial value and velocity grids differ");
  const double dt = opt.dt;
  check_cfl(g, dt);
  const int n = g.n;
  const std::size_t N = g.size();
  const int C = u0.components;
  const auto nb = neighbours(g);
  std::vector<double> inv_h2(n);
  for (int i = 0; i < n; ++i) inv_h2[i] = 1.0 / (g.spacing(i) * g.spacing(i));
  const double vol = g.cell_volume();

  std::vector<SpaceVec<double>> pts(N);
  for (std::size_t idx = 0; idx < N; ++idx) pts[idx] = g.point(idx);

  // Δ_h u − S at time t, per component.
  auto accel = [&](const GridField& u, double t) {
    GridField a(g, u.kind);
    for (int c = 0; c < C; ++c) {
      const double* uc = u.component(c);
      double* ac = a.component(c);
      for (std::size_t idx = 0; idx < N; ++idx) {
        double lap = 0.0;
        for (int i = 0; i < n; ++i) lap += (uc[nb.plus[i][idx]] - 2.0 * uc[idx] + uc[nb.minus[i][idx]]) * inv_h2[i];
        ac[idx] = lap - (opt.source ? opt.source(c, t, pts[idx]) : 0.0);
      }
    }
    return a;
  };
  auto energy = [&](const GridField& a, const GridField& b) {
    double kin = 0.0, pot = 0.0;
    for (int c = 0; c < C; ++c) {
      const double* ac = a.component(c);
      const double* bc = b.component(c);
      for (std::size_t idx = 0; idx < N; ++idx) {
        const double d = (bc[idx] - ac[idx]) / dt;
        kin += d * d;
        for (int i = 0; i < n; ++i) {
          const double ga = ac[nb.plus[i][idx]] - ac[idx];
          const double gb = bc[nb.plus[i][idx]] - bc[idx];
          pot += ga * gb * inv_h2[i];
        }
      }
    }
    return 0.5 * vol * (kin + pot);
  };

  GridField cur = u0, next = u0;
  {
    const auto a = accel(u0, 0.0);
    for (std::size_t k = 0; k < cur.data.size(); ++k) next.data[k] = cur.data[k] + dt * ut0.data[k] + 0.5 * dt * dt * a.data[k];
  }
  WaveLatticeRun run;
  const int every = std::max(1, opt.record_every);
  for (int step = 0; step < opt.steps; ++step) {
    const double t = step * dt;
    if (step % every == 0) {
      run.t.push_back(t);
      run.energy.push_back(energy(cur, next));
      double m = 0.0;
      for (std::size_t idx = 0; idx < N; ++idx) m += cur.component(0)[idx];
      run.mean.push_back(m / static_cast<double>(N));
      if (opt.observer) opt.observer(t, cur);
    }
    const auto a = accel(next, t + dt);
    GridField after = next;
    for (std::size_t k = 0; k < after.data.size(); ++k) after.data[k] = 2.0 * next.data[k] - cur.data[k] + dt * dt * a.data[k];
    cur = std::move(next);
    next = std::move(after);
  }
  run.final_u = std::move(cur);
  return run;
}

// ---------------------------------------------------------------------------
// Particle-in-cell

std::string ScenarioConfig::serialize() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "n=" << n << "\ncoupled_dim=" << coupled_dim << "\nlength=" << length << "\ncells=" << cells << "\ndt=" << dt
     << "\nt_end=" << t_end << "\nbackground=" << background << "\nseed=" << seed << "\nrecord_every=" << record_every
     << "\nvelocity_floor=" << velocity_floor << '\n';
  for (const auto& s : species)
    os << "[species]\nname=" << s.name << "\nmass=" << s.mass << "\ncharge=" << s.charge << "\ndensity=" << s.density
       << "\namplitude=" << s.amplitude << "\nmode=" << s.mode << "\ndrift=" << s.drift << "\nthermal=" << s.thermal
       << "\nparticles=" << s.particles << "\nmobile=" << (s.mobile ? 1 : 0) << '\n';
  return os.str();
}

std::string ScenarioConfig::hash() const {
  // FNV-1a, stable across platforms.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::vector<double> RunRecord::total_energy() const {
  std::vector<double> out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) out[k] = field_energy[k] + kinetic_energy[k];
  return out;
}

void RunRecord::write_ndjson(std::ostream& out) const {
  const auto total = total_energy();
  for (std::size_t k = 0; k < t.size(); ++k) {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    j["t"] = t[k];
    j["field_energy"] = field_energy[k];
    j["kinetic_energy"] = kinetic_energy[k];
    j["total_energy"] = total[k];
    j["gauss_residual"] = gauss_residual[k];
    j["momentum"] = momentum[k];
    j["particle_norm"] = particle_norm[k];
    j["mean_field"] = mean_field[k];
    out << j.dump() << '\n';
  }
  if (velocity_vanished) {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    j["t"] = vanish_time;
    j["status"] = "MasslessZeroVelocity";
    out << j.dump() << '\n';
  }
}

namespace {

// Positions with density ∝ 1 + a cos(2π m x / L) at CDF levels (i + ½)/N.
std::vector<double> quiet_positions(const SpeciesSpec& s, double L) {
  const double k = 2.0 * std::numbers::pi * s.mode / L;
  std::vector<double> x(s.particles);
  for (int i = 0; i < s.particles; ++i) {
    const double target = (i + 0.5) / s.particles * L;
    double y = target;
    if (s.amplitude != 0.0) {
      for (int it = 0; it < 50; ++it) {
        const double f = y + s.amplitude / k * std::sin(k * y) - target;
        const double dy = f / (1.0 + s.amplitude * std::cos(k * y));
        y -= dy;
        if (std::abs(dy) < 1e-15 * L) break;
      }
    }
    x[i] = y;
  }
  return x;
}

double wrap(double x, double L) {
  double y = std::fmod(x, L);
  return y < 0.0 ? y + L : y;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}
void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}
void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw Error(ErrorCode::IoFailure, "truncated particle block");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw Error(ErrorCode::IoFailure, "truncated particle block");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

PicSimulation::PicSimulation(const ScenarioConfig& cfg) : cfg_(cfg) {
  if (cfg.coupled_dim != 1) throw Error(ErrorCode::InvalidArgument, "only one-dimensional coupled runs are implemented");
  if (cfg.cells < 2 || !(cfg.length > 0.0)) throw Error(ErrorCode::InvalidArgument, "bad grid");
  if (!(cfg.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  if (cfg.dt > 0.5 * dx()) throw Error(ErrorCode::CFLViolation, "dt exceeds half the cell width");
  double net = cfg.background * cfg.length;
  std::uint64_t k = 0;
  for (const auto& s : cfg.species) {
    if (s.particles <= 0) throw Error(ErrorCode::InvalidArgument, "species needs particles");
    if (s.mass < 0.0) throw Error(ErrorCode::InvalidArgument, "negative mass");
    Particles p;
    p.spec = s;
    p.weight = s.density * cfg.length / s.particles;
    p.x = quiet_positions(s, cfg.length);
    p.p.assign(s.particles, s.drift);
    if (s.thermal > 0.0) {
      std::mt19937_64 rng(cfg.seed + 7919 * k);
      std::normal_distribution<double> normal(0.0, s.thermal);
      for (auto& v : p.p) v += normal(rng);
    }
    net += s.charge * s.density * cfg.length;
    species_.push_back(std::move(p));
    ++k;
  }
  double scale = std::abs(cfg.background) * cfg.length;
  for (const auto& s : cfg.species) scale += std::abs(s.charge * s.density) * cfg.length;
  if (std::abs(net) > 1e-12 * std::max(scale, 1.0))
    throw Error(ErrorCode::NonZeroMeanSource, "periodic box must be charge neutral");

  // Gauss law E_{j+½} − E_{j−½} = h(ρ_j + background), zero mean.
  const auto rho = charge_density();
  const double h = dx();
  E_.assign(cfg.cells, 0.0);
  for (int j = 1; j < cfg.cells; ++j) E_[j] = E_[j - 1] + h * (rho[j] + cfg.background);
  double mean = 0.0;
  for (double e : E_) mean += e;
  mean /= cfg.cells;
  for (double& e : E_) e -= mean;
  for (const auto& s : species_)
    for (double p : s.p)
      if (s.spec.mass == 0.0 && std::abs(p) < cfg.velocity_floor)
        throw Error(ErrorCode::MasslessZeroVelocity, "massless particle starts below the velocity floor");
}

std::vector<double> PicSimulation::charge_density() const {
  const int M = cfg_.cells;
  const double h = dx();
  std::vector<double> rho(M, 0.0);
  for (const auto& s : species_) {
    const double q = s.spec.charge * s.weight / h;
    for (double x : s.x) {
      const double u = wrap(x, cfg_.length) / h;
      const int j = static_cast<int>(std::floor(u)) % M;
      const double frac = u - std::floor(u);
      rho[j] += q * (1.0 - frac);
      rho[(j + 1) % M] += q * frac;
    }
  }
  return rho;
}

double PicSimulation::field_at(double x) const {
  // Faces sit at (j + ½)h.
  const int M = cfg_.cells;
  const double u = wrap(x, cfg_.length) / dx() - 0.5;
  const double fl = std::floor(u);
  const double frac = u - fl;
  const int j = ((static_cast<int>(fl) % M) + M) % M;
  return (1.0 - frac) * E_[j] + frac * E_[(j + 1) % M];
}

double PicSimulation::energy_of_momentum(const Particles& s, double p) const {
  return std::sqrt(s.spec.mass * s.spec.mass + p * p);
}

void PicSimulation::deposit_current(const Particles& s, const std::vector<double>& x_old, double dt,
                                    std::vector<double>& I) const {
  // Current on face j + ½ is q w/(dt h) times the signed path length inside cell j.
  const int M = cfg_.cells;
  const double h = dx();
  const double c = s.spec.charge * s.weight / (dt * h);
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    double a = x_old[k] / h, b = s.x[k] / h;
    const double sign = b >= a ? 1.0 : -1.0;
    if (b < a) std::swap(a, b);
    for (double lo = a; lo < b;) {
      const double cell = std::floor(lo);
      const double hi = std::min(b, cell + 1.0);
      const int j = static_cast<int>(((static_cast<long long>(cell) % M) + M) % M);
      I[j] += sign * c * (hi - lo) * h;
      lo = hi;
    }
  }
}

void PicSimulation::kick(Particles& s, std::size_t k, double dp) const {
  const double p = s.p[k] + dp;
  // A massless momentum reaching the floor or changing sign has passed through zero speed.
  if (s.spec.mass == 0.0 && (std::abs(p) < cfg_.velocity_floor || (p > 0.0) != (s.p[k] > 0.0)))
    throw Error(ErrorCode::MasslessZeroVelocity, "massless particle momentum reached the floor");
  s.p[k] = p;
}

void PicSimulation::step(double dt) {
  const double half = 0.5 * dt;
  std::vector<double> I(cfg_.cells, 0.0);
  for (auto& s : species_) {
    if (!s.spec.mobile) continue;
    const double q = s.spec.charge;
    std::vector<double> x_old = s.x;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      kick(s, k, half * q * field_at(s.x[k]));
      s.x[k] += dt * s.p[k] / energy_of_momentum(s, s.p[k]);
    }
    deposit_current(s, x_old, dt, I);
  }
  for (int j = 0; j < cfg_.cells; ++j) E_[j] -= dt * I[j];
  for (auto& s : species_) {
    if (!s.spec.mobile) continue;
    for (std::size_t k = 0; k < s.x.size(); ++k) kick(s, k, half * s.spec.charge * field_at(s.x[k]));
  }
  t_ += dt;
}

double PicSimulation::field_energy() const {
  double e = 0.0;
  for (double v : E_) e += v * v;
  return 0.5 * dx() * e;
}

double PicSimulation::kinetic_energy() const {
  double e = 0.0;
  for (const auto& s : species_)
    for (double p : s.p) e += s.weight * (energy_of_momentum(s, p) - s.spec.mass);
  return e;
}

double PicSimulation::momentum() const {
  double m = 0.0;
  for (const auto& s : species_)
    for (double p : s.p) m += s.weight * p;
  return m;
}

double PicSimulation::gauss_residual() const {
  const auto rho = charge_density();
  const int M = cfg_.cells;
  double r = 0.0;
  for (int j = 0; j < M; ++j) {
    const double div = (E_[j] - E_[(j + M - 1) % M]) / dx();
    r = std::max(r, std::abs(div - rho[j] - cfg_.background));
  }
  return r;
}

RunRecord PicSimulation::run() {
  RunRecord rec;
  rec.config_hash = cfg_.hash();
  double norm = 0.0;
  for (const auto& s : species_) norm += s.weight * static_cast<double>(s.x.size());
  auto record = [&] {
    rec.t.push_back(t_);
    rec.field_energy.push_back(field_energy());
    rec.kinetic_energy.push_back(kinetic_energy());
    rec.gauss_residual.push_back(gauss_residual());
    rec.momentum.push_back(momentum());
    rec.particle_norm.push_back(norm);
    double m = 0.0;
    for (double e : E_) m += e;
    rec.mean_field.push_back(m / cfg_.cells);
  };
  const int steps = static_cast<int>(std::llround((cfg_.t_end - t_) / cfg_.dt));
  const int every = std::max(1, cfg_.record_every);
  record();
  for (int k = 1; k <= steps; ++k) {
    try {
      step(cfg_.dt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MasslessZeroVelocity) throw;
      rec.velocity_vanished = true;
      rec.vanish_time = t_;
      break;
    }
    if (k % every == 0 || k == steps) record();
  }
  return rec;
}

RunRecord evolve_coupled(const ScenarioConfig& cfg) {
  try {
    PicSimulation sim(cfg);
    return sim.run();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MasslessZeroVelocity) throw;
    RunRecord rec;
    rec.config_hash = cfg.hash();
    rec.velocity_vanished = true;
    return rec;
  }
}

std::vector<double> uniform_plasma_oracle(const std::vector<SpeciesSpec>& species, double E0,
                                          const std::vector<double>& times) {
  const auto m = species.size();
  ode::State y(m + 1);
  y[0] = E0;
  for (std::size_t k = 0; k < m; ++k) y[k + 1] = species[k].drift;
  ode::Rhs rhs = [&](double, const ode::State& s, ode::State& dy) {
    dy.resize(s.size());
    dy[0] = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const auto& sp = species[k];
      const double p = s[k + 1];
      if (!sp.mobile) {
        dy[k + 1] = 0.0;
        continue;
      }
      dy[0] -= sp.charge * sp.density * p / std::sqrt(sp.mass * sp.mass + p * p);
      dy[k + 1] = sp.charge * s[0];
    }
  };
  ode::Options opt;
  opt.tol = 1e-12;
  std::vector<double> out;
  double t = 0.0;
  for (double target : times) {
    if (target > t) {
      y = ode::dopri45(rhs, t, y, target, opt).y.back();
      t = target;
    }
    out.push_back(y[0]);
  }
  return out;
}

void write_particle_block(std::ostream& out, const Particles& s) {
  out.write("PBLK", 4);
  put_u32(out, 1);
  put_u32(out, 1);
  put_f64(out, s.spec.mass);
  put_f64(out, s.spec.charge);
  put_f64(out, s.weight);
  put_u64(out, s.x.size());
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    put_u64(out, k);
    put_f64(out, s.x[k]);
    put_f64(out, s.p[k]);
  }
  if (!out) throw Error(ErrorCode::IoFailure, "failed to write particle block");
}

Particles read_particle_block(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PBLK", 4) != 0) throw Error(ErrorCode::IoFailure, "missing particle block magic");
  if (get_u32(in) != 1) throw Error(ErrorCode::IoFailure, "unsupported particle block version");
  if (get_u32(in) != 1) throw Error(ErrorCode::IoFailure, "only one-dimensional particle blocks are supported");
  Particles s;
  s.spec.mass = get_f64(in);
  s.spec.charge = get_f64(in);
  s.weight = get_f64(in);
  const auto count = get_u64(in);
  s.x.resize(count);
  s.p.resize(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto id = get_u64(in);
    if (id >= count) throw Error(ErrorCode::IoFailure, "particle id out of range");
    s.x[id] = get_f64(in);
    s.p[id] = get_f64(in);
  }
  return s;
}

void PicSimulation::write_checkpoint(std::ostream& out) const {
  Grid g;
  g.n = 1;
  g.dims = {cfg_.cells};
  g.lo = Vec::Zero(1);
  g.hi = Vec::Constant(1, cfg_.length);
  GridField f(g, GridKind::TwoForm);
  std::copy(E_.begin(), E_.end(), f.component(0));
  write_grid(out, f);
  put_f64(out, t_);
  put_u32(out, static_cast<std::uint32_t>(species_.size()));
  for (const auto& s : species_) write_particle_block(out, s);
}

void PicSimulation::read_checkpoint(std::istream& in) {
  const auto f = read_grid(in);
  if (f.grid.n != 1 || f.grid.dims[0] != cfg_.cells || f.kind != GridKind::TwoForm)
    throw Error(ErrorCode::IoFailure, "checkpoint grid does not match the configuration");
  const double t = get_f64(in);
  if (get_u32(in) != species_.size()) throw Error(ErrorCode::IoFailure, "checkpoint species count mismatch");
  std::vector<Particles> loaded;
  for (const auto& s : species_) {
    auto p = read_particle_block(in);
    if (p.x.size() != s.x.size() || p.spec.mass != s.spec.mass || p.spec.charge != s.spec.charge)
      throw Error(ErrorCode::IoFailure, "checkpoint species does not match the configuration");
    p.spec = s.spec;
    loaded.push_back(std::move(p));
  }
  species_ = std::move(loaded);
  E_.assign(f.component(0), f.component(0) + cfg_.cells);
  t_ = t;
}

}  // namespace vmlab
