#include "vmlab/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace vmlab {
namespace {

void require_massless_velocity(double mass, const SpaceVec<double>& v) {
  if (mass == 0.0 && v.norm() == 0.0)
    throw Error(ErrorCode::MasslessZeroVelocity, "massless transport needs |v| > 0");
}

double incoming_velocity(const SpaceVec<double>& x, const SpaceVec<double>& v, double mass) {
  const double r = x.norm();
  if (r == 0.0) throw Error(ErrorCode::DegenerateRadius, "v^Lbar needs |x| > 0");
  return 0.5 * (energy_of(v, mass) - x.dot(v) / r);
}

double tau_minus(const PhasePoint<double>& p) {
  const double u = p.t - p.x.norm();
  return std::sqrt(1.0 + u * u);
}

// Shared evaluation of (v⁰)^q |z^γ Ẑ^β f| for every (β, γ) pair at a node.
struct MomentPlan {
  std::vector<OpChain> betas;
  std::vector<std::vector<WeightSpec>> gammas;
  double q = 0.0;
  bool incoming = false;
  bool signed_values = false;

  std::size_t size() const { return betas.size() * gammas.size(); }

  void accumulate(const PhaseFunction& f, const PhasePoint<double>& p, double mass, double w,
                  std::vector<double>& acc) const {
    double base = w * std::pow(energy_of(p.v, mass), q);
    if (incoming) base *= incoming_velocity(p.x, p.v, mass);
    if (base == 0.0) return;
    const std::size_t G = gammas.size();
    for (std::size_t b = 0; b < betas.size(); ++b) {
      double val = apply_ops(betas[b], f, p, mass);
      if (val == 0.0) continue;
      for (std::size_t g = 0; g < G; ++g) {
        double prod = val;
        for (const auto& z : gammas[g]) prod *= z(p, mass);
        acc[b * G + g] += base * (signed_values ? prod : std::abs(prod));
      }
    }
  }
};

struct MomentResult {
  std::vector<double> values;
  double error = 0.0;
  bool converged = true;
};

double x_support_radius(const SupportHint& h) {
  return std::isfinite(h.x_radius) ? h.x_radius : envelope_radius(h.x_scale);
}

double v_support_radius(const SupportHint& h) {
  return h.velocity_compact() ? h.v_radius : envelope_radius(h.v_scale);
}

std::vector<double> moments_at_level(const PhaseFunction& f, const SpacetimePoint<double>& p,
                                     double mass, const MomentPlan& plan,
                                     const VelocityQuadOptions& opt, int level) {
  const int n = p.dim();
  std::vector<double> acc(plan.size(), 0.0);
  const int panels = opt.panels << level;
  const int order = opt.sphere_order + 2 * level;
  const bool pullback = mass > 0.0 && p.t >= opt.pullback_min_t;
  PhasePoint<double> q{p.t, p.x, SpaceVec<double>(n)};
  if (!pullback) {
    quad::CloudRule rule =
        quad::radial_spherical(n, 0.0, v_support_radius(f.support()), opt.radial_nodes, panels, order);
    for (Eigen::Index k = 0; k < rule.size(); ++k) {
      q.v = rule.nodes.col(k);
      plan.accumulate(f, q, mass, rule.weights[k], acc);
    }
    return acc;
  }
  // v = m y/√(1−|y|²), y = (x − w)/t; dv = mⁿ(1−|y|²)^{−(n+2)/2} t^{−n} dw.
  // The integrand lives on B(0, R) ∩ B(x, t). When |x − w| = t cuts the core of the
  // datum, integrate in polar coordinates about x so that the cut is a coordinate face.
  // Gaussian envelopes are cut to their core (six widths, 1e-7 of the mass) there.
  const double R = x_support_radius(f.support()) + opt.x_margin;
  const double core =
      (std::isfinite(f.support().x_radius) ? x_support_radius(f.support()) : 0.75 * x_support_radius(f.support())) +
      opt.x_margin;
  const double rx = p.x.norm();
  if (rx >= p.t + R) return acc;
  const bool around_x = rx + core > p.t;
  quad::CloudRule rule;
  if (!around_x) {
    rule = quad::radial_spherical(n, 0.0, R, opt.radial_nodes, panels, order);
  } else if (rx <= core) {
    rule = quad::radial_spherical(n, 0.0, p.t, opt.radial_nodes, panels, order);
  } else {
    rule = quad::cap_rule(-p.x / rx, std::asin(core / rx), rx - core, p.t, opt.radial_nodes, panels,
                          order);
  }
  const double scale = std::pow(mass / p.t, n);
  for (Eigen::Index k = 0; k < rule.size(); ++k) {
    SpaceVec<double> y = around_x ? SpaceVec<double>(-rule.nodes.col(k) / p.t)
                                  : SpaceVec<double>((p.x - rule.nodes.col(k)) / p.t);
    const double s = 1.0 - y.squaredNorm();
    if (s <= 0.0) continue;
    q.v = (mass / std::sqrt(s)) * y;
    plan.accumulate(f, q, mass, rule.weights[k] * scale * std::pow(s, -0.5 * (n + 2)), acc);
  }
  return acc;
}

MomentResult velocity_moments(const PhaseFunction& f, const SpacetimePoint<double>& p, double mass,
                              const MomentPlan& plan, const VelocityQuadOptions& opt) {
  MomentResult res;
  res.values = moments_at_level(f, p, mass, plan, opt, 0);
  if (opt.max_refinements <= 0) {
    res.converged = false;
    return res;
  }
  for (int level = 1; level <= opt.max_refinements; ++level) {
    std::vector<double> fine = moments_at_level(f, p, mass, plan, opt, level);
    res.error = 0.0;
    res.converged = true;
    for (std::size_t i = 0; i < fine.size(); ++i) {
      const double d = std::abs(fine[i] - res.values[i]);
      res.error = std::max(res.error, d);
      if (d > opt.rel_tol * std::abs(fine[i]) + opt.abs_tol) res.converged = false;
    }
    res.values = std::move(fine);
    if (res.converged) return res;
  }
  if (opt.check_convergence)
    throw Error(ErrorCode::QuadratureNotConverged, "velocity average did not converge");
  return res;
}

}  // namespace

double transport_apply(double mass, const PhaseFunction& f, const FieldSampler& F,
                       const PhasePoint<double>& p, double charge) {
  require_massless_velocity(mass, p.v);
  return apply_ops(OpChain{TransportOp{F, charge}}, f, p, mass);
}

double weight_eval(const WeightSpec& z, const PhasePoint<double>& p, double mass) {
  if (mass == 0.0) require_massless_velocity(mass, p.v);
  return z(p, mass);
}

Characteristic integrate_characteristic(double mass, const FieldSampler& F, double t0,
                                        const SpaceVec<double>& x0, const SpaceVec<double>& v0,
                                        double span, const CharacteristicOptions& opt) {
  require_massless_velocity(mass, v0);
  const Eigen::Index n = x0.size();
  const bool has_field = F && !F.is_zero();
  ode::Rhs rhs = [&](double s, const ode::State& y, ode::State& dy) {
    SpaceVec<double> X = y.head(n), V = y.tail(n);
    const double e0 = energy_of(V, mass);
    dy.resize(2 * n);
    dy.head(n) = V / e0;
    dy.tail(n).setZero();
    if (has_field) {
      STMatd Fm = F(s, X);
      for (Eigen::Index j = 1; j <= n; ++j) {
        double a = Fm(0, j);
        for (Eigen::Index i = 1; i <= n; ++i) a += V[i - 1] / e0 * Fm(i, j);
        dy[n + j - 1] = opt.charge * a;
      }
    }
  };
  // |V| can pass through zero inside a step without |V|² changing sign, so the
  // event also fires when V reverses against the step's left state.
  ode::Event event;
  ode::Confirm confirm;
  if (mass == 0.0) {
    const double floor = opt.velocity_floor;
    event = [n, floor](double, const ode::State& y, const ode::State& left) {
      auto V = y.tail(n);
      return std::min(V.squaredNorm() - floor * floor, V.dot(left.tail(n)));
    };
    confirm = [n, floor](double, const ode::State& y) {
      return y.tail(n).norm() <= std::max(1e-6, floor);
    };
  }
  ode::State y0(2 * n);
  y0 << x0, v0;
  ode::Options oo;
  oo.tol = opt.tol;
  ode::Solution sol = ode::dopri45(rhs, t0, y0, t0 + span, oo, event, confirm);
  Characteristic c;
  c.mass = mass;
  c.s = sol.s;
  for (const auto& y : sol.y) {
    c.X.emplace_back(y.head(n));
    c.V.emplace_back(y.tail(n));
  }
  c.steps = sol.steps;
  c.max_local_error = sol.max_local_error;
  if (sol.event_hit) {
    c.status = CharacteristicStatus::VelocityVanished;
    c.vanish_time = sol.event_s;
  }
  return c;
}

double weight_drift(const WeightSpec& z, const Characteristic& c) {
  if (c.size() == 0) return 0.0;
  const double z0 = z(c.point(0), c.mass);
  double drift = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) drift = std::max(drift, std::abs(z(c.point(k), c.mass) - z0));
  return drift;
}

void write_ensemble(std::ostream& os, const std::vector<Characteristic>& ensemble) {
  for (std::size_t id = 0; id < ensemble.size(); ++id) {
    const auto& c = ensemble[id];
    nlohmann::json rec;
    rec["id"] = id;
    rec["mass"] = c.mass;
    nlohmann::json samples = nlohmann::json::array();
    for (std::size_t k = 0; k < c.size(); ++k) {
      std::vector<double> row{c.s[k]};
      row.insert(row.end(), c.X[k].begin(), c.X[k].end());
      row.insert(row.end(), c.V[k].begin(), c.V[k].end());
      samples.push_back(row);
    }
    rec["samples"] = std::move(samples);
    rec["status"] = c.status == CharacteristicStatus::Completed ? "completed" : "velocity_vanished";
    if (c.status == CharacteristicStatus::VelocityVanished) rec["vanish_time"] = c.vanish_time;
    os << rec.dump() << '\n';
  }
}

ExtraDecayCheck extradecay_identities(const PhasePoint<double>& p, double mass, double tol) {
  const int n = p.dim();
  const double r = p.x.norm();
  if (r == 0.0) throw Error(ErrorCode::DegenerateRadius, "extra-decay identities need r > 0");
  NullVelocity<double> nv = null_velocity_components(p.x, p.v, mass);
  const double v0 = energy_of(p.v, mass);
  const double s = p.x.dot(p.v) - p.t * v0;
  double xz = 0.0;
  for (int i = 0; i < n; ++i) xz += p.x[i] * (p.x[i] * v0 - p.t * p.v[i]);
  xz /= r;
  ExtraDecayCheck c;
  c.outgoing_residual = std::abs(2.0 * (p.t - r) * nv.vL + xz + s);
  c.incoming_residual = std::abs(2.0 * (p.t + r) * nv.vLbar - xz + s);
  c.vB_norm = nv.vB.norm();
  c.sqrt_vL_vLbar = std::sqrt(std::max(0.0, nv.vL * nv.vLbar));
  c.vLbar = nv.vLbar;
  c.mass_bound = mass * mass / (4.0 * v0);
  double zsum = 0.0;
  for (const auto& z : k1_weights(n)) zsum += std::abs(z(p, mass));
  const double tau_plus = std::sqrt(1.0 + (p.t + r) * (p.t + r));
  c.angular_ratio = zsum > 0.0 ? tau_plus * c.vB_norm / v0 / zsum : 0.0;
  c.angular_bound_ok = c.vB_norm <= 2.0 * c.sqrt_vL_vLbar * (1.0 + tol) + tol;
  c.mass_bound_ok = c.mass_bound <= c.vLbar * (1.0 + tol);
  return c;
}

double good_derivative_residual(const PhaseFunction& f, const PhasePoint<double>& p, double mass) {
  require_massless_velocity(mass, p.v);
  const int n = p.dim();
  const double v0 = energy_of(p.v, mass);
  std::vector<double> d(n + 1);
  for (int mu = 0; mu <= n; ++mu) d[mu] = apply_vf(VectorFieldSpec::translation(mu), f, p, mass);
  const double Sf = apply_vf(VectorFieldSpec::scaling(), f, p, mass);
  const double Tf = transport_apply(mass, f, FieldSampler{}, p);
  double rhs1 = v0 * Sf;
  for (int i = 1; i <= n; ++i) rhs1 += (p.t * p.v[i - 1] - p.x[i - 1] * v0) * d[i];
  double worst = std::abs(p.t * Tf - rhs1);
  for (int i = 1; i <= n; ++i) {
    const double Xi = d[i] + p.v[i - 1] / v0 * d[0];
    const double Of = apply_vf(VectorFieldSpec::boost(i), f, p, mass);
    const double rhs2 = v0 * Of + (p.t * p.v[i - 1] - p.x[i - 1] * v0) * d[0];
    worst = std::max(worst, std::abs(p.t * v0 * Xi - rhs2));
  }
  return worst;
}

VDerivativeRatios vderivative_ratios(const PhaseFunction& f, const PhasePoint<double>& p,
                                     double mass) {
  const int n = p.dim();
  NullFrame<double> fr = null_frame(p.x);
  SpaceVec<double> gv(n);
  for (int j = 0; j < n; ++j) {
    PhaseTangent<double> dir{0.0, SpaceVec<double>::Zero(n), SpaceVec<double>::Unit(n, j)};
    gv[j] = f(seed_point(p, dir), mass).der;
  }
  const double gr = fr.radial.dot(gv);
  double gB = 0.0;
  for (int B = 0; B < n - 1; ++B) gB += std::pow(fr.sphere.col(B).dot(gv), 2);
  gB = std::sqrt(gB);
  double sum_z = 0.0, sum_zz = 0.0;
  const auto k1 = k1_weights(n);
  for (const auto& Z : vector_field_set(FieldSet::PHat0, n)) {
    const double zf = std::abs(apply_vf(Z, f, p, mass));
    sum_z += zf;
    for (const auto& w : k1) sum_zz += std::abs(w(p, mass)) * zf;
  }
  const double v0 = energy_of(p.v, mass);
  const double tm = tau_minus(p);
  VDerivativeRatios r;
  // (∇_v f)^L = ½∂_r f and (∇_v f)^L̄ = −½∂_r f since the time component vanishes.
  if (sum_z > 0.0) {
    r.outgoing = v0 * 0.5 * std::abs(gr) / (tm * sum_z);
    r.incoming = r.outgoing;
  }
  if (sum_zz > 0.0) r.angular = incoming_velocity(p.x, p.v, mass) * gB / (tm * sum_zz);
  return r;
}

double envelope_radius(double scale) { return scale * std::sqrt(2.0 * std::log(1e14)); }

quad::Result velocity_average(const PhaseFunction& f, const SpacetimePoint<double>& p, double mass,
                              const VelocityMoment& mom, const VelocityQuadOptions& opt) {
  quad::Result out{0.0, 0.0, 0, true};
  if (f.is_zero()) return out;
  MomentPlan plan{{chain_of(mom.beta)}, {mom.gamma}, mom.q, mom.incoming_null_factor,
                  mom.signed_integrand};
  MomentResult r = velocity_moments(f, p, mass, plan, opt);
  out.value = r.values[0];
  out.error = r.error;
  out.converged = r.converged;
  return out;
}

PhaseFlow free_flow(double mass) {
  return [mass](double t, SpaceVec<double>& x, SpaceVec<double>& v) {
    x += (t / energy_of(v, mass)) * v;
  };
}

PhaseFlow constant_field_flow(double mass, double charge, const SpaceVec<double>& E) {
  if (mass <= 0.0) throw Error(ErrorCode::InvalidArgument, "constant-field flow needs m > 0");
  SpaceVec<double> b = charge * E;
  return [mass, b](double t, SpaceVec<double>& x, SpaceVec<double>& v) {
    constant_field_map(mass, b, t, x, v);
  };
}

FieldSampler constant_electric_field(const SpaceVec<double>& E) {
  const int n = static_cast<int>(E.size());
  return FieldSampler::analytic(n, [E, n](const auto& t, const auto&) {
    using T = std::remove_cvref_t<decltype(t)>;
    STMat<T> F = STMat<T>::Zero(n + 1, n + 1);
    for (int j = 1; j <= n; ++j) {
      F(0, j) = T(E[j - 1]);
      F(j, 0) = T(-E[j - 1]);
    }
    return F;
  });
}

PhaseFunction evolve_free(const PhaseFunction& f0, double mass) {
  return PhaseFunction::analytic(
      [f0, mass](const auto& p, double) {
        using T = std::remove_cvref_t<decltype(p.t)>;
        PhasePoint<T> q{T(0.0), p.x - (p.t / energy_of(p.v, mass)) * p.v, p.v};
        return f0(q, mass);
      },
      f0.support());
}

PhaseFunction evolve_in_constant_field(const PhaseFunction& f0, double mass, double charge,
                                       const SpaceVec<double>& E) {
  if (mass <= 0.0) throw Error(ErrorCode::InvalidArgument, "constant-field flow needs m > 0");
  SpaceVec<double> b = charge * E;
  return PhaseFunction::analytic(
      [f0, mass, b](const auto& p, double) {
        using T = std::remove_cvref_t<decltype(p.t)>;
        PhasePoint<T> q{T(0.0), p.x, p.v};
        constant_field_map(mass, b, T(-p.t), q.x, q.v);
        return f0(q, mass);
      },
      f0.support());
}

PhaseRule phase_rule(int n, double t, double x_radius, double v_radius, const PhaseRuleOptions& opt) {
  quad::CloudRule xr = quad::radial_spherical(n, 0.0, x_radius, opt.x_radial, opt.panels, opt.sphere_order);
  quad::CloudRule vr = quad::radial_spherical(n, 0.0, v_radius, opt.v_radial, opt.panels, opt.sphere_order);
  PhaseRule r;
  r.nodes.reserve(static_cast<std::size_t>(xr.size() * vr.size()));
  for (Eigen::Index a = 0; a < xr.size(); ++a)
    for (Eigen::Index b = 0; b < vr.size(); ++b) {
      r.nodes.push_back({t, xr.nodes.col(a), vr.nodes.col(b)});
      r.weights.push_back(xr.weights[a] * vr.weights[b]);
    }
  return r;
}

PhaseRule push_forward(const PhaseRule& r, const PhaseFlow& flow, double t) {
  PhaseRule out = r;
  for (auto& p : out.nodes) {
    flow(t - p.t, p.x, p.v);
    p.t = t;
  }
  return out;
}

std::vector<std::vector<WeightSpec>> weight_words(const std::vector<WeightSpec>& set, int q) {
  std::vector<std::vector<WeightSpec>> out{{}};
  std::vector<std::vector<std::size_t>> idx{{}};
  for (int len = 1; len <= q; ++len) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& w : idx) {
      if (static_cast<int>(w.size()) != len - 1) continue;
      const std::size_t start = w.empty() ? 0 : w.back();
      for (std::size_t i = start; i < set.size(); ++i) {
        auto e = w;
        e.push_back(i);
        next.push_back(e);
      }
    }
    for (const auto& w : next) {
      std::vector<WeightSpec> word;
      for (std::size_t i : w) word.push_back(set[i]);
      out.push_back(std::move(word));
    }
    idx.insert(idx.end(), next.begin(), next.end());
  }
  return out;
}

EnergyReport kinetic_energy(const PhaseFunction& f, double t, int N, int q, bool massless_weights,
                            double k, const KineticEnergyOptions& opt) {
  EnergyReport rep;
  rep.name = "kinetic";
  if (f.is_zero()) {
    rep.add("slice", 0.0, 0.0);
    return rep;
  }
  const int n = opt.dim;
  const SupportHint& hint = f.support();
  const double Rx = x_support_radius(hint), Rv = v_support_radius(hint);
  const auto words = enumerate_words(vector_field_set(FieldSet::PHat0, n), N);
  const auto gammas = weight_words(massless_weights ? k0_weights(n) : k1_weights(n), q);
  MomentPlan plan;
  for (const auto& w : words) plan.betas.push_back(chain_of(w));
  plan.gammas = gammas;
  plan.q = k;

  auto slice = [&](const PhaseRuleOptions& ro) {
    PhaseRule r = opt.flow ? push_forward(phase_rule(n, 0.0, Rx, Rv, ro), *opt.flow, t)
                           : phase_rule(n, t, Rx + t, Rv, ro);
    std::vector<double> acc(plan.size(), 0.0);
    for (std::size_t a = 0; a < r.nodes.size(); ++a) plan.accumulate(f, r.nodes[a], opt.mass, r.weights[a], acc);
    return acc;
  };
  PhaseRuleOptions fine_opt = opt.rule;
  fine_opt.x_radial += 2;
  fine_opt.v_radial += 2;
  fine_opt.sphere_order += 2;
  std::vector<double> coarse = slice(opt.rule), fine = slice(fine_opt);

  std::vector<double> cone(plan.size(), 0.0), cone_err(plan.size(), 0.0);
  if (opt.include_cone) {
    MomentPlan cplan = plan;
    cplan.q = k - 1.0;
    cplan.incoming = true;
    const int steps = static_cast<int>(std::floor((t + Rx) / opt.u_spacing + 1e-9));
    for (int iu = 0; iu <= steps; ++iu) {
      const double u = -Rx + iu * opt.u_spacing;
      if (t - u <= 0.0) continue;
      ConeSlice cs = cone_slice(n, u, t, opt.cone_radial, opt.cone_sphere_order);
      std::vector<double> flux(plan.size(), 0.0), ferr(plan.size(), 0.0);
      for (std::size_t a = 0; a < cs.nodes.size(); ++a) {
        MomentResult m = velocity_moments(f, cs.nodes[a], opt.mass, cplan, opt.velocity);
        for (std::size_t e = 0; e < flux.size(); ++e) {
          flux[e] += cs.weights[a] * m.values[e];
          ferr[e] += cs.weights[a] * m.error;
        }
      }
      for (std::size_t e = 0; e < flux.size(); ++e)
        if (flux[e] > cone[e]) {
          cone[e] = flux[e];
          cone_err[e] = ferr[e];
        }
    }
  }

  const std::size_t G = gammas.size();
  for (std::size_t b = 0; b < words.size(); ++b)
    for (std::size_t g = 0; g < G; ++g) {
      std::string label = words[b].name() + "|";
      for (std::size_t i = 0; i < gammas[g].size(); ++i) label += (i ? "." : "") + gammas[g][i].name();
      if (gammas[g].empty()) label += "1";
      const std::size_t e = b * G + g;
      rep.add("slice:" + label, fine[e], std::abs(fine[e] - coarse[e]));
      if (opt.include_cone) rep.add("cone:" + label, cone[e], cone_err[e]);
    }
  if (opt.check_convergence) {
    double slice_err = 0.0, slice_val = 0.0;
    for (std::size_t e = 0; e < fine.size(); ++e) {
      slice_err += std::abs(fine[e] - coarse[e]);
      slice_val += fine[e];
    }
    if (slice_err > opt.rel_tol * slice_val + 1e-14)
      throw Error(ErrorCode::QuadratureNotConverged, "kinetic energy slice did not converge");
  }
  return rep;
}

}  // namespace vmlab
