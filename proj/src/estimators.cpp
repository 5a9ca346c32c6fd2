#include "vmlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace vmlab {

void InequalityReport::finish(double threshold_value) {
  threshold = threshold_value;
  if (rhs == 0.0) {
    ratio = lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    ratio = lhs / rhs;
  }
  verdict = std::isfinite(ratio) && ratio <= threshold;
}

double InequalityReport::param(const std::string& key) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  throw Error(ErrorCode::InvalidArgument, "report has no parameter " + key);
}

std::string to_ndjson(const InequalityReport& r) {
  nlohmann::ordered_json j;
  j["check"] = r.check;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["ratio"] = r.ratio;
  if (std::isfinite(r.threshold)) {
    j["threshold"] = r.threshold;
  } else {
    j["threshold"] = nullptr;
  }
  j["verdict"] = r.verdict ? "pass" : "fail";
  return j.dump();
}

double student_t975(int dof) {
  static constexpr double kTable[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                      2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                      2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                      2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) return std::numeric_limits<double>::infinity();
  if (dof <= 30) return kTable[dof - 1];
  return 1.959964 + 2.37 / dof;
}

std::vector<double> log_spaced(double a, double b, int count) {
  std::vector<double> out;
  if (count == 1) return {a};
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(la + (lb - la) * i / (count - 1)));
  out.front() = a;
  out.back() = b;
  return out;
}

DecayFit fit_decay(const std::vector<std::pair<double, double>>& samples, double t_min, double t_max) {
  DecayFit fit;
  fit.samples = samples;
  fit.t_min = t_min;
  fit.t_max = t_max;
  std::vector<double> X, Y;
  for (const auto& [t, v] : samples) {
    if (t < t_min * (1.0 - 1e-12) || t > t_max * (1.0 + 1e-12) || !(v > 0.0)) continue;
    X.push_back(std::log(t));
    Y.push_back(std::log(v));
  }
  const std::size_t N = X.size();
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "decay fit needs two positive samples in the window");
  Eigen::MatrixXd A(N, 2);
  Eigen::VectorXd y(N);
  for (std::size_t i = 0; i < N; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = X[i];
    y[i] = Y[i];
  }
  Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  fit.intercept = c[0];
  fit.slope = c[1];
  if (N > 2) {
    const double sse = (A * c - y).squaredNorm();
    const double xm = std::accumulate(X.begin(), X.end(), 0.0) / static_cast<double>(N);
    double sxx = 0.0;
    for (double x : X) sxx += (x - xm) * (x - xm);
    fit.slope_stderr = std::sqrt(sse / static_cast<double>(N - 2) / sxx);
  }
  const double half = student_t975(static_cast<int>(N) - 2) * fit.slope_stderr;
  fit.ci_low = fit.slope - (N > 2 ? half : 0.0);
  fit.ci_high = fit.slope + (N > 2 ? half : 0.0);
  return fit;
}

Calibration Calibration::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open calibration file " + path);
  Calibration c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(ErrorCode::IoFailure, path + ":" + std::to_string(lineno) + ": expected name<TAB>value");
    try {
      c.constants[line.substr(0, tab)] = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::IoFailure, path + ":" + std::to_string(lineno) + ": bad value");
    }
  }
  return c;
}

void Calibration::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write calibration file " + path);
  out << "# check\tC_emp\n";
  for (const auto& [k, v] : constants) out << k << '\t' << std::setprecision(10) << v << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "calibration write failed");
}

std::optional<double> Calibration::get(const std::string& name) const {
  auto it = constants.find(name);
  if (it == constants.end()) return std::nullopt;
  return it->second;
}

double Calibration::threshold(const std::string& name) const {
  auto c = get(name);
  return c ? factor * *c : std::numeric_limits<double>::infinity();
}

double calibrated_constant(const std::vector<InequalityReport>& reports) {
  double m = 0.0;
  for (const auto& r : reports) m = std::max(m, r.ratio);
  return 1.2 * m;
}

// Integral estimate.

namespace {

void require_integral_hypothesis(double a, double b, int m) {
  if (m < 1) throw Error(ErrorCode::HypothesisViolated, "integral estimate needs m >= 1");
  if (!(a + b > m)) throw Error(ErrorCode::HypothesisViolated, "integral estimate needs a + b > m");
  if (b == 1.0) throw Error(ErrorCode::HypothesisViolated, "integral estimate excludes b = 1");
}

}  // namespace

double integral_lhs(double a, double b, int m, double t) {
  require_integral_hypothesis(a, b, m);
  auto g = [=](double r) {
    const double tp = std::sqrt(1.0 + (t + r) * (t + r));
    const double tm = std::sqrt(1.0 + (t - r) * (t - r));
    return std::pow(r, m - 1) * std::pow(tp, -a) * std::pow(tm, -b);
  };
  std::vector<double> edges{0.0};
  if (t > 2.0) edges.push_back(t - 2.0);
  edges.push_back(t + 2.0);
  const double R = 2.0 * t + 4.0;
  edges.push_back(R);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    sum += quad::integrate(g, edges[i], edges[i + 1], 1e-15, 1e-12).value;
  // r = R e^s; the tail decays like e^{−(a+b−m)s}.
  const double S = std::min(40.0 / (a + b - m), 120.0);
  sum += quad::integrate([&](double s) { return g(R * std::exp(s)) * R * std::exp(s); }, 0.0, S,
                         1e-15, 1e-12)
             .value;
  return sum;
}

double integral_shape(double a, double b, int m, double t) {
  return (1.0 + std::pow(t, b - 1.0)) / (1.0 + std::pow(t, a + b - m));
}

std::string integral_check_name(double a, double b, int m) {
  std::ostringstream os;
  os << "intesti[a=" << a << ",b=" << b << ",m=" << m << "]";
  return os.str();
}

InequalityReport integral_estimate_check(double a, double b, int m, double t, double threshold) {
  InequalityReport r;
  r.check = integral_check_name(a, b, m);
  r.params = {{"a", a}, {"b", b}, {"m", m}, {"t", t}};
  r.lhs = integral_lhs(a, b, m, t);
  r.rhs = integral_shape(a, b, m, t);
  r.finish(threshold);
  return r;
}

std::vector<IntegralTriple> integral_triples() {
  return {{2.0, 2.0, 1}, {0.0, 2.0, 1}, {3.0, 0.5, 2}, {4.0, 2.0, 4}, {1.5, 1.5, 2},
          {5.0, 0.0, 4}, {2.5, 3.0, 4}, {4.0, 0.5, 4}, {3.0, 2.0, 3}, {1.0, 3.0, 2}};
}

std::vector<double> integral_calibration_times() { return {0.0, 0.05, 0.5, 5.0, 50.0, 500.0, 5000.0}; }

std::vector<double> integral_sweep_times() {
  std::vector<double> t{0.0};
  for (double s : log_spaced(1e-2, 1e4, 19)) t.push_back(s);
  return t;
}

// Phase-space norms.

namespace {

struct Proposal {
  int n = 0;
  bool ball = false;
  double scale = 1.0;

  static Proposal for_block(int n, double radius, double scale, double widen) {
    Proposal p;
    p.n = n;
    p.ball = std::isfinite(radius);
    p.scale = p.ball ? radius : widen * scale;
    return p;
  }
  static int uniforms(int n) { return 2 * ((n + 1) / 2) + 1; }

  /// Maps uniforms to a point and returns its density.
  double draw(const double* u, SpaceVec<double>& y) const {
    y.resize(n);
    for (int k = 0; 2 * k < n; ++k) {
      const double u1 = std::max(u[2 * k], 1e-300), u2 = u[2 * k + 1];
      const double rad = std::sqrt(-2.0 * std::log(u1));
      y[2 * k] = rad * std::cos(2.0 * std::numbers::pi * u2);
      if (2 * k + 1 < n) y[2 * k + 1] = rad * std::sin(2.0 * std::numbers::pi * u2);
    }
    if (ball) {
      const double r = scale * std::pow(u[uniforms(n) - 1], 1.0 / n);
      y *= r / std::max(y.norm(), 1e-300);
      return 1.0 / (quad::ball_volume(n) * std::pow(scale, n));
    }
    const double r2 = y.squaredNorm();
    y *= scale;
    return std::exp(-0.5 * r2) / std::pow(2.0 * std::numbers::pi * scale * scale, 0.5 * n);
  }
};

struct PhaseSampler {
  Proposal px, pv;
  quad::Halton halton;
  int samples;

  PhaseSampler(const PhaseFunction& f, int n, const PhaseNormOptions& opt)
      : px(Proposal::for_block(n, f.support().x_radius, f.support().x_scale, opt.widen)),
        pv(Proposal::for_block(n, f.support().v_radius, f.support().v_scale, opt.widen)),
        halton(2 * Proposal::uniforms(n), opt.seed),
        samples(opt.samples) {}

  /// Initial point and importance weight 1/(pdf·N).
  double node(int i, SpaceVec<double>& x, SpaceVec<double>& v) const {
    Eigen::VectorXd u = halton.point(static_cast<std::uint64_t>(i));
    const double dx = px.draw(u.data(), x);
    const double dv = pv.draw(u.data() + Proposal::uniforms(px.n), v);
    return 1.0 / (dx * dv * samples);
  }
};

PhaseFunction unit_function() {
  return PhaseFunction::analytic([](const auto& p, double) { return decltype(p.t)(1.0); });
}

}  // namespace

PhaseNormTable phase_norms(const PhaseFunction& f, int n, double mass,
                           const std::vector<WeightSpec>& weights, int order,
                           const PhaseNormOptions& opt) {
  PhaseNormTable tab;
  tab.weights = weights;
  tab.words = enumerate_words(vector_field_set(FieldSet::PHat0, n), order);
  tab.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(weights.size()),
                                     static_cast<Eigen::Index>(tab.words.size()));
  if (f.is_zero()) return tab;
  std::vector<OpChain> chains;
  for (const auto& w : tab.words) chains.push_back(chain_of(w));
  PhaseSampler sampler(f, n, opt);
  std::vector<double> zf(tab.words.size()), zw(weights.size());
  for (int i = 0; i < opt.samples; ++i) {
    PhasePoint<double> p{0.0, SpaceVec<double>(n), SpaceVec<double>(n)};
    const double w = sampler.node(i, p.x, p.v);
    for (std::size_t b = 0; b < chains.size(); ++b) zf[b] = apply_ops(chains[b], f, p, mass);
    for (std::size_t a = 0; a < weights.size(); ++a) zw[a] = weights[a](p, mass);
    for (std::size_t a = 0; a < weights.size(); ++a)
      for (std::size_t b = 0; b < chains.size(); ++b)
        tab.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += w * std::abs(zw[a] * zf[b]);
  }
  return tab;
}

double source_integral(const PhaseFunction& f, const PhaseFlow& flow, const FieldSampler& F, int n,
                       double mass, double t, const std::vector<WeightSpec>& weights, int order,
                       int time_nodes, const PhaseNormOptions& opt) {
  if (f.is_zero() || !F || F.is_zero() || t <= 0.0) return 0.0;
  const auto words = enumerate_words(vector_field_set(FieldSet::PHat0, n), order);
  std::vector<OpChain> plain, transported;
  for (const auto& w : words) {
    plain.push_back(chain_of(w));
    OpChain c{TransportOp{F, 1.0}};
    for (const auto& op : chain_of(w)) c.push_back(op);
    transported.push_back(std::move(c));
  }
  const PhaseFunction one = unit_function();
  PhaseSampler sampler(f, n, opt);
  quad::Rule1D gl = quad::gauss_legendre(time_nodes, 0.0, t);
  double total = 0.0;
  std::vector<double> Zf(words.size()), TZf(words.size());
  for (int i = 0; i < opt.samples; ++i) {
    SpaceVec<double> x0, v0;
    const double w = sampler.node(i, x0, v0);
    for (std::size_t k = 0; k < gl.size(); ++k) {
      PhasePoint<double> p{gl.x[k], x0, v0};
      flow(gl.x[k], p.x, p.v);
      const double v0e = energy_of(p.v, mass);
      for (std::size_t b = 0; b < words.size(); ++b) {
        Zf[b] = apply_ops(plain[b], f, p, mass);
        TZf[b] = apply_ops(transported[b], f, p, mass);
      }
      for (const auto& z : weights) {
        const double zv = z(p, mass);
        const double Tz = apply_ops(OpChain{TransportOp{F, 1.0}, WeightOp{z}}, one, p, mass);
        for (std::size_t b = 0; b < words.size(); ++b)
          total += w * gl.w[k] * std::abs(Tz * Zf[b] + zv * TZf[b]) / v0e;
      }
    }
  }
  return total;
}

// Velocity-average decay.

std::vector<InequalityReport> ks_transport_check(const PhaseFunction& f0, double mass,
                                                 const std::vector<SpacetimePoint<double>>& points,
                                                 const DecayCheckOptions& opt, double threshold) {
  std::vector<InequalityReport> out;
  if (points.empty()) return out;
  const int n = points.front().dim();
  PhaseFunction f = evolve_free(f0, mass);
  const double norm = phase_norms(f, n, mass, {WeightSpec::v_ratio(0)}, opt.order, opt.norms).total();
  for (const auto& p : points) {
    InequalityReport r;
    r.check = "ks_transport";
    const auto nc = null_coords(p);
    r.params = {{"t", p.t}, {"r", p.x.norm()}, {"order", opt.order}};
    const double weight = std::pow(nc.tau_plus, n - 1) * nc.tau_minus;
    VelocityQuadOptions vo = opt.velocity;
    vo.abs_tol = std::max(vo.abs_tol, opt.ratio_abs_tol * norm / weight);
    const double avg = f0.is_zero() ? 0.0 : velocity_average(f, p, mass, {}, vo).value;
    r.lhs = avg * weight;
    r.rhs = norm;
    r.finish(threshold);
    out.push_back(std::move(r));
  }
  return out;
}

DecayFit free_decay_curve(const PhaseFunction& f0, double mass, const SpaceVec<double>& x,
                          const std::vector<double>& times, const VelocityQuadOptions& opt,
                          double t_min, double t_max) {
  PhaseFunction f = evolve_free(f0, mass);
  std::vector<std::pair<double, double>> samples;
  for (double t : times) samples.emplace_back(t, velocity_average(f, {t, x}, mass, {}, opt).value);
  return fit_decay(samples, t_min, t_max);
}

double compact_velocity_bound(int n, double R, double t, double l1_linf) {
  if (!(t > 0.0)) return std::numeric_limits<double>::infinity();
  return std::pow(1.0 + R * R, 0.5 * (n + 2)) * std::pow(t, -n) * l1_linf;
}

const char* to_string(ConeRegion r) {
  switch (r) {
    case ConeRegion::Interior: return "interior";
    case ConeRegion::NearCone: return "near_cone";
    case ConeRegion::Exterior: return "exterior";
  }
  return "?";
}

ConeRegion cone_region(const SpacetimePoint<double>& p) {
  const double r = p.x.norm();
  if (r <= 0.5 * p.t) return ConeRegion::Interior;
  if (r >= p.t) return ConeRegion::Exterior;
  return ConeRegion::NearCone;
}

std::vector<SpacetimePoint<double>> partition_points(int n, const std::vector<double>& times) {
  std::vector<SpacetimePoint<double>> pts;
  int k = 0;
  for (double t : times) {
    const double radii[] = {0.0,      t / 6.0,  t / 3.0,  t / 2.0, 0.6 * t, 0.7 * t,
                            0.8 * t,  0.9 * t,  t,        t + 1.0, t + 2.0, t + 4.0};
    for (double r : radii) {
      SpaceVec<double> x = SpaceVec<double>::Zero(n);
      x[k % n] = (k / n) % 2 == 0 ? r : -r;
      pts.push_back({t, x});
      ++k;
    }
  }
  return pts;
}

std::vector<InequalityReport> theorem5_check(const PhaseFunction& f0,
                                             const std::optional<SpaceVec<double>>& E,
                                             const std::vector<SpacetimePoint<double>>& points,
                                             const DecayCheckOptions& opt, double threshold) {
  std::vector<InequalityReport> out;
  if (points.empty()) return out;
  const int n = points.front().dim();
  const double mass = 1.0;
  const bool field = E && E->norm() > 0.0;
  PhaseFunction f = field ? evolve_in_constant_field(f0, mass, 1.0, *E) : evolve_free(f0, mass);
  const auto weights = k1_weights(n);
  const double initial = phase_norms(f, n, mass, weights, opt.order, opt.norms).total();
  std::map<double, double> source;
  if (field) {
    const FieldSampler F = constant_electric_field(*E);
    const PhaseFlow flow = constant_field_flow(mass, 1.0, *E);
    for (const auto& p : points)
      if (!source.count(p.t))
        source[p.t] = source_integral(f, flow, F, n, mass, p.t, weights, opt.order, opt.time_nodes, opt.norms);
  }
  for (const auto& p : points) {
    InequalityReport r;
    r.check = field ? "theorem5_field" : "theorem5";
    const auto nc = null_coords(p);
    r.params = {{"t", p.t}, {"r", p.x.norm()}, {"region", static_cast<double>(cone_region(p))},
                {"order", opt.order}, {"field", field ? E->norm() : 0.0}};
    r.rhs = initial + (field ? source[p.t] : 0.0);
    const double weight = std::pow(nc.tau_plus, n);
    VelocityQuadOptions vo = opt.velocity;
    vo.abs_tol = std::max(vo.abs_tol, opt.ratio_abs_tol * r.rhs / weight);
    if (field) vo.x_margin += std::min(0.5 * E->norm() * p.t * p.t, 2.0 * p.t) + 0.25;
    VelocityMoment mom;
    mom.q = -2.0;
    const double avg = f0.is_zero() ? 0.0 : velocity_average(f, p, mass, mom, vo).value;
    r.lhs = weight * avg;
    r.finish(threshold);
    out.push_back(std::move(r));
  }
  return out;
}

// Field decay.

bool field_interior(const SpacetimePoint<double>& p) { return p.x.norm() <= 1.0 + 0.5 * p.t; }

std::vector<InequalityReport> field_pointwise_decay_check(
    const FieldSampler& G, double energy, const std::vector<SpacetimePoint<double>>& points,
    std::optional<double> potential_energy, const std::function<double(const std::string&)>& threshold) {
  std::vector<InequalityReport> out;
  auto limit = [&](const std::string& name) {
    return threshold ? threshold(name) : std::numeric_limits<double>::infinity();
  };
  for (const auto& p : points) {
    const int n = p.dim();
    const auto nc = null_coords(p);
    SpaceVec<double> dir = p.x;
    if (dir.norm() == 0.0) dir = SpaceVec<double>::Unit(n, 0);
    const auto c = null_decompose(G(p.t, p.x), null_frame(dir));
    const double good = std::pow(nc.tau_plus, 0.5 * (n + 1)) * std::sqrt(nc.tau_minus);
    const double bad = std::pow(nc.tau_plus, 0.5 * (n - 1)) * std::pow(nc.tau_minus, 1.5);
    std::vector<std::tuple<std::string, double, double>> items{
        {"alpha", std::sqrt(c.alpha2()), good},
        {"rho", std::abs(c.rho), good},
        {"sigma", std::sqrt(c.sigma2()), good},
        {"alphabar", std::sqrt(c.alphabar2()), bad}};
    for (const auto& [name, value, weight] : items) {
      InequalityReport r;
      r.check = "field_decay:" + name;
      r.params = {{"t", p.t}, {"r", p.x.norm()}, {"interior", field_interior(p) ? 1.0 : 0.0}};
      r.lhs = value * weight;
      r.rhs = std::sqrt(energy);
      r.finish(limit(r.check));
      out.push_back(std::move(r));
    }
    if (potential_energy) {
      InequalityReport r;
      r.check = "field_decay:alpha_potential";
      r.params = {{"t", p.t}, {"r", p.x.norm()}, {"interior", field_interior(p) ? 1.0 : 0.0}};
      r.lhs = std::sqrt(c.alpha2()) * std::pow(nc.tau_plus, 0.5 * (n + 2));
      r.rhs = std::sqrt(*potential_energy);
      r.finish(limit(r.check));
      out.push_back(std::move(r));
    }
  }
  return out;
}

double gronwall_sqrt_bound(double C, const std::function<double(double)>& g, double t) {
  if (C < 0.0) throw Error(ErrorCode::InvalidArgument, "Gronwall bound needs C >= 0");
  const double G = t > 0.0 ? quad::integrate(g, 0.0, t, 1e-14, 1e-12).value : 0.0;
  return std::pow(std::sqrt(C) + G, 2);
}

// Calibration corpus.

namespace {

struct GaussParams {
  double sx, sv, cx, cv;
  int poly;  // 0: none, 1: 1 + x₁²/2, 2: 1 + 0.4x₁v₁
};

PhaseFunction gaussian_datum(int n, GaussParams g) {
  const double widen = g.poly == 0 ? 1.0 : 1.2;
  SupportHint hint{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                   widen * (g.sv + std::abs(g.cv)), widen * (g.sx + std::abs(g.cx))};
  const int vaxis = n > 1 ? 1 : 0;
  return PhaseFunction::analytic(
      [g, vaxis](const auto& p, double) {
        using T = std::remove_cvref_t<decltype(p.t)>;
        using std::exp;
        SpaceVec<T> y = p.x, w = p.v;
        y[0] -= g.cx;
        w[vaxis] -= g.cv;
        T e = exp(-0.5 * y.squaredNorm() / (g.sx * g.sx) - 0.5 * w.squaredNorm() / (g.sv * g.sv));
        if (g.poly == 1) return T((1.0 + 0.5 * p.x[0] * p.x[0]) * e);
        if (g.poly == 2) return T((1.0 + 0.4 * p.x[0] * p.v[0]) * e);
        return e;
      },
      hint);
}

template <class T>
T bump(const T& r2) {
  using std::exp;
  if (ad::value(r2) >= 1.0) return T(0.0);
  return exp(1.0 - 1.0 / (1.0 - r2));
}

}  // namespace

std::vector<CorpusEntry> calibration_corpus(int n) {
  std::vector<CorpusEntry> c{
      {"gauss_1.0_0.6", gaussian_datum(n, {1.0, 0.6, 0.0, 0.0, 0})},
      {"gauss_0.7_0.8", gaussian_datum(n, {0.7, 0.8, 0.0, 0.0, 0})},
      {"gauss_shift_x", gaussian_datum(n, {1.2, 0.5, 0.5, 0.0, 0})},
      {"gauss_shift_v", gaussian_datum(n, {1.0, 0.6, 0.0, 0.3, 0})},
      {"gauss_quadratic", gaussian_datum(n, {0.8, 0.6, 0.0, 0.0, 1})},
      {"gauss_signed", gaussian_datum(n, {1.0, 0.6, 0.0, 0.0, 2})},
      {"gauss_wide", gaussian_datum(n, {1.5, 1.0, 0.0, 0.0, 0})},
  };
  c.push_back({"bump", PhaseFunction::analytic(
                           [](const auto& p, double) {
                             return bump(p.x.squaredNorm()) * bump(p.v.squaredNorm());
                           },
                           SupportHint{1.0, 1.0, 1.0, 1.0})});
  return c;
}

}  // namespace vmlab
