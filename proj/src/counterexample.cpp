#include "vmlab/counterexample.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "vmlab/emfield.hpp"
#include "vmlab/ode.hpp"
#include "vmlab/quadrature.hpp"

namespace vmlab {

double cutoff_derivative(double s) { return cutoff(ad::Dual<double>(s, 1.0)).der; }

namespace {

// ∂_s χ for any scalar type, through one more dual layer.
template <class T>
T cutoff_slope(const T& s) {
  return cutoff(ad::Dual<T>(s, T(1.0))).der;
}

// div E0 = (80/n) χ′(2r²/n) Σ x_i.
template <class T>
T field_divergence(const SpaceVec<T>& x, int n) {
  T sum = x.sum();
  return (80.0 / n) * cutoff_slope(T(2.0 * x.squaredNorm() / n)) * sum;
}

// Maximum of √s |χ′(s)| on [1, 3]: dense scan then golden-section refinement.
double max_weighted_slope() {
  auto h = [](double s) { return std::sqrt(s) * std::abs(cutoff_derivative(s)); };
  double best = 1.0;
  for (int k = 0; k <= 2000; ++k) {
    const double s = 1.0 + 2.0 * k / 2000.0;
    if (h(s) > h(best)) best = s;
  }
  double a = std::max(1.0, best - 1e-3), b = std::min(3.0, best + 1e-3);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  while (b - a > 1e-12) {
    if (h(c) > h(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return h(0.5 * (a + b));
}

double find_root(const std::function<double(double)>& f, double lo, double hi, const RootOptions& opt,
                 const char* what) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw Error(ErrorCode::NoRootInBracket, std::string(what) + ": no sign change on [" + std::to_string(lo) +
                                                ", " + std::to_string(hi) + "]");
  int it = 0;
  while (hi - lo > 1e-6 * std::max(1.0, std::abs(hi)) && it++ < opt.max_iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  // Secant polish, kept inside the bracket.
  double a = lo, fa = flo, b = hi, fb = fhi;
  while (it++ < opt.max_iter) {
    double c = b - fb * (b - a) / (fb - fa);
    if (!(c > lo && c < hi)) c = 0.5 * (lo + hi);
    const double fc = f(c);
    if ((fc > 0.0) == (flo > 0.0)) {
      lo = c;
      flo = fc;
    } else {
      hi = c;
    }
    const double step = std::abs(c - b);
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    if (fc == 0.0 || step <= opt.tol || hi - lo <= opt.tol) return c;
  }
  return b;
}

double diagonal_integral(double a, double b, double t, int n, const DiagonalProfile& E1) {
  if (a == b) return 0.0;
  const double rn = std::sqrt(static_cast<double>(n));
  return quad::integrate([&](double w) { return E1(w, 1.0 - (t - w) / rn); }, a, b, 1e-15, 1e-14).value;
}

}  // namespace

CounterexampleData build_counterexample(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "counterexample needs n >= 2");
  CounterexampleData d;
  d.n = n;
  const double chi2 = cutoff(2.0);
  const double amp = 10.0 / chi2;
  d.M0 = 20.0 / chi2;
  const double inv_M = quad::sphere_area(n) *
                       quad::integrate([n](double r) { return cutoff(r * r) * std::pow(r, n - 1); }, 0.0,
                                       std::sqrt(3.0), 1e-15, 1e-14)
                           .value;
  d.M = 1.0 / inv_M;
  d.div_sup = 80.0 / std::sqrt(2.0) * max_weighted_slope();
  d.E0 = FieldSampler::analytic(n, [n, amp](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    STMat<T> F = STMat<T>::Zero(n + 1, n + 1);
    const T e = amp * cutoff(T(2.0 * x.squaredNorm() / n));
    for (int i = 1; i <= n; ++i) {
      F(0, i) = e;
      F(i, 0) = -e;
    }
    return F;
  });
  const double x_radius = 3.0 * std::sqrt(0.5 * n);
  const SupportHint hint{x_radius, std::sqrt(3.0), 1.0, 1.0};
  const double M = d.M, sup = d.div_sup;
  d.f01 = PhaseFunction::analytic(
      [n, M, sup](const auto& p, double) {
        using T = std::remove_cvref_t<decltype(p.t)>;
        return M * (field_divergence(p.x, n) + sup) * cutoff(T(2.0 * p.x.squaredNorm() / (3.0 * n))) *
               cutoff(T(p.v.squaredNorm()));
      },
      hint);
  d.f02 = PhaseFunction::analytic(
      [n, M, sup](const auto& p, double) {
        using T = std::remove_cvref_t<decltype(p.t)>;
        return M * sup * cutoff(T(2.0 * p.x.squaredNorm() / (3.0 * n))) * cutoff(T(p.v.squaredNorm()));
      },
      hint);
  return d;
}

double constraint_residual(const CounterexampleData& d, int points, std::uint64_t seed) {
  const int n = d.n;
  // Panel edges at |v| = 1 and √3, where χ(|v|²) switches.
  quad::CloudRule inner = quad::radial_spherical(n, 0.0, 1.0, 8, 1, 8);
  quad::CloudRule outer = quad::radial_spherical(n, 1.0, std::sqrt(3.0), 12, 24, 8);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    SpaceVec<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = 1.5 * u(rng);
    double integral = 0.0;
    for (const auto* rule : {&inner, &outer}) {
      for (Eigen::Index j = 0; j < rule->size(); ++j) {
        PhasePoint<double> p{0.0, x, rule->nodes.col(j)};
        integral += rule->weights[j] * (d.f01(p, 0.0) - d.f02(p, 1.0));
      }
    }
    const auto grad = field_gradient(d.E0, {0.0, x});
    double div = 0.0;
    for (int i = 1; i <= n; ++i) div += grad[i](0, i);
    const double expected = div * cutoff(2.0 * x.squaredNorm() / (3.0 * n));
    worst = std::max(worst, std::abs(integral - expected));
  }
  return worst;
}

std::map<std::string, double> symmetry_check(const FieldSampler& F0, const std::vector<PhaseFunction>& f,
                                             int points, std::uint64_t seed) {
  const int n = F0.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::map<std::string, double> res{{"electric_swap", 0.0},   {"electric_fixed", 0.0},
                                    {"magnetic_antisym", 0.0}, {"magnetic_swap", 0.0},
                                    {"magnetic_fixed", 0.0},   {"density", 0.0}};
  auto swap = [](SpaceVec<double> y, int i, int k) {
    std::swap(y[i], y[k]);
    return y;
  };
  auto bump = [&res](const char* key, double v) { res[key] = std::max(res[key], std::abs(v)); };
  for (int s = 0; s < points; ++s) {
    SpaceVec<double> x(n), v(n);
    for (int i = 0; i < n; ++i) {
      x[i] = u(rng);
      v[i] = 0.5 * u(rng);
    }
    const STMatd F = F0(0.0, x);
    // Field indices are 1-based in F, coordinate indices 0-based.
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        if (i == k) continue;
        const STMatd Fs = F0(0.0, swap(x, i, k));
        bump("electric_swap", Fs(0, i + 1) - F(0, k + 1));
        for (int l = 0; l < n; ++l) {
          if (l == i || l == k) continue;
          const STMatd Fkl = F0(0.0, swap(x, k, l));
          bump("electric_fixed", Fkl(0, i + 1) - F(0, i + 1));
          bump("magnetic_swap", Fs(k + 1, l + 1) - F(i + 1, l + 1));
        }
        bump("magnetic_antisym", Fs(i + 1, k + 1) + F(i + 1, k + 1));
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            if (a == b || a == i || a == k || b == i || b == k) continue;
            bump("magnetic_fixed", Fs(a + 1, b + 1) - F(a + 1, b + 1));
          }
        }
        for (const auto& g : f) {
          const PhasePoint<double> p{0.0, x, v}, q{0.0, swap(x, i, k), swap(v, i, k)};
          bump("density", g(q, 0.0) - g(p, 0.0));
        }
      }
    }
  }
  return res;
}

DiagonalProfile static_profile(const CounterexampleData& d) {
  const FieldSampler E = d.E0;
  const int n = d.n;
  return [E, n](double s, double y) {
    SpaceVec<double> x = SpaceVec<double>::Constant(n, y);
    return E(s, x)(0, 1);
  };
}

DiagonalProfile constant_profile(double value) {
  return [value](double, double) { return value; };
}

DiagonalState diagonal_velocity(double eta, double s, double t, int n, const DiagonalProfile& E1) {
  const double rn = std::sqrt(static_cast<double>(n));
  return {eta + (s < t ? -diagonal_integral(s, t, t, n, E1) : diagonal_integral(t, s, t, n, E1)),
          1.0 + (s - t) / rn};
}

double vanishing_time(double eta, int n, const DiagonalProfile& E1, double M0, const RootOptions& opt) {
  if (!(eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "vanishing time needs eta > 0");
  auto g = [&](double t) { return eta - diagonal_integral(0.0, t, t, n, E1); };
  return find_root(g, eta / M0, eta / 5.0, opt, "vanishing time");
}

double vanishing_instant(double eta, double t, int n, const DiagonalProfile& E1, const RootOptions& opt) {
  auto g = [&](double s) { return eta - diagonal_integral(s, t, t, n, E1); };
  return find_root(g, 0.0, t, opt, "vanishing instant");
}

double vanishing_instant_slope(double eta, double t, int n, const DiagonalProfile& E1, double h) {
  return (vanishing_instant(eta, t + h, n, E1) - vanishing_instant(eta, t - h, n, E1)) / (2.0 * h);
}

double extended_position(double eta, double s, double t, int n, const DiagonalProfile& E1) {
  const double tau = t - vanishing_instant(eta, t, n, E1);
  return 1.0 + (t - s - 2.0 * tau) / std::sqrt(static_cast<double>(n));
}

std::vector<VanishingSample> vanishing_curve(const std::vector<double>& etas, int n, const DiagonalProfile& E1,
                                             double M0) {
  std::vector<VanishingSample> out;
  for (double eta : etas) out.push_back({eta, vanishing_time(eta, n, E1, M0), eta / M0, eta / 5.0});
  return out;
}

void write_vanishing_csv(std::ostream& out, const std::vector<VanishingSample>& curve) {
  out << "eta,T_eta,bracket_low,bracket_high\n" << std::setprecision(17);
  for (const auto& c : curve) out << c.eta << ',' << c.T << ',' << c.bracket_low << ',' << c.bracket_high << '\n';
}

double default_eta_max(double field_time) { return 0.05 * std::min(1.0, 5.0 * field_time); }

VelocityBound velocity_bound_check(double mass, const FieldSampler& F, double t0, const SpaceVec<double>& x,
                                   const SpaceVec<double>& v, double span) {
  if (mass == 0.0 && v.norm() == 0.0)
    throw Error(ErrorCode::MasslessZeroVelocity, "velocity bound needs v != 0 for massless particles");
  const Eigen::Index n = x.size();
  // State: X, V, ∫⟨E, V⟩, ∫|E|.
  ode::Rhs rhs = [&](double s, const ode::State& y, ode::State& dy) {
    SpaceVec<double> X = y.head(n), V = y.segment(n, n);
    const double e0 = energy_of(V, mass);
    dy.setZero(2 * n + 2);
    dy.head(n) = V / e0;
    if (!F || F.is_zero()) return;
    const STMatd Fm = F(s, X);
    SpaceVec<double> E(n);
    for (Eigen::Index j = 1; j <= n; ++j) {
      E[j - 1] = Fm(0, j);
      double a = Fm(0, j);
      for (Eigen::Index i = 1; i <= n; ++i) a += V[i - 1] / e0 * Fm(i, j);
      dy[n + j - 1] = a;
    }
    dy[2 * n] = E.dot(V);
    dy[2 * n + 1] = E.norm();
  };
  ode::State y0 = ode::State::Zero(2 * n + 2);
  y0.head(n) = x;
  y0.segment(n, n) = v;
  ode::Options oo;
  oo.tol = 1e-12;
  const ode::Solution sol = ode::dopri45(rhs, t0, y0, t0 + span, oo);
  VelocityBound out;
  out.min_speed = v.norm();
  out.lower_margin = std::numeric_limits<double>::infinity();
  double worst = -1.0;
  out.report.check = "velocity_bound";
  const double v2 = v.squaredNorm();
  for (const auto& y : sol.y) {
    const double speed = y.segment(n, n).norm();
    const double G = y[2 * n + 1];
    out.energy_identity = std::max(out.energy_identity, std::abs(speed * speed - v2 - 2.0 * y[2 * n]));
    const double upper = v.norm() + G;
    if (speed / upper > worst) {
      worst = speed / upper;
      out.report.lhs = speed;
      out.report.rhs = upper;
    }
    out.min_speed = std::min(out.min_speed, speed);
    out.lower_margin = std::min(out.lower_margin, speed - std::max(0.0, v.norm() - G));
  }
  out.report.params = {{"t0", t0},
                       {"span", span},
                       {"speed0", v.norm()},
                       {"min_speed", out.min_speed},
                       {"lower_margin", out.lower_margin},
                       {"energy_identity", out.energy_identity}};
  out.report.finish(1.0 + 1e-9);
  return out;
}

}  // namespace vmlab
