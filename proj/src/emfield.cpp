#include "vmlab/emfield.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/LU>

namespace vmlab {

STMatd reconstruct_2form(const NullComponents<double>& c, const NullFrame<double>& fr) {
  const int n = fr.dim(), d = n + 1;
  STMatd P(d, d), Ff = STMatd::Zero(d, d);
  P.col(0) = fr.L;
  P.col(1) = fr.Lbar;
  for (int B = 0; B < n - 1; ++B) P.col(B + 2) = fr.e(B);
  Ff(0, 1) = 2.0 * c.rho;
  Ff(1, 0) = -2.0 * c.rho;
  for (int B = 0; B < n - 1; ++B) {
    Ff(B + 2, 0) = c.alpha[B];
    Ff(0, B + 2) = -c.alpha[B];
    Ff(B + 2, 1) = c.alphabar[B];
    Ff(1, B + 2) = -c.alphabar[B];
    for (int D = 0; D < n - 1; ++D) Ff(B + 2, D + 2) = c.sigma(B, D);
  }
  STMatd Pinv = P.inverse();
  return Pinv.transpose() * Ff * Pinv;
}

double sharp_norm(const STMatd& F, const SpacetimePoint<double>& p) {
  auto nc = null_coords(p);
  const double tm2 = nc.tau_minus * nc.tau_minus, tp2 = nc.tau_plus * nc.tau_plus;
  if (p.x.norm() == 0.0) return std::sqrt(tp2 * cartesian_norm2(F));
  auto c = null_decompose(F, null_frame(p.x));
  const double rs = c.rho * c.rho + c.sigma2();
  return std::sqrt(tp2 * c.alpha2() + tm2 * c.alphabar2() + (tp2 + tm2) * rs);
}

STVecd morawetz_field(const SpacetimePoint<double>& p) {
  const int n = p.dim();
  STVecd K(n + 1);
  K[0] = 1.0 + p.t * p.t + p.x.squaredNorm();
  K.tail(n) = 2.0 * p.t * p.x;
  return K;
}

Form::Form(int spacetime_dim, int degree) : d_(spacetime_dim), k_(degree) {
  std::size_t size = 1;
  for (int i = 0; i < k_; ++i) size *= static_cast<std::size_t>(d_);
  data_.assign(size, 0.0);
}

std::size_t Form::offset(std::span<const int> idx) const {
  std::size_t off = 0;
  for (int i : idx) off = off * static_cast<std::size_t>(d_) + static_cast<std::size_t>(i);
  return off;
}

double& Form::operator()(std::span<const int> idx) { return data_[offset(idx)]; }
double Form::operator()(std::span<const int> idx) const { return data_[offset(idx)]; }

double Form::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Form::antisymmetry_defect() const {
  double worst = 0.0;
  std::vector<int> idx(k_, 0);
  for (std::size_t off = 0; off < data_.size(); ++off) {
    std::size_t rem = off;
    for (int i = k_ - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % static_cast<std::size_t>(d_));
      rem /= static_cast<std::size_t>(d_);
    }
    for (int a = 0; a < k_; ++a)
      for (int b = a + 1; b < k_; ++b) {
        std::vector<int> sw = idx;
        std::swap(sw[a], sw[b]);
        worst = std::max(worst, std::abs(data_[offset(sw)] + data_[off]));
      }
  }
  return worst;
}

int levi_civita(std::span<const int> idx) {
  const std::size_t k = idx.size();
  int sign = 1;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      if (idx[a] == idx[b]) return 0;
      if (idx[a] > idx[b]) sign = -sign;
    }
  return sign;
}

Form hodge_dual(const STMatd& F) {
  const int d = static_cast<int>(F.rows());
  if (d < 3) throw Error(ErrorCode::InvalidArgument, "Hodge dual needs n + 1 >= 3");
  const int k = d - 2;
  Form out(d, k);
  STMatd Fup = raise(F);
  std::vector<int> lam(k, 0), full(d);
  for (;;) {
    std::copy(lam.begin(), lam.end(), full.begin() + 2);
    double s = 0.0;
    for (int mu = 0; mu < d; ++mu)
      for (int nu = 0; nu < d; ++nu) {
        if (Fup(mu, nu) == 0.0) continue;
        full[0] = mu;
        full[1] = nu;
        s += Fup(mu, nu) * levi_civita(full);
      }
    out(lam) = 0.5 * s;
    int i = k - 1;
    for (; i >= 0; --i) {
      if (++lam[i] < d) break;
      lam[i] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

std::vector<STMatd> field_gradient(const FieldSampler& F, const SpacetimePoint<double>& p) {
  using D = ad::Dual<double>;
  const int n = p.dim();
  std::vector<STMatd> grad;
  for (int mu = 0; mu <= n; ++mu) {
    SpaceVec<D> x(n);
    for (int i = 0; i < n; ++i) x[i] = D(p.x[i], mu == i + 1 ? 1.0 : 0.0);
    STMat<D> v = F(D(p.t, mu == 0 ? 1.0 : 0.0), x);
    STMatd g(n + 1, n + 1);
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) g(a, b) = v(a, b).der;
    grad.push_back(g);
  }
  return grad;
}

MaxwellResidual maxwell_residual(const FieldSampler& F, const OneFormSampler& J,
                                 const SpacetimePoint<double>& p) {
  const int n = p.dim(), d = n + 1;
  auto g = field_gradient(F, p);
  MaxwellResidual res;
  res.divergence = STVecd::Zero(d);
  for (int nu = 0; nu < d; ++nu)
    for (int mu = 0; mu < d; ++mu) res.divergence[nu] += eta(mu) * g[mu](mu, nu);
  if (J && !J.is_zero()) res.divergence -= J.at(p);
  for (int l = 0; l < d; ++l)
    for (int m = l + 1; m < d; ++m)
      for (int v = m + 1; v < d; ++v)
        res.closedness =
            std::max(res.closedness, std::abs(g[l](m, v) + g[m](v, l) + g[v](l, m)));
  return res;
}

quad::Result integrate_field_density(
    const FieldSampler& F, double t,
    const std::function<double(const STMatd&, const SpacetimePoint<double>&)>& density,
    const EnergyOptions& opt) {
  const int n = F.dim();
  auto run = [&](int panels, int order) {
    quad::CloudRule rule = quad::radial_spherical(n, 0.0, opt.radius, opt.radial_nodes, panels, order);
    double s = 0.0;
    for (Eigen::Index k = 0; k < rule.size(); ++k) {
      SpacetimePoint<double> p{t, SpaceVec<double>(rule.nodes.col(k))};
      s += rule.weights[k] * density(F.at(p), p);
    }
    return s;
  };
  const double coarse = run(opt.radial_panels, opt.sphere_order);
  const double fine = run(2 * opt.radial_panels, opt.sphere_order + 2);
  quad::Result r;
  r.value = fine;
  r.error = std::abs(fine - coarse);
  r.converged = r.error <= opt.tol * std::max(std::abs(fine), 1e-300) || r.error < 1e-300;
  return r;
}

namespace {

FieldSampler lie_sampler(const MultiIndex& beta, const FieldSampler& F) {
  if (beta.word.empty()) return F;
  return FieldSampler::sampled(F.dim(), [beta, F](double t, const SpaceVec<double>& x) {
    return lie_derivative_word<double>(beta.word, F, t, x);
  });
}

}  // namespace

EnergyReport maxwell_energy(const FieldSampler& F, double t, EnergyVariant variant, int N,
                            const EnergyOptions& opt) {
  const int n = F.dim();
  EnergyReport rep;
  rep.name = variant == EnergyVariant::E0 ? "E0" : variant == EnergyVariant::E ? "E" : "ES";
  auto density = [variant](const STMatd& G, const SpacetimePoint<double>& p) {
    auto c = null_decompose(G, null_frame(p.x));
    auto nc = null_coords(p);
    const double tm2 = nc.tau_minus * nc.tau_minus, tp2 = nc.tau_plus * nc.tau_plus;
    const double rs = c.rho * c.rho + c.sigma2();
    switch (variant) {
      case EnergyVariant::E0: return c.norm2();
      case EnergyVariant::E: return tp2 * c.alpha2() + tm2 * c.alphabar2() + (tp2 + tm2) * rs;
      case EnergyVariant::ES: return nc.tau_minus * c.alphabar2();
    }
    return 0.0;
  };
  auto words = enumerate_words(vector_field_set(FieldSet::K, n), N);
  for (const auto& beta : words) {
    FieldSampler G = lie_sampler(beta, F);
    quad::Result r = integrate_field_density(G, t, density, opt);
    if (opt.check_convergence && !r.converged)
      throw Error(ErrorCode::QuadratureNotConverged,
                  rep.name + " energy of " + beta.name() + ": error " + std::to_string(r.error));
    double value = r.value, err = r.error;
    if (variant == EnergyVariant::E0) {
      // Cone flux sup over the u-grid.
      double best = 0.0, best_err = 0.0;
      for (double u = -opt.radius; u <= t + 1e-12; u += opt.u_spacing) {
        auto flux = [&](int panels, int order) {
          ConeSlice cs = cone_slice(n, u, t, opt.radial_nodes, order, panels);
          double s = 0.0;
          for (std::size_t k = 0; k < cs.nodes.size(); ++k) {
            const auto& p = cs.nodes[k];
            if (p.x.norm() > opt.radius) continue;
            auto c = null_decompose(G.at(p), null_frame(p.x));
            s += cs.weights[k] * (c.alpha2() + c.rho * c.rho + c.sigma2());
          }
          return s;
        };
        double coarse = flux(opt.radial_panels, opt.sphere_order);
        if (coarse > best) {
          best = coarse;
          best_err = std::abs(flux(2 * opt.radial_panels, opt.sphere_order + 2) - coarse);
        }
      }
      value += best;
      err += best_err;
    }
    rep.add(beta.name(), value, err);
  }
  return rep;
}

FieldSampler exterior_derivative(const OneFormSampler& A) {
  const int n = A.dim();
  return FieldSampler::analytic(n, [A, n](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    STMat<T> F = STMat<T>::Zero(n + 1, n + 1);
    if constexpr (level_of_v<T> >= kMaxOrder) {
      throw Error(ErrorCode::InvalidArgument, "exterior derivative exceeds kMaxOrder");
    } else {
      using D = ad::Dual<T>;
      std::vector<STVec<T>> dA;
      for (int mu = 0; mu <= n; ++mu) {
        SpaceVec<D> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = D(x[i], T(mu == i + 1 ? 1.0 : 0.0));
        STVec<D> a = A(D(t, T(mu == 0 ? 1.0 : 0.0)), xs);
        STVec<T> g(n + 1);
        for (int k = 0; k <= n; ++k) g[k] = a[k].der;
        dA.push_back(g);
      }
      for (int mu = 0; mu <= n; ++mu)
        for (int nu = 0; nu <= n; ++nu) F(mu, nu) = dA[mu][nu] - dA[nu][mu];
    }
    return F;
  });
}

PlaneWaveSet random_plane_waves(int n, int count, double kmax, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PlaneWaveSet w;
  w.n = n;
  for (int c = 0; c < count; ++c) {
    Eigen::VectorXd dir(n);
    for (int i = 0; i < n; ++i) dir[i] = g(rng);
    dir.normalize();
    const double kn = kmax * (0.2 + 0.8 * u(rng));
    const double amp = std::exp(-kn * kn / (kmax * kmax)) / std::sqrt(static_cast<double>(count));
    STVecd k(n + 1), e(n + 1);
    k[0] = -kn;
    k.tail(n) = kn * dir;
    for (int i = 1; i <= n; ++i) e[i] = amp * g(rng);
    // k^μ ε_μ = ω ε_0 + k·ε = 0.
    e[0] = -k.tail(n).dot(e.tail(n)) / kn;
    w.k.push_back(k);
    w.eps.push_back(e);
    w.phase.push_back(2.0 * M_PI * u(rng));
  }
  return w;
}

OneFormSampler plane_wave_potential(const PlaneWaveSet& w) {
  return OneFormSampler::analytic(w.n, [w](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    using std::cos;
    const int n = w.n;
    STVec<T> A = STVec<T>::Zero(n + 1);
    for (std::size_t c = 0; c < w.k.size(); ++c) {
      T ph = w.k[c][0] * t + w.phase[c];
      for (int i = 0; i < n; ++i) ph += w.k[c][i + 1] * x[i];
      T cs = cos(ph);
      for (int mu = 0; mu <= n; ++mu) A[mu] += w.eps[c][mu] * cs;
    }
    return A;
  });
}

FieldSampler plane_wave_field(const PlaneWaveSet& w) {
  return FieldSampler::analytic(w.n, [w](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    using std::sin;
    const int n = w.n;
    STMat<T> F = STMat<T>::Zero(n + 1, n + 1);
    for (std::size_t c = 0; c < w.k.size(); ++c) {
      T ph = w.k[c][0] * t + w.phase[c];
      for (int i = 0; i < n; ++i) ph += w.k[c][i + 1] * x[i];
      T s = -sin(ph);
      for (int mu = 0; mu <= n; ++mu)
        for (int nu = mu + 1; nu <= n; ++nu) {
          double kw = w.k[c][mu] * w.eps[c][nu] - w.k[c][nu] * w.eps[c][mu];
          if (kw == 0.0) continue;
          F(mu, nu) += kw * s;
        }
    }
    for (int mu = 0; mu <= n; ++mu)
      for (int nu = 0; nu < mu; ++nu) F(mu, nu) = -F(nu, mu);
    return F;
  });
}

namespace {

// u = Re[((t+i)² − r²)^p], p = −(n−1)/2.
template <class T>
T hertz_scalar(const T& t, const SpaceVec<T>& x) {
  using std::atan2;
  using std::cos;
  using std::pow;
  const double p = -0.5 * (static_cast<double>(x.size()) - 1.0);
  T a = t * t - 1.0 - x.squaredNorm();
  T b = 2.0 * t;
  T mod2 = a * a + b * b;
  return pow(mod2, 0.5 * p) * cos(p * atan2(b, a));
}

// (∂_t u, ∂_1 u) at level T.
template <class T>
std::pair<T, T> hertz_gradient(const T& t, const SpaceVec<T>& x) {
  using D = ad::Dual<T>;
  const Eigen::Index n = x.size();
  SpaceVec<D> xs(n);
  for (Eigen::Index i = 0; i < n; ++i) xs[i] = D(x[i], T(0.0));
  T ut = hertz_scalar(D(t, T(1.0)), xs).der;
  xs[0].der = T(1.0);
  T u1 = hertz_scalar(D(t, T(0.0)), xs).der;
  return {ut, u1};
}

template <class T>
STVec<T> hertz_A(const T& t, const SpaceVec<T>& x, double amp) {
  STVec<T> A = STVec<T>::Zero(x.size() + 1);
  auto [ut, u1] = hertz_gradient(t, x);
  A[0] = -amp * u1;
  A[1] = -amp * ut;
  return A;
}

}  // namespace

OneFormSampler hertz_potential(int n, double amp) {
  return OneFormSampler::analytic(n, [amp](const auto& t, const auto& x) { return hertz_A(t, x, amp); });
}

FieldSampler hertz_field(int n, double amp) {
  return FieldSampler::analytic(n, [n, amp](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    using D = ad::Dual<T>;
    std::vector<STVec<T>> dA;
    for (int mu = 0; mu <= n; ++mu) {
      SpaceVec<D> xs(n);
      for (int i = 0; i < n; ++i) xs[i] = D(x[i], T(mu == i + 1 ? 1.0 : 0.0));
      STVec<D> a = hertz_A(D(t, T(mu == 0 ? 1.0 : 0.0)), xs, amp);
      STVec<T> g(n + 1);
      for (int k = 0; k <= n; ++k) g[k] = a[k].der;
      dA.push_back(g);
    }
    STMat<T> F(n + 1, n + 1);
    for (int mu = 0; mu <= n; ++mu)
      for (int nu = 0; nu <= n; ++nu) F(mu, nu) = dA[mu][nu] - dA[nu][mu];
    return F;
  });
}

namespace {

template <class T>
STVec<T> morawetz_current_at(const OneFormSampler& A, const T& t, const SpaceVec<T>& x,
                             double last_sign) {
  using D = ad::Dual<T>;
  const int n = static_cast<int>(x.size()), d = n + 1;
  STVec<T> a = A(t, x);
  // dA(mu, beta) = ∂_μ A_β.
  STMat<T> dA(d, d);
  for (int mu = 0; mu < d; ++mu) {
    SpaceVec<D> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = D(x[i], T(mu == i + 1 ? 1.0 : 0.0));
    STVec<D> v = A(D(t, T(mu == 0 ? 1.0 : 0.0)), xs);
    for (int b = 0; b < d; ++b) dA(mu, b) = v[b].der;
  }
  STMat<T> G = dA - dA.transpose();
  STMat<T> Tst = stress(G);
  STVec<T> K(d);
  K[0] = 1.0 + t * t + x.squaredNorm();
  K.tail(n) = 2.0 * t * x;
  STVec<T> aup = a;
  aup[0] = -aup[0];
  const T aa = a.dot(aup);
  STVec<T> P = Tst * K;
  const double c = n - 3.0;
  for (int mu = 0; mu < d; ++mu) {
    T term = t * dA.row(mu).transpose().dot(aup);  // t A_β ∂_μ A^β
    if (mu == 0) term -= 0.5 * aa;
    // t A_β ∂^β A_μ = t Σ_β η^{ββ} A_β ∂_β A_μ.
    T s(0.0);
    for (int b = 0; b < d; ++b) s += eta(b) * a[b] * dA(b, mu);
    term -= t * s;
    // ∂^β(t) A_β A_μ = −A_0 A_μ.
    term += last_sign * (-a[0] * a[mu]);
    P[mu] += c * term;
  }
  return P;
}

}  // namespace

STVecd morawetz_current(const OneFormSampler& A, const SpacetimePoint<double>& p, double last_sign) {
  return morawetz_current_at(A, p.t, p.x, last_sign);
}

double morawetz_divergence(const OneFormSampler& A, const SpacetimePoint<double>& p,
                           double last_sign) {
  using D = ad::Dual<double>;
  const int n = p.dim();
  double div = 0.0;
  for (int mu = 0; mu <= n; ++mu) {
    SpaceVec<D> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = D(p.x[i], mu == i + 1 ? 1.0 : 0.0);
    STVec<D> P = morawetz_current_at(A, D(p.t, mu == 0 ? 1.0 : 0.0), xs, last_sign);
    div += eta(mu) * P[mu].der;
  }
  return div;
}

}  // namespace vmlab
