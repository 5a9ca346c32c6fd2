#include "vmlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace vmlab {
namespace {

// Indices of the spatial pair (j, k) with sign: F_{jk} = sign · component(pair).
double two_form_component(const GridField& F, int mu, int nu, std::size_t idx) {
  if (mu == nu) return 0.0;
  const int n = F.grid.n;
  return mu < nu ? F.component(pair_index(n, mu, nu))[idx] : -F.component(pair_index(n, nu, mu))[idx];
}

std::vector<double> pair_values(const GridField& F, int mu, int nu) {
  std::vector<double> v(F.grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = two_form_component(F, mu, nu, i);
  return v;
}

void check_support(const GridField& F0, const PotentialOptions& opt) {
  const double peak = F0.max_abs();
  if (peak == 0.0) return;
  const Grid& g = F0.grid;
  double band = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::vector<int> k = g.unflatten(i);
    bool edge = false;
    for (int a = 0; a < g.n && !edge; ++a) {
      const double m = opt.margin_fraction * g.dims[a];
      edge = k[a] < m || k[a] >= g.dims[a] - m;
    }
    if (!edge) continue;
    for (int c = 0; c < F0.components; ++c) band = std::max(band, std::abs(F0.component(c)[i]));
  }
  if (band > opt.support_tol * peak)
    throw Error(ErrorCode::BoxTooSmall, "initial field reaches the box margin");
}

}  // namespace

GridField sample_field(const FieldSampler& F, const Grid& g, double t) {
  GridField out(g, GridKind::TwoForm);
  const int n = g.n;
  for (std::size_t i = 0; i < g.size(); ++i) {
    STMatd m = F(t, g.point(i));
    int c = 0;
    for (int a = 0; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b, ++c) out.component(c)[i] = m(a, b);
  }
  return out;
}

GridField solve_poisson(const GridField& source, double mean_tol) {
  const Grid& g = source.grid;
  GridField out = source;
  const double peak = std::max(source.max_abs(), 1e-300);
  for (int c = 0; c < source.components; ++c) {
    Spectrum s = fft(g, source.component(c));
    const double mean = std::abs(s[0]) / static_cast<double>(g.size());
    if (mean > mean_tol * peak)
      throw Error(ErrorCode::NonZeroMeanSource, "Poisson source has a non-zero mean");
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::vector<int> k = g.unflatten(i);
      double xi2 = 0.0;
      for (int a = 0; a < g.n; ++a) xi2 += std::pow(g.wavenumber(a, k[a]), 2);
      s[i] = xi2 == 0.0 ? 0.0 : -s[i] / xi2;
    }
    std::vector<double> u = ifft_real(g, s);
    std::copy(u.begin(), u.end(), out.component(c));
  }
  return out;
}

PotentialData build_initial_potential(const GridField& F0, const PotentialOptions& opt) {
  if (F0.kind != GridKind::TwoForm) throw Error(ErrorCode::InvalidArgument, "F0 must be a 2-form grid");
  check_support(F0, opt);
  const Grid& g = F0.grid;
  const int n = g.n;
  const std::size_t N = g.size();
  PotentialData pot;
  pot.grid = g;
  pot.A0 = GridField(g, GridKind::OneForm);
  pot.dtA0 = GridField(g, GridKind::OneForm);

  // ΔA_k = ∂^jF_{jk}; spatial indices are raised with +1.
  GridField source(g, GridKind::Scalar);
  source.components = n;
  source.data.assign(static_cast<std::size_t>(n) * N, 0.0);
  for (int k = 1; k <= n; ++k) {
    double* dst = source.data.data() + static_cast<std::size_t>(k - 1) * N;
    for (int j = 1; j <= n; ++j) {
      if (j == k) continue;
      std::vector<double> Fjk = pair_values(F0, j, k);
      std::vector<double> d = spectral_derivative(g, Fjk.data(), j - 1);
      for (std::size_t i = 0; i < N; ++i) dst[i] += d[i];
    }
  }
  GridField u = solve_poisson(source, opt.mean_tol);
  for (int k = 1; k <= n; ++k) {
    std::copy(u.component(k - 1), u.component(k - 1) + N, pot.A0.component(k));
    for (std::size_t i = 0; i < N; ++i) pot.dtA0.component(k)[i] = two_form_component(F0, 0, k, i);
  }

  // Lorenz residual at t = 0: −∂_tA₀ + ∂_iA_i.
  std::vector<double> div(N, 0.0);
  for (int k = 1; k <= n; ++k) {
    std::vector<double> d = spectral_derivative(g, pot.A0.component(k), k - 1);
    for (std::size_t i = 0; i < N; ++i) div[i] += d[i];
  }
  for (std::size_t i = 0; i < N; ++i)
    pot.gauge_residual_bound = std::max(pot.gauge_residual_bound, std::abs(div[i] - pot.dtA0.component(0)[i]));

  // Fourier modes for the exact vacuum evolution.
  std::vector<Spectrum> a, b;
  double peak = 0.0;
  for (int mu = 0; mu <= n; ++mu) {
    a.push_back(fft(g, pot.A0.component(mu)));
    b.push_back(fft(g, pot.dtA0.component(mu)));
    for (std::size_t i = 0; i < N; ++i) peak = std::max({peak, std::abs(a[mu][i]), std::abs(b[mu][i])});
  }
  for (std::size_t i = 0; i < N && peak > 0.0; ++i) {
    double m = 0.0;
    for (int mu = 0; mu <= n; ++mu) m = std::max({m, std::abs(a[mu][i]), std::abs(b[mu][i])});
    if (m <= opt.mode_cutoff * peak) continue;
    PotentialMode pm;
    std::vector<int> k = g.unflatten(i);
    pm.xi.resize(n);
    for (int ax = 0; ax < n; ++ax) pm.xi[ax] = g.wavenumber(ax, k[ax]);
    // Phases are measured from lo so that the series interpolates the nodes.
    for (int mu = 0; mu <= n; ++mu) {
      std::complex<double> shift = std::exp(std::complex<double>(0.0, -pm.xi.dot(g.lo)));
      pm.a.push_back(a[mu][i] * shift / static_cast<double>(N));
      pm.b.push_back(b[mu][i] * shift / static_cast<double>(N));
    }
    pot.modes.push_back(std::move(pm));
  }

  auto modes = std::make_shared<const std::vector<PotentialMode>>(pot.modes);
  pot.A = OneFormSampler::analytic(n, [modes, n](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    using std::cos;
    using std::sin;
    STVec<T> out = STVec<T>::Zero(n + 1);
    for (const auto& m : *modes) {
      T th(0.0);
      for (int i = 0; i < n; ++i) th += m.xi[i] * x[i];
      const double k = m.xi.norm();
      T ct = cos(k * t), st = k == 0.0 ? t : T(sin(k * t) / k);
      T c = cos(th), s = sin(th);
      for (int mu = 0; mu <= n; ++mu) {
        T re = m.a[mu].real() * ct + m.b[mu].real() * st;
        T im = m.a[mu].imag() * ct + m.b[mu].imag() * st;
        out[mu] += re * c - im * s;
      }
    }
    return out;
  }, Provenance::Grid);
  return pot;
}

GridField exterior_derivative_at_zero(const PotentialData& pot) {
  const Grid& g = pot.grid;
  const int n = g.n;
  const std::size_t N = g.size();
  GridField F(g, GridKind::TwoForm);
  // grad[k][mu] = ∂_k A_mu for spatial k.
  std::vector<std::vector<std::vector<double>>> grad(n);
  for (int k = 0; k < n; ++k)
    for (int mu = 0; mu <= n; ++mu) grad[k].push_back(spectral_derivative(g, pot.A0.component(mu), k));
  int c = 0;
  for (int a = 0; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b, ++c) {
      double* dst = F.component(c);
      for (std::size_t i = 0; i < N; ++i) {
        const double da_b = a == 0 ? pot.dtA0.component(b)[i] : grad[a - 1][b][i];
        dst[i] = da_b - grad[b - 1][a][i];
      }
    }
  return F;
}

double lorenz_residual(const OneFormSampler& A, const SpacetimePoint<double>& p) {
  using D = ad::Dual<double>;
  const int n = p.dim();
  double r = 0.0;
  for (int mu = 0; mu <= n; ++mu) {
    SpaceVec<D> x(n);
    for (int i = 0; i < n; ++i) x[i] = D(p.x[i], mu == i + 1 ? 1.0 : 0.0);
    STVec<D> a = A(D(p.t, mu == 0 ? 1.0 : 0.0), x);
    r += eta(mu) * a[mu].der;
  }
  return r;
}

OneFormSampler lie_derivative_1form(const VectorFieldSpec& Z, const OneFormSampler& A) {
  const int n = A.dim();
  const STMatd J = spacetime_jacobian(Z, n);
  return OneFormSampler::analytic(n, [Z, A, J, n](const auto& t, const auto& x) {
    using T = std::remove_cvref_t<decltype(t)>;
    STVec<T> out = STVec<T>::Zero(n + 1);
    if constexpr (level_of_v<T> >= kMaxOrder) {
      throw Error(ErrorCode::InvalidArgument, "Lie derivative exceeds kMaxOrder");
    } else {
      using D = ad::Dual<T>;
      STVec<T> z = spacetime_components(Z, t, x);
      SpaceVec<D> xs(n);
      for (int i = 0; i < n; ++i) xs[i] = D(x[i], z[i + 1]);
      STVec<D> a = A(D(t, z[0]), xs);
      for (int mu = 0; mu <= n; ++mu) {
        out[mu] = a[mu].der;
        for (int nu = 0; nu <= n; ++nu) out[mu] += a[nu].val * J(nu, mu);
      }
    }
    return out;
  });
}

STVecd wave_source(const std::vector<Species>& species, const SpacetimePoint<double>& p,
                   const MultiIndex& beta, const VelocityQuadOptions& opt) {
  const int n = p.dim();
  STVecd J = STVecd::Zero(n + 1);
  for (const auto& sp : species) {
    if (sp.f.is_zero() || sp.charge == 0.0) continue;
    for (int mu = 0; mu <= n; ++mu) {
      VelocityMoment m;
      m.gamma = {WeightSpec::v_ratio(mu)};
      m.beta = beta;
      m.signed_integrand = true;
      J[mu] += sp.charge * eta(mu) * velocity_average(sp.f, p, sp.mass, m, opt).value;
    }
  }
  return J;
}

PotentialBound potential_bound(const PotentialData& pot, const GridField& F0, int N) {
  if (N < 0 || N > 1) throw Error(ErrorCode::InvalidArgument, "potential_bound supports N <= 1");
  const Grid& g = pot.grid;
  const int n = g.n;
  const std::size_t M = g.size();
  const double dv = g.cell_volume();
  std::vector<double> weight(M);
  for (std::size_t i = 0; i < M; ++i) weight[i] = 1.0 + g.point(i).norm();
  auto l2 = [&](const std::vector<double>& f, double power) {
    double s = 0.0;
    for (std::size_t i = 0; i < M; ++i) s += std::pow(weight[i], 2.0 * power) * f[i] * f[i];
    return std::sqrt(s * dv);
  };
  auto l1 = [&](const std::vector<double>& f, double power) {
    double s = 0.0;
    for (std::size_t i = 0; i < M; ++i) s += std::pow(weight[i], power) * std::abs(f[i]);
    return s * dv;
  };

  PotentialBound out;
  // Left side: Σ_β ‖ℒ_{Z^β}A‖_{L²}(0), a 1-form norm summed over components.
  std::vector<std::vector<double>> A(n + 1), dA(n + 1);  // dA[mu] flattened (ν, node)
  for (int mu = 0; mu <= n; ++mu) A[mu].assign(pot.A0.component(mu), pot.A0.component(mu) + M);
  auto oneform_l2 = [&](const std::vector<std::vector<double>>& comps) {
    double s = 0.0;
    for (const auto& c : comps) s += std::pow(l2(c, 0.0), 2);
    return std::sqrt(s);
  };
  out.lhs = oneform_l2(A);
  if (N == 1) {
    // grad[nu][mu]: ∂_ν A_μ at t = 0.
    std::vector<std::vector<std::vector<double>>> grad(n + 1);
    for (int mu = 0; mu <= n; ++mu)
      grad[0].emplace_back(pot.dtA0.component(mu), pot.dtA0.component(mu) + M);
    for (int k = 1; k <= n; ++k)
      for (int mu = 0; mu <= n; ++mu) grad[k].push_back(spectral_derivative(g, pot.A0.component(mu), k - 1));
    for (const auto& Z : vector_field_set(FieldSet::K, n)) {
      const STMatd J = spacetime_jacobian(Z, n);
      std::vector<std::vector<double>> L(n + 1, std::vector<double>(M, 0.0));
      for (std::size_t i = 0; i < M; ++i) {
        STVecd z = spacetime_components(Z, 0.0, g.point(i));
        for (int mu = 0; mu <= n; ++mu) {
          double v = 0.0;
          for (int nu = 0; nu <= n; ++nu) v += z[nu] * grad[nu][mu][i] + A[nu][i] * J(nu, mu);
          L[mu][i] = v;
        }
      }
      out.lhs += oneform_l2(L);
    }
  }

  // Right side: weighted norms of F_{0i} and of the divergence ∂^jF_{ji}.
  for (int i = 1; i <= n; ++i) {
    std::vector<double> E = pair_values(F0, 0, i);
    std::vector<double> div(M, 0.0);
    for (int j = 1; j <= n; ++j) {
      if (j == i) continue;
      std::vector<double> Fji = pair_values(F0, j, i);
      std::vector<double> d = spectral_derivative(g, Fji.data(), j - 1);
      for (std::size_t k = 0; k < M; ++k) div[k] += d[k];
    }
    if (N >= 1) out.rhs += l2(E, 1.0);
    out.rhs += l2(div, 0.0) + l1(div, 1.0);
    if (N == 1) {
      for (int a = 0; a < n; ++a) {
        std::vector<double> d = spectral_derivative(g, div.data(), a);
        out.rhs += l2(d, 1.0) + l1(d, 2.0);
      }
    }
  }
  return out;
}

}  // namespace vmlab
