#pragma once
// Minkowski coordinates, null frames and the weights τ±.

#include <cmath>
#include <vector>

#include "vmlab/quadrature.hpp"
#include "vmlab/types.hpp"

namespace vmlab {

template <class T>
struct NullCoords {
  T u, ubar, tau_minus, tau_plus;
};

template <class T>
NullCoords<T> null_coords(const T& t, const SpaceVec<T>& x) {
  using std::sqrt;
  T r = x.norm();
  T u = t - r, ub = t + r;
  return {u, ub, sqrt(1.0 + u * u), sqrt(1.0 + ub * ub)};
}

template <class T>
NullCoords<T> null_coords(const SpacetimePoint<T>& p) {
  return null_coords(p.t, p.x);
}

template <class T>
struct NullFrame {
  STVec<T> L, Lbar;
  /// Spatial unit vectors e_B as columns, n × (n−1).
  SphereMat<T> sphere;
  SpaceVec<T> radial;

  int dim() const { return static_cast<int>(radial.size()); }
  /// e_B as a spacetime vector.
  STVec<T> e(int B) const {
    STVec<T> out(dim() + 1);
    out[0] = T(0.0);
    out.tail(dim()) = sphere.col(B);
    return out;
  }
};

/// Orthonormal frame at x ≠ 0. Gram–Schmidt of the coordinate axes against x/r,
/// skipping the axis most aligned with x (lowest index on ties).
template <class T>
NullFrame<T> null_frame(const SpaceVec<T>& x) {
  const int n = static_cast<int>(x.size());
  const double rv = ad::value(x.norm());
  if (!(rv > 0.0)) throw Error(ErrorCode::DegenerateRadius, "null frame undefined at r = 0");
  NullFrame<T> fr;
  fr.radial = x / x.norm();
  fr.L = STVec<T>::Zero(n + 1);
  fr.Lbar = STVec<T>::Zero(n + 1);
  fr.L[0] = T(1.0);
  fr.Lbar[0] = T(1.0);
  fr.L.tail(n) = fr.radial;
  fr.Lbar.tail(n) = -fr.radial;

  int skip = 0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(ad::value(x[i])) > std::abs(ad::value(x[skip]))) skip = i;
  }
  fr.sphere.resize(n, n - 1);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    if (i == skip) continue;
    SpaceVec<T> e = SpaceVec<T>::Zero(n);
    e[i] = T(1.0);
    // Two passes of modified Gram–Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      e -= fr.radial.dot(e) * fr.radial;
      for (int c = 0; c < col; ++c) e -= fr.sphere.col(c).dot(e) * fr.sphere.col(c);
    }
    fr.sphere.col(col++) = e / e.norm();
  }
  return fr;
}

template <class T>
NullFrame<T> null_frame(const SpacetimePoint<T>& p) {
  return null_frame(p.x);
}

template <class T>
struct NullVelocity {
  T vL, vLbar;
  SpaceVec<T> vB;
};

/// Null components of the momentum (v⁰, v) at x: v^L = (v⁰+v^r)/2, v^L̄ = (v⁰−v^r)/2.
template <class T>
NullVelocity<T> null_velocity_components(const SpaceVec<T>& x, const SpaceVec<T>& v,
                                         double mass) {
  NullFrame<T> fr = null_frame(x);
  T v0 = energy_of(v, mass);
  T vr = fr.radial.dot(v);
  NullVelocity<T> out{0.5 * (v0 + vr), 0.5 * (v0 - vr), SpaceVec<T>(x.size() - 1)};
  for (int B = 0; B < x.size() - 1; ++B) out.vB[B] = fr.sphere.col(B).dot(v);
  return out;
}

/// Spacetime momentum rebuilt from null components.
template <class T>
STVec<T> reconstruct_velocity(const NullFrame<T>& fr, const NullVelocity<T>& nv) {
  STVec<T> out = nv.vL * fr.L + nv.vLbar * fr.Lbar;
  for (int B = 0; B < fr.dim() - 1; ++B) out += nv.vB[B] * fr.e(B);
  return out;
}

/// Quadrature on the truncated cone C_u(t) = {(s,y): 0 ≤ s ≤ t, s − |y| = u}
/// with measure √2 r^{n−1} dū dS, ū = u + 2r.
struct ConeSlice {
  double u = 0.0;
  double t = 0.0;
  std::vector<SpacetimePoint<double>> nodes;
  std::vector<double> weights;

  double measure() const;
};

ConeSlice cone_slice(int n, double u, double t, int radial_nodes, int sphere_order, int panels = 1);

/// Closed-form measure of C_u(t) for checks.
double cone_measure(int n, double u, double t);

}  // namespace vmlab
