#pragma once
// Weights preserved by free transport.

#include <string>
#include <vector>

#include "vmlab/types.hpp"

namespace vmlab {

struct WeightSpec {
  enum class Kind { VRatio, Angular, ScalarProduct };
  Kind kind = Kind::VRatio;
  int mu = 0;
  int nu = 0;
  /// Divide by v⁰.
  bool normalized = true;

  static WeightSpec v_ratio(int mu, bool normalized = true) {
    return {Kind::VRatio, mu, 0, normalized};
  }
  /// x^μ v^ν − x^ν v^μ with x⁰ = t, v⁰ the energy; requires μ < ν.
  static WeightSpec angular(int mu, int nu, bool normalized = true);
  static WeightSpec scalar_product(bool normalized = true) {
    return {Kind::ScalarProduct, 0, 0, normalized};
  }

  /// Only admissible for massless flows.
  bool massless_only() const { return kind == Kind::ScalarProduct; }
  std::string name() const;

  template <class T>
  T operator()(const PhasePoint<T>& p, double mass) const {
    T v0 = energy_of(p.v, mass);
    auto xc = [&](int m) -> T { return m == 0 ? p.t : p.x[m - 1]; };
    auto vc = [&](int m) -> T { return m == 0 ? v0 : p.v[m - 1]; };
    T z(0.0);
    switch (kind) {
      case Kind::VRatio: z = vc(mu); break;
      case Kind::Angular: z = xc(mu) * vc(nu) - xc(nu) * vc(mu); break;
      case Kind::ScalarProduct: z = p.x.dot(p.v) - p.t * v0; break;
    }
    return normalized ? T(z / v0) : z;
  }
};

/// {v^μ/v⁰} ∪ {(x^μv^ν − x^νv^μ)/v⁰, μ < ν}.
std::vector<WeightSpec> k1_weights(int n);
/// k1 plus x^μ v_μ / v⁰.
std::vector<WeightSpec> k0_weights(int n);

}  // namespace vmlab
