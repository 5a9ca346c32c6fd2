#pragma once
// Commutation vector fields, complete lifts, and their action on phase-space
// functions and 2-forms.

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vmlab/sampler.hpp"
#include "vmlab/weights.hpp"

namespace vmlab {

struct VectorFieldSpec {
  enum class Kind { Translation, Rotation, Boost, Scaling };
  Kind kind = Kind::Translation;
  /// Translation: μ ∈ 0..n. Rotation: spatial 1 ≤ i < j ≤ n. Boost: k ∈ 1..n.
  int i = 0;
  int j = 0;
  bool lifted = false;

  static VectorFieldSpec translation(int mu) { return {Kind::Translation, mu, 0, false}; }
  static VectorFieldSpec rotation(int i, int j);
  static VectorFieldSpec boost(int k) { return {Kind::Boost, k, 0, false}; }
  static VectorFieldSpec scaling() { return {Kind::Scaling, 0, 0, false}; }

  /// Complete lift. Scaling and translations are unchanged by lifting.
  VectorFieldSpec lift() const {
    VectorFieldSpec z = *this;
    z.lifted = kind == Kind::Rotation || kind == Kind::Boost;
    return z;
  }
  bool has_velocity_part() const { return lifted; }
  std::string name() const;

  friend bool operator==(const VectorFieldSpec&, const VectorFieldSpec&) = default;
};

enum class FieldSet {
  K,       // ∂_μ, Ω_{μν}, S
  O,       // rotations
  P,       // ∂_μ, Ω_{μν}
  PHat,    // lifted P
  PHat0    // lifted P and S
};

/// Members in fixed order: translations, rotations (i<j lexicographic), boosts, S.
std::vector<VectorFieldSpec> vector_field_set(FieldSet set, int n);

struct MultiIndex {
  std::vector<VectorFieldSpec> word;
  int order() const { return static_cast<int>(word.size()); }
  std::string name() const;
};

/// All words of length ≤ max_order over `set`, by length then lexicographically.
std::vector<MultiIndex> enumerate_words(const std::vector<VectorFieldSpec>& set, int max_order);

/// Spacetime components Z^μ(t, x) of the unlifted field.
template <class T>
STVec<T> spacetime_components(const VectorFieldSpec& z, const T& t, const SpaceVec<T>& x) {
  const int n = static_cast<int>(x.size());
  STVec<T> c = STVec<T>::Zero(n + 1);
  using K = VectorFieldSpec::Kind;
  switch (z.kind) {
    case K::Translation: c[z.i] = T(1.0); break;
    case K::Rotation:
      c[z.j] = x[z.i - 1];
      c[z.i] = -x[z.j - 1];
      break;
    case K::Boost:
      c[0] = x[z.i - 1];
      c[z.i] = t;
      break;
    case K::Scaling:
      c[0] = t;
      c.tail(n) = x;
      break;
  }
  return c;
}

/// Constant Jacobian J(ρ, ν) = ∂_ν Z^ρ of an unlifted field.
STMatd spacetime_jacobian(const VectorFieldSpec& z, int n);

/// Phase-space components of Z (or its complete lift).
template <class T>
PhaseTangent<T> phase_components(const VectorFieldSpec& z, const PhasePoint<T>& p, double mass) {
  const int n = p.dim();
  STVec<T> c = spacetime_components(z, p.t, p.x);
  PhaseTangent<T> d{c[0], c.tail(n), SpaceVec<T>::Zero(n)};
  if (z.lifted) {
    using K = VectorFieldSpec::Kind;
    if (z.kind == K::Rotation) {
      d.dv[z.j - 1] = p.v[z.i - 1];
      d.dv[z.i - 1] = -p.v[z.j - 1];
    } else if (z.kind == K::Boost) {
      d.dv[z.i - 1] = energy_of(p.v, mass);
    }
  }
  return d;
}

/// T_F = v^μ∂_μ + e v^μ F_{μj} ∂_{v^j}; a default sampler means F = 0.
struct TransportOp {
  FieldSampler field;
  double charge = 1.0;
};
/// Multiplication by a weight.
struct WeightOp {
  WeightSpec weight;
};
/// Multiplication by (v⁰)^q.
struct V0PowerOp {
  double q = 0.0;
};

using PhaseOp = std::variant<VectorFieldSpec, TransportOp, WeightOp, V0PowerOp>;

/// Operators applied right to left: ops[0](ops[1](…h)).
using OpChain = std::vector<PhaseOp>;

OpChain chain_of(const MultiIndex& beta);

template <class T>
PhaseTangent<T> transport_direction(const TransportOp& op, const PhasePoint<T>& p, double mass) {
  const int n = p.dim();
  T v0 = energy_of(p.v, mass);
  PhaseTangent<T> d{v0, p.v, SpaceVec<T>::Zero(n)};
  if (op.field && !op.field.is_zero()) {
    STMat<T> F = op.field(p.t, p.x);
    for (int j = 1; j <= n; ++j) {
      T s = v0 * F(0, j);
      for (int i = 1; i <= n; ++i) s += p.v[i - 1] * F(i, j);
      d.dv[j - 1] = op.charge * s;
    }
  }
  return d;
}

template <class T>
PhasePoint<ad::Dual<T>> seed_point(const PhasePoint<T>& p, const PhaseTangent<T>& d) {
  using D = ad::Dual<T>;
  const Eigen::Index n = p.x.size();
  PhasePoint<D> q{D(p.t, d.dt), SpaceVec<D>(n), SpaceVec<D>(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    q.x[i] = D(p.x[i], d.dx[i]);
    q.v[i] = D(p.v[i], d.dv[i]);
  }
  return q;
}

template <class T>
T apply_ops(std::span<const PhaseOp> ops, const PhaseFunction& h, const PhasePoint<T>& p,
            double mass) {
  if (ops.empty()) return h(p, mass);
  const PhaseOp& op = ops.front();
  auto rest = ops.subspan(1);
  if (const auto* w = std::get_if<WeightOp>(&op)) return w->weight(p, mass) * apply_ops(rest, h, p, mass);
  if (const auto* q = std::get_if<V0PowerOp>(&op)) {
    using std::pow;
    return pow(energy_of(p.v, mass), q->q) * apply_ops(rest, h, p, mass);
  }
  if constexpr (level_of_v<T> >= kMaxOrder) {
    throw Error(ErrorCode::InvalidArgument, "derivative order exceeds kMaxOrder");
  } else {
    PhaseTangent<T> d;
    if (const auto* z = std::get_if<VectorFieldSpec>(&op)) {
      d = phase_components(*z, p, mass);
    } else {
      d = transport_direction(std::get<TransportOp>(op), p, mass);
    }
    return apply_ops(rest, h, seed_point(p, d), mass).der;
  }
}

inline double apply_ops(const OpChain& ops, const PhaseFunction& h, const PhasePoint<double>& p,
                        double mass) {
  return apply_ops<double>(std::span<const PhaseOp>(ops), h, p, mass);
}

/// First-order action Z(h) at (t, x, v).
double apply_vf(const VectorFieldSpec& z, const PhaseFunction& h, const PhasePoint<double>& p,
                double mass);

/// Z^{β₁}…Z^{β_r} h, leftmost outermost.
double apply_word(const MultiIndex& beta, const PhaseFunction& h, const PhasePoint<double>& p,
                  double mass);

/// [T_m, Ẑ]h minus its expected value (0 for ℙ̂, T_m h for S).
double transport_commutator_residual(double mass, const VectorFieldSpec& z, const PhaseFunction& h,
                                     const PhasePoint<double>& p);

/// Lie derivative of F along a word of unlifted fields, at level T.
template <class T>
STMat<T> lie_derivative_word(std::span<const VectorFieldSpec> word, const FieldSampler& F,
                             const T& t, const SpaceVec<T>& x) {
  if (word.empty()) return F(t, x);
  if constexpr (level_of_v<T> >= kMaxOrder) {
    throw Error(ErrorCode::InvalidArgument, "derivative order exceeds kMaxOrder");
  } else {
    using D = ad::Dual<T>;
    const int n = static_cast<int>(x.size());
    const VectorFieldSpec& z = word.front();
    STVec<T> c = spacetime_components(z, t, x);
    SpaceVec<D> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = D(x[i], c[i + 1]);
    STMat<D> inner = lie_derivative_word(word.subspan(1), F, D(t, c[0]), xs);
    STMatd J = spacetime_jacobian(z, n);
    STMat<T> val(n + 1, n + 1), der(n + 1, n + 1);
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) {
        val(a, b) = inner(a, b).val;
        der(a, b) = inner(a, b).der;
      }
    STMat<T> out = der;
    for (int mu = 0; mu <= n; ++mu)
      for (int nu = 0; nu <= n; ++nu)
        for (int rho = 0; rho <= n; ++rho) {
          if (J(rho, mu) != 0.0) out(mu, nu) += J(rho, mu) * val(rho, nu);
          if (J(rho, nu) != 0.0) out(mu, nu) += J(rho, nu) * val(mu, rho);
        }
    return out;
  }
}

STMatd lie_derivative_2form(const VectorFieldSpec& z, const FieldSampler& F,
                            const SpacetimePoint<double>& p);
STMatd lie_derivative_2form(const MultiIndex& beta, const FieldSampler& F,
                            const SpacetimePoint<double>& p);

/// Expansion [Z1, Z2] = Σ c_k Y_k over `set`, fitted by least squares on
/// quadratic test functions. `residual` is the fit's max abs error.
struct CommutatorExpansion {
  std::vector<double> coefficients;
  double residual = 0.0;
};

CommutatorExpansion commutator_expansion(const VectorFieldSpec& a, const VectorFieldSpec& b,
                                         const std::vector<VectorFieldSpec>& set, int n,
                                         double mass, std::uint64_t seed = 7);

}  // namespace vmlab
