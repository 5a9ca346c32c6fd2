#pragma once
// Spacetime samplers (2-forms, 1-forms) and phase-space functions, each
// evaluable at every nesting level. Analytic evaluators are differentiated
// exactly; sampled ones are lifted level by level with central differences.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include "vmlab/levels.hpp"

namespace vmlab {

enum class Provenance { Analytic, Grid, ReducedSymmetry };

template <template <class> class R>
struct SpacetimeSig {
  template <class T>
  using type = R<T>(const T&, const SpaceVec<T>&);
};

template <template <class> class R>
class SpacetimeSampler {
 public:
  using Table = LevelTable<SpacetimeSig<R>::template type>;

  SpacetimeSampler() = default;

  /// `f` is a generic callable (t, x) -> R<T>.
  template <class F>
  static SpacetimeSampler analytic(int n, const F& f, Provenance prov = Provenance::Analytic) {
    SpacetimeSampler s;
    s.n_ = n;
    s.provenance_ = prov;
    s.table_ = std::make_shared<Table>();
    s.table_->set_all(f);
    return s;
  }

  static SpacetimeSampler sampled(int n, std::function<R<double>(double, const SpaceVec<double>&)> f,
                                  Provenance prov = Provenance::Grid, double interp_error = 0.0) {
    SpacetimeSampler s;
    s.n_ = n;
    s.provenance_ = prov;
    s.interp_error_ = interp_error;
    s.table_ = std::make_shared<Table>();
    s.table_->template at<0>() = std::move(f);
    install_fd(*s.table_, std::make_integer_sequence<int, kMaxOrder + 1>{});
    return s;
  }

  static SpacetimeSampler zero(int n, int rows, int cols) {
    SpacetimeSampler s = analytic(n, [rows, cols](const auto& t, const auto&) {
      using T = std::remove_cvref_t<decltype(t)>;
      return R<T>(R<T>::Zero(rows, cols));
    });
    s.is_zero_ = true;
    return s;
  }

  template <class T>
  R<T> operator()(const T& t, const SpaceVec<T>& x) const {
    static_assert(level_of_v<T> <= kMaxOrder, "nesting deeper than kMaxOrder");
    return table_->template at<level_of_v<T>>()(t, x);
  }

  R<double> at(const SpacetimePoint<double>& p) const { return (*this)(p.t, p.x); }

  int dim() const { return n_; }
  Provenance provenance() const { return provenance_; }
  double interpolation_error() const { return interp_error_; }
  bool is_zero() const { return is_zero_; }
  explicit operator bool() const { return static_cast<bool>(table_); }

 private:
  template <int... K>
  static void install_fd(Table& tbl, std::integer_sequence<int, K...>) {
    (install_level<K>(tbl), ...);
  }

  template <int K>
  static void install_level(Table& tbl) {
    if constexpr (K > 0) {
      using T = ad::Nested<K>;
      using U = ad::Nested<K - 1>;
      const Table* self = &tbl;
      tbl.template at<K>() = [self](const T& t, const SpaceVec<T>& x) -> R<T> {
        const auto& lower = self->template at<K - 1>();
        const Eigen::Index n = x.size();
        U tv = t.val, td = t.der;
        SpaceVec<U> xv(n), xd(n);
        double pinf = std::abs(ad::value(tv)), dinf = std::abs(ad::value(td));
        for (Eigen::Index i = 0; i < n; ++i) {
          xv[i] = x[i].val;
          xd[i] = x[i].der;
          pinf = std::max(pinf, std::abs(ad::value(xv[i])));
          dinf = std::max(dinf, std::abs(ad::value(xd[i])));
        }
        R<U> base = lower(tv, xv);
        R<T> out(base.rows(), base.cols());
        if (dinf == 0.0) {
          for (Eigen::Index i = 0; i < base.size(); ++i) out(i) = T(base(i), U(0.0));
          return out;
        }
        const double h = fd_step(pinf, dinf);
        SpaceVec<U> xp = xv + h * xd, xm = xv - h * xd;
        R<U> plus = lower(tv + h * td, xp);
        R<U> minus = lower(tv - h * td, xm);
        for (Eigen::Index i = 0; i < base.size(); ++i) {
          out(i) = T(base(i), (plus(i) - minus(i)) / (2.0 * h));
        }
        return out;
      };
    }
  }

  int n_ = 0;
  Provenance provenance_ = Provenance::Analytic;
  double interp_error_ = 0.0;
  bool is_zero_ = false;
  std::shared_ptr<Table> table_;
};

/// Antisymmetric (n+1)×(n+1) 2-form valued sampler, index 0 = t.
using FieldSampler = SpacetimeSampler<STMat>;
/// (n+1) 1-form valued sampler with lower indices.
using OneFormSampler = SpacetimeSampler<STVec>;

inline FieldSampler zero_field(int n) { return FieldSampler::zero(n, n + 1, n + 1); }

/// Support information for a phase-space function.
struct SupportHint {
  /// Radius of a ball containing the x-support at t = 0 (infinite if none).
  double x_radius = std::numeric_limits<double>::infinity();
  /// Radius of a ball containing the v-support (infinite if none).
  double v_radius = std::numeric_limits<double>::infinity();
  /// Scale of a Gaussian-type envelope in v when not compact.
  double v_scale = 1.0;
  /// Scale of a Gaussian-type envelope in x when not compact.
  double x_scale = 1.0;
  bool velocity_compact() const { return std::isfinite(v_radius); }
};

template <class T>
using PhaseSig = T(const PhasePoint<T>&, double);

/// Distribution function f(t, x, v) with mass passed at evaluation.
class PhaseFunction {
 public:
  using Table = LevelTable<PhaseSig>;

  PhaseFunction() = default;

  /// `f` is a generic callable (const PhasePoint<T>&, double mass) -> T.
  template <class F>
  static PhaseFunction analytic(const F& f, SupportHint hint = {}) {
    PhaseFunction pf;
    pf.table_ = std::make_shared<Table>();
    pf.table_->set_all(f);
    pf.hint_ = hint;
    return pf;
  }

  static PhaseFunction sampled(std::function<double(const PhasePoint<double>&, double)> f,
                               SupportHint hint = {});

  static PhaseFunction zero() {
    PhaseFunction pf = analytic([](const auto& p, double) { return decltype(p.t)(0.0); });
    pf.is_zero_ = true;
    return pf;
  }

  template <class T>
  T operator()(const PhasePoint<T>& p, double mass) const {
    static_assert(level_of_v<T> <= kMaxOrder, "nesting deeper than kMaxOrder");
    return table_->template at<level_of_v<T>>()(p, mass);
  }

  const SupportHint& support() const { return hint_; }
  bool is_zero() const { return is_zero_; }
  bool is_analytic() const { return analytic_; }

 private:
  template <int K>
  static void install_level(Table& tbl);
  template <int... K>
  static void install_fd(Table& tbl, std::integer_sequence<int, K...>) {
    (install_level<K>(tbl), ...);
  }

  std::shared_ptr<Table> table_;
  SupportHint hint_;
  bool is_zero_ = false;
  bool analytic_ = true;
};

template <int K>
void PhaseFunction::install_level(Table& tbl) {
  if constexpr (K > 0) {
    using T = ad::Nested<K>;
    using U = ad::Nested<K - 1>;
    const Table* self = &tbl;
    tbl.template at<K>() = [self](const PhasePoint<T>& p, double mass) -> T {
      const auto& lower = self->template at<K - 1>();
      const Eigen::Index n = p.x.size();
      PhasePoint<U> base{p.t.val, SpaceVec<U>(n), SpaceVec<U>(n)};
      PhasePoint<U> dir{p.t.der, SpaceVec<U>(n), SpaceVec<U>(n)};
      double pinf = std::abs(ad::value(base.t)), dinf = std::abs(ad::value(dir.t));
      for (Eigen::Index i = 0; i < n; ++i) {
        base.x[i] = p.x[i].val;
        dir.x[i] = p.x[i].der;
        base.v[i] = p.v[i].val;
        dir.v[i] = p.v[i].der;
        pinf = std::max({pinf, std::abs(ad::value(base.x[i])), std::abs(ad::value(base.v[i]))});
        dinf = std::max({dinf, std::abs(ad::value(dir.x[i])), std::abs(ad::value(dir.v[i]))});
      }
      U f0 = lower(base, mass);
      if (dinf == 0.0) return T(f0, U(0.0));
      const double h = fd_step(pinf, dinf);
      PhasePoint<U> plus{base.t + h * dir.t, base.x + h * dir.x, base.v + h * dir.v};
      PhasePoint<U> minus{base.t - h * dir.t, base.x - h * dir.x, base.v - h * dir.v};
      return T(f0, (lower(plus, mass) - lower(minus, mass)) / (2.0 * h));
    };
  }
}

inline PhaseFunction PhaseFunction::sampled(
    std::function<double(const PhasePoint<double>&, double)> f, SupportHint hint) {
  PhaseFunction pf;
  pf.table_ = std::make_shared<Table>();
  pf.table_->template at<0>() = std::move(f);
  install_fd(*pf.table_, std::make_integer_sequence<int, kMaxOrder + 1>{});
  pf.hint_ = hint;
  pf.analytic_ = false;
  return pf;
}

}  // namespace vmlab
