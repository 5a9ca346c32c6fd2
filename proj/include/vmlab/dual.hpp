#pragma once
// Forward-mode dual numbers. Nesting Dual<Dual<...>> gives higher derivatives
// along successive seed directions.

#include <cmath>
#include <ostream>
#include <type_traits>

#include <Eigen/Core>

namespace vmlab::ad {

template <class T>
struct Dual;

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<T>::value;

template <int K>
struct NestedImpl {
  using type = Dual<typename NestedImpl<K - 1>::type>;
};
template <>
struct NestedImpl<0> {
  using type = double;
};
/// Scalar carrying K nested derivative directions.
template <int K>
using Nested = typename NestedImpl<K>::type;

template <class T>
struct Dual {
  using inner_type = T;

  T val{};
  T der{};

  constexpr Dual() = default;
  constexpr Dual(const T& v, const T& d) : val(v), der(d) {}

  // Constants of any lower nesting level (including double) promote with zero
  // derivative. The constraint keeps Dual<T> itself out of the template.
  template <class S>
    requires(!std::is_same_v<std::remove_cvref_t<S>, Dual> && std::is_constructible_v<T, const S&>)
  constexpr Dual(const S& s) : val(s), der(0.0) {}

  Dual& operator+=(const Dual& o) {
    val += o.val;
    der += o.der;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    val -= o.val;
    der -= o.der;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    der = der * o.val + val * o.der;
    val *= o.val;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    T q = val / o.val;
    der = (der - q * o.der) / o.val;
    val = q;
    return *this;
  }

  friend Dual operator+(const Dual& a) { return a; }
  friend Dual operator-(const Dual& a) { return Dual(-a.val, -a.der); }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    return Dual(a.val * b.val, a.der * b.val + a.val * b.der);
  }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }

  // Scalar shortcuts avoid promoting double constants through every level.
  friend Dual operator*(const Dual& a, double s) { return Dual(a.val * s, a.der * s); }
  friend Dual operator*(double s, const Dual& a) { return Dual(a.val * s, a.der * s); }
  friend Dual operator/(const Dual& a, double s) { return Dual(a.val / s, a.der / s); }
  friend Dual operator+(const Dual& a, double s) { return Dual(a.val + s, a.der); }
  friend Dual operator+(double s, const Dual& a) { return Dual(a.val + s, a.der); }
  friend Dual operator-(const Dual& a, double s) { return Dual(a.val - s, a.der); }
  friend Dual operator-(double s, const Dual& a) { return Dual(s - a.val, -a.der); }
};

/// Innermost double value.
inline double value(double x) { return x; }
template <class T>
double value(const Dual<T>& x) {
  return value(x.val);
}

#define VMLAB_DUAL_CMP(op)                                            \
  template <class T>                                                  \
  bool operator op(const Dual<T>& a, const Dual<T>& b) {              \
    return value(a) op value(b);                                      \
  }                                                                   \
  template <class T>                                                  \
  bool operator op(const Dual<T>& a, double b) {                      \
    return value(a) op b;                                             \
  }                                                                   \
  template <class T>                                                  \
  bool operator op(double a, const Dual<T>& b) {                      \
    return a op value(b);                                             \
  }
VMLAB_DUAL_CMP(<)
VMLAB_DUAL_CMP(>)
VMLAB_DUAL_CMP(<=)
VMLAB_DUAL_CMP(>=)
VMLAB_DUAL_CMP(==)
VMLAB_DUAL_CMP(!=)
#undef VMLAB_DUAL_CMP

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.val);
  return Dual<T>(s, a.der / (2.0 * s));
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.val);
  return Dual<T>(e, e * a.der);
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return Dual<T>(log(a.val), a.der / a.val);
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return Dual<T>(sin(a.val), cos(a.val) * a.der);
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return Dual<T>(cos(a.val), -(sin(a.val) * a.der));
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  T th = tanh(a.val);
  return Dual<T>(th, (1.0 - th * th) * a.der);
}
template <class T>
Dual<T> sinh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  return Dual<T>(sinh(a.val), cosh(a.val) * a.der);
}
template <class T>
Dual<T> cosh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  return Dual<T>(cosh(a.val), sinh(a.val) * a.der);
}
template <class T>
Dual<T> asinh(const Dual<T>& a) {
  using std::asinh;
  using std::sqrt;
  return Dual<T>(asinh(a.val), a.der / sqrt(1.0 + a.val * a.val));
}
template <class T>
Dual<T> atan(const Dual<T>& a) {
  using std::atan;
  return Dual<T>(atan(a.val), a.der / (1.0 + a.val * a.val));
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  using std::atan2;
  T r2 = x.val * x.val + y.val * y.val;
  return Dual<T>(atan2(y.val, x.val), (x.val * y.der - y.val * x.der) / r2);
}
template <class T>
Dual<T> pow(const Dual<T>& a, double p) {
  using std::pow;
  T w = pow(a.val, p - 1.0);
  return Dual<T>(w * a.val, p * w * a.der);
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
  return value(a) < 0.0 ? -a : a;
}
template <class T>
Dual<T> fabs(const Dual<T>& a) {
  return abs(a);
}
template <class T>
bool isfinite(const Dual<T>& a) {
  using std::isfinite;
  return isfinite(a.val) && isfinite(a.der);
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Dual<T>& a) {
  return os << '(' << a.val << " + " << a.der << " e)";
}

/// Seeds a value with a derivative direction.
template <class T>
Dual<T> seed(const T& v, const T& d) {
  return Dual<T>(v, d);
}

/// Strips derivative parts down to level U.
template <class U>
U strip(const U& x) {
  return x;
}
template <class U, class T>
  requires(!std::is_same_v<U, Dual<T>>)
U strip(const Dual<T>& x) {
  return strip<U>(x.val);
}

}  // namespace vmlab::ad

namespace Eigen {

template <class T>
struct NumTraits<vmlab::ad::Dual<T>> : NumTraits<double> {
  using Real = vmlab::ad::Dual<T>;
  using NonInteger = vmlab::ad::Dual<T>;
  using Nested = vmlab::ad::Dual<T>;
  using Literal = vmlab::ad::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost
  };
  static Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static Real dummy_precision() { return Real(NumTraits<double>::dummy_precision()); }
  static Real highest() { return Real(NumTraits<double>::highest()); }
  static Real lowest() { return Real(NumTraits<double>::lowest()); }
  static int digits10() { return NumTraits<double>::digits10(); }
};

template <class T, class BinOp>
struct ScalarBinaryOpTraits<vmlab::ad::Dual<T>, double, BinOp> {
  using ReturnType = vmlab::ad::Dual<T>;
};
template <class T, class BinOp>
struct ScalarBinaryOpTraits<double, vmlab::ad::Dual<T>, BinOp> {
  using ReturnType = vmlab::ad::Dual<T>;
};

}  // namespace Eigen
