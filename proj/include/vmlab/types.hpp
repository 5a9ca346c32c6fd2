#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "vmlab/dual.hpp"

namespace vmlab {

inline constexpr int kMaxSpaceDim = 6;
inline constexpr int kMaxSpacetimeDim = kMaxSpaceDim + 1;
/// Highest nesting level instantiated for type-erased evaluators.
inline constexpr int kMaxOrder = 5;

template <class T>
using SpaceVec = Eigen::Matrix<T, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxSpaceDim, 1>;
template <class T>
using STVec = Eigen::Matrix<T, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxSpacetimeDim, 1>;
template <class T>
using STMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxSpacetimeDim,
                            kMaxSpacetimeDim>;
template <class T>
using SphereMat =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxSpaceDim, kMaxSpaceDim>;

using Vec = SpaceVec<double>;
using STVecd = STVec<double>;
using STMatd = STMat<double>;

enum class ErrorCode {
  DegenerateRadius,
  MasslessZeroVelocity,
  QuadratureNotConverged,
  HypothesisViolated,
  NoRootInBracket,
  StepSizeUnderflow,
  NonZeroMeanSource,
  BoxTooSmall,
  CFLViolation,
  ConfigError,
  IoFailure,
  InvalidArgument
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Event (t, x) in Minkowski space.
template <class T>
struct SpacetimePoint {
  T t{};
  SpaceVec<T> x;

  int dim() const { return static_cast<int>(x.size()); }
};

/// Point (t, x, v) of phase space. The mass is carried separately.
template <class T>
struct PhasePoint {
  T t{};
  SpaceVec<T> x;
  SpaceVec<T> v;

  int dim() const { return static_cast<int>(x.size()); }
};

/// Tangent vector on phase space, components along (∂t, ∂x, ∂v).
template <class T>
struct PhaseTangent {
  T dt{};
  SpaceVec<T> dx;
  SpaceVec<T> dv;
};

template <class T>
T energy_of(const SpaceVec<T>& v, double mass) {
  using std::sqrt;
  return sqrt(mass * mass + v.squaredNorm());
}

/// Minkowski metric coefficient η_{μμ}.
inline double eta(int mu) { return mu == 0 ? -1.0 : 1.0; }

template <class U, class T>
SpaceVec<U> strip_vec(const SpaceVec<T>& v) {
  SpaceVec<U> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = ad::strip<U>(v[i]);
  return out;
}

template <class T>
SpaceVec<double> values(const SpaceVec<T>& v) {
  SpaceVec<double> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = ad::value(v[i]);
  return out;
}

}  // namespace vmlab
