#pragma once
// Type erasure over derivative nesting levels: one std::function per level
// Nested<0> … Nested<kMaxOrder>.

#include <functional>
#include <tuple>
#include <utility>

#include "vmlab/types.hpp"

namespace vmlab {

template <class T>
struct level_of : std::integral_constant<int, 0> {};
template <class T>
struct level_of<ad::Dual<T>> : std::integral_constant<int, 1 + level_of<T>::value> {};
template <class T>
inline constexpr int level_of_v = level_of<T>::value;

template <template <class> class Sig>
class LevelTable {
  template <std::size_t... K>
  static auto table_type(std::index_sequence<K...>)
      -> std::tuple<std::function<Sig<ad::Nested<static_cast<int>(K)>>>...>;

 public:
  using Table = decltype(table_type(std::make_index_sequence<kMaxOrder + 1>{}));

  template <class F>
  void set_all(const F& f) {
    set_all_impl(f, std::make_index_sequence<kMaxOrder + 1>{});
  }

  template <int K>
  auto& at() {
    return std::get<K>(table_);
  }
  template <int K>
  const auto& at() const {
    return std::get<K>(table_);
  }

 private:
  template <class F, std::size_t... K>
  void set_all_impl(const F& f, std::index_sequence<K...>) {
    ((std::get<K>(table_) = f), ...);
  }

  Table table_;
};

/// Finite-difference step for a lift along direction d at base point p.
inline double fd_step(double p_inf, double d_inf) { return 1e-5 * (1.0 + p_inf) / d_inf; }

}  // namespace vmlab
