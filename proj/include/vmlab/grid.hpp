#pragma once
// Periodic uniform grids, multi-component grid fields, spectral transforms and
// the flat binary layout used to exchange them.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vmlab/types.hpp"

namespace vmlab {

/// Uniform periodic grid on the box [lo, hi) with dims[i] points per axis.
/// Node k on axis i sits at lo_i + k·h_i (periodic, hi_i excluded).
struct Grid {
  int n = 0;
  std::vector<int> dims;
  Vec lo, hi;

  static Grid cube(int n, int points, double half_width);

  std::size_t size() const;
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / dims[axis]; }
  double length(int axis) const { return hi[axis] - lo[axis]; }
  double cell_volume() const;
  /// Multi-index of a flat row-major index (last axis fastest).
  std::vector<int> unflatten(std::size_t idx) const;
  std::size_t flatten(const std::vector<int>& k) const;
  SpaceVec<double> point(std::size_t idx) const;
  /// Angular wavenumber of the mode stored at position k on an axis.
  double wavenumber(int axis, int k) const;
};

enum class GridKind : std::uint32_t { Scalar = 0, OneForm = 1, TwoForm = 2 };

/// Number of stored components: 1, n+1, or (n+1)n/2 for μ<ν pairs in lexicographic order.
int component_count(GridKind kind, int n);
/// Index of the pair (μ, ν), μ < ν, among the stored 2-form components.
int pair_index(int n, int mu, int nu);

struct GridField {
  Grid grid;
  GridKind kind = GridKind::Scalar;
  int components = 1;
  /// Component-major blocks, each row-major over the grid.
  std::vector<double> data;

  GridField() = default;
  GridField(Grid g, GridKind k);
  double* component(int c) { return data.data() + static_cast<std::size_t>(c) * grid.size(); }
  const double* component(int c) const {
    return data.data() + static_cast<std::size_t>(c) * grid.size();
  }
  /// Full antisymmetric matrix at a node (TwoForm only).
  STMatd two_form_at(std::size_t idx) const;
  double max_abs() const;
};

using Spectrum = std::vector<std::complex<double>>;

/// Unnormalized forward DFT along every axis.
Spectrum fft(const Grid& g, const double* values);
/// Inverse of fft including the 1/N factor; returns the real part.
std::vector<double> ifft_real(const Grid& g, const Spectrum& s);
/// Spectral partial derivative ∂_axis (Nyquist mode dropped).
std::vector<double> spectral_derivative(const Grid& g, const double* values, int axis);

/// Binary layout: see docs/grid_format.md.
void write_grid(std::ostream& os, const GridField& f);
GridField read_grid(std::istream& is);

}  // namespace vmlab
