#include "vmlab/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

#include <unsupported/Eigen/FFT>

namespace vmlab {

static_assert(std::endian::native == std::endian::little, "grid IO assumes a little-endian host");

Grid Grid::cube(int n, int points, double half_width) {
  Grid g;
  g.n = n;
  g.dims.assign(n, points);
  g.lo = Vec::Constant(n, -half_width);
  g.hi = Vec::Constant(n, half_width);
  return g;
}

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int d : dims) s *= static_cast<std::size_t>(d);
  return s;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= spacing(i);
  return v;
}

std::vector<int> Grid::unflatten(std::size_t idx) const {
  std::vector<int> k(n);
  for (int i = n - 1; i >= 0; --i) {
    k[i] = static_cast<int>(idx % static_cast<std::size_t>(dims[i]));
    idx /= static_cast<std::size_t>(dims[i]);
  }
  return k;
}

std::size_t Grid::flatten(const std::vector<int>& k) const {
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) idx = idx * static_cast<std::size_t>(dims[i]) + static_cast<std::size_t>(k[i]);
  return idx;
}

SpaceVec<double> Grid::point(std::size_t idx) const {
  std::vector<int> k = unflatten(idx);
  SpaceVec<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = lo[i] + k[i] * spacing(i);
  return x;
}

double Grid::wavenumber(int axis, int k) const {
  const int M = dims[axis];
  const int m = k < (M + 1) / 2 ? k : k - M;
  return 2.0 * std::numbers::pi * m / length(axis);
}

int component_count(GridKind kind, int n) {
  switch (kind) {
    case GridKind::Scalar: return 1;
    case GridKind::OneForm: return n + 1;
    case GridKind::TwoForm: return (n + 1) * n / 2;
  }
  return 1;
}

int pair_index(int n, int mu, int nu) {
  int idx = 0;
  for (int a = 0; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      if (a == mu && b == nu) return idx;
      ++idx;
    }
  throw Error(ErrorCode::InvalidArgument, "pair_index needs mu < nu <= n");
}

GridField::GridField(Grid g, GridKind k)
    : grid(std::move(g)), kind(k), components(component_count(k, grid.n)),
      data(static_cast<std::size_t>(components) * grid.size(), 0.0) {}

STMatd GridField::two_form_at(std::size_t idx) const {
  const int n = grid.n;
  STMatd F = STMatd::Zero(n + 1, n + 1);
  int c = 0;
  for (int a = 0; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b, ++c) {
      F(a, b) = component(c)[idx];
      F(b, a) = -F(a, b);
    }
  return F;
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : data) m = std::max(m, std::abs(v));
  return m;
}

namespace {

void transform_axes(const Grid& g, Spectrum& s, bool inverse) {
  Eigen::FFT<double> fft;
  const std::size_t N = g.size();
  std::size_t stride = 1;
  for (int axis = g.n - 1; axis >= 0; --axis) {
    const std::size_t M = static_cast<std::size_t>(g.dims[axis]);
    std::vector<std::complex<double>> in(M), out(M);
    const std::size_t block = stride * M;
    for (std::size_t base = 0; base < N; base += block)
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t k = 0; k < M; ++k) in[k] = s[base + off + k * stride];
        if (inverse) {
          fft.inv(out, in);
        } else {
          fft.fwd(out, in);
        }
        for (std::size_t k = 0; k < M; ++k) s[base + off + k * stride] = out[k];
      }
    stride *= M;
  }
}

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error(ErrorCode::IoFailure, "truncated grid file");
  return v;
}

constexpr char kMagic[8] = {'V', 'M', 'G', 'R', 'I', 'D', '\0', '\0'};

}  // namespace

Spectrum fft(const Grid& g, const double* values) {
  Spectrum s(values, values + g.size());
  transform_axes(g, s, false);
  return s;
}

std::vector<double> ifft_real(const Grid& g, const Spectrum& spec) {
  Spectrum s = spec;
  transform_axes(g, s, true);  // Eigen's inverse includes 1/M per axis
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i].real();
  return out;
}

std::vector<double> spectral_derivative(const Grid& g, const double* values, int axis) {
  Spectrum s = fft(g, values);
  const int M = g.dims[axis];
  std::size_t stride = 1;
  for (int a = g.n - 1; a > axis; --a) stride *= static_cast<std::size_t>(g.dims[a]);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int k = static_cast<int>((i / stride) % static_cast<std::size_t>(M));
    if (M % 2 == 0 && k == M / 2) {
      s[i] = 0.0;
    } else {
      s[i] *= std::complex<double>(0.0, g.wavenumber(axis, k));
    }
  }
  return ifft_real(g, s);
}

void write_grid(std::ostream& os, const GridField& f) {
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.kind));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.n));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.components));
  put<std::uint32_t>(os, 1);  // f64
  put<std::uint32_t>(os, 0);
  for (int d : f.grid.dims) put<std::uint64_t>(os, static_cast<std::uint64_t>(d));
  for (int i = 0; i < f.grid.n; ++i) put<double>(os, f.grid.lo[i]);
  for (int i = 0; i < f.grid.n; ++i) put<double>(os, f.grid.hi[i]);
  os.write(reinterpret_cast<const char*>(f.data.data()),
           static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!os) throw Error(ErrorCode::IoFailure, "grid write failed");
}

GridField read_grid(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error(ErrorCode::IoFailure, "not a grid file");
  if (get<std::uint32_t>(is) != 1) throw Error(ErrorCode::IoFailure, "unsupported grid version");
  const auto kind_code = get<std::uint32_t>(is);
  if (kind_code > 2) throw Error(ErrorCode::IoFailure, "unknown grid kind");
  const auto kind = static_cast<GridKind>(kind_code);
  const auto n = static_cast<int>(get<std::uint32_t>(is));
  const auto comps = static_cast<int>(get<std::uint32_t>(is));
  if (get<std::uint32_t>(is) != 1) throw Error(ErrorCode::IoFailure, "unsupported dtype");
  get<std::uint32_t>(is);
  if (n < 1 || n > kMaxSpaceDim) throw Error(ErrorCode::IoFailure, "bad grid dimension");
  Grid g;
  g.n = n;
  for (int i = 0; i < n; ++i) g.dims.push_back(static_cast<int>(get<std::uint64_t>(is)));
  g.lo.resize(n);
  g.hi.resize(n);
  for (int i = 0; i < n; ++i) g.lo[i] = get<double>(is);
  for (int i = 0; i < n; ++i) g.hi[i] = get<double>(is);
  GridField f;
  f.grid = g;
  f.kind = kind;
  f.components = comps;
  if (comps != component_count(kind, n))
    throw Error(ErrorCode::IoFailure, "component count does not match kind");
  f.data.resize(static_cast<std::size_t>(comps) * g.size());
  is.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!is) throw Error(ErrorCode::IoFailure, "truncated grid data");
  return f;
}

}  // namespace vmlab
