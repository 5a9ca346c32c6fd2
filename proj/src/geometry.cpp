#include "vmlab/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace vmlab {

double ConeSlice::measure() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

ConeSlice cone_slice(int n, double u, double t, int radial_nodes, int sphere_order, int panels) {
  ConeSlice cs;
  cs.u = u;
  cs.t = t;
  const double r0 = std::max(0.0, -u), r1 = t - u;
  if (r1 <= r0) return cs;
  quad::SphereRule sph = quad::sphere_rule(n, sphere_order);
  const double h = (r1 - r0) / panels;
  for (int p = 0; p < panels; ++p) {
    quad::Rule1D g = quad::gauss_legendre(radial_nodes, r0 + p * h, r0 + (p + 1) * h);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g.x[i];
      // dū = 2 dr.
      const double wr = std::numbers::sqrt2 * 2.0 * g.w[i] * std::pow(r, n - 1);
      for (Eigen::Index j = 0; j < sph.size(); ++j) {
        SpacetimePoint<double> q{u + r, SpaceVec<double>(r * sph.nodes.col(j))};
        cs.nodes.push_back(std::move(q));
        cs.weights.push_back(wr * sph.weights[j]);
      }
    }
  }
  return cs;
}

double cone_measure(int n, double u, double t) {
  const double r0 = std::max(0.0, -u), r1 = t - u;
  if (r1 <= r0) return 0.0;
  return std::numbers::sqrt2 * 2.0 * quad::sphere_area(n) * (std::pow(r1, n) - std::pow(r0, n)) / n;
}

}  // namespace vmlab
