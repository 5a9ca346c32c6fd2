#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace vmlab::quad {

struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

/// Gauss–Legendre rule with n nodes on [a, b].
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Gauss–Hermite rule for the weight exp(−x²).
Rule1D gauss_hermite(int n);

/// Gauss rule for the weight (1−x²)^a on [−1, 1].
Rule1D gauss_gegenbauer(int n, double a);

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

/// Adaptive Gauss–Kronrod 7–15 quadrature. `b` may be +infinity.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, double rel_tol = 1e-10, int max_intervals = 2000);

/// Product rule on the unit sphere S^{n−1} ⊂ ℝⁿ in hyperspherical angles.
/// `order` Gauss nodes per polar angle and 2·order trapezoid nodes in azimuth.
struct SphereRule {
  Eigen::MatrixXd nodes;  // n × N
  Eigen::VectorXd weights;
  int dim() const { return static_cast<int>(nodes.rows()); }
  Eigen::Index size() const { return weights.size(); }
};

SphereRule sphere_rule(int n, int order);

/// Surface area of S^{n−1}.
double sphere_area(int n);
/// Volume of the unit ball in ℝⁿ.
double ball_volume(int n);

/// Ball/shell rule: Gauss–Legendre panels in r on [r0, r1] times a sphere rule.
struct CloudRule {
  Eigen::MatrixXd nodes;  // n × N
  Eigen::VectorXd weights;
  Eigen::Index size() const { return weights.size(); }
};

CloudRule radial_spherical(int n, double r0, double r1, int radial_nodes, int panels,
                           int sphere_order);

/// Shell r0 ≤ r ≤ r1 restricted to the cone of half-angle theta_max about the unit
/// vector `axis`: Gauss–Legendre panels in r, Gauss–Legendre in the polar angle and
/// a sphere rule on the orthogonal directions.
CloudRule cap_rule(const Eigen::VectorXd& axis, double theta_max, double r0, double r1,
                   int radial_nodes, int panels, int order);

/// Tensor Gauss–Legendre rule on an axis-aligned box.
CloudRule box_rule(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int nodes_per_axis,
                   int panels = 1);

/// Radical-inverse Halton point (index ≥ 0) in [0,1)^dim, shifted modulo 1 by a
/// seeded Cranley–Patterson rotation.
class Halton {
 public:
  Halton(int dim, std::uint64_t seed);
  Eigen::VectorXd point(std::uint64_t index) const;
  int dim() const { return static_cast<int>(shift_.size()); }

 private:
  Eigen::VectorXd shift_;
};

}  // namespace vmlab::quad
