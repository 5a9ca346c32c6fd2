#include "vmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "vmlab/types.hpp"

namespace vmlab::quad {

namespace {

Rule1D legendre_reference(int n) {
  static std::mutex mu;
  static std::map<int, Rule1D> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  Rule1D rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.x[i] = -z;
    rule.x[n - 1 - i] = z;
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  cache.emplace(n, rule);
  return rule;
}

// Kronrod 15-point nodes/weights and embedded Gauss 7-point weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    double f1 = f(c - dx), f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  return Segment{a, b, resk * h, std::abs((resk - resg) * h)};
}

}  // namespace

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "gauss_legendre needs n >= 1");
  Rule1D ref = legendre_reference(n);
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    ref.x[i] = c + h * ref.x[i];
    ref.w[i] *= h;
  }
  return ref;
}

Rule1D gauss_hermite(int n) {
  // Golub–Welsch on the Hermite Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    J(i, i - 1) = J(i - 1, i) = std::sqrt(i / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule1D rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const double mu0 = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    rule.x[i] = es.eigenvalues()[i];
    double v0 = es.eigenvectors()(0, i);
    rule.w[i] = mu0 * v0 * v0;
  }
  return rule;
}

Rule1D gauss_gegenbauer(int n, double a) {
  // Golub–Welsch for the weight (1−x²)^a on [−1, 1]; λ = a + 1/2.
  const double lam = a + 0.5;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double beta = k * (k + 2.0 * lam - 1.0) / (4.0 * (k + lam) * (k + lam - 1.0));
    J(k, k - 1) = J(k - 1, k) = std::sqrt(beta);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
  Rule1D rule;
  for (int i = 0; i < n; ++i) {
    rule.x.push_back(es.eigenvalues()[i]);
    double v0 = es.eigenvectors()(0, i);
    rule.w.push_back(mu0 * v0 * v0);
  }
  return rule;
}

Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, int max_intervals) {
  std::function<double(double)> g = f;
  double lo = a, hi = b;
  if (std::isinf(b)) {
    // x = a + s/(1−s), dx = ds/(1−s)².
    g = [&f, a](double s) {
      if (s >= 1.0) return 0.0;
      double om = 1.0 - s;
      return f(a + s / om) / (om * om);
    };
    lo = 0.0;
    hi = 1.0;
  }
  Result res;
  std::priority_queue<Segment> heap;
  Segment first = gk15(g, lo, hi);
  res.evaluations = 15;
  heap.push(first);
  double total = first.value, err = first.error;
  int intervals = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (intervals >= max_intervals) {
      res.converged = false;
      break;
    }
    Segment s = heap.top();
    heap.pop();
    double mid = 0.5 * (s.a + s.b);
    Segment l = gk15(g, s.a, mid), r = gk15(g, mid, s.b);
    res.evaluations += 30;
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    ++intervals;
  }
  // Recompute the sums to shed accumulated cancellation.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  res.value = total;
  res.error = err;
  return res;
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n) { return sphere_area(n) / n; }

SphereRule sphere_rule(int n, int order) {
  SphereRule rule;
  if (n == 1) {
    rule.nodes.resize(1, 2);
    rule.nodes << -1.0, 1.0;
    rule.weights = Eigen::VectorXd::Ones(2);
    return rule;
  }
  const int nphi = 2 * order;
  // Polar angles θ_1..θ_{n−2}; θ_k carries sin^{n−1−k}.
  std::vector<Rule1D> polar;
  for (int k = 1; k <= n - 2; ++k) {
    int j = n - 1 - k;
    // ∫ g(θ) sin^j θ dθ = ∫ g(acos c) (1−c²)^{(j−1)/2} dc.
    Rule1D c = gauss_gegenbauer(order, 0.5 * (j - 1));
    Rule1D r;
    for (std::size_t i = 0; i < c.size(); ++i) {
      r.x.push_back(std::acos(c.x[i]));
      r.w.push_back(c.w[i]);
    }
    polar.push_back(std::move(r));
  }
  Eigen::Index total = nphi;
  for (const auto& r : polar) total *= static_cast<Eigen::Index>(r.size());
  rule.nodes.resize(n, total);
  rule.weights.resize(total);
  std::vector<int> idx(polar.size(), 0);
  Eigen::Index col = 0;
  for (;;) {
    double w = 2.0 * std::numbers::pi / nphi;
    double prod = 1.0;
    Eigen::VectorXd head(n);
    for (std::size_t k = 0; k < polar.size(); ++k) {
      double th = polar[k].x[idx[k]];
      head[k] = prod * std::cos(th);
      prod *= std::sin(th);
      w *= polar[k].w[idx[k]];
    }
    for (int p = 0; p < nphi; ++p) {
      double phi = 2.0 * std::numbers::pi * (p + 0.5) / nphi;
      rule.nodes.col(col).head(n - 2) = head.head(n - 2);
      rule.nodes(n - 2, col) = prod * std::cos(phi);
      rule.nodes(n - 1, col) = prod * std::sin(phi);
      rule.weights[col] = w;
      ++col;
    }
    std::size_t k = 0;
    for (; k < polar.size(); ++k) {
      if (++idx[k] < static_cast<int>(polar[k].size())) break;
      idx[k] = 0;
    }
    if (k == polar.size()) break;
  }
  return rule;
}

CloudRule radial_spherical(int n, double r0, double r1, int radial_nodes, int panels,
                           int sphere_order) {
  SphereRule s = sphere_rule(n, sphere_order);
  std::vector<double> rs, ws;
  double h = (r1 - r0) / panels;
  for (int p = 0; p < panels; ++p) {
    Rule1D g = gauss_legendre(radial_nodes, r0 + p * h, r0 + (p + 1) * h);
    for (std::size_t i = 0; i < g.size(); ++i) {
      rs.push_back(g.x[i]);
      ws.push_back(g.w[i] * std::pow(g.x[i], n - 1));
    }
  }
  CloudRule out;
  Eigen::Index N = static_cast<Eigen::Index>(rs.size()) * s.size();
  out.nodes.resize(n, N);
  out.weights.resize(N);
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (Eigen::Index j = 0; j < s.size(); ++j, ++col) {
      out.nodes.col(col) = rs[i] * s.nodes.col(j);
      out.weights[col] = ws[i] * s.weights[j];
    }
  }
  return out;
}

CloudRule cap_rule(const Eigen::VectorXd& axis, double theta_max, double r0, double r1,
                   int radial_nodes, int panels, int order) {
  const int n = static_cast<int>(axis.size());
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "cap rule needs n >= 2");
  Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(axis).householderQ();
  Eigen::MatrixXd perp = Q.rightCols(n - 1);
  SphereRule s = sphere_rule(n - 1, order);
  std::vector<Rule1D> radial;
  const double h = (r1 - r0) / panels;
  for (int p = 0; p < panels; ++p) radial.push_back(gauss_legendre(radial_nodes, r0 + p * h, r0 + (p + 1) * h));
  Rule1D polar = gauss_legendre(order, 0.0, theta_max);
  CloudRule out;
  const Eigen::Index N = static_cast<Eigen::Index>(panels * radial_nodes) *
                         static_cast<Eigen::Index>(polar.size()) * s.size();
  out.nodes.resize(n, N);
  out.weights.resize(N);
  Eigen::Index col = 0;
  for (const auto& g : radial)
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t k = 0; k < polar.size(); ++k) {
        const double th = polar.x[k];
        const double w = g.w[i] * std::pow(g.x[i], n - 1) * polar.w[k] * std::pow(std::sin(th), n - 2);
        for (Eigen::Index j = 0; j < s.size(); ++j, ++col) {
          out.nodes.col(col) = g.x[i] * (std::cos(th) * axis + std::sin(th) * (perp * s.nodes.col(j)));
          out.weights[col] = w * s.weights[j];
        }
      }
  return out;
}

CloudRule box_rule(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int nodes_per_axis,
                   int panels) {
  const int n = static_cast<int>(lo.size());
  std::vector<Rule1D> axes;
  for (int d = 0; d < n; ++d) {
    Rule1D ax;
    double h = (hi[d] - lo[d]) / panels;
    for (int p = 0; p < panels; ++p) {
      Rule1D g = gauss_legendre(nodes_per_axis, lo[d] + p * h, lo[d] + (p + 1) * h);
      ax.x.insert(ax.x.end(), g.x.begin(), g.x.end());
      ax.w.insert(ax.w.end(), g.w.begin(), g.w.end());
    }
    axes.push_back(std::move(ax));
  }
  Eigen::Index N = 1;
  for (const auto& a : axes) N *= static_cast<Eigen::Index>(a.size());
  CloudRule out;
  out.nodes.resize(n, N);
  out.weights.resize(N);
  std::vector<int> idx(n, 0);
  for (Eigen::Index col = 0; col < N; ++col) {
    double w = 1.0;
    for (int d = 0; d < n; ++d) {
      out.nodes(d, col) = axes[d].x[idx[d]];
      w *= axes[d].w[idx[d]];
    }
    out.weights[col] = w;
    for (int d = n - 1; d >= 0; --d) {
      if (++idx[d] < static_cast<int>(axes[d].size())) break;
      idx[d] = 0;
    }
  }
  return out;
}

Halton::Halton(int dim, std::uint64_t seed) : shift_(dim) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int d = 0; d < dim; ++d) shift_[d] = u(rng);
}

Eigen::VectorXd Halton::point(std::uint64_t index) const {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  const int dim = this->dim();
  if (dim > 16) throw Error(ErrorCode::InvalidArgument, "Halton supports at most 16 dimensions");
  Eigen::VectorXd p(dim);
  for (int d = 0; d < dim; ++d) {
    const int base = kPrimes[d];
    double f = 1.0, r = 0.0;
    std::uint64_t i = index + 1;
    while (i > 0) {
      f /= base;
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    double s = r + shift_[d];
    p[d] = s - std::floor(s);
  }
  return p;
}

}  // namespace vmlab::quad
