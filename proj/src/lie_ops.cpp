#include "vmlab/lie_ops.hpp"

#include <random>

#include <Eigen/QR>

namespace vmlab {

VectorFieldSpec VectorFieldSpec::rotation(int i, int j) {
  if (!(1 <= i && i < j)) throw Error(ErrorCode::InvalidArgument, "rotation needs 1 <= i < j");
  return {Kind::Rotation, i, j, false};
}

std::string VectorFieldSpec::name() const {
  std::string s;
  switch (kind) {
    case Kind::Translation: s = "d" + std::to_string(i); break;
    case Kind::Rotation: s = "Om" + std::to_string(i) + std::to_string(j); break;
    case Kind::Boost: s = "Om0" + std::to_string(i); break;
    case Kind::Scaling: s = "S"; break;
  }
  return lifted ? s + "^" : s;
}

std::string MultiIndex::name() const {
  if (word.empty()) return "id";
  std::string s;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (k) s += ".";
    s += word[k].name();
  }
  return s;
}

std::vector<VectorFieldSpec> vector_field_set(FieldSet set, int n) {
  std::vector<VectorFieldSpec> out;
  if (set != FieldSet::O)
    for (int mu = 0; mu <= n; ++mu) out.push_back(VectorFieldSpec::translation(mu));
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) out.push_back(VectorFieldSpec::rotation(i, j));
  if (set != FieldSet::O)
    for (int k = 1; k <= n; ++k) out.push_back(VectorFieldSpec::boost(k));
  if (set == FieldSet::PHat || set == FieldSet::PHat0)
    for (auto& z : out) z = z.lift();
  if (set == FieldSet::K || set == FieldSet::PHat0) out.push_back(VectorFieldSpec::scaling());
  return out;
}

std::vector<MultiIndex> enumerate_words(const std::vector<VectorFieldSpec>& set, int max_order) {
  std::vector<MultiIndex> out{MultiIndex{}};
  std::size_t level_begin = 0;
  for (int k = 1; k <= max_order; ++k) {
    std::size_t level_end = out.size();
    for (std::size_t w = level_begin; w < level_end; ++w) {
      for (const auto& z : set) {
        MultiIndex m = out[w];
        m.word.push_back(z);
        out.push_back(std::move(m));
      }
    }
    level_begin = level_end;
  }
  return out;
}

STMatd spacetime_jacobian(const VectorFieldSpec& z, int n) {
  STMatd J = STMatd::Zero(n + 1, n + 1);
  using K = VectorFieldSpec::Kind;
  switch (z.kind) {
    case K::Translation: break;
    case K::Rotation:
      J(z.j, z.i) = 1.0;
      J(z.i, z.j) = -1.0;
      break;
    case K::Boost:
      J(0, z.i) = 1.0;
      J(z.i, 0) = 1.0;
      break;
    case K::Scaling: J.setIdentity(); break;
  }
  return J;
}

OpChain chain_of(const MultiIndex& beta) {
  OpChain ops;
  for (const auto& z : beta.word) ops.emplace_back(z);
  return ops;
}

double apply_vf(const VectorFieldSpec& z, const PhaseFunction& h, const PhasePoint<double>& p,
                double mass) {
  OpChain ops{z};
  return apply_ops(ops, h, p, mass);
}

double apply_word(const MultiIndex& beta, const PhaseFunction& h, const PhasePoint<double>& p,
                  double mass) {
  return apply_ops(chain_of(beta), h, p, mass);
}

double transport_commutator_residual(double mass, const VectorFieldSpec& z, const PhaseFunction& h,
                                     const PhasePoint<double>& p) {
  if (mass == 0.0 && p.v.norm() == 0.0)
    throw Error(ErrorCode::MasslessZeroVelocity, "transport needs |v| > 0 when m = 0");
  TransportOp tm;
  double tz = apply_ops(OpChain{tm, z}, h, p, mass);
  double zt = apply_ops(OpChain{z, tm}, h, p, mass);
  double expected = z.kind == VectorFieldSpec::Kind::Scaling ? apply_ops(OpChain{tm}, h, p, mass) : 0.0;
  return tz - zt - expected;
}

STMatd lie_derivative_2form(const VectorFieldSpec& z, const FieldSampler& F,
                            const SpacetimePoint<double>& p) {
  std::vector<VectorFieldSpec> w{z};
  return lie_derivative_word<double>(w, F, p.t, p.x);
}

STMatd lie_derivative_2form(const MultiIndex& beta, const FieldSampler& F,
                            const SpacetimePoint<double>& p) {
  return lie_derivative_word<double>(beta.word, F, p.t, p.x);
}

CommutatorExpansion commutator_expansion(const VectorFieldSpec& a, const VectorFieldSpec& b,
                                         const std::vector<VectorFieldSpec>& set, int n,
                                         double mass, std::uint64_t seed) {
  // Coordinates (t, x, v) indexed 0..2n; test functions are all monomials of degree 1 and 2.
  const int ncoord = 2 * n + 1;
  std::vector<PhaseFunction> tests;
  auto coord = [](const auto& p, int c) {
    using T = std::remove_cvref_t<decltype(p.t)>;
    if (c == 0) return T(p.t);
    const int n = p.dim();
    return c <= n ? T(p.x[c - 1]) : T(p.v[c - 1 - n]);
  };
  for (int c = 0; c < ncoord; ++c) {
    tests.push_back(PhaseFunction::analytic([c, coord](const auto& p, double) { return coord(p, c); }));
    for (int d = c; d < ncoord; ++d)
      tests.push_back(PhaseFunction::analytic(
          [c, d, coord](const auto& p, double) { return coord(p, c) * coord(p, d); }));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int npts = 4;
  const Eigen::Index rows = static_cast<Eigen::Index>(tests.size()) * npts;
  Eigen::MatrixXd A(rows, static_cast<Eigen::Index>(set.size()));
  Eigen::VectorXd rhs(rows);
  Eigen::Index row = 0;
  for (int k = 0; k < npts; ++k) {
    PhasePoint<double> p{g(rng), SpaceVec<double>(n), SpaceVec<double>(n)};
    for (int i = 0; i < n; ++i) {
      p.x[i] = g(rng);
      p.v[i] = g(rng);
    }
    for (const auto& h : tests) {
      rhs[row] = apply_ops(OpChain{a, b}, h, p, mass) - apply_ops(OpChain{b, a}, h, p, mass);
      for (std::size_t c = 0; c < set.size(); ++c) A(row, static_cast<Eigen::Index>(c)) = apply_vf(set[c], h, p, mass);
      ++row;
    }
  }
  Eigen::VectorXd coef = A.colPivHouseholderQr().solve(rhs);
  CommutatorExpansion out;
  out.coefficients.assign(coef.data(), coef.data() + coef.size());
  out.residual = (A * coef - rhs).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace vmlab
