#include "vmlab/weights.hpp"

namespace vmlab {

WeightSpec WeightSpec::angular(int mu, int nu, bool normalized) {
  if (!(mu < nu)) throw Error(ErrorCode::InvalidArgument, "angular weight needs mu < nu");
  return {Kind::Angular, mu, nu, normalized};
}

std::string WeightSpec::name() const {
  std::string s;
  switch (kind) {
    case Kind::VRatio: s = "v" + std::to_string(mu); break;
    case Kind::Angular: s = "z" + std::to_string(mu) + std::to_string(nu); break;
    case Kind::ScalarProduct: s = "s"; break;
  }
  return normalized ? s + "/v0" : s;
}

std::vector<WeightSpec> k1_weights(int n) {
  std::vector<WeightSpec> out;
  for (int mu = 0; mu <= n; ++mu) out.push_back(WeightSpec::v_ratio(mu));
  for (int mu = 0; mu <= n; ++mu)
    for (int nu = mu + 1; nu <= n; ++nu) out.push_back(WeightSpec::angular(mu, nu));
  return out;
}

std::vector<WeightSpec> k0_weights(int n) {
  auto out = k1_weights(n);
  out.push_back(WeightSpec::scalar_product());
  return out;
}

}  // namespace vmlab
