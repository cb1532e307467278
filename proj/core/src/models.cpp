#include "amle/models.hpp"

#include <cmath>

#include "amle/errors.hpp"

namespace amle {

OuParams ou_params_from(const std::map<std::string, double>& values) {
  OuParams p;
  auto get = [&](const char* key, double& field) {
    if (const auto it = values.find(key); it != values.end()) field = it->second;
  };
  get("alpha", p.alpha);
  get("beta", p.beta);
  get("sigma", p.sigma);
  get("x0", p.x0);
  get("T", p.T);
  return p;
}

ModelSpec ou_model(const OuParams& params) {
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma))
    throw InputError("OU: sigma must be positive");
  if (!(params.T > 0.0)) throw InputError("OU: T must be positive");
  const double sigma = params.sigma;
  const double inv_var = 1.0 / (sigma * sigma);

  ModelSpec m;
  m.name = "ou";
  m.k = 1;
  m.d = 2;
  m.param_names = {"alpha", "beta"};
  m.state_names = {"X"};
  m.domain = {Vector(2, -1e6), Vector(2, 1e6)};
  m.affine_in_theta = true;
  m.drift = [](std::span<const double> x, std::span<const double> th) {
    return Vector{th[0] - th[1] * x[0]};
  };
  m.drift_jac_theta = [](std::span<const double> x, std::span<const double>) {
    return Matrix{{1.0, -x[0]}};
  };
  m.diffusion = [sigma](std::span<const double>) { return Matrix{{sigma}}; };
  // g_alpha = 1/sigma^2, g_beta = -x/sigma^2.
  m.grad_g = [inv_var](std::span<const double>, std::span<const double>, std::size_t j) {
    return Matrix{{j == 1 ? -inv_var : 0.0}};
  };
  return m;
}

}  // namespace amle
