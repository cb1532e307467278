#pragma once

#include <map>
#include <string>

#include "amle/model.hpp"

namespace amle {

/// One-dimensional Ornstein-Uhlenbeck process dX = (alpha - beta X) dt + sigma dW
/// with drift parameters (alpha, beta).
struct OuParams {
  double alpha = 1.0;
  double beta = 2.0;
  double sigma = 0.5;
  double x0 = 0.0;
  double T = 1.0;

  Vector theta() const { return {alpha, beta}; }
  Vector initial_state() const { return {x0}; }
};

OuParams ou_params_from(const std::map<std::string, double>& values);
ModelSpec ou_model(const OuParams& params);

}  // namespace amle
