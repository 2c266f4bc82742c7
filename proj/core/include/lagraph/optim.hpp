#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lagraph/autodiff.hpp"

namespace lagraph {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  ///< decoupled, applied before the moment update
};

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::size_t t = 0;
};

/// One Adam update of every parameter with the supplied gradients.
void adam_step(std::span<Value> params, std::span<const Matrix> grads, AdamState& state,
               const AdamOptions& options);

/// Same, reading each parameter's accumulated gradient.
void adam_step(std::span<Value> params, AdamState& state, const AdamOptions& options);

}  // namespace lagraph
