#include "lagraph/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace lagraph {

void adam_step(std::span<Value> params, std::span<const Matrix> grads, AdamState& state,
               const AdamOptions& o) {
  if (grads.size() != params.size()) {
    throw std::invalid_argument("adam_step: " + std::to_string(grads.size()) + " gradients for " +
                                std::to_string(params.size()) + " parameters");
  }
  if (state.t == 0 && state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.rows(), p.cols());
      state.v.emplace_back(p.rows(), p.cols());
    }
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: optimizer state belongs to a different parameter set");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(params[i].value(), grads[i], "adam_step");
    require_same_shape(params[i].value(), state.m[i], "adam_step");
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i].mutable_value().data();
    auto g = grads[i].data();
    auto m = state.m[i].data();
    auto v = state.v[i].data();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      if (o.weight_decay != 0.0) theta[k] -= o.lr * o.weight_decay * theta[k];
      m[k] = o.beta1 * m[k] + (1.0 - o.beta1) * g[k];
      v[k] = o.beta2 * v[k] + (1.0 - o.beta2) * g[k] * g[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      theta[k] -= o.lr * m_hat / (std::sqrt(v_hat) + o.eps);
    }
  }
}

void adam_step(std::span<Value> params, AdamState& state, const AdamOptions& options) {
  std::vector<Matrix> grads;
  grads.reserve(params.size());
  for (const auto& p : params) grads.push_back(p.grad());
  adam_step(params, grads, state, options);
}

}  // namespace lagraph
