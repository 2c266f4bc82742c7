#include "lagraph/power_iteration.hpp"

#include <cmath>
#include <random>
#include <string>

namespace lagraph {

SpectralNormResult spectral_norm(const Matrix& w, const PowerIterationOptions& o) {
  if (w.empty()) throw std::invalid_argument("spectral_norm: empty matrix");
  if (!all_finite(w)) throw std::invalid_argument("spectral_norm: non-finite entries");
  const std::size_t n = w.cols();
  Rng rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix v(n, 1);
  for (double& x : v.data()) x = normal(rng);
  double norm = std::sqrt(squared_norm(v));
  v *= 1.0 / norm;

  SpectralNormResult out;
  double previous = -1.0;
  for (std::size_t it = 1; it <= o.max_iterations; ++it) {
    const Matrix u = multiply(w, v);
    const double sigma = std::sqrt(squared_norm(u));
    if (sigma == 0.0) return {0.0, it};
    Matrix next = multiply_tn(w, u);
    norm = std::sqrt(squared_norm(next));
    next *= 1.0 / norm;
    v = std::move(next);
    if (previous >= 0.0 && std::abs(sigma - previous) <= o.tolerance * sigma) {
      out.value = std::sqrt(norm);
      out.iterations = it;
      return out;
    }
    previous = sigma;
  }
  throw ConvergenceError("spectral_norm: no convergence to relative tolerance " +
                         std::to_string(o.tolerance) + " within " +
                         std::to_string(o.max_iterations) + " iterations");
}

double lipschitz_upper(const Decoder& decoder, const PowerIterationOptions& options) {
  if (decoder.config.kind != DecoderKind::mlp) {
    throw std::invalid_argument("lipschitz_upper: decoder must be a fully-connected MLP");
  }
  if (!decoder.norms.empty()) {
    throw std::invalid_argument("lipschitz_upper: batch normalization has no fixed Lipschitz constant");
  }
  double ell = 1.0;
  for (const auto& l : decoder.layers) ell *= spectral_norm(l.weight.value(), options).value;
  return ell;
}

}  // namespace lagraph
