#pragma once

#include <cstddef>
#include <stdexcept>

#include "lagraph/matrix.hpp"
#include "lagraph/models.hpp"

namespace lagraph {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PowerIterationOptions {
  double tolerance = 1e-6;  ///< relative change of the estimate between sweeps
  std::size_t max_iterations = 10000;
  std::uint64_t seed = 0x5eed;
};

struct SpectralNormResult {
  double value = 0.0;
  std::size_t iterations = 0;
};

/// Largest singular value of w by power iteration on wᵀw from a random start.
SpectralNormResult spectral_norm(const Matrix& w, const PowerIterationOptions& options = {});

/// Product of the spectral norms of the decoder's weight matrices: an upper
/// bound on its l2 Lipschitz constant for an MLP with relu activations.
/// Decoders with batch normalization or graph propagation are rejected.
double lipschitz_upper(const Decoder& decoder, const PowerIterationOptions& options = {});

}  // namespace lagraph
