#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lagraph/autodiff.hpp"
#include "lagraph/sparse.hpp"

namespace lagraph {

Value matmul(const Value& a, const Value& b);
/// s is treated as a constant; only d receives a gradient (sᵀ·g).
Value spmm(std::shared_ptr<const SparseMatrix> s, const Value& d);

Value add(const Value& a, const Value& b);
Value sub(const Value& a, const Value& b);
Value hadamard(const Value& a, const Value& b);
Value scale(const Value& a, double s);
/// Gradient at exactly 0 is 0.
Value relu(const Value& a);
/// x (n×q) plus a 1×q row added to every row.
Value add_bias(const Value& x, const Value& bias);

Value row_select(const Value& h, std::span<const std::size_t> indices);
/// Column sums over row ranges [offsets[i], offsets[i+1]); one output row per range.
Value segment_sum(const Value& h, std::span<const std::size_t> offsets);
Value concat_cols(std::span<const Value> blocks);

Value sum(const Value& a);
Value sum_squares(const Value& a);
/// Σ(a−b)² / divisor.
Value mse_per(const Value& a, const Value& b, double divisor);
/// Σ_r w_r Σ_c (a−b)²; one weight per row.
Value weighted_sse(const Value& a, const Value& b, std::span<const double> row_weights);
/// √(x + eps) for a 1x1 x ≥ 0.
Value sqrt_eps(const Value& x, double eps = 1e-12);

/// Row-wise cross-entropy of softmax(logits) against row-stochastic targets,
/// averaged over rows, or weighted by row_weights when given.
Value softmax_ce(const Value& logits, const Matrix& targets,
                 std::span<const double> row_weights = {});
/// Row-wise KL(softmax(p) ‖ softmax(q)), averaged or weighted like softmax_ce.
Value kl_div(const Value& p_logits, const Value& q_logits,
             std::span<const double> row_weights = {});

struct BatchMoments {
  std::vector<double> mean;
  std::vector<double> variance;  ///< biased (divides by n)
};

/// Normalizes each column with the batch mean/variance, then applies the
/// per-column gamma/beta (both 1×q). The batch moments are written to *moments.
Value batch_norm(const Value& x, const Value& gamma, const Value& beta, double eps,
                 BatchMoments* moments = nullptr);
/// Same affine map with fixed statistics.
Value batch_norm_fixed(const Value& x, const Value& gamma, const Value& beta,
                       std::span<const double> mean, std::span<const double> variance,
                       double eps);

}  // namespace lagraph
