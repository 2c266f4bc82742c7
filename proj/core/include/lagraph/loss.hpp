#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lagraph/autodiff.hpp"
#include "lagraph/graph.hpp"
#include "lagraph/models.hpp"
#include "lagraph/rng.hpp"

namespace lagraph {

enum class MaskMode { gaussian, zeros };
enum class Variant { mse_embed, mse_output, ce_embed, ce_output };
enum class Level { node, graph };

std::string to_string(MaskMode m);
std::string to_string(Variant v);
std::string to_string(Level l);
MaskMode parse_mask_mode(const std::string& s);
Variant parse_variant(const std::string& s);
Level parse_level(const std::string& s);

bool is_cross_entropy(Variant v);
bool is_output_invariance(Variant v);

/// Masked node set J and the replacement values M (|V| x d, zero outside J).
struct MaskSpec {
  std::vector<std::size_t> J;
  Matrix M;
  MaskMode mode = MaskMode::gaussian;
  double noise_sd = 0.0;
};

/// max(1, round(ratio * num_nodes)).
std::size_t masked_count(std::size_t num_nodes, double ratio);

/// J is sorted ascending.
MaskSpec sample_mask(std::size_t num_nodes, std::size_t feature_dim, double ratio,
                     double noise_sd, Rng& rng, MaskMode mode = MaskMode::gaussian);

/// Rows in J replaced by the rows of M; all other rows copied bit for bit.
Matrix apply_mask(const Matrix& x, const MaskSpec& spec);

/// Features of the whole batch with every graph's mask applied.
Matrix apply_masks(const GraphBatch& batch, std::span<const MaskSpec> masks);

/// Batch row indices of all masked nodes, graph by graph.
std::vector<std::size_t> masked_batch_rows(const GraphBatch& batch,
                                           std::span<const MaskSpec> masks);

struct LossBreakdown {
  double reconstruction = 0.0;
  double invariance = 0.0;  ///< after the square root, before the weight
  double alpha = 0.0;
  double total = 0.0;
  Variant variant = Variant::mse_embed;
  Level level = Level::graph;
};

struct Objective {
  Value loss;
  LossBreakdown breakdown;
};

struct ObjectiveOptions {
  double alpha = 1.0;
  Variant variant = Variant::mse_embed;
  Mode mode = Mode::train;
  double sqrt_eps = 1e-12;
};

/// Node level: reconstruction (1/N) sum_i |D(H_i) - X_i|^2 / |V_i| plus
/// alpha * sqrt(sum over masked rows |H - H'|^2 / sum_i |J_i| + eps) on the
/// last encoder layer.
Objective node_objective(const GraphBatch& batch, std::span<const MaskSpec> masks,
                         Encoder& encoder, Decoder& decoder, const ObjectiveOptions& options);

/// Graph level: same reconstruction; invariance on the sum-pooled graph
/// representations alpha * sqrt(sum_i |z_i - z'_i|^2 / sum_i |J_i| + eps),
/// where z concatenates the readouts of every encoder layer.
Objective graph_objective(const GraphBatch& batch, std::span<const MaskSpec> masks,
                          Encoder& encoder, Decoder& decoder, const ObjectiveOptions& options);

Objective objective(Level level, const GraphBatch& batch, std::span<const MaskSpec> masks,
                    Encoder& encoder, Decoder& decoder, const ObjectiveOptions& options);

/// Throws unless every row is non-negative and sums to 1 within 1e-9.
void require_row_stochastic(const Matrix& x, const char* what);

}  // namespace lagraph
