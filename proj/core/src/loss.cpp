#include "lagraph/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lagraph/ops.hpp"

namespace lagraph {

std::string to_string(MaskMode m) { return m == MaskMode::zeros ? "zeros" : "gaussian"; }

std::string to_string(Variant v) {
  switch (v) {
    case Variant::mse_embed: return "mse-embed";
    case Variant::mse_output: return "mse-output";
    case Variant::ce_embed: return "ce-embed";
    case Variant::ce_output: return "ce-output";
  }
  return "?";
}

std::string to_string(Level l) { return l == Level::node ? "node" : "graph"; }

MaskMode parse_mask_mode(const std::string& s) {
  if (s == "gaussian") return MaskMode::gaussian;
  if (s == "zeros") return MaskMode::zeros;
  throw std::invalid_argument("unknown mask mode '" + s + "' (expected gaussian|zeros)");
}

Variant parse_variant(const std::string& s) {
  for (auto v : {Variant::mse_embed, Variant::mse_output, Variant::ce_embed, Variant::ce_output})
    if (s == to_string(v)) return v;
  throw std::invalid_argument("unknown variant '" + s +
                              "' (expected mse-embed|mse-output|ce-embed|ce-output)");
}

Level parse_level(const std::string& s) {
  if (s == "node") return Level::node;
  if (s == "graph") return Level::graph;
  throw std::invalid_argument("unknown level '" + s + "' (expected node|graph)");
}

bool is_cross_entropy(Variant v) { return v == Variant::ce_embed || v == Variant::ce_output; }
bool is_output_invariance(Variant v) {
  return v == Variant::mse_output || v == Variant::ce_output;
}

std::size_t masked_count(std::size_t num_nodes, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("mask ratio " + std::to_string(ratio) + " outside (0, 1]");
  }
  if (num_nodes < 1) throw std::invalid_argument("cannot mask an empty graph");
  const auto k = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(num_nodes)));
  return std::clamp<std::size_t>(k, 1, num_nodes);
}

MaskSpec sample_mask(std::size_t num_nodes, std::size_t feature_dim, double ratio,
                     double noise_sd, Rng& rng, MaskMode mode) {
  if (noise_sd < 0.0) throw std::invalid_argument("noise sd must be non-negative");
  MaskSpec spec;
  spec.J = sample_without_replacement(num_nodes, masked_count(num_nodes, ratio), rng);
  std::sort(spec.J.begin(), spec.J.end());
  spec.M = Matrix(num_nodes, feature_dim);
  spec.mode = mode;
  spec.noise_sd = mode == MaskMode::zeros ? 0.0 : noise_sd;
  if (mode == MaskMode::gaussian && noise_sd > 0.0) {
    std::normal_distribution<double> normal(0.0, noise_sd);
    for (std::size_t v : spec.J)
      for (double& m : spec.M.row(v)) m = normal(rng);
  }
  return spec;
}

Matrix apply_mask(const Matrix& x, const MaskSpec& spec) {
  require_same_shape(x, spec.M, "apply_mask");
  Matrix out = x;
  for (std::size_t v : spec.J) {
    if (v >= x.rows()) throw std::out_of_range("apply_mask: masked node out of range");
    auto src = spec.M.row(v);
    std::copy(src.begin(), src.end(), out.row(v).begin());
  }
  return out;
}

namespace {

void check_masks(const GraphBatch& batch, std::span<const MaskSpec> masks) {
  if (batch.num_graphs() == 0) throw std::invalid_argument("objective: empty batch");
  if (masks.size() != batch.num_graphs()) {
    throw std::invalid_argument("objective: " + std::to_string(masks.size()) + " masks for " +
                                std::to_string(batch.num_graphs()) + " graphs");
  }
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (masks[i].J.empty()) throw std::invalid_argument("objective: mask with empty J");
    if (masks[i].M.rows() != batch.graph_size(i) || masks[i].M.cols() != batch.features.cols()) {
      throw ShapeError("objective: mask " + std::to_string(i) + " has shape " +
                       shape_string(masks[i].M.rows(), masks[i].M.cols()));
    }
  }
}

}  // namespace

Matrix apply_masks(const GraphBatch& batch, std::span<const MaskSpec> masks) {
  check_masks(batch, masks);
  Matrix out = batch.features;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const std::size_t off = batch.offsets[i];
    for (std::size_t v : masks[i].J) {
      if (v >= batch.graph_size(i)) throw std::out_of_range("apply_masks: masked node out of range");
      auto src = masks[i].M.row(v);
      std::copy(src.begin(), src.end(), out.row(off + v).begin());
    }
  }
  return out;
}

std::vector<std::size_t> masked_batch_rows(const GraphBatch& batch,
                                           std::span<const MaskSpec> masks) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < masks.size(); ++i)
    for (std::size_t v : masks[i].J) rows.push_back(batch.offsets[i] + v);
  return rows;
}

void require_row_stochastic(const Matrix& x, const char* what) {
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double s = 0.0;
    for (double v : x.row(r)) {
      if (v < 0.0) throw std::invalid_argument(std::string(what) + ": negative target entry");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) {
      throw std::invalid_argument(std::string(what) + ": target row " + std::to_string(r) +
                                  " sums to " + std::to_string(s) + ", not 1");
    }
  }
}

namespace {

Objective lagraph_objective(Level level, const GraphBatch& batch, std::span<const MaskSpec> masks,
                            Encoder& encoder, Decoder& decoder, const ObjectiveOptions& opt) {
  check_masks(batch, masks);
  if (!(opt.alpha >= 0.0)) throw std::invalid_argument("objective: alpha must be non-negative");
  if (is_cross_entropy(opt.variant)) require_row_stochastic(batch.features, to_string(opt.variant).c_str());

  const Value x = Value::constant(batch.features);
  const Value x_masked = Value::constant(apply_masks(batch, masks));
  // Only the clean pass updates batch-norm running statistics.
  auto h = encode(batch, x, encoder, opt.mode, true);
  auto h_masked = encode(batch, x_masked, encoder, opt.mode, false);

  const std::size_t n_graphs = batch.num_graphs();
  std::vector<double> row_w(batch.num_nodes());
  for (std::size_t i = 0; i < n_graphs; ++i)
    for (std::size_t r = batch.offsets[i]; r < batch.offsets[i + 1]; ++r)
      row_w[r] = 1.0 / (static_cast<double>(n_graphs) * static_cast<double>(batch.graph_size(i)));

  Value x_hat = decode(h.back(), decoder, opt.mode, &batch, true);
  Value recon = is_cross_entropy(opt.variant) ? softmax_ce(x_hat, batch.features, row_w)
                                              : weighted_sse(x_hat, x, row_w);

  const auto rows = masked_batch_rows(batch, masks);
  const std::vector<double> ones(rows.size(), 1.0);
  Value numerator;
  if (is_output_invariance(opt.variant)) {
    Value x_hat_masked = decode(h_masked.back(), decoder, opt.mode, &batch, false);
    Value a = row_select(x_hat, rows);
    Value b = row_select(x_hat_masked, rows);
    numerator = opt.variant == Variant::ce_output ? kl_div(a, b, ones) : weighted_sse(a, b, ones);
  } else if (level == Level::node) {
    numerator = weighted_sse(row_select(h.back(), rows), row_select(h_masked.back(), rows), ones);
  } else {
    std::vector<Value> z, z_masked;
    for (std::size_t l = 0; l < h.size(); ++l) {
      z.push_back(readout_sum(h[l], batch));
      z_masked.push_back(readout_sum(h_masked[l], batch));
    }
    numerator = sum_squares(sub(concat_cols(z), concat_cols(z_masked)));
  }
  Value inv = sqrt_eps(scale(numerator, 1.0 / static_cast<double>(rows.size())), opt.sqrt_eps);
  Value total = add(recon, scale(inv, opt.alpha));

  Objective out;
  out.loss = total;
  out.breakdown.reconstruction = recon.value().item();
  out.breakdown.invariance = inv.value().item();
  out.breakdown.alpha = opt.alpha;
  out.breakdown.total = total.value().item();
  out.breakdown.variant = opt.variant;
  out.breakdown.level = level;
  return out;
}

}  // namespace

Objective node_objective(const GraphBatch& batch, std::span<const MaskSpec> masks,
                         Encoder& encoder, Decoder& decoder, const ObjectiveOptions& options) {
  return lagraph_objective(Level::node, batch, masks, encoder, decoder, options);
}

Objective graph_objective(const GraphBatch& batch, std::span<const MaskSpec> masks,
                          Encoder& encoder, Decoder& decoder, const ObjectiveOptions& options) {
  return lagraph_objective(Level::graph, batch, masks, encoder, decoder, options);
}

Objective objective(Level level, const GraphBatch& batch, std::span<const MaskSpec> masks,
                    Encoder& encoder, Decoder& decoder, const ObjectiveOptions& options) {
  return lagraph_objective(level, batch, masks, encoder, decoder, options);
}

}  // namespace lagraph
