#include "lagraph/models.hpp"

#include <cmath>
#include <stdexcept>

#include "lagraph/ops.hpp"

namespace lagraph {

std::string to_string(EncoderKind k) { return k == EncoderKind::gcn ? "gcn" : "gin"; }
std::string to_string(DecoderKind k) { return k == DecoderKind::gcn ? "gcn" : "mlp"; }

EncoderKind parse_encoder_kind(const std::string& s) {
  if (s == "gcn") return EncoderKind::gcn;
  if (s == "gin") return EncoderKind::gin;
  throw std::invalid_argument("unknown encoder kind '" + s + "' (expected gcn|gin)");
}

DecoderKind parse_decoder_kind(const std::string& s) {
  if (s == "mlp") return DecoderKind::mlp;
  if (s == "gcn") return DecoderKind::gcn;
  throw std::invalid_argument("unknown decoder kind '" + s + "' (expected mlp|gcn)");
}

Matrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("xavier_init: dims must be positive");
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-a, a);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = u(rng);
  return m;
}

Linear make_linear(std::size_t in, std::size_t out, Rng& rng) {
  return {Value::parameter(xavier_init(in, out, rng)), Value::parameter(Matrix(1, out))};
}

Value apply(const Linear& l, const Value& x) { return add_bias(matmul(x, l.weight), l.bias); }

BatchNorm make_batch_norm(std::size_t dim) {
  BatchNorm bn;
  bn.gamma = Value::parameter(Matrix(1, dim, 1.0));
  bn.beta = Value::parameter(Matrix(1, dim));
  bn.running_mean.assign(dim, 0.0);
  bn.running_var.assign(dim, 1.0);
  return bn;
}

Value apply(BatchNorm& bn, const Value& x, Mode mode, bool update_stats) {
  if (mode == Mode::eval) {
    return batch_norm_fixed(x, bn.gamma, bn.beta, bn.running_mean, bn.running_var, bn.eps);
  }
  BatchMoments moments;
  Value out = batch_norm(x, bn.gamma, bn.beta, bn.eps, &moments);
  if (update_stats) {
    const double n = static_cast<double>(x.rows());
    const double unbias = n > 1 ? n / (n - 1) : 1.0;
    for (std::size_t c = 0; c < bn.running_mean.size(); ++c) {
      bn.running_mean[c] = bn.momentum * bn.running_mean[c] + (1 - bn.momentum) * moments.mean[c];
      bn.running_var[c] =
          bn.momentum * bn.running_var[c] + (1 - bn.momentum) * moments.variance[c] * unbias;
    }
  }
  return out;
}

namespace {

void push_bn(std::vector<Value>& out, const std::optional<BatchNorm>& bn) {
  if (bn) {
    out.push_back(bn->gamma);
    out.push_back(bn->beta);
  }
}

void require_cols(const Value& h, std::size_t expected, const char* what) {
  if (h.cols() != expected) {
    throw ShapeError(std::string(what) + ": input has " + std::to_string(h.cols()) +
                     " columns, layer expects " + std::to_string(expected));
  }
}

}  // namespace

std::vector<Value> Encoder::parameters() const {
  std::vector<Value> out;
  for (const auto& l : layers) {
    out.push_back(l.lin1.weight);
    out.push_back(l.lin1.bias);
    push_bn(out, l.bn_inner);
    if (l.lin2) {
      out.push_back(l.lin2->weight);
      out.push_back(l.lin2->bias);
    }
    push_bn(out, l.bn_out);
  }
  return out;
}

Encoder make_encoder(const EncoderConfig& config, Rng& rng) {
  if (config.num_layers < 1) throw std::invalid_argument("encoder needs at least one layer");
  if (config.input_dim < 1 || config.hidden_dim < 1) {
    throw std::invalid_argument("encoder dims must be positive");
  }
  Encoder enc;
  enc.config = config;
  for (std::size_t i = 0; i < config.num_layers; ++i) {
    const std::size_t in = i == 0 ? config.input_dim : config.hidden_dim;
    const std::size_t q = config.hidden_dim;
    const bool last = i + 1 == config.num_layers;
    EncoderLayer layer{make_linear(in, q, rng), std::nullopt, std::nullopt, std::nullopt};
    if (config.kind == EncoderKind::gin) {
      if (config.batch_norm) layer.bn_inner = make_batch_norm(q);
      layer.lin2 = make_linear(q, q, rng);
    }
    if (config.batch_norm && (!last || config.final_activation)) layer.bn_out = make_batch_norm(q);
    enc.layers.push_back(std::move(layer));
  }
  return enc;
}

Value gcn_layer(const GraphBatch& batch, const Value& h, EncoderLayer& layer, Mode mode,
                bool update_stats, bool activate) {
  require_cols(h, layer.lin1.in_dim(), "gcn_layer");
  Value z = apply(layer.lin1, spmm(batch.normalized, h));
  if (layer.bn_out) z = apply(*layer.bn_out, z, mode, update_stats);
  return activate ? relu(z) : z;
}

Value gin_layer(const GraphBatch& batch, const Value& h, EncoderLayer& layer, Mode mode,
                bool update_stats, bool activate) {
  require_cols(h, layer.lin1.in_dim(), "gin_layer");
  if (!layer.lin2) throw std::invalid_argument("gin_layer: layer has no second linear map");
  Value agg = add(h, spmm(batch.adjacency, h));
  Value z = apply(layer.lin1, agg);
  if (layer.bn_inner) z = apply(*layer.bn_inner, z, mode, update_stats);
  z = apply(*layer.lin2, relu(z));
  if (layer.bn_out) z = apply(*layer.bn_out, z, mode, update_stats);
  return activate ? relu(z) : z;
}

std::vector<Value> encode(const GraphBatch& batch, const Value& x, Encoder& encoder, Mode mode,
                          bool update_stats) {
  if (x.rows() != batch.num_nodes()) {
    throw ShapeError("encode: " + std::to_string(x.rows()) + " feature rows for " +
                     std::to_string(batch.num_nodes()) + " nodes");
  }
  std::vector<Value> outs;
  outs.reserve(encoder.layers.size());
  Value h = x;
  for (std::size_t i = 0; i < encoder.layers.size(); ++i) {
    const bool activate = i + 1 < encoder.layers.size() || encoder.config.final_activation;
    auto& layer = encoder.layers[i];
    h = encoder.config.kind == EncoderKind::gcn
            ? gcn_layer(batch, h, layer, mode, update_stats, activate)
            : gin_layer(batch, h, layer, mode, update_stats, activate);
    outs.push_back(h);
  }
  return outs;
}

std::vector<Value> encode(const GraphBatch& batch, Encoder& encoder, Mode mode,
                          bool update_stats) {
  return encode(batch, Value::constant(batch.features), encoder, mode, update_stats);
}

std::vector<Value> Decoder::parameters() const {
  std::vector<Value> out;
  for (const auto& l : layers) {
    out.push_back(l.weight);
    out.push_back(l.bias);
  }
  for (const auto& bn : norms) {
    out.push_back(bn.gamma);
    out.push_back(bn.beta);
  }
  return out;
}

Decoder make_decoder(const DecoderConfig& config, Rng& rng) {
  if (config.num_layers < 1) throw std::invalid_argument("decoder needs at least one layer");
  if (config.input_dim < 1 || config.output_dim < 1 || config.hidden_dim < 1) {
    throw std::invalid_argument("decoder dims must be positive");
  }
  Decoder dec;
  dec.config = config;
  for (std::size_t i = 0; i < config.num_layers; ++i) {
    const std::size_t in = i == 0 ? config.input_dim : config.hidden_dim;
    const bool last = i + 1 == config.num_layers;
    const std::size_t out = last ? config.output_dim : config.hidden_dim;
    dec.layers.push_back(make_linear(in, out, rng));
    if (!last && config.batch_norm) dec.norms.push_back(make_batch_norm(out));
  }
  return dec;
}

Value decode(const Value& h, Decoder& decoder, Mode mode, const GraphBatch* batch,
             bool update_stats) {
  if (decoder.config.kind == DecoderKind::gcn && !batch) {
    throw std::invalid_argument("decode: a GCN decoder needs the graph batch");
  }
  require_cols(h, decoder.layers.front().in_dim(), "decode");
  Value z = h;
  for (std::size_t i = 0; i < decoder.layers.size(); ++i) {
    if (decoder.config.kind == DecoderKind::gcn) z = spmm(batch->normalized, z);
    z = apply(decoder.layers[i], z);
    if (i + 1 < decoder.layers.size()) {
      if (!decoder.norms.empty()) z = apply(decoder.norms[i], z, mode, update_stats);
      z = relu(z);
    }
  }
  return z;
}

Value readout_sum(const Value& h, const GraphBatch& batch) {
  if (h.rows() != batch.num_nodes()) {
    throw ShapeError("readout_sum: " + std::to_string(h.rows()) + " rows for " +
                     std::to_string(batch.num_nodes()) + " nodes");
  }
  return segment_sum(h, batch.offsets);
}

}  // namespace lagraph
