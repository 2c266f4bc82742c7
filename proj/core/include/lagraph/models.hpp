#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lagraph/autodiff.hpp"
#include "lagraph/graph.hpp"
#include "lagraph/rng.hpp"

namespace lagraph {

enum class EncoderKind { gcn, gin };
enum class DecoderKind { mlp, gcn };
enum class Mode { train, eval };

std::string to_string(EncoderKind k);
std::string to_string(DecoderKind k);
EncoderKind parse_encoder_kind(const std::string& s);
DecoderKind parse_decoder_kind(const std::string& s);

/// Uniform in [-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))].
Matrix xavier_init(std::size_t rows, std::size_t cols, Rng& rng);

struct Linear {
  Value weight;  ///< in x out
  Value bias;    ///< 1 x out

  std::size_t in_dim() const { return weight.rows(); }
  std::size_t out_dim() const { return weight.cols(); }
};

Linear make_linear(std::size_t in, std::size_t out, Rng& rng);
Value apply(const Linear& l, const Value& x);

struct BatchNorm {
  Value gamma;  ///< 1 x q
  Value beta;   ///< 1 x q
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.9;
  double eps = 1e-5;
};

BatchNorm make_batch_norm(std::size_t dim);

/// Train mode normalizes with batch statistics and, when update_stats is
/// set, folds them into the running statistics
/// (running = momentum * running + (1 - momentum) * batch, unbiased variance).
/// Eval mode uses the running statistics.
Value apply(BatchNorm& bn, const Value& x, Mode mode, bool update_stats);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::gin;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 32;
  std::size_t num_layers = 3;
  bool batch_norm = true;
  bool final_activation = true;  ///< relu (and norm) on the last layer too
};

/// One message-passing layer.
///   GCN: relu(bn(Â h W + b))
///   GIN: relu(bn_out(lin2(relu(bn_inner(lin1(h + A h))))))
struct EncoderLayer {
  Linear lin1;
  std::optional<BatchNorm> bn_inner;  ///< GIN only
  std::optional<Linear> lin2;         ///< GIN only
  std::optional<BatchNorm> bn_out;
};

struct Encoder {
  EncoderConfig config;
  std::vector<EncoderLayer> layers;

  std::vector<Value> parameters() const;
  std::size_t output_dim() const { return config.hidden_dim; }
};

Encoder make_encoder(const EncoderConfig& config, Rng& rng);

/// Per-layer outputs H(1)..H(L) for the batch with node features x
/// (x replaces batch.features, e.g. by a masked copy).
std::vector<Value> encode(const GraphBatch& batch, const Value& x, Encoder& encoder, Mode mode,
                          bool update_stats = true);
std::vector<Value> encode(const GraphBatch& batch, Encoder& encoder, Mode mode,
                          bool update_stats = true);

Value gcn_layer(const GraphBatch& batch, const Value& h, EncoderLayer& layer, Mode mode,
                bool update_stats, bool activate);
Value gin_layer(const GraphBatch& batch, const Value& h, EncoderLayer& layer, Mode mode,
                bool update_stats, bool activate);

struct DecoderConfig {
  DecoderKind kind = DecoderKind::mlp;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 32;
  std::size_t output_dim = 0;
  std::size_t num_layers = 2;
  bool batch_norm = true;  ///< between hidden layers only
};

struct Decoder {
  DecoderConfig config;
  std::vector<Linear> layers;
  std::vector<BatchNorm> norms;  ///< one per hidden layer when batch_norm

  std::vector<Value> parameters() const;
};

Decoder make_decoder(const DecoderConfig& config, Rng& rng);

/// MLP decoder: node-wise; batch may be null. GCN decoder: each layer
/// propagates with batch->normalized first.
Value decode(const Value& h, Decoder& decoder, Mode mode, const GraphBatch* batch = nullptr,
             bool update_stats = true);

/// Sum pooling per graph of the batch.
Value readout_sum(const Value& h, const GraphBatch& batch);

}  // namespace lagraph
