#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lagraph/loss.hpp"
#include "lagraph/models.hpp"

namespace lagraph {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TrainConfig {
  Level level = Level::graph;
  EncoderKind encoder = EncoderKind::gin;
  std::size_t encoder_layers = 3;
  std::size_t hidden_dim = 32;
  DecoderKind decoder = DecoderKind::mlp;
  std::size_t decoder_layers = 2;
  std::size_t decoder_hidden = 32;
  bool batch_norm = true;
  bool final_activation = true;
  double mask_ratio = 0.05;
  double noise_sd = 0.5;
  MaskMode mask_mode = MaskMode::gaussian;
  double alpha = 10.0;
  Variant variant = Variant::mse_embed;
  double learning_rate = 1e-5;
  double weight_decay = 0.0;
  std::size_t batch_size = 128;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  std::size_t degree_threshold = 0;  ///< 0: not set
  std::size_t subgraph_nodes = 0;    ///< 0: train on whole graphs
};

/// Level defaults: graph (3-layer GIN, hidden 32, 2-layer MLP decoder,
/// batch 128, 100 epochs) or node (2-layer GCN, hidden 512, 1-layer
/// decoder, full-graph steps, 500 epochs).
TrainConfig default_config(Level level);

/// Sets one field from its textual value; unknown keys throw ConfigError.
void apply_setting(TrainConfig& config, const std::string& key, const std::string& value);

/// Flat "key = value" lines; '#' starts a comment. A "level" key, if
/// present, selects the defaults before the other keys are applied.
TrainConfig parse_config(const std::string& text);
TrainConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError on invalid values.
void validate(const TrainConfig& config);

/// Every field as key/value text, in declaration order; parse_config of the
/// joined lines reproduces the config exactly.
std::vector<std::pair<std::string, std::string>> config_items(const TrainConfig& config);
std::string format_config(const TrainConfig& config);

/// Round-trip text form of a double.
std::string format_double(double v);

}  // namespace lagraph
