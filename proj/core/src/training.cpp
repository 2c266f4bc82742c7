#include "lagraph/training.hpp"

#include <algorithm>
#include <numeric>

#include "lagraph/ops.hpp"

namespace lagraph {

namespace {

enum Stream : std::uint64_t { init_stream = 1, order_stream = 2, mask_stream = 3, subgraph_stream = 4 };

}  // namespace

Model make_model(const TrainConfig& c, std::size_t feature_dim, Rng& rng) {
  Model m;
  m.level = c.level;
  EncoderConfig ec;
  ec.kind = c.encoder;
  ec.input_dim = feature_dim;
  ec.hidden_dim = c.hidden_dim;
  ec.num_layers = c.encoder_layers;
  ec.batch_norm = c.batch_norm;
  ec.final_activation = c.final_activation;
  m.encoder = make_encoder(ec, rng);
  DecoderConfig dc;
  dc.kind = c.decoder;
  dc.input_dim = c.hidden_dim;
  dc.hidden_dim = c.decoder_hidden;
  dc.output_dim = feature_dim;
  dc.num_layers = c.decoder_layers;
  dc.batch_norm = c.batch_norm;
  m.decoder = make_decoder(dc, rng);
  return m;
}

void check_compatible(const GraphDataset& dataset, const TrainConfig& config) {
  validate(config);
  if (dataset.graphs.empty()) throw ConfigError("dataset '" + dataset.name + "' is empty");
  if (dataset.feature_dim < 1) throw ConfigError("dataset has no node features");
  for (const auto& g : dataset.graphs) {
    if (g.feature_dim() != dataset.feature_dim) {
      throw ConfigError("dataset graphs disagree on the feature dimension");
    }
    if (is_cross_entropy(config.variant)) {
      try {
        require_row_stochastic(g.features, to_string(config.variant).c_str());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(e.what()) + " (cross-entropy variants need one-hot features)");
      }
    }
  }
}

std::size_t planned_steps(const GraphDataset& dataset, const TrainConfig& config) {
  const std::size_t k = dataset.size();
  return config.epochs * ((k + config.batch_size - 1) / config.batch_size);
}

TrainResult train(const GraphDataset& dataset, const TrainConfig& config,
                  const StepCallback& on_step) {
  check_compatible(dataset, config);
  Rng init_rng(derive_seed(config.seed, init_stream));
  Rng order_rng(derive_seed(config.seed, order_stream));
  Rng mask_rng(derive_seed(config.seed, mask_stream));
  Rng sub_rng(derive_seed(config.seed, subgraph_stream));

  TrainResult result;
  result.model = make_model(config, dataset.feature_dim, init_rng);
  Model& model = result.model;
  std::vector<Value> params = model.encoder.parameters();
  for (const auto& p : model.decoder.parameters()) params.push_back(p);
  AdamState adam;
  AdamOptions adam_opts;
  adam_opts.lr = config.learning_rate;
  adam_opts.weight_decay = config.weight_decay;
  ObjectiveOptions obj_opts;
  obj_opts.alpha = config.alpha;
  obj_opts.variant = config.variant;
  obj_opts.mode = Mode::train;

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    EpochSummary summary;
    summary.epoch = epoch;
    std::size_t epoch_steps = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<Graph> sampled;
      std::vector<const Graph*> members;
      if (config.subgraph_nodes > 0) {
        sampled.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
          const Graph& g = dataset.graphs[order[i]];
          sampled.push_back(
              sample_node_subset(g, std::min(config.subgraph_nodes, g.num_nodes()), sub_rng));
        }
        for (const auto& g : sampled) members.push_back(&g);
      } else {
        for (std::size_t i = begin; i < end; ++i) members.push_back(&dataset.graphs[order[i]]);
      }
      const GraphBatch batch = batch_graphs(std::span<const Graph* const>(members));
      std::vector<MaskSpec> masks;
      masks.reserve(members.size());
      for (const Graph* g : members) {
        masks.push_back(sample_mask(g->num_nodes(), dataset.feature_dim, config.mask_ratio,
                                    config.noise_sd, mask_rng, config.mask_mode));
      }
      for (auto& p : params) p.zero_grad();
      Objective obj = objective(config.level, batch, masks, model.encoder, model.decoder, obj_opts);
      backward(obj.loss);
      adam_step(params, adam, adam_opts);

      StepRecord rec;
      rec.epoch = epoch;
      rec.step = ++step;
      rec.graphs = members.size();
      rec.nodes = batch.num_nodes();
      rec.loss = obj.breakdown;
      if (on_step) on_step(rec);
      summary.total += rec.loss.total;
      summary.reconstruction += rec.loss.reconstruction;
      summary.invariance += rec.loss.invariance;
      ++epoch_steps;
      result.steps.push_back(rec);
    }
    const double n = static_cast<double>(epoch_steps);
    summary.total /= n;
    summary.reconstruction /= n;
    summary.invariance /= n;
    result.epochs.push_back(summary);
  }
  return result;
}

}  // namespace lagraph
