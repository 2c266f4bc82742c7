#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "lagraph/config.hpp"
#include "lagraph/graph.hpp"
#include "lagraph/loss.hpp"
#include "lagraph/models.hpp"
#include "lagraph/optim.hpp"

namespace lagraph {

struct Model {
  Level level = Level::graph;
  Encoder encoder;
  Decoder decoder;
};

/// Fresh Xavier-initialized model for data of the given feature dimension.
Model make_model(const TrainConfig& config, std::size_t feature_dim, Rng& rng);

struct StepRecord {
  std::size_t epoch = 0;  ///< 1-based
  std::size_t step = 0;   ///< 1-based, global
  std::size_t graphs = 0;
  std::size_t nodes = 0;
  LossBreakdown loss;
};

struct EpochSummary {
  std::size_t epoch = 0;
  double total = 0.0;
  double reconstruction = 0.0;
  double invariance = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<StepRecord> steps;
  std::vector<EpochSummary> epochs;  ///< step means per epoch
};

using StepCallback = std::function<void(const StepRecord&)>;

/// Seeded self-supervised training. Each epoch visits the graphs in a fresh
/// random order in chunks of batch_size; each step samples one mask per
/// graph, builds the configured objective, backpropagates and applies Adam.
/// With subgraph_nodes set, every graph of a step is replaced by a freshly
/// sampled induced subgraph of at most that many nodes.
TrainResult train(const GraphDataset& dataset, const TrainConfig& config,
                  const StepCallback& on_step = {});

/// Rejects config/dataset combinations that cannot train.
void check_compatible(const GraphDataset& dataset, const TrainConfig& config);

/// Number of optimizer steps train() performs.
std::size_t planned_steps(const GraphDataset& dataset, const TrainConfig& config);

}  // namespace lagraph
