#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "lagraph/config.hpp"
#include "lagraph/datasets.hpp"
#include "lagraph/evaluation.hpp"
#include "lagraph/training.hpp"

namespace lagraph {

/// Scores of several independent runs of the linear protocol.
struct RunSummary {
  std::vector<EvalReport> runs;
  double mean = 0.0;            ///< mean of run means
  double std = 0.0;             ///< population std of run means
  double mean_within_std = 0.0; ///< average fold std inside a run
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

RunSummary summarize_runs(std::vector<EvalReport> runs);

struct ProtocolOptions {
  std::size_t seeds = 5;      ///< training runs, seeds config.seed + r
  std::size_t folds = 10;     ///< graph level
  std::uint64_t eval_seed = 0;
  bool concat_raw = true;     ///< node level
  LogRegOptions logreg;       ///< node level
  std::size_t logreg_reps = 1;
};

struct ProtocolRun {
  EvalReport report;
  std::vector<EpochSummary> epochs;
};

/// Trains with config (seed overridden) and scores layer-concatenated sum
/// readouts with k-fold linear SVM.
ProtocolRun graph_protocol_run(const GraphDataset& dataset, TrainConfig config,
                               const ProtocolOptions& options);
RunSummary graph_protocol(const GraphDataset& dataset, const TrainConfig& config,
                          const ProtocolOptions& options);

/// Trains on the node graph and scores logistic regression on its split.
ProtocolRun node_protocol_run(const NodeDataset& dataset, TrainConfig config,
                              const ProtocolOptions& options);
RunSummary node_protocol(const NodeDataset& dataset, const TrainConfig& config,
                         const ProtocolOptions& options);

/// Node-level representation scored with logistic regression on the split.
EvalReport node_linear_eval(const NodeDataset& dataset, Encoder& encoder,
                            const ProtocolOptions& options);

/// A node dataset seen as a one-graph training set.
GraphDataset as_graph_dataset(const NodeDataset& dataset);

}  // namespace lagraph
