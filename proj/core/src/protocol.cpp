#include "lagraph/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lagraph {

using nlohmann::json;

json RunSummary::to_json() const {
  json runs_json = json::array();
  for (const auto& r : runs) runs_json.push_back(r.to_json());
  return {{"runs", runs_json},
          {"mean", mean},
          {"std", std},
          {"mean_within_run_std", mean_within_std},
          {"num_runs", runs.size()},
          {"warnings", warnings}};
}

RunSummary summarize_runs(std::vector<EvalReport> runs) {
  if (runs.empty()) throw std::invalid_argument("summarize_runs: no runs");
  RunSummary s;
  for (const auto& r : runs) {
    s.mean += r.mean;
    s.mean_within_std += r.std;
    for (const auto& w : r.warnings) {
      if (std::find(s.warnings.begin(), s.warnings.end(), w) == s.warnings.end()) s.warnings.push_back(w);
    }
  }
  const double n = static_cast<double>(runs.size());
  s.mean /= n;
  s.mean_within_std /= n;
  double ss = 0.0;
  for (const auto& r : runs) ss += (r.mean - s.mean) * (r.mean - s.mean);
  s.std = std::sqrt(ss / n);
  s.runs = std::move(runs);
  return s;
}

ProtocolRun graph_protocol_run(const GraphDataset& dataset, TrainConfig config,
                               const ProtocolOptions& options) {
  if (config.level != Level::graph) throw ConfigError("graph protocol needs a graph-level config");
  TrainResult trained = train(dataset, config);
  const Matrix reprs = extract_graph_repr(dataset, trained.model.encoder);
  const auto grid = default_c_grid();
  ProtocolRun run{linsvm_kfold(reprs, dataset.labels(), options.folds, grid, options.eval_seed),
                  std::move(trained.epochs)};
  run.report.hyperparameters["train_seed"] = config.seed;
  return run;
}

RunSummary graph_protocol(const GraphDataset& dataset, const TrainConfig& config,
                          const ProtocolOptions& options) {
  if (options.seeds < 1) throw std::invalid_argument("protocol: seeds must be >= 1");
  std::vector<EvalReport> runs;
  for (std::size_t r = 0; r < options.seeds; ++r) {
    TrainConfig c = config;
    c.seed = config.seed + r;
    runs.push_back(graph_protocol_run(dataset, c, options).report);
  }
  return summarize_runs(std::move(runs));
}

GraphDataset as_graph_dataset(const NodeDataset& dataset) {
  GraphDataset out;
  out.graphs.push_back(dataset.graph);
  out.feature_dim = dataset.graph.feature_dim();
  out.num_classes = dataset.num_classes;
  out.name = dataset.name;
  return out;
}

EvalReport node_linear_eval(const NodeDataset& dataset, Encoder& encoder,
                            const ProtocolOptions& options) {
  const Matrix reprs = extract_node_repr(dataset.graph, encoder, options.concat_raw);
  EvalReport report =
      logreg_evaluate(reprs, dataset.graph.node_labels, dataset.num_classes, dataset.split.train,
                      dataset.split.test, options.logreg, options.eval_seed, options.logreg_reps);
  report.hyperparameters["concat_raw"] = options.concat_raw;
  return report;
}

ProtocolRun node_protocol_run(const NodeDataset& dataset, TrainConfig config,
                              const ProtocolOptions& options) {
  if (config.level != Level::node) throw ConfigError("node protocol needs a node-level config");
  TrainResult trained = train(as_graph_dataset(dataset), config);
  ProtocolRun run{node_linear_eval(dataset, trained.model.encoder, options), std::move(trained.epochs)};
  run.report.hyperparameters["train_seed"] = config.seed;
  return run;
}

RunSummary node_protocol(const NodeDataset& dataset, const TrainConfig& config,
                         const ProtocolOptions& options) {
  if (options.seeds < 1) throw std::invalid_argument("protocol: seeds must be >= 1");
  std::vector<EvalReport> runs;
  for (std::size_t r = 0; r < options.seeds; ++r) {
    TrainConfig c = config;
    c.seed = config.seed + r;
    runs.push_back(node_protocol_run(dataset, c, options).report);
  }
  return summarize_runs(std::move(runs));
}

}  // namespace lagraph
