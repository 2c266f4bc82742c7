#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lagraph/config.hpp"

namespace lagraph::cli {

struct AblationOptions {
  std::string study;  ///< batch-size | subgraph | objective | concat
  TrainConfig config;
  std::filesystem::path dataset;
  std::size_t seeds = 1;
  std::size_t folds = 10;
  std::uint64_t eval_seed = 0;
  /// Grid override: batch sizes, or subgraph node counts (0 = whole graph).
  std::vector<std::size_t> sizes;
};

std::vector<std::size_t> default_batch_sizes();
/// 10, 100, 1000, ... below num_nodes, then 0 for the whole graph.
std::vector<std::size_t> default_subgraph_sizes(std::size_t num_nodes);

/// Runs every cell of the study grid and returns
/// {study, dataset, config, cells: [{setting, report}], summary}.
nlohmann::json run_ablation(const AblationOptions& options);

}  // namespace lagraph::cli
