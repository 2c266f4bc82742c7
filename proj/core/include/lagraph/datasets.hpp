#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagraph/graph.hpp"

namespace lagraph {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads `<name>_A.txt`, `<name>_graph_indicator.txt`, `<name>_graph_labels.txt`
/// and, when present, `<name>_node_labels.txt` from a TUDataset directory.
/// Node labels become one-hot features over the sorted set of observed labels.
/// Without node labels every graph gets degree one-hot features clamped at
/// degree_threshold (default: the maximum degree in the dataset).
GraphDataset parse_tudataset(const std::filesystem::path& directory, const std::string& name,
                             std::optional<std::size_t> degree_threshold = std::nullopt);

/// Replaces all node features with degree one-hots.
void apply_degree_features(GraphDataset& dataset, std::size_t threshold);

struct NodeSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

struct NodeDataset {
  Graph graph;  ///< node_labels filled
  NodeSplit split;
  std::size_t num_classes = 0;
  std::string name;
};

/// Node-level text format:
///   edges.tsv     one "u<TAB>v" pair per line, 0-indexed
///   features.csv  one comma-separated feature row per node
///   labels.txt    one integer class id per node
///   split.txt     three lines "train ...", "valid ...", "test ..." of node ids
NodeDataset parse_nodelevel(const std::filesystem::path& edge_file,
                            const std::filesystem::path& feature_file,
                            const std::filesystem::path& label_file,
                            const std::filesystem::path& split_file);
NodeDataset parse_nodelevel_dir(const std::filesystem::path& directory);
void write_nodelevel(const NodeDataset& dataset, const std::filesystem::path& directory);

struct SbmOptions {
  std::size_t num_nodes = 10000;
  std::size_t blocks = 2;
  double p_in = 0.002;
  double p_out = 0.0005;
  std::size_t feature_dim = 16;
  double mean_scale = 0.12;  ///< per-coordinate magnitude of the class means
  double noise_sd = 1.0;
  double train_fraction = 0.1;
  double valid_fraction = 0.1;
  std::uint64_t seed = 0;
};

/// Stochastic block model with contiguous equal-size blocks, Gaussian
/// class-conditional features around random +-mean_scale sign patterns, and
/// a random train/valid/test split.
NodeDataset generate_sbm(const SbmOptions& options);

/// Undirected Erdos-Renyi edge list on n nodes.
std::vector<Edge> erdos_renyi_edges(std::size_t n, double p, Rng& rng);

}  // namespace lagraph
