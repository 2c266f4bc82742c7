#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lagraph/matrix.hpp"
#include "lagraph/rng.hpp"
#include "lagraph/sparse.hpp"

namespace lagraph {

using Edge = std::pair<std::size_t, std::size_t>;

/// Observed graph (A, X). The adjacency is binary, symmetric and has an
/// empty diagonal; self-loops are only added by normalize_adjacency.
struct Graph {
  std::shared_ptr<const SparseMatrix> adjacency;
  Matrix features;
  std::optional<std::size_t> label;
  std::vector<std::size_t> node_labels;

  std::size_t num_nodes() const { return adjacency ? adjacency->rows() : 0; }
  std::size_t feature_dim() const { return features.cols(); }
  std::size_t num_edges() const { return adjacency ? adjacency->nnz() / 2 : 0; }
  std::vector<std::size_t> degrees() const;
  std::vector<Edge> edges() const;  ///< each undirected edge once, u < v
};

/// Builds a graph from an undirected edge list. Duplicates and reversed
/// pairs collapse; self-loops are dropped.
Graph make_graph(std::size_t num_nodes, std::span<const Edge> edges, Matrix features,
                 std::optional<std::size_t> label = std::nullopt);

/// Checks the adjacency/feature invariants and throws std::invalid_argument.
void validate_graph(const Graph& g);

struct GraphDataset {
  std::vector<Graph> graphs;
  std::size_t num_classes = 0;
  std::size_t feature_dim = 0;
  std::string name;

  std::size_t size() const { return graphs.size(); }
  std::vector<std::size_t> labels() const;
  void validate() const;
};

/// Disjoint union of graphs with block-diagonal adjacency.
struct GraphBatch {
  std::shared_ptr<const SparseMatrix> adjacency;
  std::shared_ptr<const SparseMatrix> normalized;  ///< D̃^{-1/2}(A+I)D̃^{-1/2}
  Matrix features;
  std::vector<std::size_t> membership;  ///< graph index of every node
  std::vector<std::size_t> offsets;     ///< graph i owns rows [offsets[i], offsets[i+1])

  std::size_t num_graphs() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t num_nodes() const { return features.rows(); }
  std::size_t graph_size(std::size_t i) const { return offsets[i + 1] - offsets[i]; }
};

/// Row v is the one-hot of min(degree(v), threshold); threshold + 1 columns.
Matrix degree_onehot(const Graph& g, std::size_t threshold);

/// D̃^{-1/2}(A+I)D̃^{-1/2} with D̃ the degree matrix of A+I.
SparseMatrix normalize_adjacency(const SparseMatrix& a);

GraphBatch batch_graphs(std::span<const Graph> graphs);
GraphBatch batch_graphs(std::span<const Graph* const> graphs);

/// Induced subgraph on n distinct uniformly sampled nodes. When kept is
/// non-null it receives the parent index of every retained node, in order.
Graph sample_node_subset(const Graph& g, std::size_t n, Rng& rng,
                         std::vector<std::size_t>* kept = nullptr);

/// Induced subgraph on the given nodes, in the given order.
Graph induced_subgraph(const Graph& g, std::span<const std::size_t> nodes);

}  // namespace lagraph
