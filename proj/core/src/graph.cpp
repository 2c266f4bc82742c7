#include "lagraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lagraph {

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(num_nodes(), 0);
  for (std::size_t v = 0; v < deg.size(); ++v) deg[v] = adjacency->row_cols(v).size();
  return deg;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (std::size_t u = 0; u < num_nodes(); ++u)
    for (std::size_t v : adjacency->row_cols(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

Graph make_graph(std::size_t num_nodes, std::span<const Edge> edges, Matrix features,
                 std::optional<std::size_t> label) {
  if (features.rows() != num_nodes) {
    throw std::invalid_argument("graph has " + std::to_string(num_nodes) + " nodes but " +
                                std::to_string(features.rows()) + " feature rows");
  }
  std::vector<Triplet> t;
  t.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw std::out_of_range("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") references a node outside a " + std::to_string(num_nodes) +
                              "-node graph");
    }
    if (u == v) continue;
    t.push_back({u, v, 1.0});
    t.push_back({v, u, 1.0});
  }
  SparseMatrix a = SparseMatrix::from_triplets(num_nodes, num_nodes, std::move(t));
  // Collapse duplicates back to a binary matrix.
  std::vector<Triplet> binary;
  binary.reserve(a.nnz());
  for (std::size_t r = 0; r < num_nodes; ++r)
    for (std::size_t c : a.row_cols(r)) binary.push_back({r, c, 1.0});
  Graph g;
  g.adjacency = std::make_shared<const SparseMatrix>(
      SparseMatrix::from_triplets(num_nodes, num_nodes, std::move(binary)));
  g.features = std::move(features);
  g.label = label;
  return g;
}

void validate_graph(const Graph& g) {
  if (!g.adjacency) throw std::invalid_argument("graph without adjacency");
  const auto& a = *g.adjacency;
  if (a.rows() != a.cols()) throw std::invalid_argument("adjacency is not square");
  if (g.features.rows() != a.rows()) {
    throw std::invalid_argument("feature rows do not match node count");
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t i = 0; i < a.row_cols(r).size(); ++i) {
      if (a.row_cols(r)[i] == r) throw std::invalid_argument("adjacency stores a self-loop");
      if (a.row_values(r)[i] != 1.0) throw std::invalid_argument("adjacency is not binary");
    }
  }
  if (!a.is_symmetric()) throw std::invalid_argument("adjacency is not symmetric");
  if (!g.node_labels.empty() && g.node_labels.size() != a.rows()) {
    throw std::invalid_argument("node label count does not match node count");
  }
}

std::vector<std::size_t> GraphDataset::labels() const {
  std::vector<std::size_t> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) {
    if (!g.label) throw std::invalid_argument("dataset '" + name + "' has an unlabeled graph");
    out.push_back(*g.label);
  }
  return out;
}

void GraphDataset::validate() const {
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto& g = graphs[i];
    validate_graph(g);
    if (g.feature_dim() != feature_dim) {
      throw std::invalid_argument("graph " + std::to_string(i) + " has feature dim " +
                                  std::to_string(g.feature_dim()) + ", dataset declares " +
                                  std::to_string(feature_dim));
    }
    if (g.label && *g.label >= num_classes) {
      throw std::invalid_argument("graph " + std::to_string(i) + " label out of range");
    }
  }
}

Matrix degree_onehot(const Graph& g, std::size_t threshold) {
  if (threshold < 1) throw std::invalid_argument("degree threshold must be at least 1");
  Matrix out(g.num_nodes(), threshold + 1);
  const auto deg = g.degrees();
  for (std::size_t v = 0; v < deg.size(); ++v) out(v, std::min(deg[v], threshold)) = 1.0;
  return out;
}

SparseMatrix normalize_adjacency(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("normalize_adjacency: adjacency is not square");
  const std::size_t n = a.rows();
  std::vector<double> deg(n, 1.0);  // self-loop
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < a.row_cols(r).size(); ++i)
      if (a.row_cols(r)[i] != r) deg[r] += a.row_values(r)[i];
  std::vector<double> inv_sqrt(n);
  for (std::size_t r = 0; r < n; ++r) inv_sqrt[r] = 1.0 / std::sqrt(deg[r]);
  std::vector<Triplet> t;
  t.reserve(a.nnz() + n);
  for (std::size_t r = 0; r < n; ++r) {
    t.push_back({r, r, inv_sqrt[r] * inv_sqrt[r]});
    for (std::size_t i = 0; i < a.row_cols(r).size(); ++i) {
      const std::size_t c = a.row_cols(r)[i];
      if (c == r) continue;
      t.push_back({r, c, a.row_values(r)[i] * inv_sqrt[r] * inv_sqrt[c]});
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

GraphBatch batch_graphs(std::span<const Graph* const> graphs) {
  GraphBatch b;
  b.offsets.push_back(0);
  if (graphs.empty()) {
    b.adjacency = std::make_shared<const SparseMatrix>(0, 0);
    b.normalized = std::make_shared<const SparseMatrix>(0, 0);
    return b;
  }
  const std::size_t d = graphs.front()->feature_dim();
  std::size_t total = 0, nnz = 0;
  for (const Graph* g : graphs) {
    if (g->feature_dim() != d) {
      throw ShapeError("batch_graphs: mixed feature dims " + std::to_string(d) + " and " +
                       std::to_string(g->feature_dim()));
    }
    total += g->num_nodes();
    nnz += g->adjacency->nnz();
    b.offsets.push_back(total);
  }
  std::vector<Triplet> t;
  t.reserve(nnz);
  b.features = Matrix(total, d);
  b.membership.resize(total);
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = *graphs[gi];
    const std::size_t off = b.offsets[gi];
    for (std::size_t r = 0; r < g.num_nodes(); ++r) {
      b.membership[off + r] = gi;
      for (std::size_t c : g.adjacency->row_cols(r)) t.push_back({off + r, off + c, 1.0});
      auto src = g.features.row(r);
      std::copy(src.begin(), src.end(), b.features.row(off + r).begin());
    }
  }
  auto adj = SparseMatrix::from_triplets(total, total, std::move(t));
  b.normalized = std::make_shared<const SparseMatrix>(normalize_adjacency(adj));
  b.adjacency = std::make_shared<const SparseMatrix>(std::move(adj));
  return b;
}

GraphBatch batch_graphs(std::span<const Graph> graphs) {
  std::vector<const Graph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const auto& g : graphs) ptrs.push_back(&g);
  return batch_graphs(std::span<const Graph* const>(ptrs));
}

Graph induced_subgraph(const Graph& g, std::span<const std::size_t> nodes) {
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> position(n, n);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= n) throw std::out_of_range("induced_subgraph: node index out of range");
    if (position[nodes[i]] != n) throw std::invalid_argument("induced_subgraph: repeated node");
    position[nodes[i]] = i;
  }
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t c : g.adjacency->row_cols(nodes[i]))
      if (position[c] != n) t.push_back({i, position[c], 1.0});
  Graph sub;
  sub.adjacency = std::make_shared<const SparseMatrix>(
      SparseMatrix::from_triplets(nodes.size(), nodes.size(), std::move(t)));
  sub.features = select_rows(g.features, nodes);
  sub.label = g.label;
  if (!g.node_labels.empty()) {
    sub.node_labels.reserve(nodes.size());
    for (std::size_t v : nodes) sub.node_labels.push_back(g.node_labels[v]);
  }
  return sub;
}

Graph sample_node_subset(const Graph& g, std::size_t n, Rng& rng, std::vector<std::size_t>* kept) {
  if (n < 1 || n > g.num_nodes()) {
    throw std::invalid_argument("sample_node_subset: n=" + std::to_string(n) +
                                " outside [1, " + std::to_string(g.num_nodes()) + "]");
  }
  auto nodes = sample_without_replacement(g.num_nodes(), n, rng);
  std::sort(nodes.begin(), nodes.end());
  Graph sub = induced_subgraph(g, nodes);
  if (kept) *kept = std::move(nodes);
  return sub;
}

}  // namespace lagraph
